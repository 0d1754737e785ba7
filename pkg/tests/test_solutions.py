import json
import math

import numpy as np
import pytest
import sympy as sp

from src.errors import DegenerateSeed, NewtonDiverged
from src.kernel.symbols import r1, r2, w0
from src.models import solutions
from src.models.conservation import make_current_family1
from src.models.solutions import (GridSpec, KGSolution, SolutionFamily, conservation_residual,
                                  convergence_study, make_regular, make_singular, make_ultra,
                                  observed_order, pde_residual, sample_on_grid, write_grid_csv,
                                  write_sidecar)

REGULAR_SEED = sp.exp(r1 - r2 / 4)


def test_klein_gordon_seed_terms():
    kg = KGSolution.from_expression(REGULAR_SEED)
    assert kg.terms == ((1, 1, sp.Rational(-1, 4)),)
    assert kg.satisfies_klein_gordon()
    assert kg.is_nondegenerate()
    with pytest.raises(ValueError):
        KGSolution(((1, 1, 1),))


@pytest.mark.parametrize("Psi", [
    sp.exp((r1 - r2) / 2),
    sp.exp((r2 - r1) / 2),
    (r1 + r2) * sp.exp((r1 - r2) / 2),
    r1 * r2,
], ids=str)
def test_degenerate_seeds_are_rejected(Psi):
    with pytest.raises(DegenerateSeed):
        make_regular(Psi)


def test_regular_maps():
    t_map, x_map = make_regular(REGULAR_SEED).maps()
    assert sp.simplify(t_map + sp.Rational(3, 4) * sp.exp(r1 / 2 + r2 / 4)) == 0


def test_regular_solution_matches_closed_form():
    solution = make_regular(REGULAR_SEED)
    f = sample_on_grid(solution, GridSpec.square(solution, 21))
    T, X = f.mesh()
    expected = 4 * np.log(-4 * T / 3) - 3 - X / T
    assert np.max(np.abs(f.r1 - expected)) < 1e-8
    assert np.max(np.abs(f.r1 + f.r2 - (X / T + 3))) < 1e-8
    assert f.certificate["max_implicit_residual"] < 1e-10
    assert f.certificate["min_r1x_r2x"] > 0
    assert f.certificate["max_neighbour_jump"] <= solutions.BRANCH_JUMP_FACTOR * f.dx


def test_loose_newton_tolerance_fails_the_certificate(monkeypatch):
    monkeypatch.setattr(solutions, "NEWTON_TOLERANCE", 1e-2)
    solution = make_regular(REGULAR_SEED)
    with pytest.raises(NewtonDiverged) as error:
        sample_on_grid(solution, GridSpec.square(solution, 21))
    assert error.value.node is not None
    assert "Implicit residual" in str(error.value)


def test_branch_jump_above_limit_is_a_failure(monkeypatch):
    monkeypatch.setattr(solutions, "BRANCH_JUMP_FACTOR", 0.5)
    solution = make_regular(REGULAR_SEED)
    with pytest.raises(NewtonDiverged) as error:
        sample_on_grid(solution, GridSpec.square(solution, 21))
    assert len(error.value.node) == 2
    assert "Branch jump" in str(error.value)


def test_singular_solution_matches_closed_form():
    solution = make_singular("r2", c=0, Theta="exp")
    f = sample_on_grid(solution, GridSpec.square(solution, 21))
    T, X = f.mesh()
    assert np.allclose(f.r1, (X - 1) / T - 1)
    assert np.all(f.r2 == 0)


def test_singular_side_is_checked():
    with pytest.raises(ValueError):
        make_singular("r3")


def test_ultra_singular_solution():
    solution = make_ultra()
    f = sample_on_grid(solution, GridSpec.square(solution, 21))
    T, X = f.mesh()
    assert np.allclose(f.r1, 0.3)
    assert np.allclose(f.r3, np.tanh(X - 0.5 * T))
    norms = pde_residual(f)
    assert norms.max[0] == 0 and norms.max[1] == 0
    assert norms.max[2] < 1e-2


def test_conservation_residual_on_ultra():
    solution = make_ultra()
    f = sample_on_grid(solution, GridSpec.square(solution, 41))
    assert conservation_residual(f, make_current_family1(w0, verify=False)).worst() < 1e-2


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec((0.0, 1.0), (0.0, 1.0), 3, 3)
    with pytest.raises(ValueError):
        GridSpec((1.0, 0.0), (0.0, 1.0))


def test_observed_order():
    assert observed_order(4e-3, 1e-3) == pytest.approx(2.0)
    assert observed_order(1e-14, 1e-15) is None
    assert observed_order(1e-3, 0.0) == math.inf


@pytest.mark.slow
@pytest.mark.parametrize("family", list(SolutionFamily), ids=lambda f: f.value)
def test_second_order_convergence(family):
    solution = {
        SolutionFamily.REGULAR: lambda: make_regular(REGULAR_SEED),
        SolutionFamily.SINGULAR_R1: lambda: make_singular("r1"),
        SolutionFamily.SINGULAR_R2: lambda: make_singular("r2"),
        SolutionFamily.ULTRA: make_ultra,
    }[family]()
    study = convergence_study(solution, sizes=(41, 81, 161))
    for name, orders in study.orders().items():
        for order in orders:
            assert order is None or abs(order - 2) <= 0.3, name


def test_csv_and_sidecar(tmp_path):
    solution = make_ultra()
    f = sample_on_grid(solution, GridSpec.square(solution, 6))
    csv_path = write_grid_csv(f, tmp_path / "ultra.csv")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,x,r1,r2,r3"
    assert len(lines) == 1 + 36
    sidecar = write_sidecar(tmp_path / "ultra.json", solution, f)
    data = json.loads(sidecar.read_text())
    assert data["family"] == "ultra"
    assert data["grid"]["nt"] == 6
    assert data["convergence"] is None
