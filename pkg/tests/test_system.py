import numpy as np
import pytest
import sympy as sp

from src.errors import BudgetExceeded, DegenerateJet, DomainError, GrammarError
from src.kernel.expression import equals
from src.kernel.symbols import r1, r2, t, x
from src.models.system import (DRIFT_FLUX, GammaKind, GammaSpec, OperatorWord, PointMap,
                               characteristic_velocities, physical_from_riemann, q_tilde,
                               riemann_from_physical, semi_hamiltonian_check, tilde_Dz,
                               transform_T, word)


def test_characteristic_velocities():
    s = r1 + r2
    assert characteristic_velocities() == (s + 1, s - 1, s)


def test_drift_flux_is_semi_hamiltonian():
    assert semi_hamiltonian_check()
    assert DRIFT_FLUX.semi_hamiltonian_check().holds


def test_physical_round_trip():
    first, second, third = riemann_from_physical(0.3, 1.0, 2.0)
    u, rho1, rho2 = physical_from_riemann(first, second, third)
    assert float(u) == pytest.approx(0.3)
    assert float(rho1) == pytest.approx(1.0)
    assert float(rho2) == pytest.approx(2.0)


def test_physical_domain():
    with pytest.raises(DomainError):
        riemann_from_physical(0.0, -1.0, 0.5)
    with pytest.raises(DomainError):
        riemann_from_physical(0.0, 0.0, 1.0)


def test_symbolic_physical_map():
    u, rho1, rho2 = sp.symbols("u rho1 rho2", positive=True)
    first, second, third = riemann_from_physical(u, rho1, rho2)
    assert sp.simplify(first + second - u) == 0
    assert third == rho2 / rho1


def test_point_map_round_trip():
    point = (0.4, -0.2, 0.7, 0.1, 1.5)
    back = PointMap.inverse(PointMap.forward(point))
    assert np.allclose([float(v) for v in back], point)


def test_transform_needs_nondegenerate_jets():
    with pytest.raises(DegenerateJet):
        transform_T((0.0, 0.0, 0.1, 0.2, 0.3), jets=(1.0, 0.0))


def test_tilde_Dz_of_q():
    expected = sp.exp((r1 - r2) / 2) * (x - (r1 + r2 - 1) * t)
    assert equals(tilde_Dz(q_tilde()), expected)


def test_word_text_and_order():
    parsed = OperatorWord.parse("(J+1/2)^2Dy")
    assert parsed.order == 3
    assert parsed.text() == "(J+1/2)^2Dy^1"
    assert parsed == word(("J", 2, sp.Rational(1, 2)), ("Dy", 1))


def test_empty_word_is_identity():
    identity = OperatorWord.parse("")
    assert identity.order == 0
    assert identity.apply(q_tilde()) == q_tilde()


def test_word_budget_and_syntax():
    with pytest.raises(BudgetExceeded):
        OperatorWord.parse("J^6")
    assert OperatorWord.parse("J^6", budget=6).order == 6
    with pytest.raises(GrammarError):
        OperatorWord.parse("Q^2")


def test_gamma_spec_validation():
    assert GammaSpec(GammaKind.DY_THEN_J, 1, 2).to_word().text() == "Dy^2J^1"
    with pytest.raises(ValueError):
        GammaSpec(GammaKind.J_POWER, 1, 1)
    with pytest.raises(ValueError):
        GammaSpec(GammaKind.DZ_THEN_J, 1, 0)
