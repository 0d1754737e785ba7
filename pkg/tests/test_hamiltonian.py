import pytest
import sympy as sp

from src.errors import ConstraintViolated, DegenerateMetric
from src.kernel.expression import equals
from src.kernel.symbols import r1, r2, symbolic_theta, w0, w1
from src.models.conservation import cosymmetry_samples, make_cosymmetry_family2
from src.models.fields import Cosymmetry
from src.models.hamiltonian import (casimir_antiderivative, casimir_check, compatibility_check,
                                    density_grid, hamiltonian_form_check, homomorphism_check,
                                    image_identities, is_skew_adjoint, is_flat, make_H,
                                    make_hamiltonian_symmetry_W, metric_of, nijenhuis_tensor,
                                    noether_check, xi_condition)
from src.models.report import CheckResult
from src.models.symmetry import is_symmetry

THETAS = [sp.S.One, w0 ** -2, symbolic_theta()]


@pytest.mark.parametrize("Theta", THETAS + [sp.S.Zero], ids=str)
def test_skew_adjoint(Theta, rng):
    assert is_skew_adjoint(make_H(Theta), rng)


def test_theta_must_depend_on_w0_only():
    with pytest.raises(ConstraintViolated):
        make_H(r1 * w0)


@pytest.mark.parametrize("Theta", [sp.S.One, symbolic_theta()], ids=str)
def test_noether_property(Theta, rng):
    assert noether_check(make_H(Theta), cosymmetry_samples()[:9], rng).passed


@pytest.mark.parametrize("Theta", THETAS, ids=str)
def test_metric_is_flat(Theta, rng):
    assert is_flat(metric_of(make_H(Theta)), rng)


def test_zero_theta_has_no_metric():
    with pytest.raises(DegenerateMetric):
        metric_of(make_H(0))


def test_nijenhuis_tensor_of_a_synthetic_ratio():
    f = sp.exp(r1)
    tensor = nijenhuis_tensor(sp.diag(1, 1, f))
    for index, value in tensor.items():
        expected = f * (1 - f) if index == (2, 0, 2) else 0
        assert sp.expand(value - expected) == 0, index


def test_compatibility(rng):
    result = compatibility_check(sp.S.One, w0 ** 2, rng)
    assert result.passed
    assert result.details["ratio"][2] == "w0**2"


@pytest.mark.parametrize("Theta,c0,Xi", density_grid(), ids=str)
def test_hamiltonian_form(Theta, c0, Xi, rng):
    assert xi_condition(Theta, c0, Xi) == 0
    assert hamiltonian_form_check(Theta, c0, Xi, rng).passed


def test_hamiltonian_form_rejects_bad_xi(rng):
    with pytest.raises(ConstraintViolated) as raised:
        hamiltonian_form_check(sp.S.One, sp.S.One, sp.S.Zero, rng)
    assert isinstance(raised.value.report, CheckResult)


def test_casimir_antiderivative():
    assert equals(casimir_antiderivative(sp.S.One), w0)
    assert equals(casimir_antiderivative(w0 ** -2), w0 ** 2 / 2)


@pytest.mark.parametrize("Theta", [sp.S.One, w0 ** -2, sp.S.Zero], ids=str)
def test_casimirs(Theta, rng):
    assert casimir_check(Theta, rng).passed


def test_non_casimir_has_nonzero_image(rng):
    E = sp.exp(r1 - r2)
    image = make_H(1).apply(Cosymmetry((E * w0, -E * w0, 0), "non_casimir"))
    assert not image.is_zero(rng)


@pytest.mark.parametrize("index", range(8))
def test_images_of_cosymmetry_families(index, rng):
    description, image, expected = image_identities(sp.S.One)[index]
    assert image.equals(expected, rng), description


def test_homomorphism_on_commuting_cosymmetries(rng):
    first = make_cosymmetry_family2(sp.exp((r1 - r2) / 2))
    second = make_cosymmetry_family2(sp.exp(r1 - r2 / 4))
    assert homomorphism_check(first, second, sp.S.One, rng).passed


@pytest.mark.parametrize("Omega", [w0, w0 * w1], ids=str)
def test_hamiltonian_symmetries(Omega, rng):
    eta = make_hamiltonian_symmetry_W(symbolic_theta(), Omega)
    assert is_symmetry(eta, rng=rng).passed
