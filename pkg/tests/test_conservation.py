import pytest
import sympy as sp

from src.errors import ConstraintViolated
from src.kernel.expression import equals
from src.kernel.symbols import r1, r2, symbolic_omega, symbolic_phi, w0, w1
from src.models.conservation import (act_symmetry_on_current, characteristic_pairs,
                                     check_physical_law, cosymmetry_samples, equivalent_currents,
                                     generating_currents, invariant_currents, is_conserved_current,
                                     is_cosymmetry, is_tx_invariant, kg_counterpart_current,
                                     make_cosymmetry_family1, make_cosymmetry_family2,
                                     make_current_family1, make_current_family2,
                                     make_current_family2_potential,
                                     make_current_family3, omega_tail_sums, order_of,
                                     physical_laws, verify_characteristic_identity)
from src.models.fields import ConservedCurrent
from src.models.symmetry import make_D, make_G2, make_W
from src.models.system import GammaKind, GammaSpec

HALF = sp.exp((r1 - r2) / 2)


@pytest.mark.parametrize("index", range(12))
def test_cosymmetry_samples(index, rng):
    lam = cosymmetry_samples()[index]
    assert is_cosymmetry(lam, rng=rng).passed, lam.label


def test_family2_needs_klein_gordon_seed():
    with pytest.raises(ConstraintViolated):
        make_cosymmetry_family2(r1 ** 2)


@pytest.mark.parametrize("Omega", [sp.S.One, w0, w0 ** 2 * w1, symbolic_omega(2)])
def test_family1_currents(Omega, rng):
    assert is_conserved_current(make_current_family1(Omega, verify=False), rng=rng).passed


@pytest.mark.parametrize("Phi", [HALF, sp.exp(r1 - r2 / 4), symbolic_phi()])
def test_family2_currents(Phi, rng):
    assert is_conserved_current(make_current_family2(Phi, verify=False), rng=rng).passed
    assert is_conserved_current(make_current_family2_potential(Phi, verify=False), rng=rng).passed


@pytest.mark.parametrize("current", generating_currents() + [kg_counterpart_current()]
                         + invariant_currents(), ids=lambda c: c.label)
def test_named_currents(current, rng):
    assert is_conserved_current(current, rng=rng).passed


def test_broken_current_fails(rng):
    assert not is_conserved_current(ConservedCurrent(r1, r2, "bogus"), rng=rng).passed


def test_invariant_currents_are_free_of_t_and_x():
    assert all(is_tx_invariant(c) for c in invariant_currents())
    assert not is_tx_invariant(kg_counterpart_current())
    assert [order_of(c) for c in invariant_currents()] == [1, 2, 2, 2]


@pytest.mark.parametrize("index", range(8))
def test_characteristics(index, rng):
    current, lam, multiplier = characteristic_pairs()[index]
    assert verify_characteristic_identity(current, lam, multiplier, rng=rng).passed


def test_symmetries_map_currents_to_currents(rng):
    current = make_current_family1(w0, verify=False)
    for eta in (make_D(), make_G2(), make_W(w0 ** 2)):
        assert is_conserved_current(act_symmetry_on_current(eta, current), rng=rng).passed


def test_kg_counterpart_is_equivalent_to_a_generating_current(rng):
    equivalence = equivalent_currents(kg_counterpart_current(), generating_currents()[1], rng)
    assert equivalence.equivalent
    assert equivalence.ratio == 2


def test_first_and_second_families_intersect(rng):
    first = make_current_family1(1, verify=False)
    second = make_current_family2(-HALF, verify=False)
    assert equals(second.density, -2 * first.density, rng)
    equivalence = equivalent_currents(first, second, rng)
    assert equivalence.equivalent
    assert equivalence.ratio == sp.Rational(-1, 2)
    assert make_cosymmetry_family1(1).equals(make_cosymmetry_family2(-HALF), rng)


def test_scaled_current_is_equivalent(rng):
    current = make_current_family1(w0 * w1, verify=False)
    equivalence = equivalent_currents(current.scale(3), current, rng)
    assert equivalence.equivalent
    assert equivalence.ratio == 3


def test_omega_tail_sums():
    S, X = omega_tail_sums(w0 * w1)
    assert S == w0 * w1
    assert X == 0


@pytest.mark.parametrize("index", range(5))
def test_physical_laws(index):
    law = physical_laws(verify=False)[index]
    assert check_physical_law(law).passed, law.name


@pytest.mark.parametrize("spec", [GammaSpec(GammaKind.J_POWER, 0), GammaSpec(GammaKind.J_POWER, 1),
                                  GammaSpec(GammaKind.DZ_THEN_J, 0, 1)], ids=str)
def test_family3_currents(spec, rng):
    assert is_conserved_current(make_current_family3(spec, verify=False), rng=rng).passed
