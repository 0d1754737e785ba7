import pytest
import sympy as sp

from src.errors import ConstraintViolated
from src.kernel.expression import equals
from src.kernel.symbols import AtomKind, atom_info, r1, r2, symbolic_omega, symbolic_phi, w0, w1
from src.models.fields import EvolutionaryField
from src.models.symmetry import (SymmetryClass, classify, is_symmetry, lie_bracket,
                                 lie_point_fields, lie_point_identities, make_D, make_G1,
                                 make_G2, make_P, make_R, make_W, omega_bracket, symmetry_samples)
from src.models.system import GammaKind, GammaSpec

HALF = sp.exp((r1 - r2) / 2)


@pytest.mark.parametrize("name", ["D", "G1", "G2", "time_translation", "space_translation",
                                  "W(r3)"])
def test_lie_point_fields_are_symmetries(name, rng):
    assert is_symmetry(lie_point_fields()[name], rng=rng).passed


@pytest.mark.parametrize("Omega", [sp.S.One, w0 ** 2, w0 * w1, symbolic_omega(1)])
def test_omega_family(Omega, rng):
    assert is_symmetry(make_W(Omega), rng=rng).passed


@pytest.mark.parametrize("Phi", [HALF, (r1 + r2) * HALF, sp.exp(r1 - r2 / 4), symbolic_phi()])
def test_klein_gordon_family(Phi, rng):
    assert is_symmetry(make_P(Phi), rng=rng).passed


def test_klein_gordon_seed_is_required():
    with pytest.raises(ConstraintViolated):
        make_P(r1 * r2)


@pytest.mark.parametrize("spec", [
    GammaSpec(GammaKind.J_POWER, 0),
    GammaSpec(GammaKind.J_POWER, 1),
    GammaSpec(GammaKind.DY_THEN_J, 0, 1),
    GammaSpec(GammaKind.DZ_THEN_J, 1, 1),
    "(J+1/2)Dy",
])
def test_word_family(spec, rng):
    assert is_symmetry(make_R(spec), rng=rng).passed


def test_non_symmetry_fails(rng):
    result = is_symmetry(EvolutionaryField((r1, 0, 0), "bogus"), rng=rng)
    assert not result.passed
    assert result.residuals


@pytest.mark.parametrize("index", range(5))
def test_point_symmetry_identities(index, rng):
    description, left, right = lie_point_identities()[index]
    assert left.equals(right, rng), description


def test_brackets_close(rng):
    bracket = lie_bracket(make_G2(), make_D())
    assert is_symmetry(bracket, rng=rng).passed
    assert lie_bracket(make_G1(), make_G1()).is_zero(rng)


def test_bracket_satisfies_jacobi_identity(rng):
    A, B, C = make_D(), make_W(w0), make_P(sp.exp(r1 - r2 / 4))
    cyclic = (lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A))
              + lie_bracket(C, lie_bracket(A, B)))
    assert cyclic.is_zero(rng)


def _depends_on_omega_or_r3(e) -> bool:
    for s in sp.sympify(e).free_symbols:
        info = atom_info(s)
        if info is not None and (info.kind == AtomKind.OMEGA
                                 or (info.kind == AtomKind.JET and info.component == 3)):
            return True
    return False


@pytest.mark.slow
def test_first_two_components_are_free_of_omega():
    fields = symmetry_samples() + list(lie_point_fields().values())
    for eta in fields:
        assert not _depends_on_omega_or_r3(eta[0]), eta.label
        assert not _depends_on_omega_or_r3(eta[1]), eta.label


def test_omega_bracket_matches_field_bracket(rng):
    first, second = w0, w0 * w1
    bracket = lie_bracket(make_W(first), make_W(second))
    assert bracket.equals(make_W(omega_bracket(first, second)), rng)
    assert equals(omega_bracket(w0, w0), 0)


@pytest.mark.parametrize("eta,expected", [
    (make_W(w0 * w1), SymmetryClass.IN_I2),
    (make_P(sp.exp(r1 - r2 / 4)), SymmetryClass.IN_I1),
    (make_P(1 / HALF), SymmetryClass.IN_INTERSECTION),
    (make_D(), SymmetryClass.OUTSIDE),
])
def test_classify(eta, expected, rng):
    assert classify(eta, rng) == expected
