import pytest
import sympy as sp

from src.errors import GrammarError
from src.kernel.symbols import r1, r2, t, w0, w1
from src.models import solutions
from src.models.recursion import (KleinGordonRecursion, NonlocalRecursion, OmegaRecursion,
                                  R4Convention, action_table_cases, apply_R4, check_action,
                                  klein_gordon_action_cases, make_R1, make_R3, maps_into_symmetries,
                                  omega_action_cases, parse_field, parse_recursion,
                                  potential_residuals, r4_determining_check, teshukov,
                                  teshukov_action_cases, teshukov_decomposition_check)
from src.models.symmetry import is_symmetry, make_D, make_G1, make_G2, make_P, make_W


@pytest.mark.parametrize("case", teshukov_action_cases() + omega_action_cases(),
                         ids=lambda case: case.name)
def test_action_tables(case, rng):
    assert check_action(case, rng).passed


@pytest.mark.parametrize("case", klein_gordon_action_cases(0), ids=lambda case: case.name)
def test_klein_gordon_action_table_for_the_empty_word(case, rng):
    assert check_action(case, rng).passed


@pytest.mark.slow
@pytest.mark.parametrize("case", klein_gordon_action_cases(1), ids=lambda case: case.name)
def test_klein_gordon_action_table_for_single_letters(case, rng):
    assert check_action(case, rng).passed


def test_action_table_size():
    assert len(action_table_cases(1)) == 4 + 4 * 2 * 4 + 3 * 4


def test_teshukov_decomposition(rng):
    assert teshukov_decomposition_check(rng=rng).passed


@pytest.mark.parametrize("R", [teshukov(), make_R1(), make_R3(((w0, 0), (1, 1)))],
                         ids=lambda R: R.label)
def test_images_are_symmetries(R, rng):
    samples = [make_D(), make_W(w0 * w1), make_P(sp.exp(r1 - r2 / 4))]
    assert maps_into_symmetries(R, samples, rng).passed


def test_klein_gordon_recursion_side():
    with pytest.raises(ValueError):
        KleinGordonRecursion(3)


def test_omega_recursion_powers():
    with pytest.raises(ValueError):
        OmegaRecursion(((1, -1),))
    assert make_R3(((w0, 0), (1, 1))).apply_P(w0) == w0 ** 2 + w1


def test_G2_potential():
    assert all(residual == 0 for residual in potential_residuals(make_G2(), -2 * t))


@pytest.mark.parametrize("convention,holds", [
    (R4Convention.HALF_B, True),
    (R4Convention.DOUBLE_C, True),
    (R4Convention.PRINTED, False),
    (R4Convention.NEG_Y, False),
])
def test_R4_on_G2(convention, holds, rng):
    image = NonlocalRecursion(convention).apply(make_G2(), -2 * t)
    assert is_symmetry(image, rng=rng).passed == holds


def test_R4_half_b_image_of_G2(rng):
    image = NonlocalRecursion(R4Convention.HALF_B).apply(make_G2(), -2 * t)
    assert image.equals(make_G1().scale(-2) - make_G2(), rng)


def test_R4_needs_a_potential():
    with pytest.raises(ValueError):
        NonlocalRecursion().apply(make_G2())


@pytest.mark.parametrize("convention,holds", [
    (R4Convention.HALF_B, True),
    (R4Convention.DOUBLE_C, True),
    (R4Convention.PRINTED, False),
    (R4Convention.NEG_Y, False),
])
def test_R4_determining_system(convention, holds, rng):
    result = r4_determining_check(convention, rng)
    assert result.passed == holds
    assert bool(result.details["nonzero"]) != holds


@pytest.mark.slow
def test_R4_on_a_sampled_solution():
    solution = solutions.make_regular(sp.exp(r1 - r2 / 4))
    grid = solutions.sample_on_grid(solution, solutions.GridSpec.square(solution, 41))
    assert apply_R4(make_G2(), grid, R4Convention.HALF_B).passed
    assert not apply_R4(make_G2(), grid, R4Convention.PRINTED).passed


@pytest.mark.parametrize("text,label", [
    ("T", "R_T"),
    ("R1:J", "R1[J^1]"),
    ("R2:", "R2[1]"),
    ("R4:neg_y", "R4[neg_y]"),
])
def test_parse_recursion(text, label):
    assert parse_recursion(text).label == label


def test_parse_omega_recursion():
    R = parse_recursion("R3:w0;1")
    assert R.coefficients == ((w0, 0), (1, 1))


@pytest.mark.parametrize("text", ["R5", "R4:sideways"])
def test_parse_recursion_errors(text):
    with pytest.raises(GrammarError):
        parse_recursion(text)


@pytest.mark.parametrize("text,label", [
    ("D", "D"),
    ("G1", "G1"),
    ("W(w0*w1)", "W(w0*w1)"),
    ("R(J)", "R(J^1)"),
])
def test_parse_field(text, label):
    assert parse_field(text).label == label


def test_parse_field_errors():
    with pytest.raises(GrammarError):
        parse_field("Z(w0)")
