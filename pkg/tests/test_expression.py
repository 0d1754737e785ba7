import math

import pytest
import sympy as sp

from src.errors import Inconclusive, SingularEvaluation, UnsupportedForm
from src.kernel.expression import (compare, configure_numeric, diff_partial, equals, eval_numeric,
                                   is_zero, normalize, reduce_rules, zero_test)
from src.kernel.symbols import Phi, r1, r1x, r2, symbolic_omega, symbolic_phi, w0, w1


def test_normalize_merges_exponentials():
    e = sp.exp(r1 / 2) * sp.exp(-r2 / 2) * w0
    assert normalize(e) == w0 * sp.exp(r1 / 2 - r2 / 2)


def test_normalize_is_canonical_for_equal_inputs():
    first = (r1 + r2) ** 2 * sp.exp(r1 - r2)
    second = sp.exp(r1) * (r1 ** 2 + 2 * r1 * r2 + r2 ** 2) * sp.exp(-r2)
    assert normalize(first) == normalize(second)


@pytest.mark.parametrize("e", [
    sp.Float(1.5) * r1,
    sp.sqrt(w0),
    sp.exp(r1 * r2),
    sp.exp(w0),
    sp.tanh(w0),
])
def test_normalize_rejects_expressions_outside_the_class(e):
    with pytest.raises(UnsupportedForm):
        normalize(e)


def test_klein_gordon_rule_reduces_mixed_derivatives():
    phi = symbolic_phi()
    assert reduce_rules(sp.Derivative(phi, r1, r2)) == -phi / 4
    assert reduce_rules(sp.Derivative(phi, (r1, 2), (r2, 3))) == \
        sp.Rational(1, 16) * sp.Derivative(phi, r2)


def test_diff_partial_applies_rules():
    phi = Phi(r1, r2)
    assert normalize(diff_partial(diff_partial(phi, r1), r2) + phi / 4) == 0


def test_zero_test_symbolic_verdict_is_deterministic():
    verdict = zero_test((r1 + r2) ** 2 - r1 ** 2 - 2 * r1 * r2 - r2 ** 2)
    assert verdict.holds
    assert not verdict.probabilistic


def test_zero_test_with_function_symbols():
    Omega = symbolic_omega(1)
    assert is_zero(Omega * w1 - w1 * Omega)
    assert not is_zero(Omega - w0)


def test_zero_test_falls_back_to_sampling(rng):
    identity = sp.tanh(w0) ** 2 + 1 / sp.cosh(w0) ** 2 - 1
    verdict = zero_test(identity, rng)
    assert verdict.holds
    assert verdict.probabilistic
    assert not zero_test(sp.tanh(w0) - w0, rng).holds


def test_compare_and_equals(rng):
    assert equals(sp.exp(r1) * sp.exp(-r2), sp.exp(r1 - r2), rng)
    assert not compare(r1, r2, rng)


def test_configure_numeric_validates():
    with pytest.raises(ValueError):
        configure_numeric(points=0)
    with pytest.raises(ValueError):
        configure_numeric(tolerance=-1.0)


def test_eval_numeric():
    assert eval_numeric(r1 * w0 + 1, {r1: 2.0, w0: 3.0}) == pytest.approx(7.0)
    with pytest.raises(ValueError):
        eval_numeric(r1 * w0, {r1: 2.0})
    with pytest.raises(Inconclusive):
        eval_numeric(Phi(r1, r2), {r1: 0.1, r2: 0.2})
    with pytest.raises(SingularEvaluation):
        eval_numeric(1 / w0, {w0: 0.0})


ATOMS = (r1, r2, r1x, w0, w1)
EXPONENT_COEFFICIENTS = (-1, sp.Rational(-1, 2), 0, sp.Rational(1, 2), 1)
MAX_DEPTH = 8


def random_expression(rng, depth=0):
    """Random tree of sums, products and squares over atoms, positive rationals and exponentials."""
    if depth >= MAX_DEPTH or rng.random() < 0.25 + 0.1 * depth:
        kind = int(rng.integers(0, 3))
        if kind == 0:
            return ATOMS[int(rng.integers(0, len(ATOMS)))]
        if kind == 1:
            return sp.Rational(int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        a, b = (EXPONENT_COEFFICIENTS[int(k)] for k in rng.integers(0, 5, size=2))
        return sp.exp(a * r1 + b * r2)
    operation = int(rng.integers(0, 3))
    left = random_expression(rng, depth + 1)
    if operation == 2:
        return sp.Pow(left, 2, evaluate=False)
    right = random_expression(rng, depth + 1)
    if operation == 0:
        return sp.Add(left, right, evaluate=False)
    return sp.Mul(left, right, evaluate=False)


def random_point(rng):
    return {atom: float(v) for atom, v in zip(ATOMS, rng.uniform(0.2, 1.2, len(ATOMS)))}


@pytest.mark.slow
def test_normalize_properties_on_random_expressions(rng):
    for _ in range(1000):
        e = random_expression(rng)
        normal = normalize(e)
        assert normalize(normal) == normal
        point = random_point(rng)
        assert eval_numeric(normal, point) == pytest.approx(eval_numeric(e, point), rel=1e-10)


@pytest.mark.slow
def test_partial_derivatives_commute_on_random_expressions(rng):
    for _ in range(200):
        e = random_expression(rng)
        first, second = (ATOMS[int(k)] for k in rng.choice(len(ATOMS), size=2, replace=False))
        assert normalize(diff_partial(diff_partial(e, first), second)
                         - diff_partial(diff_partial(e, second), first)) == 0


@pytest.mark.slow
def test_diff_partial_is_linear_on_random_expressions(rng):
    for _ in range(200):
        e1, e2 = random_expression(rng), random_expression(rng)
        a = sp.Rational(int(rng.integers(-7, 8)), int(rng.integers(1, 5)))
        b = sp.Rational(int(rng.integers(-7, 8)), int(rng.integers(1, 5)))
        v = ATOMS[int(rng.integers(0, len(ATOMS)))]
        assert normalize(diff_partial(a * e1 + b * e2, v)
                         - a * diff_partial(e1, v) - b * diff_partial(e2, v)) == 0


def test_partial_derivatives_commute_with_function_symbols():
    e = Phi(r1, r2) * w0 ** 2 + symbolic_omega(1) * r1x
    assert normalize(diff_partial(diff_partial(e, r1), w0)
                     - diff_partial(diff_partial(e, w0), r1)) == 0


def test_eval_numeric_with_instantiation():
    a, b = sp.symbols("a b")
    e = symbolic_phi() + 2 * sp.diff(symbolic_phi(), r1)
    value = eval_numeric(e, {r1: 0.25, r2: 0.5}, {Phi: sp.Lambda((a, b), sp.exp(a - b / 4))})
    assert value == pytest.approx(3 * math.exp(0.125), rel=1e-12)
    assert value == pytest.approx(3.39944535920048, rel=1e-12)


def test_numeric_fallback_rejects_a_small_perturbation(rng):
    identity = sp.tanh(w0) ** 2 + 1 / sp.cosh(w0) ** 2
    assert zero_test(identity - 1, rng).holds
    verdict = compare(identity, 1 + sp.Rational(1, 1000) * r1x, rng)
    assert not verdict.holds
    assert verdict.probabilistic
