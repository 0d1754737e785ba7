import pytest
import sympy as sp

from src.errors import GrammarError
from src.kernel.grammar import parse, parse_infix, parse_prefix, parse_univariate, serialize
from src.kernel.symbols import Phi, jet, r1, r2, symbolic_omega, w0, w1, x


def test_prefix_example():
    e = parse_prefix("(+ (* 2 w1) (exp (+ (* 1/2 r1_0) (* -1/2 r2_0))) (Phi r1_0 r2_0))")
    assert e == 2 * w1 + sp.exp(r1 / 2 - r2 / 2) + Phi(r1, r2)


@pytest.mark.parametrize("e", [
    2 * w1 + sp.exp(r1 / 2 - r2 / 2),
    sp.Rational(-3, 7) * w0 ** 2 * jet(1, 2),
    symbolic_omega(2) * x,
    sp.Derivative(Phi(r1, r2), r1),
    w0 ** -2,
])
def test_serialize_then_parse_is_identity(e):
    assert parse(serialize(e)) == e


def test_derivative_head():
    assert parse_prefix("(D (Phi r1_0 r2_0) r2_0 2)") == sp.Derivative(Phi(r1, r2), (r2, 2))
    with pytest.raises(GrammarError):
        parse_prefix("(D (Phi r1_0 r2_0) r2_0)")


@pytest.mark.parametrize("text", [
    "",
    "(+ w0",
    "(+ w0))",
    "(frobnicate w0)",
    "(^ w0 1/2)",
    "(+ w0 q7)",
])
def test_malformed_prefix(text):
    with pytest.raises(GrammarError):
        parse_prefix(text)


def test_infix_and_aliases():
    assert parse_infix("w0^2/2") == w0 ** 2 / 2
    assert parse_infix("omega0*omega1") == w0 * w1
    assert parse("exp(r1_0/2 - r2_0/2)*(r1_0 + r2_0)") == sp.exp(r1 / 2 - r2 / 2) * (r1 + r2)


def test_infix_starting_with_parenthesis():
    assert parse("(r1_0 + r2_0)*w0") == (r1 + r2) * w0


def test_infix_floats_become_rationals():
    assert parse_infix("0.5*w0") == w0 / 2


def test_infix_rejects_foreign_names():
    with pytest.raises(GrammarError):
        parse_infix("w0 + velocity")


@pytest.mark.parametrize("text,value", [
    ("tanh", sp.tanh(sp.Rational(1, 3))),
    ("identity", sp.Rational(1, 3)),
    ("u^3", sp.Rational(1, 27)),
    ("1 + u^2/2", sp.Rational(19, 18)),
])
def test_univariate(text, value):
    assert parse_univariate(text)(sp.Rational(1, 3)) == value


def test_univariate_rejects_other_variables():
    with pytest.raises(GrammarError):
        parse_univariate("u*w0")
