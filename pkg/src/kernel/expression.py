"""
Normal forms, differentiation and zero testing for differential functions.

A differential function is a sympy expression over jet atoms built from
rational constants, integer powers, exponentials of rational-linear forms in
r1_0 and r2_0, and registered function symbols.  The normal form is the fully
expanded sum with every exponential factor merged into one ``exp`` per term.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

from ..errors import Inconclusive, SingularEvaluation, UnsupportedForm
from .symbols import SymbolFamily, r1, r2, symbol_of, lookup, FunctionSymbol

logger = logging.getLogger(__name__)

NUMERIC_POINTS = 20
NUMERIC_TOLERANCE = 1e-9
DENOMINATOR_FLOOR = 1e-8
# Sums longer than this skip the rational-function pass and go straight to sampling
TOGETHER_TERM_LIMIT = 150

_numeric = {"points": NUMERIC_POINTS, "tolerance": NUMERIC_TOLERANCE}

_EXPAND_HINTS = dict(power_exp=False, power_base=False, log=False,
                     multinomial=True, mul=True, deep=True)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a zero test."""
    holds: bool
    probabilistic: bool = False
    residual: sp.Expr = sp.S.Zero

    def __bool__(self) -> bool:
        return self.holds


def _kg_reduce(derivative: sp.Derivative) -> sp.Expr:
    """Phi_{r1^a r2^b} -> (-1/4)^m Phi_{r1^(a-m) r2^(b-m)}, m = min(a, b)."""
    f = derivative.expr
    first, second = f.args
    counts = dict(derivative.variable_count)
    a, b = counts.get(first, 0), counts.get(second, 0)
    m = min(a, b)
    if m == 0:
        return derivative
    remaining = [(v, c) for v, c in ((first, a - m), (second, b - m)) if c]
    base = sp.Derivative(f, *remaining) if remaining else f
    return sp.Rational(-1, 4) ** m * base


def _is_kg_derivative(node: sp.Basic) -> bool:
    if not isinstance(node, sp.Derivative):
        return False
    f = node.expr
    if not isinstance(f, AppliedUndef):
        return False
    symbol = symbol_of(f)
    return (symbol is not None and symbol.family == SymbolFamily.KLEIN_GORDON
            and len(f.args) == 2 and all(a.is_Symbol for a in f.args))


def reduce_rules(e: sp.Expr) -> sp.Expr:
    """Apply the function-symbol rewrite rules to a fixed point."""
    e = sp.sympify(e)
    if not e.has(sp.Derivative):
        return e
    return e.replace(_is_kg_derivative, _kg_reduce)


def _check_supported(e: sp.Expr) -> None:
    if e.atoms(sp.Float):
        raise UnsupportedForm(f"Floating constant in symbolic expression: {e}")
    for power in e.atoms(sp.Pow):
        if not power.exp.is_Integer:
            raise UnsupportedForm(f"Non-integer power {power}")
    for f in e.atoms(sp.Function):
        if isinstance(f, sp.exp):
            arg = f.args[0]
            extra = arg.free_symbols - {r1, r2}
            if extra:
                raise UnsupportedForm(f"Exponential depends on {sorted(map(str, extra))}: {f}")
            if arg.free_symbols:
                poly = sp.Poly(arg, r1, r2)
                if poly.total_degree() > 1 or not all(c.is_Rational for c in poly.coeffs()):
                    raise UnsupportedForm(f"Exponential of a non rational-linear form: {f}")
        elif isinstance(f, AppliedUndef):
            if symbol_of(f) is None:
                raise UnsupportedForm(f"Unregistered function symbol {f.func}")
        else:
            raise UnsupportedForm(f"Function {f.func} outside the expression class")


def _merge_exponentials(term: sp.Expr) -> sp.Expr:
    """One exp factor per term, its argument expanded."""
    exponent = sp.S.Zero
    rest = []
    for factor in sp.Mul.make_args(term):
        if isinstance(factor, sp.exp):
            exponent += factor.args[0]
        else:
            rest.append(factor)
    exponent = sp.expand(exponent)
    if exponent == 0:
        return sp.Mul(*rest)
    return sp.Mul(*rest) * sp.exp(exponent)


def normalize(e) -> sp.Expr:
    """Unique normal form: rules applied, fully expanded, exponentials merged."""
    e = sp.sympify(e)
    _check_supported(e)
    e = reduce_rules(e)
    expanded = sp.expand(e, **_EXPAND_HINTS)
    return sp.Add(*[_merge_exponentials(term) for term in sp.Add.make_args(expanded)])


def diff_partial(e, v: sp.Symbol) -> sp.Expr:
    """Exact partial derivative with rewrite rules applied."""
    return reduce_rules(sp.diff(sp.sympify(e), v))


def _function_symbols(e: sp.Expr):
    return {f for f in e.atoms(AppliedUndef)}


def _resolve_func(key):
    if isinstance(key, FunctionSymbol):
        return key.func
    if isinstance(key, str):
        symbol = lookup(key)
        return symbol.func if symbol is not None else sp.Function(key, real=True)
    return key


def instantiate(e: sp.Expr, instantiation: Mapping) -> sp.Expr:
    """Replace function symbols by concrete closed forms and evaluate derivatives."""
    for key, closed_form in instantiation.items():
        e = e.replace(_resolve_func(key), closed_form)
    return e.doit()


def random_instantiation(e: sp.Expr, rng: np.random.Generator) -> Dict:
    """Concrete closed forms for every function symbol of e."""
    drawn = {}
    for applied in sorted(_function_symbols(e), key=str):
        symbol = symbol_of(applied)
        if symbol is None:
            raise Inconclusive(f"No instantiation family for {applied.func}")
        if applied.func not in drawn:
            drawn[applied.func] = symbol.instantiate(len(applied.args), rng)
    return drawn


def _negative_power_bases(e: sp.Expr):
    return sorted({p.base for p in e.atoms(sp.Pow) if p.exp.is_negative}, key=str)


def sample_points(symbols, n: int, rng: np.random.Generator) -> Dict[sp.Symbol, np.ndarray]:
    """Uniform samples on [-2, -0.5] U [0.5, 2] per atom."""
    values = {}
    for s in symbols:
        magnitude = rng.uniform(0.5, 2.0, size=n)
        values[s] = magnitude * rng.choice([-1.0, 1.0], size=n)
    return values


def _numeric_zero(e: sp.Expr, rng: np.random.Generator, points: int, tolerance: float) -> bool:
    terms = list(sp.Add.make_args(sp.expand(e, **_EXPAND_HINTS)))
    instantiation = random_instantiation(e, rng)
    concrete = [instantiate(term, instantiation) for term in terms]
    symbols = sorted(set().union(*[c.free_symbols for c in concrete]), key=str)
    bases = sorted(set().union(*[set(_negative_power_bases(c)) for c in concrete]), key=str)
    evaluate_terms = sp.lambdify(symbols, concrete, modules='numpy')
    evaluate_bases = sp.lambdify(symbols, bases, modules='numpy') if bases else None

    values = sample_points(symbols, points, rng)
    for _ in range(10):
        if evaluate_bases is None:
            break
        magnitudes = np.array([np.broadcast_to(np.abs(v), (points,))
                               for v in evaluate_bases(*[values[s] for s in symbols])])
        bad = np.any(magnitudes < DENOMINATOR_FLOOR, axis=0)
        if not bad.any():
            break
        fresh = sample_points(symbols, int(bad.sum()), rng)
        for s in symbols:
            values[s][bad] = fresh[s]
    else:
        raise SingularEvaluation("Could not sample points away from the singular locus")

    with np.errstate(all='ignore'):
        evaluated = np.array([np.broadcast_to(np.asarray(v, dtype=float), (points,))
                              for v in evaluate_terms(*[values[s] for s in symbols])])
    total = evaluated.sum(axis=0)
    scale = np.maximum(1.0, np.abs(evaluated).sum(axis=0))
    if not np.all(np.isfinite(total)):
        raise SingularEvaluation("Non-finite value during numeric zero test")
    worst = float(np.max(np.abs(total) / scale))
    logger.debug("Numeric zero test over %d points: worst scaled residual %.3e", points, worst)
    return worst < tolerance


def configure_numeric(points: Optional[int] = None, tolerance: Optional[float] = None) -> None:
    """Set the sample count and tolerance used by numeric zero tests."""
    if points is not None:
        if points < 1:
            raise ValueError("Numeric zero tests need at least one point")
        _numeric["points"] = int(points)
    if tolerance is not None:
        if tolerance <= 0:
            raise ValueError("Numeric tolerance must be positive")
        _numeric["tolerance"] = float(tolerance)


def zero_test(e, rng: Optional[np.random.Generator] = None,
              points: Optional[int] = None, tolerance: Optional[float] = None) -> Verdict:
    """Decide e == 0, symbolically when possible and by sampling otherwise."""
    points = _numeric["points"] if points is None else points
    tolerance = _numeric["tolerance"] if tolerance is None else tolerance
    e = sp.sympify(e)
    try:
        residual = normalize(e)
    except UnsupportedForm:
        residual = e
    else:
        if residual == 0:
            return Verdict(True)
        if not _function_symbols(residual) and len(sp.Add.make_args(residual)) <= TOGETHER_TERM_LIMIT:
            numerator = sp.numer(sp.together(residual))
            if sp.expand(numerator, **_EXPAND_HINTS) == 0:
                return Verdict(True, residual=residual)
    rng = rng if rng is not None else np.random.default_rng(0)
    holds = _numeric_zero(residual, rng, points, tolerance)
    if holds:
        logger.debug("Zero verdict reached numerically (probabilistic)")
    return Verdict(holds, probabilistic=True, residual=residual)


def is_zero(e, rng: Optional[np.random.Generator] = None) -> bool:
    return zero_test(e, rng).holds


def compare(e1, e2, rng: Optional[np.random.Generator] = None) -> Verdict:
    return zero_test(sp.sympify(e1) - sp.sympify(e2), rng)


def equals(e1, e2, rng: Optional[np.random.Generator] = None) -> bool:
    """True iff normalize(e1 - e2) = 0, falling back to randomized evaluation."""
    return compare(e1, e2, rng).holds


def eval_numeric(e, assignment: Mapping[sp.Symbol, float],
                 instantiation: Optional[Mapping] = None) -> float:
    """Evaluate e at a point, substituting concrete closed forms for function symbols."""
    expr = sp.sympify(e)
    if instantiation:
        expr = instantiate(expr, instantiation)
    if _function_symbols(expr):
        raise Inconclusive(f"Uninstantiated function symbols in {expr}")
    missing = expr.free_symbols - set(assignment)
    if missing:
        raise ValueError(f"Assignment misses atoms {sorted(map(str, missing))}")
    for base in _negative_power_bases(expr):
        magnitude = abs(complex(base.evalf(subs=dict(assignment))))
        if magnitude < DENOMINATOR_FLOOR:
            raise SingularEvaluation(f"Denominator {base} = {magnitude:.3e} at the given point")
    return float(expr.evalf(subs=dict(assignment)))


