"""
Total derivatives on jet space and the coordinate changes between modes.

Restricted derivatives act on x-jets only and substitute the evolution
equations for t-derivatives; full derivatives act on off-shell mixed jets
without substitution.
"""
import logging
from functools import lru_cache

import sympy as sp

from ..errors import BudgetExceeded, OffShellMode, UnsupportedForm
from ..kernel.expression import diff_partial, normalize
from ..kernel.symbols import (AtomKind, atom_info, aux, aux_mixed, jet, mixed, omega,
                              r1, r2, t, x)
from .context import MODIFIED, STANDARD, JetContext

logger = logging.getLogger(__name__)


def tidy(e) -> sp.Expr:
    """Normal form when the expression is in the supported class, else expanded."""
    try:
        return normalize(e)
    except UnsupportedForm:
        return sp.expand(e)


def _raise(order: int, ctx: JetContext) -> int:
    if order + 1 > ctx.max_order:
        raise BudgetExceeded(f"Jet order {order + 1} exceeds the cap {ctx.max_order}")
    return order + 1


def total_dx(e, ctx: JetContext = MODIFIED) -> sp.Expr:
    """Restricted total x-derivative; in modified mode D_x w_k = e^{r1-r2} w_{k+1}."""
    e = sp.sympify(e)
    result = diff_partial(e, x) if e.has(x) else sp.S.Zero
    for symbol in e.free_symbols:
        info = atom_info(symbol)
        if info is None or info.kind == AtomKind.INDEPENDENT:
            continue
        if info.kind == AtomKind.JET:
            successor = jet(info.component, _raise(info.order, ctx))
        elif info.kind == AtomKind.OMEGA:
            successor = sp.exp(r1 - r2) * omega(_raise(info.order, ctx))
        elif info.kind == AtomKind.AUX:
            successor = aux(info.name, info.component, _raise(info.order, ctx))
        elif info.kind == AtomKind.MIXED:
            successor = mixed(info.component, info.t_order, _raise(info.order, ctx))
        else:
            successor = aux_mixed(info.name, info.component, info.t_order, _raise(info.order, ctx))
        result += diff_partial(e, symbol) * successor
    return tidy(result)


def total_dx_power(e, power: int, ctx: JetContext = MODIFIED) -> sp.Expr:
    for _ in range(power):
        e = total_dx(e, ctx)
    return e


@lru_cache(maxsize=None)
def _evolution(component: int, order: int, ctx: JetContext) -> sp.Expr:
    """D_t r^i_k on shell: -D_x^k(V^i r^i_1)."""
    return total_dx_power(-ctx.velocities[component - 1] * jet(component, 1), order,
                          ctx.with_mode(STANDARD.mode))


def total_dt(e, ctx: JetContext = MODIFIED) -> sp.Expr:
    """Restricted total t-derivative with the evolution equations substituted."""
    if not ctx.restricted:
        raise OffShellMode("total_dt is restricted; use full_dt on off-shell jets")
    e = sp.sympify(e)
    result = diff_partial(e, t) if e.has(t) else sp.S.Zero
    for symbol in e.free_symbols:
        info = atom_info(symbol)
        if info is None or info.kind == AtomKind.INDEPENDENT:
            continue
        if info.kind == AtomKind.JET:
            _raise(info.order, ctx)
            successor = _evolution(info.component, info.order, ctx)
        elif info.kind == AtomKind.OMEGA:
            successor = -ctx.velocities[2] * sp.exp(r1 - r2) * omega(_raise(info.order, ctx))
        else:
            raise OffShellMode(f"Atom {symbol} has no on-shell time derivative")
        result += diff_partial(e, symbol) * successor
    return tidy(result)


def op_A(e, ctx: JetContext = MODIFIED) -> sp.Expr:
    """e^{r2-r1} D_x."""
    return tidy(sp.exp(r2 - r1) * total_dx(e, ctx))


def op_B(e, ctx: JetContext = MODIFIED) -> sp.Expr:
    """D_t + (r1 + r2) D_x."""
    return tidy(total_dt(e, ctx) + (r1 + r2) * total_dx(e, ctx))


def A_hat(e) -> sp.Expr:
    """Sum_k w_{k+1} d/dw_k, acting on functions of the w's alone."""
    e = sp.sympify(e)
    result = sp.S.Zero
    for symbol in e.free_symbols:
        info = atom_info(symbol)
        if info is not None and info.kind == AtomKind.OMEGA:
            result += diff_partial(e, symbol) * omega(info.order + 1)
    return tidy(result)


@lru_cache(maxsize=None)
def omega_in_standard(order: int) -> sp.Expr:
    """w_k written in r^i_k: w_0 = r3_0, w_{k+1} = e^{r2-r1} D_x w_k."""
    if order == 0:
        return jet(3, 0)
    return tidy(sp.exp(r2 - r1) * total_dx(omega_in_standard(order - 1), STANDARD))


@lru_cache(maxsize=None)
def r3_in_modified(order: int) -> sp.Expr:
    """r3_k written in modified coordinates: D_x^k w_0."""
    if order == 0:
        return omega(0)
    return total_dx(r3_in_modified(order - 1), MODIFIED)


def _replace_atoms(e: sp.Expr, mapping: dict) -> sp.Expr:
    if not mapping:
        return e
    if any(isinstance(d, sp.Derivative) and set(d.variables) & set(mapping)
           for d in e.atoms(sp.Derivative)):
        return e.subs(mapping)
    return e.xreplace(mapping)


def to_standard(e) -> sp.Expr:
    e = sp.sympify(e)
    mapping = {s: omega_in_standard(info.order) for s, info in
               ((s, atom_info(s)) for s in e.free_symbols)
               if info is not None and info.kind == AtomKind.OMEGA}
    return tidy(_replace_atoms(e, mapping))


def to_modified(e) -> sp.Expr:
    e = sp.sympify(e)
    mapping = {s: r3_in_modified(info.order) for s, info in
               ((s, atom_info(s)) for s in e.free_symbols)
               if info is not None and info.kind == AtomKind.JET and info.component == 3}
    return tidy(_replace_atoms(e, mapping))


def to_off_shell(e) -> sp.Expr:
    """Standard restricted jets r^i_k become mixed jets r^i_(0,k)."""
    e = to_standard(e)
    mapping = {}
    for symbol in e.free_symbols:
        info = atom_info(symbol)
        if info is None:
            continue
        if info.kind == AtomKind.JET:
            mapping[symbol] = mixed(info.component, 0, info.order)
        elif info.kind == AtomKind.AUX:
            mapping[symbol] = aux_mixed(info.name, info.component, 0, info.order)
    return tidy(_replace_atoms(e, mapping))


def _full_derivative(e, independent: sp.Symbol, in_time: bool) -> sp.Expr:
    e = sp.sympify(e)
    if any(atom_info(s) is not None and atom_info(s).kind in (AtomKind.JET, AtomKind.OMEGA,
                                                               AtomKind.AUX)
           for s in e.free_symbols):
        e = to_off_shell(e)
    result = diff_partial(e, independent) if e.has(independent) else sp.S.Zero
    for symbol in e.free_symbols:
        info = atom_info(symbol)
        if info is None or info.kind == AtomKind.INDEPENDENT:
            continue
        a, b = (info.t_order + 1, info.order) if in_time else (info.t_order, info.order + 1)
        if info.kind == AtomKind.MIXED:
            successor = mixed(info.component, a, b)
        else:
            successor = aux_mixed(info.name, info.component, a, b)
        result += diff_partial(e, symbol) * successor
    return tidy(result)


def full_dx(e) -> sp.Expr:
    """Off-shell total x-derivative."""
    return _full_derivative(e, x, in_time=False)


def full_dt(e) -> sp.Expr:
    """Off-shell total t-derivative."""
    return _full_derivative(e, t, in_time=True)


def partial_standard(e, symbol: sp.Symbol) -> sp.Expr:
    """
    d e / d r^i_k in standard coordinates for e written in modified coordinates.

    The w's are differentiated through their standard expansions; the result
    stays in modified coordinates.
    """
    e = sp.sympify(e)
    result = diff_partial(e, symbol)
    for candidate in e.free_symbols:
        candidate_info = atom_info(candidate)
        if candidate_info is None or candidate_info.kind != AtomKind.OMEGA:
            continue
        inner = sp.diff(omega_in_standard(candidate_info.order), symbol)
        if inner != 0:
            result += diff_partial(e, candidate) * to_modified(inner)
    return tidy(result)
