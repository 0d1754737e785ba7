"""
Variational tools: Euler operators, the image of A_hat and order functions.
"""
import logging
from typing import Optional, Tuple

import numpy as np
import sympy as sp

from ..kernel.expression import Verdict, diff_partial, normalize, zero_test
from ..kernel.symbols import AtomKind, atom_info, jet, omega
from .context import MODIFIED, JetContext
from .derivatives import (A_hat, full_dt, full_dx, partial_standard, tidy, to_modified,
                          total_dx)

logger = logging.getLogger(__name__)

_FAMILIES = {"r1": (AtomKind.JET, 1), "r2": (AtomKind.JET, 2), "r3": (AtomKind.JET, 3),
             "omega": (AtomKind.OMEGA, 3), "w": (AtomKind.OMEGA, 3)}


def ord(e, family: str):
    """Highest jet index of a family in normalize(e); -inf when absent."""
    if family not in _FAMILIES:
        raise ValueError(f"Unknown order family '{family}'")
    kind, component = _FAMILIES[family]
    e = normalize(e)
    orders = [info.order for info in (atom_info(s) for s in e.free_symbols)
              if info is not None and info.kind == kind and info.component == component]
    return max(orders) if orders else float('-inf')


def euler_operator(density, ctx: JetContext = MODIFIED) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
    """
    Variational derivative (sum_k (-D_x)^k d/dr^i_k, i = 1, 2, 3) in standard coordinates.

    The density may be given in standard or modified coordinates; the result is
    written in modified coordinates.
    """
    density = to_modified(density)
    omega_order = ord(density, "omega")
    components = []
    for i in (1, 2):
        top = max(ord(density, f"r{i}"), omega_order - 1)
        components.append(_euler_component(density, i, top, ctx))
    components.append(_euler_component(density, 3, omega_order, ctx))
    return tuple(components)


def _euler_component(density, i: int, top, ctx: JetContext) -> sp.Expr:
    if top == float('-inf'):
        return sp.S.Zero
    result = sp.S.Zero
    for k in range(int(top), -1, -1):
        partial = partial_standard(density, jet(i, k))
        # Horner form of sum_k (-D_x)^k p_k
        result = partial - total_dx(result, ctx) if result != 0 else partial
    return tidy(result)


def full_euler_operator(lagrangian) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
    """Euler operator over off-shell mixed jets: sum (-1)^(a+b) D_t^a D_x^b d/dr^i_(a,b)."""
    lagrangian = sp.sympify(lagrangian)
    components = [sp.S.Zero, sp.S.Zero, sp.S.Zero]
    for symbol in lagrangian.free_symbols:
        info = atom_info(symbol)
        if info is None or info.kind != AtomKind.MIXED:
            continue
        term = diff_partial(lagrangian, symbol)
        for _ in range(info.order):
            term = -full_dx(term)
        for _ in range(info.t_order):
            term = -full_dt(term)
        components[info.component - 1] += term
    return tuple(tidy(c) for c in components)


def omega_euler(Omega) -> sp.Expr:
    """sum_{k>=1} sum_{k'<k} w_{k-k'} (-A_hat)^{k'} dOmega/dw_k - Omega."""
    Omega = sp.sympify(Omega)
    top = ord(Omega, "omega")
    result = -Omega
    if top == float('-inf'):
        return tidy(result)
    for k in range(1, int(top) + 1):
        term = diff_partial(Omega, omega(k))
        if term == 0:
            continue
        for inner in range(k):
            result += omega(k - inner) * term
            term = -A_hat(term)
    return tidy(result)


def in_image_of_Ahat(Omega, rng: Optional[np.random.Generator] = None) -> Verdict:
    """True iff Omega = A_hat(F) for some function F of the w's."""
    return zero_test(omega_euler(Omega), rng)
