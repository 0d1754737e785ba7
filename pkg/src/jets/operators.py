"""
Matrix differential operators, Frechet derivatives and prolongations.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from ..errors import OffShellMode
from ..kernel.expression import diff_partial, zero_test
from ..kernel.symbols import AtomKind, atom_info, aux, omega
from .context import MODIFIED, JetContext
from .derivatives import full_dt, full_dx, op_A, tidy, total_dt, total_dx

logger = logging.getLogger(__name__)

Triple = Tuple[sp.Expr, ...]


@dataclass(frozen=True)
class OperatorTerm:
    """coefficient * D_t^dt_power D_x^dx_power"""
    coefficient: sp.Expr
    dx_power: int = 0
    dt_power: int = 0


def _collect(terms) -> Tuple[OperatorTerm, ...]:
    grouped: Dict[Tuple[int, int], sp.Expr] = defaultdict(lambda: sp.S.Zero)
    for term in terms:
        grouped[(term.dt_power, term.dx_power)] += term.coefficient
    collected = []
    for (dt_power, dx_power), coefficient in sorted(grouped.items()):
        coefficient = tidy(coefficient)
        if coefficient != 0:
            collected.append(OperatorTerm(coefficient, dx_power, dt_power))
    return tuple(collected)


@dataclass(frozen=True)
class MatrixDiffOperator:
    """
    Matrix whose entries are polynomials in the total derivatives.

    Restricted operators carry only x-derivatives; off-shell operators may
    also carry t-derivatives and act with the full derivatives.
    """
    entries: Tuple[Tuple[Tuple[OperatorTerm, ...], ...], ...]
    off_shell: bool = False
    ctx: JetContext = MODIFIED

    def __post_init__(self):
        columns = len(self.entries[0]) if self.entries else 0
        if any(len(row) != columns for row in self.entries):
            raise ValueError("Operator matrix rows must have equal length")
        if not self.off_shell and any(term.dt_power for row in self.entries
                                      for entry in row for term in entry):
            raise OffShellMode("Restricted operators cannot contain t-derivatives")

    @classmethod
    def from_terms(cls, rows: Sequence[Sequence[Sequence]], off_shell: bool = False,
                   ctx: JetContext = MODIFIED) -> "MatrixDiffOperator":
        """Build from nested lists of (coefficient, dx_power[, dt_power]) tuples."""
        entries = tuple(
            tuple(_collect(OperatorTerm(sp.sympify(spec[0]), *spec[1:]) for spec in entry)
                  for entry in row)
            for row in rows)
        return cls(entries, off_shell, ctx)

    @classmethod
    def zero(cls, n: int = 3, off_shell: bool = False,
             ctx: JetContext = MODIFIED) -> "MatrixDiffOperator":
        return cls(tuple(tuple(() for _ in range(n)) for _ in range(n)), off_shell, ctx)

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def columns(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def _dx(self, e):
        return full_dx(e) if self.off_shell else total_dx(e, self.ctx)

    def _dt(self, e):
        return full_dt(e) if self.off_shell else total_dt(e, self.ctx)

    def _derivative(self, e, dt_power: int, dx_power: int) -> sp.Expr:
        for _ in range(dx_power):
            e = self._dx(e)
        for _ in range(dt_power):
            e = self._dt(e)
        return e

    def apply(self, field: Sequence) -> Triple:
        """Apply to a column of differential functions."""
        if len(field) != self.columns:
            raise ValueError(f"Expected {self.columns} components, got {len(field)}")
        derivatives: Dict[Tuple[int, int, int], sp.Expr] = {}
        result = []
        for row in self.entries:
            total = sp.S.Zero
            for j, entry in enumerate(row):
                for term in entry:
                    key = (j, term.dt_power, term.dx_power)
                    if key not in derivatives:
                        derivatives[key] = self._derivative(sp.sympify(field[j]),
                                                            term.dt_power, term.dx_power)
                    total += term.coefficient * derivatives[key]
            result.append(tidy(total))
        return tuple(result)

    def adjoint(self) -> "MatrixDiffOperator":
        """Formal adjoint: transpose and integrate every term by parts."""
        n, m = self.size, self.columns
        rows: List[List[List[OperatorTerm]]] = [[[] for _ in range(n)] for _ in range(m)]
        for i, row in enumerate(self.entries):
            for j, entry in enumerate(row):
                for term in entry:
                    a, b = term.dt_power, term.dx_power
                    sign = (-1) ** (a + b)
                    for p in range(a + 1):
                        for q in range(b + 1):
                            coefficient = self._derivative(term.coefficient, a - p, b - q)
                            rows[j][i].append(OperatorTerm(sign * comb(a, p) * comb(b, q)
                                                           * coefficient, q, p))
        entries = tuple(tuple(_collect(entry) for entry in row) for row in rows)
        return MatrixDiffOperator(entries, self.off_shell, self.ctx)

    def _combine(self, other: "MatrixDiffOperator", sign: int) -> "MatrixDiffOperator":
        if (other.size, other.columns) != (self.size, self.columns):
            raise ValueError("Operator sizes differ")
        entries = tuple(
            tuple(_collect(list(mine) + [OperatorTerm(sign * term.coefficient, term.dx_power,
                                                      term.dt_power) for term in theirs])
                  for mine, theirs in zip(my_row, their_row))
            for my_row, their_row in zip(self.entries, other.entries))
        return MatrixDiffOperator(entries, self.off_shell or other.off_shell, self.ctx)

    def __add__(self, other: "MatrixDiffOperator") -> "MatrixDiffOperator":
        return self._combine(other, 1)

    def __sub__(self, other: "MatrixDiffOperator") -> "MatrixDiffOperator":
        return self._combine(other, -1)

    def __neg__(self) -> "MatrixDiffOperator":
        return self.scale(-1)

    def scale(self, factor) -> "MatrixDiffOperator":
        factor = sp.sympify(factor)
        entries = tuple(tuple(_collect(OperatorTerm(factor * term.coefficient, term.dx_power,
                                                    term.dt_power) for term in entry)
                              for entry in row) for row in self.entries)
        return MatrixDiffOperator(entries, self.off_shell, self.ctx)

    def equals(self, other: "MatrixDiffOperator",
               rng: Optional[np.random.Generator] = None) -> bool:
        """Entrywise comparison of the coefficients of every derivative power."""
        difference = self - other
        for row in difference.entries:
            for entry in row:
                for term in entry:
                    if not zero_test(term.coefficient, rng):
                        return False
        return True

    def order(self) -> int:
        return max((term.dx_power + term.dt_power for row in self.entries
                    for entry in row for term in entry), default=0)


def prolonged_action(eta: Sequence, f, ctx: JetContext = MODIFIED) -> sp.Expr:
    """
    pr eta applied to f, with f written in x-jets (standard or modified).

    On the w's: pr(w_0) = eta^3 and pr(w_{k+1}) = A(pr w_k) + (eta^2 - eta^1) w_{k+1}.
    """
    f = sp.sympify(f)
    eta = [sp.sympify(component) for component in eta]
    derivative_cache: Dict[Tuple[int, int], sp.Expr] = {}
    omega_cache: List[sp.Expr] = [eta[2]]

    def eta_derivative(i: int, k: int) -> sp.Expr:
        if (i, k) not in derivative_cache:
            derivative_cache[(i, k)] = eta[i - 1] if k == 0 else total_dx(eta_derivative(i, k - 1), ctx)
        return derivative_cache[(i, k)]

    def omega_action(k: int) -> sp.Expr:
        while len(omega_cache) <= k:
            m = len(omega_cache)
            omega_cache.append(tidy(op_A(omega_cache[m - 1], ctx)
                                    + (eta[1] - eta[0]) * omega(m)))
        return omega_cache[k]

    result = sp.S.Zero
    for symbol in f.free_symbols:
        info = atom_info(symbol)
        if info is None or info.kind == AtomKind.INDEPENDENT:
            continue
        if info.kind == AtomKind.JET:
            result += diff_partial(f, symbol) * eta_derivative(info.component, info.order)
        elif info.kind == AtomKind.OMEGA:
            result += diff_partial(f, symbol) * omega_action(info.order)
        else:
            raise OffShellMode(f"prolonged_action works on x-jets, found {symbol}")
    return tidy(result)


def frechet(F: Sequence, off_shell: bool = False, ctx: JetContext = MODIFIED) -> MatrixDiffOperator:
    """
    Frechet derivative (universal linearization) of a tuple of differential functions.
    """
    F = [sp.sympify(component) for component in F]
    n = 3  # columns: eta^1, eta^2, eta^3
    rows: List[List[List[OperatorTerm]]] = [[[] for _ in range(n)] for _ in range(len(F))]
    if off_shell:
        for i, component in enumerate(F):
            for symbol in component.free_symbols:
                info = atom_info(symbol)
                if info is None or info.kind == AtomKind.INDEPENDENT:
                    continue
                if info.kind != AtomKind.MIXED:
                    raise OffShellMode(f"Off-shell Frechet derivative found restricted atom {symbol}")
                rows[i][info.component - 1].append(
                    OperatorTerm(diff_partial(component, symbol), info.order, info.t_order))
    else:
        placeholders = [aux("eta", j, 0) for j in (1, 2, 3)]
        for i, component in enumerate(F):
            linear = prolonged_action(placeholders, component, ctx)
            for symbol in linear.free_symbols:
                info = atom_info(symbol)
                if info is not None and info.kind == AtomKind.AUX and info.name == "eta":
                    rows[i][info.component - 1].append(
                        OperatorTerm(diff_partial(linear, symbol), info.order))
    entries = tuple(tuple(_collect(entry) for entry in row) for row in rows)
    return MatrixDiffOperator(entries, off_shell, ctx)
