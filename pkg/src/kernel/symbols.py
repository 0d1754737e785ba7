"""
Jet coordinates and constrained function symbols.

Atoms are plain sympy symbols whose names encode their role:

    t, x            independent variables
    r{i}_{k}        restricted x-jet of the i-th Riemann invariant
    w{k}            modified coordinate omega^k
    r{i}_t{a}x{b}   off-shell mixed jet (a t-derivatives, b x-derivatives)
    {name}{i}_{k}   auxiliary linear jets (eta, lam) used by Frechet derivatives
"""
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence

import numpy as np
import sympy as sp

t, x = sp.symbols('t x', real=True)

_JET_RE = re.compile(r"^r([123])_(\d+)$")
_OMEGA_RE = re.compile(r"^w(\d+)$")
_MIXED_RE = re.compile(r"^r([123])_t(\d+)x(\d+)$")
_AUX_RE = re.compile(r"^(eta|lam|aux)([123])_(\d+)$")
_AUX_MIXED_RE = re.compile(r"^(eta|lam|aux)([123])_t(\d+)x(\d+)$")


class AtomKind(Enum):
    """Role of a coordinate atom."""
    INDEPENDENT = "independent"  # t or x
    JET = "jet"                  # restricted x-jet r^i_k
    OMEGA = "omega"              # modified coordinate w^k
    MIXED = "mixed"              # off-shell jet r^i_(a,b)
    AUX = "aux"                  # auxiliary restricted jet
    AUX_MIXED = "aux_mixed"      # auxiliary off-shell jet


@dataclass(frozen=True)
class AtomInfo:
    kind: AtomKind
    component: int = 0
    order: int = 0       # number of x-derivatives
    t_order: int = 0     # number of t-derivatives (off-shell only)
    name: str = ""


def jet(i: int, k: int) -> sp.Symbol:
    return sp.Symbol(f"r{i}_{k}", real=True)


def omega(k: int) -> sp.Symbol:
    return sp.Symbol(f"w{k}", real=True)


def mixed(i: int, a: int, b: int) -> sp.Symbol:
    return sp.Symbol(f"r{i}_t{a}x{b}", real=True)


def aux(name: str, i: int, k: int) -> sp.Symbol:
    return sp.Symbol(f"{name}{i}_{k}", real=True)


def aux_mixed(name: str, i: int, a: int, b: int) -> sp.Symbol:
    return sp.Symbol(f"{name}{i}_t{a}x{b}", real=True)


def atom_info(symbol: sp.Symbol) -> Optional[AtomInfo]:
    """Classify an atom by its name; None for foreign symbols."""
    name = symbol.name
    if name in ("t", "x"):
        return AtomInfo(AtomKind.INDEPENDENT, name=name)
    match = _JET_RE.match(name)
    if match:
        return AtomInfo(AtomKind.JET, int(match.group(1)), int(match.group(2)))
    match = _OMEGA_RE.match(name)
    if match:
        return AtomInfo(AtomKind.OMEGA, 3, int(match.group(1)))
    match = _MIXED_RE.match(name)
    if match:
        return AtomInfo(AtomKind.MIXED, int(match.group(1)),
                        int(match.group(3)), int(match.group(2)))
    match = _AUX_RE.match(name)
    if match:
        return AtomInfo(AtomKind.AUX, int(match.group(2)), int(match.group(3)),
                        name=match.group(1))
    match = _AUX_MIXED_RE.match(name)
    if match:
        return AtomInfo(AtomKind.AUX_MIXED, int(match.group(2)), int(match.group(4)),
                        int(match.group(3)), name=match.group(1))
    return None


# Frequently used atoms
r1, r2, r3 = jet(1, 0), jet(2, 0), jet(3, 0)
r1x, r2x = jet(1, 1), jet(2, 1)
w0, w1 = omega(0), omega(1)


class SymbolFamily(Enum):
    """Constraint attached to a function symbol."""
    KLEIN_GORDON = "klein_gordon"  # Phi(r1, r2) with Phi_{r1 r2} = -Phi/4
    OMEGA = "omega"                # smooth function of finitely many w^k
    THETA = "theta"                # nonvanishing function of w^0
    FREE = "free"                  # univariate closed form (W, Theta^1, Theta^2)


@dataclass(frozen=True)
class FunctionSymbol:
    """A named function with a derivative-reduction constraint."""
    name: str
    family: SymbolFamily

    @property
    def func(self):
        return sp.Function(self.name, real=True)

    def __call__(self, *args):
        return self.func(*args)

    def instantiate(self, arity: int, rng: np.random.Generator) -> sp.Lambda:
        """Draw a concrete closed form consistent with the symbol's rules."""
        slots = sp.symbols(f"_s0:{arity}", real=True)
        if self.family == SymbolFamily.KLEIN_GORDON:
            if arity != 2:
                raise ValueError(f"{self.name} takes exactly two arguments")
            body = sp.S.Zero
            for _ in range(2):
                a = float(rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0]))
                c = float(rng.uniform(0.5, 1.5))
                body += c * sp.exp(a * slots[0] - slots[1] / (4 * a))
            return sp.Lambda(slots, body)
        if self.family == SymbolFamily.THETA:
            c = float(rng.uniform(0.2, 0.8))
            return sp.Lambda(slots, 1 + c * slots[0] ** 2)
        if self.family == SymbolFamily.OMEGA:
            body = float(rng.uniform(0.5, 1.5))
            for i, s in enumerate(slots):
                body += float(rng.uniform(-1, 1)) * s + float(rng.uniform(-1, 1)) * s ** 2
                if i + 1 < arity:
                    body += float(rng.uniform(-1, 1)) * s * slots[i + 1]
            body += float(rng.uniform(-0.5, 0.5)) * slots[0] ** 3
            return sp.Lambda(slots, body)
        c = float(rng.uniform(0.5, 1.5))
        d = float(rng.uniform(-0.5, 0.5))
        return sp.Lambda(slots, sp.tanh(c * slots[0]) + d * slots[0] ** 2)


_REGISTRY: Dict[str, FunctionSymbol] = {}


def register(symbol: FunctionSymbol) -> FunctionSymbol:
    existing = _REGISTRY.get(symbol.name)
    if existing is not None and existing.family != symbol.family:
        raise ValueError(f"Function symbol {symbol.name} already registered as {existing.family}")
    _REGISTRY[symbol.name] = symbol
    return symbol


def lookup(name: str) -> Optional[FunctionSymbol]:
    return _REGISTRY.get(name)


def symbol_of(applied: sp.Expr) -> Optional[FunctionSymbol]:
    """Function symbol behind an applied undefined function, if registered."""
    return _REGISTRY.get(getattr(applied.func, '__name__', ''))


def kg_function(name: str) -> FunctionSymbol:
    return register(FunctionSymbol(name, SymbolFamily.KLEIN_GORDON))


def omega_function(name: str) -> FunctionSymbol:
    return register(FunctionSymbol(name, SymbolFamily.OMEGA))


def theta_function(name: str) -> FunctionSymbol:
    return register(FunctionSymbol(name, SymbolFamily.THETA))


def free_function(name: str) -> FunctionSymbol:
    return register(FunctionSymbol(name, SymbolFamily.FREE))


Phi = kg_function("Phi")
Phi2 = kg_function("Phi2")
Omega = omega_function("Omega")
Omega2 = omega_function("Omega2")
Theta = theta_function("Theta")
Theta2 = theta_function("Theta2")
W = free_function("W")


def symbolic_phi(symbol: FunctionSymbol = Phi) -> sp.Expr:
    return symbol(r1, r2)


def symbolic_omega(order: int = 1, symbol: FunctionSymbol = Omega) -> sp.Expr:
    return symbol(*[omega(k) for k in range(order + 1)])


def symbolic_theta(symbol: FunctionSymbol = Theta) -> sp.Expr:
    return symbol(w0)


def atoms_of(e: sp.Expr, kinds: Sequence[AtomKind] = tuple(AtomKind)) -> Dict[sp.Symbol, AtomInfo]:
    """Coordinate atoms of the given kinds appearing in e."""
    found = {}
    for s in sp.sympify(e).free_symbols:
        info = atom_info(s)
        if info is not None and info.kind in kinds:
            found[s] = info
    return found
