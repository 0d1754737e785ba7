from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import sympy as sp

from ..jets.derivatives import tidy
from ..kernel.expression import zero_test
from ..kernel.grammar import serialize


def _as_triple(components) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
    components = tuple(sp.sympify(c) for c in components)
    if len(components) != 3:
        raise ValueError(f"Expected three components, got {len(components)}")
    return components


@dataclass(frozen=True)
class _Triple:
    components: Tuple[sp.Expr, sp.Expr, sp.Expr]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "components", _as_triple(self.components))

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, index: int) -> sp.Expr:
        return self.components[index]

    def _new(self, components, label: str = ""):
        return type(self)(tuple(tidy(c) for c in components), label)

    def __add__(self, other):
        return self._new(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return self._new(a - b for a, b in zip(self, other))

    def __neg__(self):
        return self.scale(-1)

    def scale(self, factor):
        return self._new((sp.sympify(factor) * c for c in self), self.label)

    def normalized(self):
        return self._new(self.components, self.label)

    def equals(self, other, rng: Optional[np.random.Generator] = None) -> bool:
        return all(zero_test(a - b, rng) for a, b in zip(self, other))

    def is_zero(self, rng: Optional[np.random.Generator] = None) -> bool:
        return all(zero_test(c, rng) for c in self)

    def serialize(self) -> list:
        return [serialize(c) for c in self]


@dataclass(frozen=True)
class EvolutionaryField(_Triple):
    """Characteristic (eta^1, eta^2, eta^3) of an evolutionary vector field."""


@dataclass(frozen=True)
class Cosymmetry(_Triple):
    """Triple (lambda^1, lambda^2, lambda^3) solving the adjoint linearized system."""


@dataclass(frozen=True)
class ConservedCurrent:
    """Density and flux of a conservation law D_t rho + D_x sigma = 0."""
    density: sp.Expr
    flux: sp.Expr
    label: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "density", sp.sympify(self.density))
        object.__setattr__(self, "flux", sp.sympify(self.flux))

    def __add__(self, other: "ConservedCurrent") -> "ConservedCurrent":
        return ConservedCurrent(tidy(self.density + other.density), tidy(self.flux + other.flux))

    def __sub__(self, other: "ConservedCurrent") -> "ConservedCurrent":
        return ConservedCurrent(tidy(self.density - other.density), tidy(self.flux - other.flux))

    def scale(self, factor) -> "ConservedCurrent":
        factor = sp.sympify(factor)
        return ConservedCurrent(tidy(factor * self.density), tidy(factor * self.flux), self.label)

    def equals(self, other: "ConservedCurrent", rng: Optional[np.random.Generator] = None) -> bool:
        return bool(zero_test(self.density - other.density, rng)) and \
            bool(zero_test(self.flux - other.flux, rng))

    def serialize(self) -> list:
        return [serialize(self.density), serialize(self.flux)]
