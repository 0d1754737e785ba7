from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import sympy as sp

from ..kernel.symbols import r1, r2

# Jet orders beyond this are refused by the total derivatives
DEFAULT_MAX_ORDER = 20


def drift_flux_velocities() -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
    """Characteristic velocities V^i(r1, r2) of the drift flux system."""
    s = r1 + r2
    return (s + 1, s - 1, s)


class CoordinateMode(Enum):
    """Coordinate system an expression lives in."""
    STANDARD = "standard"    # t, x, r^i_k
    MODIFIED = "modified"    # t, x, r^1_k, r^2_k, w^k
    OFF_SHELL = "off_shell"  # t, x, r^i_(a,b)


@dataclass(frozen=True)
class JetContext:
    """
    Coordinate mode and order budget for total derivatives.
    """
    mode: CoordinateMode = CoordinateMode.MODIFIED
    max_order: int = DEFAULT_MAX_ORDER
    velocities: Tuple[sp.Expr, sp.Expr, sp.Expr] = field(default_factory=drift_flux_velocities)

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be at least 1")
        if len(self.velocities) != 3:
            raise ValueError("Exactly three characteristic velocities are required")

    @property
    def restricted(self) -> bool:
        return self.mode != CoordinateMode.OFF_SHELL

    def with_mode(self, mode: CoordinateMode) -> "JetContext":
        return JetContext(mode, self.max_order, self.velocities)


MODIFIED = JetContext(CoordinateMode.MODIFIED)
STANDARD = JetContext(CoordinateMode.STANDARD)
OFF_SHELL = JetContext(CoordinateMode.OFF_SHELL)
