"""
The drift flux system in Riemann invariants.

    r^i_t + V^i(r^1, r^2) r^i_x = 0,   V = (r1 + r2 + 1, r1 + r2 - 1, r1 + r2)

together with the physical variable maps, the point transformation that
linearizes the first two equations, and the tilde operators built from the
restricted total derivatives.
"""
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import permutations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from ..errors import BudgetExceeded, DegenerateJet, DomainError, GrammarError
from ..jets.context import JetContext, drift_flux_velocities
from ..jets.derivatives import r3_in_modified, tidy, total_dt, total_dx
from ..kernel.expression import Verdict, zero_test
from ..kernel.symbols import jet, mixed, r1, r1x, r2, r2x, t, x

logger = logging.getLogger(__name__)

# Default cap on the summed powers of an operator word
DEFAULT_WORD_BUDGET = 5


@dataclass(frozen=True)
class HydroSystem:
    """
    Three-component diagonal system of hydrodynamic type.
    """
    velocities: Tuple[sp.Expr, sp.Expr, sp.Expr] = field(default_factory=drift_flux_velocities)
    name: str = "drift_flux"

    def __post_init__(self):
        if len(self.velocities) != 3:
            raise ValueError("A hydrodynamic system here has exactly three velocities")

    @property
    def ctx(self) -> JetContext:
        return JetContext(velocities=tuple(self.velocities))

    def characteristic_velocities(self) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
        return tuple(self.velocities)

    def x_jet(self, k: int) -> sp.Expr:
        """r^k_x in modified coordinates."""
        return r3_in_modified(1) if k == 3 else jet(k, 1)

    def velocity_gradient(self, k: int, j: int) -> sp.Expr:
        """dV^k / dr^j."""
        return sp.diff(self.velocities[k - 1], jet(j, 0))

    def off_shell_lhs(self) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
        """E^i = r^i_t + V^i r^i_x over mixed jets."""
        on_mixed = {jet(i, 0): mixed(i, 0, 0) for i in (1, 2, 3)}
        return tuple(mixed(i, 1, 0) + self.velocities[i - 1].xreplace(on_mixed) * mixed(i, 0, 1)
                     for i in (1, 2, 3))

    def linearized(self, eta: Sequence) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
        """Left-hand sides of the determining equations for symmetries."""
        ctx = self.ctx
        residuals = []
        for k in (1, 2, 3):
            component = sp.sympify(eta[k - 1])
            residual = total_dt(component, ctx) + self.velocities[k - 1] * total_dx(component, ctx)
            residual += sum(self.velocity_gradient(k, j) * sp.sympify(eta[j - 1])
                            for j in (1, 2, 3)) * self.x_jet(k)
            residuals.append(tidy(residual))
        return tuple(residuals)

    def adjoint_linearized(self, lam: Sequence) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
        """Left-hand sides of the determining equations for cosymmetries."""
        ctx = self.ctx
        residuals = []
        for j in (1, 2, 3):
            component = sp.sympify(lam[j - 1])
            residual = total_dt(component, ctx) + total_dx(self.velocities[j - 1] * component, ctx)
            residual -= sum(self.velocity_gradient(k, j) * self.x_jet(k) * sp.sympify(lam[k - 1])
                            for k in (1, 2, 3))
            residuals.append(tidy(residual))
        return tuple(residuals)

    def divergence(self, density, flux) -> sp.Expr:
        """On-shell D_t rho + D_x sigma."""
        return tidy(total_dt(density, self.ctx) + total_dx(flux, self.ctx))

    def semi_hamiltonian_check(self, rng: Optional[np.random.Generator] = None) -> Verdict:
        """Tsarev condition d_i(V^k_j / (V^j - V^k)) = d_j(V^k_i / (V^i - V^k)), i, j, k distinct."""
        riemann = [jet(1, 0), jet(2, 0), jet(3, 0)]
        V = self.velocities
        probabilistic = False
        for i, j, k in permutations(range(3), 3):
            left_denominator = V[j] - V[k]
            right_denominator = V[i] - V[k]
            left_numerator = sp.diff(V[k], riemann[j])
            right_numerator = sp.diff(V[k], riemann[i])
            left = sp.S.Zero if left_numerator == 0 else sp.diff(left_numerator / left_denominator,
                                                                 riemann[i])
            right = sp.S.Zero if right_numerator == 0 else sp.diff(right_numerator / right_denominator,
                                                                   riemann[j])
            difference = sp.cancel(sp.together(left - right))
            if difference == 0:
                continue
            verdict = zero_test(difference, rng)
            if not verdict:
                logger.debug("Tsarev condition fails for (i, j, k) = (%d, %d, %d)", i + 1, j + 1, k + 1)
                return verdict
            probabilistic = probabilistic or verdict.probabilistic
        return Verdict(True, probabilistic)


DRIFT_FLUX = HydroSystem()


def characteristic_velocities() -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
    return DRIFT_FLUX.characteristic_velocities()


def semi_hamiltonian_check(system: HydroSystem = DRIFT_FLUX) -> bool:
    return system.semi_hamiltonian_check().holds


def _symbolic(*values) -> bool:
    return any(isinstance(v, sp.Basic) for v in values)


def riemann_from_physical(u, rho1, rho2):
    """(u, rho^1, rho^2) -> (r1, r2, r3) with r1,2 = (u +- ln(rho^1 + rho^2))/2, r3 = rho^2/rho^1."""
    if _symbolic(u, rho1, rho2):
        density = rho1 + rho2
        return ((u + sp.log(density)) / 2, (u - sp.log(density)) / 2, rho2 / rho1)
    u, rho1, rho2 = (np.asarray(v, dtype=float) for v in (u, rho1, rho2))
    density = rho1 + rho2
    if np.any(density <= 0):
        raise DomainError("Total density rho^1 + rho^2 must be positive")
    if np.any(rho1 == 0):
        raise DomainError("rho^1 must be nonzero for the third Riemann invariant")
    log_density = np.log(density)
    return ((u + log_density) / 2, (u - log_density) / 2, rho2 / rho1)


def physical_from_riemann(first, second, third):
    """Inverse of riemann_from_physical: u = r1 + r2, rho = e^{r1 - r2} split by r3."""
    if _symbolic(first, second, third):
        density = sp.exp(first - second)
        return (first + second, density / (1 + third), density * third / (1 + third))
    first, second, third = (np.asarray(v, dtype=float) for v in (first, second, third))
    if np.any(third == -1):
        raise DomainError("r3 = -1 corresponds to vanishing total density split")
    density = np.exp(first - second)
    return (first + second, density / (1 + third), density * third / (1 + third))


@dataclass(frozen=True)
class PointMap:
    """
    (t, x, r1, r2, r3) <-> (y, z, p, q, s) with y = r1/2, z = -r2/2, p = t,
    q = e^{(r1 - r2)/2}(x - (r1 + r2 + 1)t), s = r3.
    """

    @staticmethod
    def forward(point: Sequence):
        t_, x_, first, second, third = point
        exp = sp.exp if _symbolic(*point) else np.exp
        return (first / 2, -second / 2, t_,
                exp((first - second) / 2) * (x_ - (first + second + 1) * t_), third)

    @staticmethod
    def inverse(point: Sequence):
        y, z, p, q, s = point
        exp = sp.exp if _symbolic(*point) else np.exp
        return (p, q * exp(-(y + z)) + (2 * y - 2 * z + 1) * p, 2 * y, -2 * z, s)


def transform_T(point: Sequence, jets: Optional[Sequence] = None):
    """Forward point map; with jets (r1_x, r2_x) given, their nondegeneracy is checked."""
    if jets is not None and any(np.any(np.asarray(j, dtype=float) == 0) for j in jets):
        raise DegenerateJet("r1_x r2_x must not vanish for the prolonged transformation")
    return PointMap.forward(point)


def transform_T_inverse(point: Sequence):
    return PointMap.inverse(point)


def tilde_Dy(e, system: HydroSystem = DRIFT_FLUX) -> sp.Expr:
    """-(1/r1_x)(D_t + V^2 D_x)"""
    ctx = system.ctx
    return tidy(-(total_dt(e, ctx) + system.velocities[1] * total_dx(e, ctx)) / r1x)


def tilde_Dz(e, system: HydroSystem = DRIFT_FLUX) -> sp.Expr:
    """-(1/r2_x)(D_t + V^1 D_x)"""
    ctx = system.ctx
    return tidy(-(total_dt(e, ctx) + system.velocities[0] * total_dx(e, ctx)) / r2x)


def tilde_J(e, system: HydroSystem = DRIFT_FLUX) -> sp.Expr:
    return tidy(r1 / 2 * tilde_Dy(e, system) + r2 / 2 * tilde_Dz(e, system))


def q_tilde() -> sp.Expr:
    return tidy(sp.exp((r1 - r2) / 2) * (x - (r1 + r2 + 1) * t))


class TildeOperator(Enum):
    """Letters of an operator word."""
    J = "J"    # tilde J
    DY = "Dy"  # tilde D_y
    DZ = "Dz"  # tilde D_z

    def apply(self, e, system: HydroSystem = DRIFT_FLUX) -> sp.Expr:
        if self == TildeOperator.J:
            return tilde_J(e, system)
        if self == TildeOperator.DY:
            return tilde_Dy(e, system)
        return tilde_Dz(e, system)


@dataclass(frozen=True)
class WordFactor:
    """(letter + shift)^power"""
    letter: TildeOperator
    power: int = 1
    shift: sp.Rational = sp.S.Zero

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("Powers in operator words are nonnegative")
        object.__setattr__(self, "shift", sp.Rational(self.shift))

    def text(self) -> str:
        if self.shift == 0:
            return f"{self.letter.value}^{self.power}"
        sign = "+" if self.shift > 0 else "-"
        return f"({self.letter.value}{sign}{abs(self.shift)})^{self.power}"


_FACTOR_RE = re.compile(r"\((J|Dy|Dz)([+-]\d+(?:/\d+)?)\)(?:\^(\d+))?|(J|Dy|Dz)(?:\^(\d+))?")


@dataclass(frozen=True)
class OperatorWord:
    """
    Product of tilde operators, applied right to left.

    Text form: "Dy^1J^1" is tilde D_y tilde J; "(J+1/2)^2Dy^1" is (tilde J + 1/2)^2 tilde D_y.
    The empty word is the identity.
    """
    factors: Tuple[WordFactor, ...] = ()
    budget: int = DEFAULT_WORD_BUDGET

    def __post_init__(self):
        if self.order > self.budget:
            raise BudgetExceeded(f"Operator word of order {self.order} exceeds the budget {self.budget}")

    @property
    def order(self) -> int:
        return sum(f.power for f in self.factors)

    @classmethod
    def parse(cls, text: str, budget: int = DEFAULT_WORD_BUDGET) -> "OperatorWord":
        stripped = re.sub(r"\s+", "", text or "")
        if stripped in ("", "1", "I"):
            return cls((), budget)
        factors: List[WordFactor] = []
        position = 0
        while position < len(stripped):
            match = _FACTOR_RE.match(stripped, position)
            if match is None:
                raise GrammarError(f"Cannot parse operator word '{text}' at '{stripped[position:]}'")
            if match.group(1):
                letter, shift, power = match.group(1), match.group(2), match.group(3)
            else:
                letter, shift, power = match.group(4), "0", match.group(5)
            factors.append(WordFactor(TildeOperator(letter), int(power) if power else 1,
                                      sp.Rational(shift)))
            position = match.end()
        return cls(tuple(factors), budget)

    def text(self) -> str:
        return "".join(f.text() for f in self.factors) or "1"

    def compose(self, other: "OperatorWord") -> "OperatorWord":
        """self o other"""
        return OperatorWord(self.factors + other.factors, max(self.budget, other.budget))

    def apply(self, e, system: HydroSystem = DRIFT_FLUX) -> sp.Expr:
        e = sp.sympify(e)
        for factor in reversed(self.factors):
            for _ in range(factor.power):
                e = tidy(factor.letter.apply(e, system) + factor.shift * e)
        return e


def word(*factors: Tuple, budget: int = DEFAULT_WORD_BUDGET) -> OperatorWord:
    """word(("Dy", 1), ("J", 2, 1/2)) builds Dy (J + 1/2)^2."""
    return OperatorWord(tuple(WordFactor(TildeOperator(f[0]), *f[1:]) for f in factors), budget)


class GammaKind(Enum):
    """Shape of the Klein-Gordon seed operator applied to q tilde."""
    J_POWER = "J_power"        # J^kappa
    DY_THEN_J = "Dy_then_J"    # Dy^iota J^kappa
    DZ_THEN_J = "Dz_then_J"    # Dz^iota J^kappa


@dataclass(frozen=True)
class GammaSpec:
    """Gamma = word(q tilde) for a word in {J^k, Dy^i J^k, Dz^i J^k}."""
    kind: GammaKind
    kappa: int = 0
    iota: int = 0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.kind == GammaKind.J_POWER and self.iota:
            raise ValueError("J_power specs take no iota")
        if self.kind != GammaKind.J_POWER and self.iota < 1:
            raise ValueError(f"{self.kind.value} specs need iota >= 1")

    def to_word(self, budget: int = DEFAULT_WORD_BUDGET) -> OperatorWord:
        factors = []
        if self.kind == GammaKind.DY_THEN_J:
            factors.append(WordFactor(TildeOperator.DY, self.iota))
        elif self.kind == GammaKind.DZ_THEN_J:
            factors.append(WordFactor(TildeOperator.DZ, self.iota))
        if self.kappa:
            factors.append(WordFactor(TildeOperator.J, self.kappa))
        return OperatorWord(tuple(factors), budget)

    def gamma(self, budget: int = DEFAULT_WORD_BUDGET) -> sp.Expr:
        return apply_to_q(self.to_word(budget))

    def text(self) -> str:
        return self.to_word(budget=self.kappa + self.iota).text()


def apply_to_q(operator_word: OperatorWord) -> sp.Expr:
    return _apply_to_q_cached(operator_word.factors, operator_word.budget)


@lru_cache(maxsize=None)
def _apply_to_q_cached(factors: Tuple[WordFactor, ...], budget: int) -> sp.Expr:
    return OperatorWord(factors, budget).apply(q_tilde())


def parse_word(text: str, budget: int = DEFAULT_WORD_BUDGET) -> OperatorWord:
    return OperatorWord.parse(text, budget)
