"""
Recursion operators of the drift flux system.

Local operators act on symmetry characteristics in modified coordinates:

    R_T       = D_x o diag(1/r1_x, 1/r2_x, 1/r3_x) + N            (Teshukov)
    R1[Q] eta = e^{-(r1-r2)/2} (r1_x (Dy + 1) F, r2_x (Dz + 1) F, 2 r3_x F),
                F = Q(e^{(r1-r2)/2} eta^1 / r1_x)
    R2[Q] eta = the same with F = Q(e^{(r1-r2)/2} eta^2 / r2_x)
    R3[P] eta = (0, 0, P(eta^2 - eta^1 + A(eta^3 / w1))),  P = sum Omega^k A^k

The nonlocal operator R4 eta = B eta + C Y uses the potential Y of the
linearized current (eta^1 + eta^2, V1 eta^1 + V2 eta^2).
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import partial
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from scipy.integrate import cumulative_trapezoid

from ..errors import GrammarError, QuadratureInconsistent
from ..jets.derivatives import A_hat, op_A, tidy, total_dt, total_dx
from ..jets.operators import MatrixDiffOperator
from ..kernel.grammar import parse
from ..kernel.symbols import jet, r1, r1x, r2, r2x, symbolic_omega, symbolic_phi, w0, w1
from .fields import EvolutionaryField
from .report import CheckResult
from .solutions import GridField, evaluate_on_grid, jet_values
from .symmetry import (is_symmetry, make_D, make_G1, make_G2, make_P, make_R, make_W, r3_x,
                       symmetry_samples)
from .system import (DEFAULT_WORD_BUDGET, DRIFT_FLUX, OperatorWord, q_tilde, tilde_Dy,
                     tilde_Dz)

logger = logging.getLogger(__name__)

_HALF_GAP = (r1 - r2) / 2
V1, V2, V3 = DRIFT_FLUX.characteristic_velocities()

# Relative linearized residual accepted for R4 images on a sampled grid
DEFAULT_R4_THRESHOLD = 5e-2
DEFAULT_QUADRATURE_TOLERANCE = 1e-2


class RecursionOperator(ABC):
    """Maps symmetry characteristics to symmetry characteristics."""

    @abstractmethod
    def apply(self, eta: EvolutionaryField) -> EvolutionaryField:
        ...

    def __call__(self, eta: EvolutionaryField) -> EvolutionaryField:
        return self.apply(eta)


@dataclass(frozen=True)
class LocalOperator(RecursionOperator):
    """A recursion operator given by a matrix differential operator."""
    operator: MatrixDiffOperator
    label: str = "R_T"

    def apply(self, eta: EvolutionaryField) -> EvolutionaryField:
        return EvolutionaryField(self.operator.apply(tuple(eta)), f"{self.label}({eta.label})")


@dataclass(frozen=True)
class KleinGordonRecursion(RecursionOperator):
    """R1[Q] (side 1) or R2[Q] (side 2) for an operator word Q in the tilde operators."""
    side: int
    word: OperatorWord = field(default_factory=OperatorWord)

    def __post_init__(self):
        if self.side not in (1, 2):
            raise ValueError(f"Klein-Gordon recursion side must be 1 or 2, got {self.side}")

    @property
    def label(self) -> str:
        return f"R{self.side}[{self.word.text()}]"

    def seed_of(self, eta: EvolutionaryField) -> sp.Expr:
        """e^{(r1-r2)/2} eta^i / r^i_x"""
        x_jet = r1x if self.side == 1 else r2x
        return tidy(sp.exp(_HALF_GAP) * eta[self.side - 1] / x_jet)

    def apply(self, eta: EvolutionaryField) -> EvolutionaryField:
        F = self.word.apply(self.seed_of(eta))
        prefactor = sp.exp(-_HALF_GAP)
        components = (prefactor * (tilde_Dy(F) + F) * r1x,
                      prefactor * (tilde_Dz(F) + F) * r2x,
                      prefactor * 2 * F * r3_x())
        return EvolutionaryField(tuple(tidy(c) for c in components), f"{self.label}({eta.label})")


@dataclass(frozen=True)
class OmegaRecursion(RecursionOperator):
    """R3[P] with P = sum over (Omega, k) of Omega A^k."""
    coefficients: Tuple[Tuple[sp.Expr, int], ...] = ((sp.S.One, 0),)

    def __post_init__(self):
        coefficients = tuple((sp.sympify(Omega), int(k)) for Omega, k in self.coefficients)
        if any(k < 0 for _, k in coefficients):
            raise ValueError("Powers of A in R3 are nonnegative")
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def label(self) -> str:
        return "R3[" + " + ".join(f"({sp.sstr(Omega)})A^{k}" for Omega, k in self.coefficients) + "]"

    def apply_P(self, e) -> sp.Expr:
        powers = {0: sp.sympify(e)}
        for k in range(1, max(k for _, k in self.coefficients) + 1):
            powers[k] = op_A(powers[k - 1])
        return tidy(sum((Omega * powers[k] for Omega, k in self.coefficients), sp.S.Zero))

    def apply(self, eta: EvolutionaryField) -> EvolutionaryField:
        argument = tidy(eta[1] - eta[0] + op_A(tidy(eta[2] / w1)))
        return EvolutionaryField((0, 0, self.apply_P(argument)), f"{self.label}({eta.label})")


@dataclass(frozen=True)
class Combination(RecursionOperator):
    """Finite linear combination of recursion operators."""
    terms: Tuple[Tuple[sp.Expr, RecursionOperator], ...]

    @property
    def label(self) -> str:
        return " + ".join(f"({sp.sstr(c)}){R.label}" for c, R in self.terms)

    def apply(self, eta: EvolutionaryField) -> EvolutionaryField:
        components = [sp.S.Zero] * 3
        for coefficient, R in self.terms:
            image = R.apply(eta)
            components = [a + sp.sympify(coefficient) * b for a, b in zip(components, image)]
        return EvolutionaryField(tuple(tidy(c) for c in components), f"{self.label}({eta.label})")


class R4Convention(Enum):
    """Sign conventions for R4 eta = diag(b1, b2, 0) eta + gamma r_x Y."""
    PRINTED = "printed"    # b = (2, -2), gamma = 1
    HALF_B = "half_b"      # b = (1, -1), gamma = 1
    DOUBLE_C = "double_c"  # b = (2, -2), gamma = 2
    NEG_Y = "neg_y"        # b = (2, -2), gamma = -1

    @property
    def coefficients(self) -> Tuple[int, int, int]:
        return {R4Convention.PRINTED: (2, -2, 1), R4Convention.HALF_B: (1, -1, 1),
                R4Convention.DOUBLE_C: (2, -2, 2), R4Convention.NEG_Y: (2, -2, -1)}[self]


@dataclass(frozen=True)
class NonlocalRecursion(RecursionOperator):
    """R4 with constant B and C proportional to the x-jets."""
    convention: R4Convention = R4Convention.HALF_B

    @property
    def label(self) -> str:
        return f"R4[{self.convention.value}]"

    @property
    def B(self) -> sp.Matrix:
        b1, b2, _ = self.convention.coefficients
        return sp.diag(b1, b2, 0)

    def C(self, standard: bool = False) -> sp.Matrix:
        gamma = self.convention.coefficients[2]
        third = jet(3, 1) if standard else r3_x()
        return sp.Matrix([gamma * r1x, gamma * r2x, gamma * third])

    def apply(self, eta: EvolutionaryField, Y=None) -> EvolutionaryField:
        """B eta + C Y for a potential Y supplied in closed form."""
        if Y is None:
            raise ValueError("R4 needs the potential Y; use apply_R4 for sampled fields")
        Y = sp.sympify(Y)
        image = self.B * sp.Matrix(list(eta)) + self.C() * Y
        return EvolutionaryField(tuple(tidy(c) for c in image), f"{self.label}({eta.label})")


def potential_residuals(eta: EvolutionaryField, Y) -> Tuple[sp.Expr, sp.Expr]:
    """Residuals of D_x Y = eta^1 + eta^2 and D_t Y = -V1 eta^1 - V2 eta^2."""
    Y = sp.sympify(Y)
    return (tidy(total_dx(Y) - eta[0] - eta[1]),
            tidy(total_dt(Y) + V1 * eta[0] + V2 * eta[1]))


def teshukov() -> LocalOperator:
    x_jets = (r1x, r2x, r3_x())
    N = [[(r1x - r2x) / (2 * r1x), (r2x - r1x) / (2 * r2x), 0],
         [(r2x - r1x) / (2 * r1x), (r1x - r2x) / (2 * r2x), 0],
         [(x_jets[2] - r1x) / r1x, (r2x - x_jets[2]) / r2x, (r1x - r2x) / x_jets[2]]]
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            if i == j:
                inverse = 1 / x_jets[i]
                row.append([(inverse, 1), (total_dx(inverse) + N[i][i], 0)])
            else:
                row.append([(N[i][j], 0)])
        rows.append(row)
    return LocalOperator(MatrixDiffOperator.from_terms(rows), "R_T")


def apply(R: RecursionOperator, eta: EvolutionaryField) -> EvolutionaryField:
    return R.apply(eta)


def _word(spec: Union[OperatorWord, str, None], budget: int) -> OperatorWord:
    if isinstance(spec, OperatorWord):
        return spec
    return OperatorWord.parse(spec or "", budget)


def make_R1(spec: Union[OperatorWord, str, None] = None,
            budget: int = DEFAULT_WORD_BUDGET) -> KleinGordonRecursion:
    return KleinGordonRecursion(1, _word(spec, budget))


def make_R2(spec: Union[OperatorWord, str, None] = None,
            budget: int = DEFAULT_WORD_BUDGET) -> KleinGordonRecursion:
    return KleinGordonRecursion(2, _word(spec, budget))


def make_R3(P: Sequence[Tuple] = ((1, 0),)) -> OmegaRecursion:
    return OmegaRecursion(tuple(P))


def teshukov_decomposition() -> Combination:
    """(1/2) R1[1] - (1/2) R2[1] + R3[1]"""
    half = sp.Rational(1, 2)
    return Combination(((half, make_R1()), (-half, make_R2()), (sp.S.One, make_R3())))


def parse_recursion(text: str, budget: int = DEFAULT_WORD_BUDGET) -> RecursionOperator:
    """
    Address operators from text: "T", "R1:J", "R2:Dy^2", "R3:w0;1", "R4:half_b".

    For R3 the i-th ';'-separated expression is the coefficient of A^i.
    """
    head, _, tail = text.strip().partition(":")
    head = head.upper()
    if head in ("T", "RT", "R_T"):
        return teshukov()
    if head == "R1":
        return make_R1(tail, budget)
    if head == "R2":
        return make_R2(tail, budget)
    if head == "R3":
        parts = [p for p in tail.split(";")] if tail else ["1"]
        return make_R3([(parse(p), k) for k, p in enumerate(parts) if p.strip() not in ("", "0")])
    if head == "R4":
        try:
            return NonlocalRecursion(R4Convention(tail or R4Convention.HALF_B.value))
        except ValueError:
            raise GrammarError(f"Unknown R4 convention '{tail}'; choose from "
                               f"{', '.join(c.value for c in R4Convention)}")
    raise GrammarError(f"Unknown recursion operator '{text}'")


def parse_field(text: str, budget: int = DEFAULT_WORD_BUDGET) -> EvolutionaryField:
    """Symmetries from text: "D", "G1", "G2", "W(<expr>)", "P(<expr>)", "R(<word>)"."""
    text = text.strip()
    named = {"D": make_D, "G1": make_G1, "G2": make_G2}
    if text in named:
        return named[text]()
    if len(text) > 3 and text[1] == "(" and text.endswith(")"):
        head, argument = text[0], text[2:-1]
        if head == "W":
            return make_W(parse(argument))
        if head == "P":
            return make_P(parse(argument))
        if head == "R":
            return make_R(argument, budget)
    raise GrammarError(f"Unknown symmetry '{text}'")


@dataclass
class ActionCase:
    """One row of an action table: R eta should equal expected."""
    name: str
    operator: RecursionOperator
    eta: EvolutionaryField
    expected: EvolutionaryField


def _zero_field() -> EvolutionaryField:
    return EvolutionaryField((0, 0, 0), "0")


def _words(max_length: int) -> List[OperatorWord]:
    words = [OperatorWord()]
    layer = [()]
    for _ in range(max_length):
        layer = [prefix + (letter,) for prefix in layer for letter in ("J", "Dy", "Dz")]
        words.extend(OperatorWord.parse("".join(letters)) for letters in layer)
    return words


def _seeds():
    """Seed functions used to instantiate the families in action tables."""
    Phi = sp.exp(r1 - r2 / 4)
    q = q_tilde()
    return Phi, q, w0 * w1


def teshukov_action_cases() -> List[ActionCase]:
    R = teshukov()
    Phi, Gamma, Omega = _seeds()
    half = sp.Rational(1, 2)
    return [
        ActionCase("R_T D", R, make_D(),
                   make_G1().scale(-2) - make_G2() + make_W(1)),
        ActionCase("R_T R(q)", R, make_R(Gamma),
                   make_R(tidy(half * (tilde_Dy(Gamma) - tilde_Dz(Gamma))))),
        ActionCase("R_T P(Phi)", R, make_P(Phi),
                   make_P(tidy(sp.diff(Phi, r1) + sp.diff(Phi, r2)))),
        ActionCase("R_T W(Omega)", R, make_W(Omega), make_W(A_hat(tidy(Omega / w1)))),
    ]


def klein_gordon_action_cases(max_length: int = 1) -> List[ActionCase]:
    Phi, Gamma, Omega = _seeds()
    cases = []
    for word_ in _words(max_length):
        for side, make in ((1, make_R1), (2, make_R2)):
            R = make(word_)
            if side == 1:
                from_D = word_.apply(q_tilde())
                from_R = word_.apply(tidy(tilde_Dy(Gamma) + Gamma))
                from_P = word_.apply(tidy(Phi + 2 * sp.diff(Phi, r1)))
            else:
                from_D = word_.apply(tilde_Dz(q_tilde()))
                from_R = word_.apply(tidy(tilde_Dz(Gamma) + Gamma))
                from_P = word_.apply(tidy(Phi - 2 * sp.diff(Phi, r2)))
            cases.extend([
                ActionCase(f"{R.label} D", R, make_D(), make_R(from_D)),
                ActionCase(f"{R.label} R(q)", R, make_R(Gamma), make_R(from_R)),
                ActionCase(f"{R.label} P(Phi)", R, make_P(Phi), make_P(from_P)),
                ActionCase(f"{R.label} W(Omega)", R, make_W(Omega), _zero_field()),
            ])
    return cases


def omega_action_cases() -> List[ActionCase]:
    Phi, Gamma, Omega = _seeds()
    cases = []
    for P in (((1, 0),), ((w0, 0), (1, 1)), ((symbolic_omega(0), 1),)):
        R = make_R3(P)
        Omega0 = sum((sp.sympify(c) for c, k in R.coefficients if k == 0), sp.S.Zero)
        cases.extend([
            ActionCase(f"{R.label} D", R, make_D(), make_W(Omega0)),
            ActionCase(f"{R.label} R(q)", R, make_R(Gamma), _zero_field()),
            ActionCase(f"{R.label} P(Phi)", R, make_P(Phi), _zero_field()),
            ActionCase(f"{R.label} W(Omega)", R, make_W(Omega),
                       make_W(R.apply_P(A_hat(tidy(Omega / w1))))),
        ])
    return cases


def action_table_cases(max_length: int = 1) -> List[ActionCase]:
    return teshukov_action_cases() + klein_gordon_action_cases(max_length) + omega_action_cases()


def check_action(case: ActionCase, rng: Optional[np.random.Generator] = None) -> CheckResult:
    image = case.operator.apply(case.eta)
    residuals = [a - b for a, b in zip(image, case.expected)]
    return CheckResult.from_residuals(f"action[{case.name}]", residuals, rng,
                                      expected=case.expected.serialize())


def maps_into_symmetries(R: RecursionOperator, samples: Optional[Sequence[EvolutionaryField]] = None,
                         rng: Optional[np.random.Generator] = None) -> CheckResult:
    """Every image of the sample set is a symmetry or exactly zero."""
    samples = symmetry_samples(1) if samples is None else samples
    residuals, failing = [], []
    for eta in samples:
        image = R.apply(eta)
        if image.is_zero(rng):
            continue
        result = is_symmetry(image, rng=rng)
        if not result:
            failing.append(eta.label)
            residuals.extend(result.residuals)
    return CheckResult.from_bool(f"maps_into_symmetries[{R.label}]", not failing, residuals,
                                 failing=failing)


def decomposition_fields() -> List[EvolutionaryField]:
    return [make_D(), make_R(q_tilde()), make_P(symbolic_phi()), make_W(symbolic_omega(1))]


def teshukov_decomposition_check(fields: Optional[Sequence[EvolutionaryField]] = None,
                                 rng: Optional[np.random.Generator] = None) -> CheckResult:
    """R_T eta = ((1/2) R1[1] - (1/2) R2[1] + R3[1]) eta on each field."""
    fields = decomposition_fields() if fields is None else fields
    R_T, combination = teshukov(), teshukov_decomposition()
    residuals = []
    for eta in fields:
        residuals.extend(a - b for a, b in zip(R_T.apply(eta), combination.apply(eta)))
    return CheckResult.from_residuals("teshukov_decomposition", residuals, rng,
                                      fields=[eta.label for eta in fields])


def r4_determining_residuals(A: Optional[sp.Matrix] = None, B: Optional[sp.Matrix] = None,
                             C: Optional[sp.Matrix] = None) -> Dict[str, sp.Expr]:
    """
    The determining system for R4 eta = A D_x eta + B eta + C Y in standard jets.

    Entries of A may depend on r; entries of B and C on r and r_x. Keys name the
    equation and the (k, k') index.
    """
    A = sp.zeros(3, 3) if A is None else A
    B = sp.zeros(3, 3) if B is None else B
    C = sp.zeros(3, 1) if C is None else C
    V = [sp.sympify(v) for v in DRIFT_FLUX.velocities]
    r = [jet(l, 0) for l in (1, 2, 3)]
    rx = [jet(l, 1) for l in (1, 2, 3)]
    rxx = [jet(l, 2) for l in (1, 2, 3)]
    spread = rx[0] + rx[1]

    def transport(f, k):
        """f_{r^l} (V^k - V^l) r^l_x + f_{r^l_x} ((V^k - V^l) r^l_xx - (r1_x + r2_x) r^l_x)"""
        return sum(sp.diff(f, r[l]) * (V[k] - V[l]) * rx[l]
                   + sp.diff(f, rx[l]) * ((V[k] - V[l]) * rxx[l] - spread * rx[l])
                   for l in range(3))

    residuals = {}
    for k in range(3):
        for kp in range(3):
            delta = 1 if kp in (0, 1) else 0
            index = f"{k + 1}{kp + 1}"
            residuals[f"A0[{index}]"] = A[k, kp] * (V[k] - V[kp])
            residuals[f"A1[{index}]"] = (
                sum(sp.diff(A[k, kp], r[l]) * (V[k] - V[l]) * rx[l] for l in range(3))
                - A[k, kp] * spread
                - delta * sum(A[k, j] * rx[j] for j in range(3))
                + (V[k] - V[kp]) * B[k, kp]
                + rx[k] * (A[0, kp] + A[1, kp]))
            residuals[f"B[{index}]"] = (
                transport(B[k, kp], k)
                + rx[k] * (B[0, kp] + B[1, kp])
                - delta * (sum(A[k, j] * rxx[j] + B[k, j] * rx[j] for j in range(3))
                           - (V[k] - V[kp]) * C[k]))
        residuals[f"C[{k + 1}]"] = transport(C[k], k) + rx[k] * (C[0] + C[1])
    return {key: sp.factor(sp.expand(value)) for key, value in residuals.items()}


def r4_determining_check(convention: R4Convention = R4Convention.HALF_B,
                         rng: Optional[np.random.Generator] = None) -> CheckResult:
    R4 = NonlocalRecursion(convention)
    residuals = r4_determining_residuals(sp.zeros(3, 3), R4.B, R4.C(standard=True))
    nonzero = {key: sp.sstr(value) for key, value in residuals.items() if value != 0}
    if nonzero:
        logger.debug("R4 %s leaves residuals %s", convention.value, nonzero)
    return CheckResult.from_residuals(f"r4_determining[{convention.value}]",
                                      list(residuals.values()), rng,
                                      convention=convention.value, nonzero=nonzero)


def _centered_t(a: np.ndarray, dt: float) -> np.ndarray:
    return (a[2:, 1:-1] - a[:-2, 1:-1]) / (2 * dt)


def _centered_x(a: np.ndarray, dx: float) -> np.ndarray:
    return (a[1:-1, 2:] - a[1:-1, :-2]) / (2 * dx)


def potential_on_grid(eta_values: Sequence[np.ndarray], grid: GridField,
                      tolerance: float = DEFAULT_QUADRATURE_TOLERANCE) -> Tuple[np.ndarray, float]:
    """
    Y from Y_x = eta^1 + eta^2 by the trapezoidal rule along x, anchored at the
    left boundary by integrating Y_t = -V1 eta^1 - V2 eta^2 in t.

    Returns Y and the relative mismatch of its centered t-difference against Y_t.
    """
    s = grid.r1 + grid.r2
    Y_x = eta_values[0] + eta_values[1]
    Y_t = -(s + 1) * eta_values[0] - (s - 1) * eta_values[1]
    anchor = cumulative_trapezoid(Y_t[:, 0], dx=grid.dt, initial=0.0)
    Y = anchor[:, None] + cumulative_trapezoid(Y_x, dx=grid.dx, axis=1, initial=0.0)
    mismatch = float(np.max(np.abs(_centered_t(Y, grid.dt) - Y_t[1:-1, 1:-1])))
    mismatch /= 1.0 + float(np.max(np.abs(Y_t)))
    if mismatch > tolerance:
        raise QuadratureInconsistent(f"D_t Y disagrees with -V1 eta^1 - V2 eta^2 by {mismatch:.3e}")
    return Y, mismatch


def linearized_residual_on_grid(zeta: Sequence[np.ndarray], grid: GridField) -> Dict[str, float]:
    """Centered residual of D_t z^k + V^k D_x z^k + (z^1 + z^2) r^k_x on interior nodes."""
    s = (grid.r1 + grid.r2)[1:-1, 1:-1]
    speeds = (s + 1, s - 1, s)
    jets = jet_values(grid, 1)
    spread = (zeta[0] + zeta[1])[1:-1, 1:-1]
    absolute, scale = 0.0, 1.0
    for k in range(3):
        transport = speeds[k] * _centered_x(zeta[k], grid.dx)
        residual = _centered_t(zeta[k], grid.dt) + transport + spread * jets[jet(k + 1, 1)][1:-1, 1:-1]
        absolute = max(absolute, float(np.max(np.abs(residual))))
        scale = max(scale, float(np.max(np.abs(transport))))
    return {"max": absolute, "relative": absolute / scale}


def apply_R4(eta: EvolutionaryField, grid: GridField,
             convention: R4Convention = R4Convention.HALF_B,
             threshold: float = DEFAULT_R4_THRESHOLD,
             quadrature_tolerance: float = DEFAULT_QUADRATURE_TOLERANCE) -> CheckResult:
    """
    Numeric R4 image of a symmetry on a sampled solution and its linearized residual.
    """
    R4 = NonlocalRecursion(convention)
    # 1. Symmetry components and jets on the grid
    jets = jet_values(grid, 2)
    eta_values = [evaluate_on_grid(component, grid, jets) for component in eta]

    # 2. Potential by quadrature, checked against its t-equation
    Y, mismatch = potential_on_grid(eta_values, grid, quadrature_tolerance)

    # 3. Image B eta + C Y
    b1, b2, gamma = convention.coefficients
    zeta = [b1 * eta_values[0] + gamma * jets[jet(1, 1)] * Y,
            b2 * eta_values[1] + gamma * jets[jet(2, 1)] * Y,
            gamma * jets[jet(3, 1)] * Y]

    # 4. Residual of the linearized system
    norms = linearized_residual_on_grid(zeta, grid)
    logger.debug("%s(%s): relative residual %.3e", R4.label, eta.label, norms["relative"])
    return CheckResult.from_bool(f"apply_R4[{convention.value}]({eta.label})",
                                 norms["relative"] <= threshold, [f"{norms['relative']:.6e}"],
                                 convention=convention.value, residual_max=norms["max"],
                                 residual_relative=norms["relative"],
                                 quadrature_mismatch=mismatch, threshold=threshold)


def r4_fields() -> List[EvolutionaryField]:
    """Symmetries used for the numeric R4 check."""
    return [make_G2(), make_G1(), make_D(), make_P(sp.exp(r1 - r2 / 4))]


def resolve_r4_convention(grid: GridField, fields: Optional[Sequence[EvolutionaryField]] = None,
                          threshold: float = DEFAULT_R4_THRESHOLD) -> Dict[str, bool]:
    """Which conventions map every field to a numeric solution of the linearized system."""
    fields = r4_fields()[:2] if fields is None else fields
    return {convention.value: all(apply_R4(eta, grid, convention, threshold).passed
                                  for eta in fields)
            for convention in R4Convention}


def action_checks(max_length: int = 1) -> List[Tuple[str, Callable[..., CheckResult]]]:
    """(id, check) pairs for the recursion suite."""
    checks = [(f"action[{case.name}]", partial(check_action, case))
              for case in action_table_cases(max_length)]
    for R in (teshukov(), make_R1(), make_R2("J"), make_R3()):
        checks.append((f"maps_into_symmetries[{R.label}]",
                       partial(maps_into_symmetries, R, None)))
    return checks
