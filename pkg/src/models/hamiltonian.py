"""
Hamiltonian operators of hydrodynamic type for the drift flux system.

With E = e^{r2-r1} the family reads

    H_Theta = E diag(-1, 1, Theta E) D_x + first-order part,

a flat metric diag(-E, E, Theta E^2) and densities
H = (r1+r2)^2 e^{r1-r2} + c0 (r1+r2) + 2 (r1-r2+Xi) e^{r1-r2}.
"""
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from ..errors import ConstraintViolated, DegenerateMetric
from ..jets.derivatives import A_hat, tidy
from ..jets.operators import MatrixDiffOperator, frechet
from ..jets.variational import euler_operator
from ..kernel.expression import diff_partial, zero_test
from ..kernel.symbols import r1, r1x, r2, r2x, symbolic_theta, w0, w1
from .conservation import (make_cosymmetry_family1, make_cosymmetry_family2,
                           make_cosymmetry_family3, omega_tail_sums)
from .fields import Cosymmetry, EvolutionaryField
from .report import CheckResult, CheckStatus
from .symmetry import gamma_of, is_symmetry, lie_bracket, make_P, make_R, make_W, r3_x
from .system import DRIFT_FLUX, tilde_Dy

logger = logging.getLogger(__name__)

_GAP = r1 - r2
_SUM = r1 + r2

# Coordinates on which the metric and the ratio tensor live
METRIC_COORDINATES = (r1, r2, w0)

# H_Theta delta H = HAMILTONIAN_SCALE * (V^1 r1_x, V^2 r2_x, V^3 r3_x)
HAMILTONIAN_SCALE = -4


def _theta(Theta) -> sp.Expr:
    Theta = sp.sympify(Theta)
    if Theta.free_symbols - {w0}:
        raise ConstraintViolated(f"Theta must depend on w0 only, got {Theta}")
    return Theta


@dataclass(frozen=True)
class HamiltonianOperator:
    """First-order operator h D_x + f generated by Theta(w0)."""
    operator: MatrixDiffOperator
    theta: sp.Expr

    @property
    def degenerate(self) -> bool:
        return self.theta == 0

    def apply(self, lam: Sequence, label: str = "") -> EvolutionaryField:
        if not label and isinstance(lam, Cosymmetry):
            label = f"H({lam.label})"
        return EvolutionaryField(self.operator.apply(tuple(lam)), label)

    def adjoint(self) -> MatrixDiffOperator:
        return self.operator.adjoint()


def make_H(Theta) -> HamiltonianOperator:
    Theta = _theta(Theta)
    E = sp.exp(-_GAP)
    r3x = r3_x()
    gap_x = r2x - r1x
    f33 = E ** 2 * (gap_x * Theta + r3x * diff_partial(Theta, w0) / 2)
    rows = [
        [[(-E, 1), (-E * gap_x / 2, 0)], [(E * gap_x / 2, 0)], [(E * r3x, 0)]],
        [[(-E * gap_x / 2, 0)], [(E, 1), (E * gap_x / 2, 0)], [(E * r3x, 0)]],
        [[(-E * r3x, 0)], [(-E * r3x, 0)], [(Theta * E ** 2, 1), (f33, 0)]],
    ]
    return HamiltonianOperator(MatrixDiffOperator.from_terms(rows), Theta)


def _operator(M: Union[HamiltonianOperator, MatrixDiffOperator]) -> MatrixDiffOperator:
    return M.operator if isinstance(M, HamiltonianOperator) else M


def is_skew_adjoint(M: Union[HamiltonianOperator, MatrixDiffOperator],
                    rng: Optional[np.random.Generator] = None) -> bool:
    M = _operator(M)
    if M.size != M.columns:
        return False
    return M.adjoint().equals(-M, rng)


def noether_check(M: Union[HamiltonianOperator, MatrixDiffOperator], samples: Sequence[Cosymmetry],
                  rng: Optional[np.random.Generator] = None) -> CheckResult:
    """Every sample cosymmetry is mapped to a symmetry."""
    operator = _operator(M)
    failing, images = [], {}
    probabilistic = False
    status = CheckStatus.PASS
    for lam in samples:
        image = EvolutionaryField(operator.apply(tuple(lam)), f"H({lam.label})")
        images[lam.label] = image.serialize()
        result = is_symmetry(image, rng=rng)
        probabilistic = probabilistic or result.probabilistic
        if result.status == CheckStatus.INCONCLUSIVE and status == CheckStatus.PASS:
            status = CheckStatus.INCONCLUSIVE
        elif result.status == CheckStatus.FAIL:
            status = CheckStatus.FAIL
            failing.extend(f"{lam.label}: {r}" for r in result.residuals)
    return CheckResult("noether", status, failing, probabilistic, {"images": images})


def image_identities(Theta) -> List[Tuple[str, EvolutionaryField, EvolutionaryField]]:
    """(description, H lambda, expected field) for members of the three cosymmetry families."""
    Theta = _theta(Theta)
    H = make_H(Theta)
    identities = []
    for Omega in (sp.S.One, w0, w0 * w1):
        L = tidy(A_hat(Omega) / w1)
        expected = Theta * A_hat(L) + diff_partial(Theta, w0) * w1 * L / 2
        identities.append((f"H F1({Omega}) = W", H.apply(make_cosymmetry_family1(Omega)),
                           make_W(tidy(expected))))
    for Phi in (sp.exp(_GAP / 2), sp.exp(r1 - r2 / 4)):
        Phi_bar = diff_partial(Phi, r1) - Phi / 2
        identities.append((f"H F2({Phi}) = P", H.apply(make_cosymmetry_family2(Phi)),
                           make_P(tidy(Phi_bar))))
    for spec in ("1", "J", "Dy"):
        Gamma, label = gamma_of(spec)
        Gamma_bar = tidy((tilde_Dy(Gamma) - Gamma) / 2)
        identities.append((f"H F3({label}) = R", H.apply(make_cosymmetry_family3(spec)),
                           make_R(Gamma_bar)))
    return identities


@dataclass
class Metric:
    """
    Contravariant metric g^{ij} on (r1, r2, w0) with its Levi-Civita data.
    """
    contravariant: sp.Matrix
    coordinates: Tuple[sp.Symbol, ...] = METRIC_COORDINATES
    _christoffel: Optional[Dict[Tuple[int, int, int], sp.Expr]] = field(default=None, init=False,
                                                                        repr=False)

    def __post_init__(self):
        self.contravariant = sp.Matrix(self.contravariant)
        n = len(self.coordinates)
        if self.contravariant.shape != (n, n):
            raise ValueError(f"Metric must be {n}x{n}")
        if tidy(self.contravariant.det()) == 0:
            raise DegenerateMetric("Metric is degenerate")

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    @property
    def covariant(self) -> sp.Matrix:
        if self.contravariant.is_diagonal():
            return sp.diag(*[1 / self.contravariant[i, i] for i in range(self.dimension)])
        return self.contravariant.inv()

    def christoffel(self) -> Dict[Tuple[int, int, int], sp.Expr]:
        """Gamma^i_{jk} keyed by (i, j, k)."""
        if self._christoffel is None:
            g, g_inv, u = self.covariant, self.contravariant, self.coordinates
            n = self.dimension
            symbols = {}
            for i, j, k in product(range(n), repeat=3):
                total = sum(g_inv[i, l] * (sp.diff(g[l, k], u[j]) + sp.diff(g[l, j], u[k])
                                           - sp.diff(g[j, k], u[l]))
                            for l in range(n) if g_inv[i, l] != 0)
                symbols[(i, j, k)] = tidy(sp.S.Half * total)
            self._christoffel = symbols
        return self._christoffel


def principal_matrix(H: HamiltonianOperator) -> sp.Matrix:
    """Coefficients of D_x in H."""
    n = H.operator.size
    matrix = sp.zeros(n, n)
    for i, row in enumerate(H.operator.entries):
        for j, entry in enumerate(row):
            matrix[i, j] = sum((term.coefficient for term in entry if term.dx_power == 1), sp.S.Zero)
    return matrix


def metric_of(H: HamiltonianOperator) -> Metric:
    if H.degenerate:
        raise DegenerateMetric("Theta = 0 gives a degenerate metric")
    return Metric(principal_matrix(H))


def riemann_curvature(g: Metric) -> Dict[Tuple[int, int, int, int], sp.Expr]:
    """R^i_{jkl} for k < l."""
    Gamma, u, n = g.christoffel(), g.coordinates, g.dimension
    curvature = {}
    for i, j in product(range(n), repeat=2):
        for k in range(n):
            for l in range(k + 1, n):
                value = sp.diff(Gamma[(i, l, j)], u[k]) - sp.diff(Gamma[(i, k, j)], u[l])
                value += sum(Gamma[(i, k, m)] * Gamma[(m, l, j)] - Gamma[(i, l, m)] * Gamma[(m, k, j)]
                             for m in range(n))
                curvature[(i, j, k, l)] = tidy(value)
    return curvature


def is_flat(g: Metric, rng: Optional[np.random.Generator] = None) -> bool:
    for index, component in riemann_curvature(g).items():
        if not zero_test(component, rng):
            logger.debug("Curvature component R%s = %s", index, component)
            return False
    return True


def nijenhuis_tensor(s: sp.Matrix, coordinates: Sequence[sp.Symbol] = METRIC_COORDINATES
                     ) -> Dict[Tuple[int, int, int], sp.Expr]:
    """N^i_{jk} for j < k."""
    s = sp.Matrix(s)
    n = len(coordinates)
    ds = {(i, j, l): sp.diff(s[i, j], coordinates[l]) for i, j, l in product(range(n), repeat=3)}
    tensor = {}
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                value = sum(s[l, j] * ds[(i, k, l)] - s[l, k] * ds[(i, j, l)]
                            - s[i, l] * (ds[(l, k, j)] - ds[(l, j, k)]) for l in range(n))
                tensor[(i, j, k)] = tidy(value)
    return tensor


def _covariant_second_derivatives(g: Metric, T: sp.Matrix):
    """nabla^i nabla^j T^{kl} keyed by (i, j, k, l)."""
    Gamma, u, n = g.christoffel(), g.coordinates, g.dimension
    first = {}
    for a, k, l in product(range(n), repeat=3):
        first[(a, k, l)] = sp.diff(T[k, l], u[a]) + sum(
            Gamma[(k, a, m)] * T[m, l] + Gamma[(l, a, m)] * T[k, m] for m in range(n))
    second = {}
    for b, a, k, l in product(range(n), repeat=4):
        second[(b, a, k, l)] = sp.diff(first[(a, k, l)], u[b]) + sum(
            Gamma[(k, b, m)] * first[(a, m, l)] + Gamma[(l, b, m)] * first[(a, k, m)]
            - Gamma[(m, b, a)] * first[(m, k, l)] for m in range(n))
    g_inv = g.contravariant
    raised = {}
    for i, j, k, l in product(range(n), repeat=4):
        raised[(i, j, k, l)] = sum(g_inv[i, b] * g_inv[j, a] * second[(b, a, k, l)]
                                   for b in range(n) for a in range(n)
                                   if g_inv[i, b] != 0 and g_inv[j, a] != 0)
    return raised


def compatibility_check(Theta_1, Theta_2, rng: Optional[np.random.Generator] = None) -> CheckResult:
    """Vanishing Nijenhuis tensor of s = g~ g^{-1} plus the covariant compatibility conditions."""
    Theta_1, Theta_2 = _theta(Theta_1), _theta(Theta_2)
    if Theta_1 == 0:
        raise DegenerateMetric("compatibility_check needs a nonvanishing first Theta")
    g = metric_of(make_H(Theta_1))
    tilde_matrix = principal_matrix(make_H(Theta_2))
    s = (tilde_matrix * g.covariant).applyfunc(tidy)
    residuals = list(nijenhuis_tensor(s).values())
    X = _covariant_second_derivatives(g, tilde_matrix)
    n = g.dimension
    for i, j, k, l in product(range(n), repeat=4):
        residuals.append(X[(i, j, k, l)] + X[(k, l, i, j)] - X[(i, k, j, l)] - X[(j, l, i, k)])
    return CheckResult.from_residuals(f"compatibility[{Theta_1}, {Theta_2}]", residuals, rng,
                                      ratio=[sp.sstr(s[i, i]) for i in range(3)])


def hamiltonian_density(c0, Xi) -> sp.Expr:
    c0, Xi = sp.sympify(c0), sp.sympify(Xi)
    return tidy(_SUM ** 2 * sp.exp(_GAP) + c0 * _SUM + 2 * (_GAP + Xi) * sp.exp(_GAP))


def xi_condition(Theta, c0, Xi) -> sp.Expr:
    """Theta Xi'' + Theta' Xi' / 2 - c0"""
    Theta, Xi = _theta(Theta), sp.sympify(Xi)
    Xi_1 = diff_partial(Xi, w0)
    return tidy(Theta * diff_partial(Xi_1, w0) + diff_partial(Theta, w0) * Xi_1 / 2 - c0)


def hamiltonian_form_check(Theta, c0, Xi, rng: Optional[np.random.Generator] = None) -> CheckResult:
    """
    H_Theta applied to the variational derivative of the density reproduces the
    system up to the constant factor; raises ConstraintViolated, with the report
    attached, when Xi violates its auxiliary condition.
    """
    Theta = _theta(Theta)
    H = make_H(Theta)
    image = H.operator.apply(euler_operator(hamiltonian_density(c0, Xi)))
    velocities = DRIFT_FLUX.characteristic_velocities()
    target = [HAMILTONIAN_SCALE * V * DRIFT_FLUX.x_jet(k) for k, V in zip((1, 2, 3), velocities)]
    name = f"hamiltonian_form[Theta={Theta}, c0={c0}, Xi={Xi}]"
    result = CheckResult.from_residuals(name, [a - b for a, b in zip(image, target)], rng)
    condition = xi_condition(Theta, c0, Xi)
    if not zero_test(condition, rng):
        logger.warning("Auxiliary condition fails for Xi = %s: %s", Xi, condition)
        raise ConstraintViolated(f"Xi = {Xi} violates Theta Xi'' + Theta' Xi'/2 = c0: "
                                 f"residual {condition}", report=result)
    return result


def casimir_antiderivative(Theta) -> sp.Expr:
    """An antiderivative of |Theta|^{-1/2} on the branch w0 > 0."""
    Theta = _theta(Theta)
    u = sp.Dummy("u", positive=True)
    integral = sp.integrate(1 / sp.sqrt(sp.Abs(Theta.xreplace({w0: u}))), u)
    if integral.has(sp.Integral):
        raise ConstraintViolated(f"No closed-form antiderivative for Theta = {Theta}")
    return tidy(integral.xreplace({u: w0}))


def casimir_densities(Theta) -> List[sp.Expr]:
    E = sp.exp(_GAP)
    return [E, tidy(E * casimir_antiderivative(Theta))]


def casimir_check(Theta, rng: Optional[np.random.Generator] = None) -> CheckResult:
    """H_Theta annihilates the Casimir characteristics; H_0 annihilates family 1."""
    Theta = _theta(Theta)
    H = make_H(Theta)
    if H.degenerate:
        kernel = [tuple(make_cosymmetry_family1(Omega)) for Omega in (sp.S.One, w0, w0 * w1)]
    else:
        kernel = [euler_operator(density) for density in casimir_densities(Theta)]
    residuals = [component for lam in kernel for component in H.operator.apply(lam)]
    return CheckResult.from_residuals(f"casimir[Theta={Theta}]", residuals, rng)


def cosym_bracket(gamma_1: Cosymmetry, gamma_2: Cosymmetry, Theta) -> Cosymmetry:
    """l_{g2} H g1 + l*_{H g1} g2 + (l_{g1} - l*_{g1}) H g2"""
    H = make_H(Theta).operator
    image_1, image_2 = H.apply(tuple(gamma_1)), H.apply(tuple(gamma_2))
    first = frechet(tuple(gamma_2)).apply(image_1)
    second = frechet(image_1).adjoint().apply(tuple(gamma_2))
    linear = frechet(tuple(gamma_1))
    third = (linear - linear.adjoint()).apply(image_2)
    return Cosymmetry(tuple(tidy(a + b + c) for a, b, c in zip(first, second, third)),
                      f"[{gamma_1.label}, {gamma_2.label}]")


def homomorphism_check(gamma_1: Cosymmetry, gamma_2: Cosymmetry, Theta,
                       rng: Optional[np.random.Generator] = None) -> CheckResult:
    """H [g1, g2] = s [H g1, H g2] for a sign s, which is reported."""
    H = make_H(Theta)
    lhs = H.apply(cosym_bracket(gamma_1, gamma_2, Theta))
    rhs = lie_bracket(H.apply(gamma_1), H.apply(gamma_2))
    name = f"homomorphism[{gamma_1.label}, {gamma_2.label}]"
    last = None
    for sign in (1, -1):
        result = CheckResult.from_residuals(name, [a - sign * b for a, b in zip(lhs, rhs)], rng,
                                            sign=sign)
        if result.passed:
            return result
        last = result
    return last


def make_hamiltonian_symmetry_W(Theta, Omega) -> EvolutionaryField:
    """W(Theta A_hat X + Theta' w1 X / 2) with X = sum_k (-A_hat)^k Omega_{w_k}."""
    Theta, Omega = _theta(Theta), sp.sympify(Omega)
    _, X = omega_tail_sums(Omega)
    Omega_bar = Theta * A_hat(X) + diff_partial(Theta, w0) * w1 * X / 2
    field_ = make_W(tidy(Omega_bar))
    return EvolutionaryField(field_.components, f"W_H[Theta={Theta}]({Omega})")


def theta_samples() -> List[sp.Expr]:
    return [sp.S.One, w0 ** -2, symbolic_theta()]


def density_grid(c0=sp.Symbol("c0")) -> List[Tuple[sp.Expr, sp.Expr, sp.Expr]]:
    """(Theta, c0, Xi) triples satisfying the auxiliary condition."""
    return [(sp.S.One, sp.S.Zero, sp.S.Zero),
            (sp.S.One, sp.S.One, w0 ** 2 / 2),
            (sp.S.One, c0, c0 * w0 ** 2 / 2 + w0)]
