"""
Cosymmetries, conserved currents and their characteristics.

Three families span the reduced conservation laws:

    family 1   e^{r1-r2} (Omega, (r1+r2) Omega)
    family 2   e^{(r1-r2)/2} (2 Phi_r1 + Phi, 2 V1 Phi_r1 + V2 Phi)
    family 3   (r2_x rho + r1_x sigma, V2 r2_x rho + V1 r1_x sigma),
               rho = -q Dz Gamma, sigma = (Dy q) Gamma

with Omega a function of the w's, Phi a Klein-Gordon solution and Gamma = Q(q tilde).
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from ..errors import ConstructionFailed
from ..jets.derivatives import A_hat, full_dt, full_dx, tidy, to_off_shell, to_standard
from ..jets.operators import prolonged_action
from ..jets.variational import euler_operator, full_euler_operator, ord
from ..kernel.expression import diff_partial, zero_test
from ..kernel.symbols import jet, omega, r1, r1x, r2, r2x, symbolic_omega, symbolic_phi, t, w0, w1, x
from .fields import ConservedCurrent, Cosymmetry, EvolutionaryField
from .report import CheckResult
from .symmetry import gamma_of, require_klein_gordon
from .system import DRIFT_FLUX, GammaKind, GammaSpec, HydroSystem, q_tilde, tilde_Dy, tilde_Dz

logger = logging.getLogger(__name__)

_GAP = r1 - r2
_SUM = r1 + r2
V1, V2, V3 = DRIFT_FLUX.characteristic_velocities()

# Relative factor between the Euler derivative of a family-3 density and its characteristic
FAMILY3_MULTIPLIER = -2


def is_cosymmetry(lam: Cosymmetry, system: HydroSystem = DRIFT_FLUX,
                  rng: Optional[np.random.Generator] = None) -> CheckResult:
    residuals = system.adjoint_linearized(tuple(lam))
    return CheckResult.from_residuals(f"is_cosymmetry[{lam.label}]", residuals, rng)


def is_conserved_current(c: ConservedCurrent, system: HydroSystem = DRIFT_FLUX,
                         rng: Optional[np.random.Generator] = None) -> CheckResult:
    residual = system.divergence(c.density, c.flux)
    return CheckResult.from_residuals(f"is_conserved_current[{c.label}]", [residual], rng)


def _verified(c: ConservedCurrent, verify: bool) -> ConservedCurrent:
    if verify:
        result = is_conserved_current(c)
        if not result.passed:
            raise ConstructionFailed(f"Constructed current {c.label} is not conserved: "
                                     f"{'; '.join(result.residuals)}")
    return c


def make_cosymmetry_family1(Omega) -> Cosymmetry:
    Omega = sp.sympify(Omega)
    prefactor = sp.exp(_GAP)
    third = tidy(A_hat(Omega) / w1)
    return Cosymmetry((tidy(prefactor * Omega), tidy(-prefactor * Omega), tidy(prefactor * third)),
                      f"F1({Omega})")


def make_cosymmetry_family2(Phi) -> Cosymmetry:
    Phi = sp.sympify(Phi)
    require_klein_gordon(Phi)
    prefactor = sp.exp(_GAP / 2)
    return Cosymmetry((tidy(-2 * prefactor * diff_partial(Phi, r1)), tidy(prefactor * Phi), 0),
                      f"F2({Phi})")


def make_cosymmetry_family3(spec) -> Cosymmetry:
    Gamma, label = gamma_of(spec)
    prefactor = sp.exp(_GAP / 2)
    return Cosymmetry((tidy(-prefactor * tilde_Dy(Gamma)), tidy(prefactor * Gamma), 0),
                      f"F3({label})")


def make_current_family1(Omega, verify: bool = True) -> ConservedCurrent:
    Omega = sp.sympify(Omega)
    density = tidy(sp.exp(_GAP) * Omega)
    return _verified(ConservedCurrent(density, tidy(_SUM * density), f"F1({Omega})"), verify)


def make_current_family2(Phi, verify: bool = True) -> ConservedCurrent:
    Phi = sp.sympify(Phi)
    require_klein_gordon(Phi)
    prefactor = sp.exp(_GAP / 2)
    Phi_1 = diff_partial(Phi, r1)
    current = ConservedCurrent(tidy(prefactor * (2 * Phi_1 + Phi)),
                               tidy(prefactor * (2 * V1 * Phi_1 + V2 * Phi)), f"F2({Phi})")
    return _verified(current, verify)


def make_current_family2_potential(Phi_bar, verify: bool = True) -> ConservedCurrent:
    """Family 2 written through a potential: e^{(r1-r2)/2}(Phi_1 - Phi_2 + Phi, V1 Phi_1 - V2 Phi_2 + V3 Phi)."""
    Phi_bar = sp.sympify(Phi_bar)
    require_klein_gordon(Phi_bar)
    prefactor = sp.exp(_GAP / 2)
    Phi_1, Phi_2 = diff_partial(Phi_bar, r1), diff_partial(Phi_bar, r2)
    current = ConservedCurrent(tidy(prefactor * (Phi_1 - Phi_2 + Phi_bar)),
                               tidy(prefactor * (V1 * Phi_1 - V2 * Phi_2 + V3 * Phi_bar)),
                               f"F2'({Phi_bar})")
    return _verified(current, verify)


def make_current_family3(spec, verify: bool = True) -> ConservedCurrent:
    Gamma, label = gamma_of(spec)
    q = q_tilde()
    rho = -q * tilde_Dz(Gamma)
    sigma = tilde_Dy(q) * Gamma
    current = ConservedCurrent(tidy(r2x * rho + r1x * sigma),
                               tidy(V2 * r2x * rho + V1 * r1x * sigma), f"F3({label})")
    return _verified(current, verify)


def omega_tail_sums(Omega) -> Tuple[sp.Expr, sp.Expr]:
    """
    S = sum_{k>=1} sum_{k'<k} w_{k-k'} (-A_hat)^{k'} Omega_{w_k}
    X = sum_{k>=0} (-A_hat)^k Omega_{w_k}
    """
    top = ord(Omega, "omega")
    S, X = sp.S.Zero, sp.S.Zero
    if top == float('-inf'):
        return S, X
    for k in range(int(top) + 1):
        term = diff_partial(Omega, omega(k))
        if term == 0:
            continue
        for inner in range(k):
            S += omega(k - inner) * term
            term = -A_hat(term)
        X += term
    return tidy(S), tidy(X)


def make_characteristic_family1(Omega) -> Cosymmetry:
    Omega = sp.sympify(Omega)
    S, X = omega_tail_sums(Omega)
    prefactor = sp.exp(_GAP)
    return Cosymmetry((tidy(prefactor * (Omega - S)), tidy(prefactor * (S - Omega)),
                       tidy(prefactor * X)), f"char F1({Omega})")


def make_characteristic_family2(Phi) -> Cosymmetry:
    Phi = sp.sympify(Phi)
    require_klein_gordon(Phi)
    Phi_1, Phi_2 = diff_partial(Phi, r1), diff_partial(Phi, r2)
    Phi_11 = diff_partial(Phi_1, r1)
    prefactor = sp.exp(_GAP / 2)
    return Cosymmetry((tidy(prefactor * (2 * Phi_11 + 2 * Phi_1 + Phi / 2)),
                       tidy(prefactor * (Phi_2 - Phi_1 - Phi)), 0), f"char F2({Phi})")


def make_characteristic_family3(spec) -> Cosymmetry:
    lam = make_cosymmetry_family3(spec)
    return Cosymmetry(lam.components, f"char {lam.label}")


def verify_characteristic_identity(c: ConservedCurrent, lam: Cosymmetry, multiplier=1,
                                   system: HydroSystem = DRIFT_FLUX,
                                   rng: Optional[np.random.Generator] = None) -> CheckResult:
    """
    Off-shell identity D_t rho + D_x sigma = sum lambda^i E^i modulo total divergences,
    with lambda paired to the density: Euler(rho) = multiplier * lambda.
    """
    lhs = system.off_shell_lhs()
    lam_off = [to_off_shell(component) for component in lam]
    scaled = [sp.sympify(multiplier) * component for component in lam_off]
    discrepancy = full_dt(c.density) + full_dx(c.flux) - sum(s * e for s, e in zip(scaled, lhs))
    off_shell = full_euler_operator(discrepancy)
    pairing = [a - sp.sympify(multiplier) * b for a, b in zip(euler_operator(c.density), lam)]
    return CheckResult.from_residuals(f"characteristic[{c.label} ~ {lam.label}]",
                                      list(off_shell) + pairing, rng)


def act_symmetry_on_current(eta: EvolutionaryField, c: ConservedCurrent) -> ConservedCurrent:
    """(pr eta rho, pr eta sigma)"""
    return ConservedCurrent(prolonged_action(tuple(eta), c.density),
                            prolonged_action(tuple(eta), c.flux), f"{eta.label}.{c.label}")


def is_tx_invariant(obj: Union[ConservedCurrent, Cosymmetry]) -> bool:
    """No explicit dependence on t and x."""
    components = (obj.density, obj.flux) if isinstance(obj, ConservedCurrent) else tuple(obj)
    return not any(tidy(c).has(t) or tidy(c).has(x) for c in components)


def order_of(obj: Union[Cosymmetry, ConservedCurrent, Sequence]):
    """Highest jet order over all dependent variables, in standard coordinates."""
    components = (obj.density, obj.flux) if isinstance(obj, ConservedCurrent) else tuple(obj)
    orders = [ord(to_standard(c), family) for c in components for family in ("r1", "r2", "r3")]
    return max(orders, default=float('-inf'))


def generating_currents() -> List[ConservedCurrent]:
    """Two currents whose orbits under the symmetries and recursion span all laws."""
    X3 = x - V3 * t
    prefactor = sp.exp(_GAP)
    return [
        ConservedCurrent(tidy(prefactor * w0), tidy(_SUM * prefactor * w0), "generating(r3)"),
        ConservedCurrent(tidy(prefactor * X3), tidy(prefactor * (V3 * X3 - t)), "generating(x-V3t)"),
    ]


def kg_counterpart_current() -> ConservedCurrent:
    X1, X2 = x - V1 * t, x - V2 * t
    prefactor = sp.exp(_GAP)
    return ConservedCurrent(tidy(prefactor * (r2x * X2 ** 2 - r1x * X1 ** 2)),
                            tidy(prefactor * (V2 * r2x * X2 ** 2 - V1 * r1x * X1 ** 2)),
                            "kg_counterpart")


def invariant_currents() -> List[ConservedCurrent]:
    """Four second-order currents free of t and x."""
    r1xx, r2xx = jet(1, 2), jet(2, 2)
    E = sp.exp(_GAP)
    first = 2 * r1xx + r1x * r2x
    second = 2 * r2xx - r1x * r2x
    z1 = r1 / r1x - r2 * r1x / r2x ** 2
    z2 = r2 / r2x ** 5 * second ** 2 - r1 / r2x
    currents = [
        (2 * E * (1 / r2x - 1 / r1x), 2 * E * (V2 / r2x - V1 / r1x)),
        (2 / r1x ** 5 * E * (first ** 2 - r2x * r1x ** 3),
         2 / r1x ** 5 * E * (V1 * first ** 2 - V2 * r2x * r1x ** 3)),
        (-2 / r2x ** 5 * E * (second ** 2 - r1x * r2x ** 3),
         -2 / r2x ** 5 * E * (V2 * second ** 2 - V1 * r1x * r2x ** 3)),
        (-E * (z1 + z2), -E * (V1 * z1 + V2 * z2)),
    ]
    return [ConservedCurrent(tidy(rho), tidy(sigma), f"invariant({label})")
            for label, (rho, sigma) in zip("abcd", currents)]


@dataclass
class Equivalence:
    """Outcome of comparing two currents by their characteristics."""
    equivalent: bool
    ratio: Optional[sp.Expr] = None
    characteristics: Tuple = field(default_factory=tuple)


def equivalent_currents(first: ConservedCurrent, second: ConservedCurrent,
                        rng: Optional[np.random.Generator] = None) -> Equivalence:
    """Equivalent iff the Euler characteristics are proportional with a constant ratio."""
    a, b = euler_operator(first.density), euler_operator(second.density)
    a_zero = all(zero_test(c, rng) for c in a)
    b_zero = all(zero_test(c, rng) for c in b)
    if a_zero or b_zero:
        return Equivalence(a_zero and b_zero, None, (a, b))
    pivot = next(i for i, c in enumerate(b) if not zero_test(c, rng))
    ratio = sp.cancel(sp.together(a[pivot] / b[pivot]))
    if ratio.free_symbols:
        return Equivalence(False, None, (a, b))
    holds = all(zero_test(p - ratio * q, rng) for p, q in zip(a, b))
    return Equivalence(holds, ratio if holds else None, (a, b))


@dataclass
class PhysicalLaw:
    """A balance law in the physical variables (u, rho^1, rho^2) and its Riemann form."""
    name: str
    current: ConservedCurrent
    multiplier: sp.Rational
    density: sp.Expr
    flux: sp.Expr


u_symbol, rho1_symbol, rho2_symbol = sp.symbols("u rho1 rho2", positive=True)


def physical_laws(verify: bool = True) -> List[PhysicalLaw]:
    """Phase masses, mixture mass, momentum and energy; current = multiplier * physical law."""
    u, m1, m2 = u_symbol, rho1_symbol, rho2_symbol
    rho = m1 + m2
    half = sp.exp(_GAP / 2)
    return [
        PhysicalLaw("mass of phase 1", make_current_family1(1 / (w0 + 1), verify), sp.S.One,
                    m1, m1 * u),
        PhysicalLaw("mass of phase 2", make_current_family1(w0 / (w0 + 1), verify), sp.S.One,
                    m2, m2 * u),
        PhysicalLaw("mixture mass", make_current_family1(sp.S.One, verify), sp.S.One, rho, rho * u),
        PhysicalLaw("momentum", make_current_family2(half * (_SUM - 1), verify), sp.Integer(2),
                    rho * u, rho * (u ** 2 + 1)),
        PhysicalLaw("energy", make_current_family2(half * (_SUM ** 2 - 4 * r2) / 8, verify),
                    sp.Rational(1, 2), rho * (u ** 2 / 2 + sp.log(rho)),
                    rho * u * (u ** 2 / 2 + sp.log(rho) + 1)),
    ]


def to_physical(e) -> sp.Expr:
    """Substitute r1, r2, r3 = w0 by their expressions in (u, rho^1, rho^2)."""
    u, m1, m2 = u_symbol, rho1_symbol, rho2_symbol
    log_rho = sp.log(m1 + m2)
    return sp.sympify(e).xreplace({r1: (u + log_rho) / 2, r2: (u - log_rho) / 2, w0: m2 / m1})


def check_physical_law(law: PhysicalLaw) -> CheckResult:
    residuals = []
    for riemann, physical in ((law.current.density, law.density), (law.current.flux, law.flux)):
        difference = sp.simplify(sp.expand_log(to_physical(riemann) - law.multiplier * physical,
                                               force=True))
        if difference != 0:
            residuals.append(difference)
    return CheckResult.from_bool(f"physical[{law.name}]", not residuals, residuals)


def cosymmetry_samples() -> List[Cosymmetry]:
    half = sp.exp(_GAP / 2)
    samples = [make_cosymmetry_family1(Omega)
               for Omega in (sp.S.One, w0, w0 ** 2, w1, symbolic_omega(1))]
    samples += [make_cosymmetry_family2(Phi) for Phi in (half, sp.exp(r1 - r2 / 4), symbolic_phi())]
    samples += [make_cosymmetry_family3(spec) for spec in (GammaSpec(GammaKind.J_POWER, 0),
                                                           GammaSpec(GammaKind.J_POWER, 1),
                                                           GammaSpec(GammaKind.DY_THEN_J, 0, 1),
                                                           GammaSpec(GammaKind.DZ_THEN_J, 0, 1))]
    return samples


def current_samples() -> List[ConservedCurrent]:
    half = sp.exp(_GAP / 2)
    samples = [make_current_family1(Omega, verify=False) for Omega in (sp.S.One, w0, w0 ** 2, w1)]
    samples += [make_current_family2(Phi, verify=False)
                for Phi in (half, sp.exp(r1 - r2 / 4), symbolic_phi())]
    samples += [make_current_family3(spec, verify=False)
                for spec in (GammaSpec(GammaKind.J_POWER, 0), GammaSpec(GammaKind.DZ_THEN_J, 0, 1))]
    samples += generating_currents()
    samples.append(kg_counterpart_current())
    samples += [law.current for law in physical_laws(verify=False)]
    samples += invariant_currents()
    return samples


def characteristic_pairs() -> List[Tuple[ConservedCurrent, Cosymmetry, int]]:
    """(current, characteristic, multiplier) for matching family parameters."""
    half = sp.exp(_GAP / 2)
    pairs = []
    for Omega in (sp.S.One, w0, w0 ** 2, w1):
        pairs.append((make_current_family1(Omega, verify=False), make_characteristic_family1(Omega), 1))
    for Phi in (half, sp.exp(r1 - r2 / 4)):
        pairs.append((make_current_family2(Phi, verify=False), make_characteristic_family2(Phi), 1))
    for spec in (GammaSpec(GammaKind.J_POWER, 0), GammaSpec(GammaKind.DZ_THEN_J, 0, 1)):
        pairs.append((make_current_family3(spec, verify=False), make_characteristic_family3(spec),
                      FAMILY3_MULTIPLIER))
    return pairs
