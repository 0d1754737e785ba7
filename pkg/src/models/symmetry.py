"""
Generalized symmetries of the drift flux system.

Every symmetry is a sum of members of four families:

    W(Omega) = (0, 0, Omega(w0, ..., wk))
    P(Phi)   = e^{-(r1-r2)/2} ((Phi + 2 Phi_r1) r1_x, (Phi - 2 Phi_r2) r2_x, 2 Phi r3_x)
    D        = ((x - V1 t) r1_x, (x - V2 t) r2_x, (x - V3 t) r3_x)
    R(Gamma) = e^{-(r1-r2)/2} ((Dy Gamma + Gamma) r1_x, (Dz Gamma + Gamma) r2_x, 2 Gamma r3_x)

with Phi solving Phi_{r1 r2} = -Phi/4 and Gamma = Q(q tilde) for an operator word Q.
"""
import logging
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import sympy as sp

from ..errors import ConstraintViolated
from ..jets.derivatives import A_hat, tidy
from ..jets.operators import prolonged_action
from ..kernel.expression import diff_partial, zero_test
from ..kernel.symbols import (AtomKind, atom_info, omega, r1, r1x, r2, r2x, symbolic_omega,
                              symbolic_phi, t, w0, w1, x)
from .fields import EvolutionaryField
from .report import CheckResult
from .system import (DRIFT_FLUX, GammaKind, GammaSpec, HydroSystem, OperatorWord, apply_to_q,
                     tilde_Dy, tilde_Dz)

logger = logging.getLogger(__name__)

_HALF_GAP = (r1 - r2) / 2


def r3_x() -> sp.Expr:
    """r3_x in modified coordinates."""
    return sp.exp(r1 - r2) * w1


def kg_residual(Phi) -> sp.Expr:
    """Phi_{r1 r2} + Phi/4"""
    Phi = sp.sympify(Phi)
    return tidy(diff_partial(diff_partial(Phi, r1), r2) + Phi / 4)


def require_klein_gordon(Phi, rng: Optional[np.random.Generator] = None) -> None:
    verdict = zero_test(kg_residual(Phi), rng)
    if not verdict:
        raise ConstraintViolated(f"Phi = {Phi} does not solve Phi_r1r2 = -Phi/4")


def is_symmetry(eta: EvolutionaryField, system: HydroSystem = DRIFT_FLUX,
                rng: Optional[np.random.Generator] = None) -> CheckResult:
    """All three determining equations of a symmetry vanish."""
    residuals = system.linearized(tuple(eta))
    return CheckResult.from_residuals(f"is_symmetry[{eta.label}]", residuals, rng)


def make_W(Omega) -> EvolutionaryField:
    Omega = sp.sympify(Omega)
    return EvolutionaryField((0, 0, Omega), f"W({Omega})")


def make_P(Phi, rng: Optional[np.random.Generator] = None) -> EvolutionaryField:
    Phi = sp.sympify(Phi)
    require_klein_gordon(Phi, rng)
    prefactor = sp.exp(-_HALF_GAP)
    components = (prefactor * (Phi + 2 * diff_partial(Phi, r1)) * r1x,
                  prefactor * (Phi - 2 * diff_partial(Phi, r2)) * r2x,
                  prefactor * 2 * Phi * r3_x())
    return EvolutionaryField(tuple(tidy(c) for c in components), f"P({Phi})")


def _shifted_x(k: int, system: HydroSystem = DRIFT_FLUX) -> sp.Expr:
    return x - system.velocities[k - 1] * t


def make_D(system: HydroSystem = DRIFT_FLUX) -> EvolutionaryField:
    components = (_shifted_x(1, system) * r1x, _shifted_x(2, system) * r2x,
                  _shifted_x(3, system) * r3_x())
    return EvolutionaryField(tuple(tidy(c) for c in components), "D")


def make_G1() -> EvolutionaryField:
    return EvolutionaryField((tidy(t * r1x - 1), t * r2x, tidy(t * r3_x())), "G1")


def make_G2() -> EvolutionaryField:
    return EvolutionaryField((1, -1, 0), "G2")


def gamma_of(spec: Union[GammaSpec, OperatorWord, str, sp.Expr],
             budget: Optional[int] = None) -> Tuple[sp.Expr, str]:
    """Gamma and its label from a spec, a word, word text or an explicit expression."""
    if isinstance(spec, GammaSpec):
        word = spec.to_word() if budget is None else spec.to_word(budget)
        return apply_to_q(word), word.text()
    if isinstance(spec, OperatorWord):
        return apply_to_q(spec), spec.text()
    if isinstance(spec, str):
        word = OperatorWord.parse(spec) if budget is None else OperatorWord.parse(spec, budget)
        return apply_to_q(word), word.text()
    return sp.sympify(spec), str(spec)


def make_R(spec, budget: Optional[int] = None) -> EvolutionaryField:
    Gamma, label = gamma_of(spec, budget)
    prefactor = sp.exp(-_HALF_GAP)
    components = (prefactor * (tilde_Dy(Gamma) + Gamma) * r1x,
                  prefactor * (tilde_Dz(Gamma) + Gamma) * r2x,
                  prefactor * 2 * Gamma * r3_x())
    return EvolutionaryField(tuple(tidy(c) for c in components), f"R({label})")


def time_translation(system: HydroSystem = DRIFT_FLUX) -> EvolutionaryField:
    """Evolutionary form of the time translation: r_t = -V r_x."""
    return EvolutionaryField(tuple(tidy(-system.velocities[k - 1] * x_jet)
                                   for k, x_jet in zip((1, 2, 3), (r1x, r2x, r3_x()))),
                             "time_translation")


def space_translation() -> EvolutionaryField:
    return EvolutionaryField((r1x, r2x, tidy(r3_x())), "space_translation")


def lie_point_fields() -> Dict[str, EvolutionaryField]:
    """Evolutionary forms of the point symmetries."""
    return {
        "D": make_D(),
        "G1": make_G1(),
        "G2": make_G2(),
        "time_translation": time_translation(),
        "space_translation": space_translation(),
        "W(r3)": make_W(symbolic_omega(0)),
    }


def lie_point_identities() -> List[Tuple[str, EvolutionaryField, EvolutionaryField]]:
    """Pairs (description, left, right) of field identities among point symmetries."""
    half = sp.exp(_HALF_GAP)
    D, G1, G2 = make_D(), make_G1(), make_G2()
    return [
        ("P(e^{(r1-r2)/2}) = 2 space translation", make_P(half), space_translation().scale(2)),
        ("P((r1+r2) e^{(r1-r2)/2}) = -2 time translation", make_P((r1 + r2) * half),
         time_translation().scale(-2)),
        ("P(e^{(r2-r1)/2}) = 2 W(w1)", make_P(1 / half), make_W(w1).scale(2)),
        ("R(q) = 2(D - G1)", make_R(GammaSpec(GammaKind.J_POWER, 0)), (D - G1).scale(2)),
        ("R(Dz q) = 2(D + G1 + G2)", make_R(GammaSpec(GammaKind.DZ_THEN_J, 0, 1)),
         (D + G1 + G2).scale(2)),
    ]


def lie_bracket(eta: EvolutionaryField, other: EvolutionaryField) -> EvolutionaryField:
    """[eta, eta'] = pr eta (eta') - pr eta' (eta)."""
    components = tuple(prolonged_action(tuple(eta), b) - prolonged_action(tuple(other), a)
                       for a, b in zip(eta, other))
    return EvolutionaryField(tuple(tidy(c) for c in components),
                             f"[{eta.label}, {other.label}]")


def omega_bracket(first, second) -> sp.Expr:
    """Bracket induced on the W family: sum_i (A_hat^i f1) f2_{w_i} - (A_hat^i f2) f1_{w_i}."""
    first, second = sp.sympify(first), sp.sympify(second)
    orders = [atom_info(s).order for s in (first.free_symbols | second.free_symbols)
              if atom_info(s) is not None and atom_info(s).kind == AtomKind.OMEGA]
    result = sp.S.Zero
    lifted_first, lifted_second = first, second
    for i in range(max(orders, default=-1) + 1):
        result += lifted_first * diff_partial(second, omega(i)) \
            - lifted_second * diff_partial(first, omega(i))
        lifted_first, lifted_second = A_hat(lifted_first), A_hat(lifted_second)
    return tidy(result)


class SymmetryClass(Enum):
    """Membership in the two ideals of the symmetry algebra."""
    IN_I1 = "in_I1"                       # P family
    IN_I2 = "in_I2"                       # W family
    IN_INTERSECTION = "in_intersection"   # both
    OUTSIDE = "outside"


def _is_omega_function(e: sp.Expr) -> bool:
    for s in e.free_symbols:
        info = atom_info(s)
        if info is None or info.kind != AtomKind.OMEGA:
            return False
    return True


def _phi_candidate(eta: EvolutionaryField) -> Optional[sp.Expr]:
    if zero_test(eta[2]).holds:
        return None
    Phi = tidy(eta[2] * sp.exp(-_HALF_GAP) / (2 * w1))
    if not Phi.free_symbols <= {r1, r2}:
        return None
    if any(not set(f.args) <= {r1, r2} for f in Phi.atoms(sp.core.function.AppliedUndef)):
        return None
    return Phi


def classify(eta: EvolutionaryField, rng: Optional[np.random.Generator] = None) -> SymmetryClass:
    in_i2 = bool(zero_test(eta[0], rng)) and bool(zero_test(eta[1], rng)) \
        and _is_omega_function(tidy(eta[2]))
    in_i1 = False
    Phi = _phi_candidate(eta)
    if Phi is not None and zero_test(kg_residual(Phi), rng):
        in_i1 = make_P(Phi, rng).equals(eta, rng)
    if in_i1 and in_i2:
        return SymmetryClass.IN_INTERSECTION
    if in_i1:
        return SymmetryClass.IN_I1
    if in_i2:
        return SymmetryClass.IN_I2
    return SymmetryClass.OUTSIDE


def symmetry_samples(max_gamma_order: int = 3) -> List[EvolutionaryField]:
    """The verified sample set: W, P and R family members plus D."""
    half = sp.exp(_HALF_GAP)
    samples = [make_W(Omega) for Omega in (sp.S.One, w0, w0 ** 2, w1, w0 * w1, symbolic_omega(1))]
    for Phi in (half, 1 / half, (r1 + r2) * half, sp.exp(r1 - r2 / 4),
                sp.exp(2 * r1 - r2 / 8), symbolic_phi()):
        samples.append(make_P(Phi))
    samples.append(make_D())
    samples.extend(make_R(spec) for spec in gamma_specs(max_gamma_order))
    return samples


def gamma_specs(max_order: int = 3) -> List[GammaSpec]:
    """All specs with kappa + iota <= max_order."""
    specs = [GammaSpec(GammaKind.J_POWER, kappa) for kappa in range(max_order + 1)]
    for kind in (GammaKind.DY_THEN_J, GammaKind.DZ_THEN_J):
        for iota in range(1, max_order + 1):
            for kappa in range(max_order - iota + 1):
                specs.append(GammaSpec(kind, kappa, iota))
    return specs
