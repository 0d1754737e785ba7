import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import sympy as sp

from ..errors import ConstraintViolated, DriftFluxError
from ..kernel.expression import configure_numeric
from ..kernel.grammar import parse
from ..kernel.symbols import r1, r2, symbolic_omega, w0, w1
from . import conservation, hamiltonian, recursion, solutions, symmetry
from .config import Extra, Suite, SuiteConfig
from .report import CheckRecord, CheckResult, CheckStatus, VerificationReport
from .system import DRIFT_FLUX

logger = logging.getLogger(__name__)

# Accepted deviation of observed convergence orders from 2
ORDER_TOLERANCE = 0.3


@dataclass
class CheckSpec:
    """A check waiting to run: id, a short anchor text and the callable taking an rng."""
    id: str
    anchor: str
    run: Callable[[np.random.Generator], CheckResult]


def _holds(name: str, value) -> CheckResult:
    return CheckResult.from_bool(name, bool(value))


class VerificationRunner:
    """Runs the checks of the configured suites and assembles a report."""

    def __init__(self, config: SuiteConfig):
        self.config = config
        self._builders: Dict[Suite, Callable[[], List[CheckSpec]]] = {
            Suite.SYMMETRY: self._symmetry_checks,
            Suite.COSYMMETRY: self._cosymmetry_checks,
            Suite.CONSERVATION: self._conservation_checks,
            Suite.HAMILTONIAN: self._hamiltonian_checks,
            Suite.RECURSION: self._recursion_checks,
            Suite.SOLUTIONS: self._solution_checks,
        }

    def run(self) -> VerificationReport:
        """
        Run every check of the configured suite.
        Each check draws from its own generator seeded by (seed, index).
        """
        configure_numeric(self.config.numeric_points, self.config.numeric_tolerance)
        report = VerificationReport(self.config.suite.value, self.config.seed,
                                    config=self.config.to_dict())
        logger.info("Running suite %s with seed %d", self.config.suite.value, self.config.seed)

        # 1. Gather the checks of every requested suite
        checks: List[CheckSpec] = []
        for suite in self.config.suite.expand():
            gathered = self._builders[suite]()
            logger.debug("Suite %s contributes %d checks", suite.value, len(gathered))
            checks.extend(gathered)

        # 2. Run them, in parallel when more than one worker is configured
        seeds = [(self.config.seed, index) for index in range(len(checks))]
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                outcomes = list(pool.map(self._run_one, checks, seeds))
        else:
            outcomes = [self._run_one(check, seed) for check, seed in zip(checks, seeds)]

        # 3. Score and assemble in gathering order
        for check, (result, wall_time) in zip(checks, outcomes):
            record = CheckRecord.from_result(check.id, check.anchor, result, wall_time)
            report.add(record)
            logger.info("%-12s %s", record.status.value.upper(), record.id)
        report.finished_at = datetime.now()
        counts = report.counts
        logger.info("Suite %s finished: %d passed, %d failed, %d inconclusive",
                    report.suite, counts["pass"], counts["fail"], counts["inconclusive"])
        return report

    def _run_one(self, check: CheckSpec, seed: Tuple[int, int]) -> Tuple[CheckResult, float]:
        rng = np.random.default_rng(list(seed))
        start = time.perf_counter()
        try:
            result = check.run(rng)
        except ConstraintViolated as e:
            if isinstance(e.report, CheckResult):
                result = e.report
            else:
                result = CheckResult(check.id, CheckStatus.FAIL, [str(e)])
        except DriftFluxError as e:
            logger.warning("Check %s raised %s: %s", check.id, type(e).__name__, str(e))
            result = CheckResult(check.id, CheckStatus.INCONCLUSIVE,
                                 [f"{type(e).__name__}: {str(e)}"], False,
                                 {"error": type(e).__name__})
        return result, time.perf_counter() - start

    @property
    def _gamma_order(self) -> int:
        return min(self.config.max_order, 2)

    def _symmetry_checks(self) -> List[CheckSpec]:
        checks = [CheckSpec("semi_hamiltonian", "Tsarev condition for the diagonal system",
                            lambda rng: CheckResult.from_bool(
                                "semi_hamiltonian", DRIFT_FLUX.semi_hamiltonian_check(rng).holds))]
        for eta in symmetry.symmetry_samples(self._gamma_order):
            checks.append(CheckSpec(f"is_symmetry[{eta.label}]", "symmetry algebra families",
                                    lambda rng, eta=eta: symmetry.is_symmetry(eta, rng=rng)))
        for name, eta in symmetry.lie_point_fields().items():
            checks.append(CheckSpec(f"lie_point[{name}]", "Lie point symmetries",
                                    lambda rng, eta=eta: symmetry.is_symmetry(eta, rng=rng)))
        for description, left, right in symmetry.lie_point_identities():
            checks.append(CheckSpec(f"identity[{description}]", "Lie symmetry correspondences",
                                    lambda rng, a=left, b=right, d=description:
                                        _holds(d, a.equals(b, rng))))
        Omega_1, Omega_2 = w0 * w1, symbolic_omega(1)
        checks.append(CheckSpec(
            "bracket[W, W]", "ideal of W fields",
            lambda rng: _holds("bracket[W, W]", symmetry.lie_bracket(
                symmetry.make_W(Omega_1), symmetry.make_W(Omega_2)).equals(
                symmetry.make_W(symmetry.omega_bracket(Omega_1, Omega_2)), rng))))
        checks.append(CheckSpec(
            "bracket[D, P]", "closure of the symmetry algebra",
            lambda rng: symmetry.is_symmetry(symmetry.lie_bracket(
                symmetry.make_D(), symmetry.make_P(sp.exp(r1 - r2 / 4))), rng=rng)))
        expected = [(symmetry.make_W(w0), symmetry.SymmetryClass.IN_I2),
                    (symmetry.make_P(sp.exp(r1 - r2 / 4)), symmetry.SymmetryClass.IN_I1),
                    (symmetry.make_P(sp.exp((r2 - r1) / 2)), symmetry.SymmetryClass.IN_INTERSECTION),
                    (symmetry.make_D(), symmetry.SymmetryClass.OUTSIDE)]
        for eta, cls in expected:
            checks.append(CheckSpec(f"classify[{eta.label}]", "ideals I1 and I2",
                                    lambda rng, eta=eta, cls=cls: CheckResult.from_bool(
                                        f"classify[{eta.label}]", symmetry.classify(eta, rng) == cls,
                                        [f"expected {cls.value}"])))
        return checks

    def _cosymmetry_checks(self) -> List[CheckSpec]:
        return [CheckSpec(f"is_cosymmetry[{lam.label}]", "cosymmetry families",
                          lambda rng, lam=lam: conservation.is_cosymmetry(lam, rng=rng))
                for lam in conservation.cosymmetry_samples()]

    def _conservation_checks(self) -> List[CheckSpec]:
        checks = [CheckSpec(f"is_current[{c.label}]", "conserved current families",
                            lambda rng, c=c: conservation.is_conserved_current(c, rng=rng))
                  for c in conservation.current_samples()]
        for current, lam, multiplier in conservation.characteristic_pairs():
            checks.append(CheckSpec(
                f"characteristic[{current.label}]", "characteristics of the current families",
                lambda rng, c=current, lam=lam, m=multiplier:
                    conservation.verify_characteristic_identity(c, lam, m, rng=rng)))
        for law in conservation.physical_laws(verify=False):
            checks.append(CheckSpec(f"physical[{law.name}]", "physical balance laws",
                                    lambda rng, law=law: conservation.check_physical_law(law)))

        def counterpart(rng):
            equivalence = conservation.equivalent_currents(
                conservation.kg_counterpart_current(), conservation.generating_currents()[1], rng)
            return CheckResult.from_bool("kg_counterpart", equivalence.equivalent
                                         and equivalence.ratio == 2,
                                         [f"ratio {equivalence.ratio}"], ratio=equivalence.ratio)

        checks.append(CheckSpec("kg_counterpart", "generating set of conservation laws", counterpart))
        for c in conservation.invariant_currents():
            checks.append(CheckSpec(f"tx_invariant[{c.label}]", "translation-invariant currents",
                                    lambda rng, c=c: CheckResult.from_bool(
                                        f"tx_invariant[{c.label}]", conservation.is_tx_invariant(c)
                                        and conservation.is_conserved_current(c, rng=rng).passed)))
        return checks

    def _hamiltonian_checks(self) -> List[CheckSpec]:
        if self.config.custom_hamiltonian:
            Theta, Xi, c0 = parse(self.config.theta), parse(self.config.xi), parse(self.config.c0)
            thetas, densities = [Theta], [(Theta, c0, Xi)]
        else:
            thetas, densities = hamiltonian.theta_samples(), hamiltonian.density_grid()
        samples = conservation.cosymmetry_samples()[:6]
        checks = []
        for Theta in thetas:
            label = sp.sstr(Theta)
            H = hamiltonian.make_H(Theta)
            checks.append(CheckSpec(f"skew_adjoint[{label}]", "Hamiltonian operator family",
                                    lambda rng, H=H: hamiltonian.is_skew_adjoint(H, rng)))
            checks.append(CheckSpec(f"noether[{label}]", "Noether operator ansatz",
                                    lambda rng, H=H: hamiltonian.noether_check(H, samples, rng)))
            checks.append(CheckSpec(f"flat_metric[{label}]", "flat metric of the operator",
                                    lambda rng, H=H: _holds("flat_metric", hamiltonian.is_flat(
                                        hamiltonian.metric_of(H), rng))))
            checks.append(CheckSpec(f"casimirs[{label}]", "Casimir functionals",
                                    lambda rng, Theta=Theta: hamiltonian.casimir_check(Theta, rng)))
            for description, left, right in hamiltonian.image_identities(Theta):
                checks.append(CheckSpec(f"image[{label}][{description}]", "Hamiltonian symmetries",
                                        lambda rng, a=left, b=right, d=description:
                                            _holds(d, a.equals(b, rng))))
        for Theta, c0, Xi in densities:
            checks.append(CheckSpec(f"hamiltonian_form[{sp.sstr(Theta)}, {sp.sstr(Xi)}]",
                                    "Hamiltonian densities",
                                    lambda rng, T=Theta, c=c0, X=Xi:
                                        hamiltonian.hamiltonian_form_check(T, c, X, rng)))
        if len(thetas) > 1:
            checks.append(CheckSpec(f"compatible[1, {sp.sstr(thetas[1])}]", "compatibility condition",
                                    lambda rng: hamiltonian.compatibility_check(1, thetas[1], rng)))
        pair = (conservation.make_cosymmetry_family1(w0), conservation.make_cosymmetry_family1(w0 ** 2))
        checks.append(CheckSpec("homomorphism[family1]", "cosymmetry Lie bracket",
                                lambda rng: hamiltonian.homomorphism_check(*pair, thetas[0], rng)))
        return checks

    def _recursion_checks(self) -> List[CheckSpec]:
        max_length = 2 if self.config.includes(Extra.WORDS2) else 1
        checks = [CheckSpec(check_id, "recursion operator action tables", run)
                  for check_id, run in recursion.action_checks(max_length)]
        checks.append(CheckSpec("teshukov_decomposition", "decomposition of the Teshukov operator",
                                lambda rng: recursion.teshukov_decomposition_check(rng=rng)))
        convention = recursion.R4Convention(self.config.r4_convention)

        def determining(rng):
            result = recursion.r4_determining_check(convention, rng)
            others = {c.value: recursion.r4_determining_check(c, rng).passed
                      for c in recursion.R4Convention}
            result.details["conventions"] = others
            return result

        checks.append(CheckSpec(f"r4_determining[{convention.value}]", "R4 determining system",
                                determining))
        if self.config.includes(Extra.R4):
            checks.extend(self._r4_numeric_checks(convention))
        return checks

    def _r4_numeric_checks(self, convention) -> List[CheckSpec]:
        grid = {}

        def sampled():
            if "field" not in grid:
                sample = solutions.make_regular(sp.exp(r1 - r2 / 4))
                spec = solutions.GridSpec.square(sample, self.config.grid_sizes[0])
                grid["field"] = solutions.sample_on_grid(sample, spec)
            return grid["field"]

        checks = []
        for eta in recursion.r4_fields():
            checks.append(CheckSpec(
                f"apply_R4[{convention.value}]({eta.label})", "nonlocal recursion operator R4",
                lambda rng, eta=eta: recursion.apply_R4(eta, sampled(), convention,
                                                        self.config.r4_threshold,
                                                        self.config.quadrature_tolerance)))
        return checks

    def _solution_checks(self) -> List[CheckSpec]:
        checks = []
        seeds = [("accepted", sp.exp(r1 - r2 / 4), True),
                 ("accepted_sum", sp.exp(r1 - r2 / 4) + sp.exp(-r1 / 4 + r2), True),
                 ("rejected", sp.exp((r1 - r2) / 2), False)]
        for name, Psi, nondegenerate in seeds:
            kg = solutions.KGSolution.from_expression(Psi)
            checks.append(CheckSpec(
                f"kg_seed[{name}]", "Klein-Gordon seeds of the regular family",
                lambda rng, kg=kg, expected=nondegenerate: CheckResult.from_bool(
                    f"kg_seed[{kg.expression()}]", kg.satisfies_klein_gordon(rng)
                    and kg.is_nondegenerate() == expected)))
        sizes = self.config.grid_sizes if self.config.includes(Extra.CONVERGENCE) \
            else self.config.grid_sizes[:2]
        for family in (solutions.make_regular(sp.exp(r1 - r2 / 4)),
                       solutions.make_singular("r1"), solutions.make_singular("r2"),
                       solutions.make_ultra()):
            checks.append(CheckSpec(f"convergence[{family.family.value}]", "complete solution set",
                                    lambda rng, s=family: self._convergence(s, sizes)))
        return checks

    @staticmethod
    def _convergence(solution, sizes) -> CheckResult:
        study = solutions.convergence_study(solution, sizes)
        orders = study.orders()
        bad = {name: values for name, values in orders.items()
               if any(o is not None and abs(o - 2.0) > ORDER_TOLERANCE for o in values)}
        return CheckResult.from_bool(f"convergence[{study.family}]", not bad,
                                     [f"{name}: {values}" for name, values in bad.items()],
                                     study=study.to_dict())


def run_suite(name, config: Optional[SuiteConfig] = None) -> VerificationReport:
    config = config if config is not None else SuiteConfig()
    if name is not None:
        config = replace(config, suite=Suite(name) if isinstance(name, str) else name)
    return VerificationRunner(config).run()
