import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import sympy as sp

from src.database.manager import ReportStore
from src.errors import ConfigError, DegenerateSeed, DriftFluxError, GrammarError
from src.kernel.grammar import serialize
from src.kernel.symbols import r1, r2
from src.models import recursion, solutions
from src.models.config import SuiteConfig
from src.models.report import CheckResult, CheckStatus, VerificationReport
from src.models.suites import VerificationRunner
from src.models.symmetry import is_symmetry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--out", help="Write the report to this file instead of stdout")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Warnings only")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="driftflux",
        description="Verify symmetries, conservation laws, Hamiltonian structures, "
                    "recursion operators and exact solutions of the drift flux system.")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Run a verification suite")
    run.add_argument("--suite", default=None,
                     help="symmetry, cosymmetry, conservation, hamiltonian, recursion, solutions or all")
    run.add_argument("--config", help="JSON configuration file")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--theta", help="Theta(w0) for the Hamiltonian suite")
    run.add_argument("--xi", help="Xi(w0) for the Hamiltonian density")
    run.add_argument("--c0", help="Constant c0 of the Hamiltonian density")
    run.add_argument("--include", action="append", help="Extra checks: r4, words2, convergence")
    run.add_argument("--r4-convention", dest="r4_convention")
    run.add_argument("--db", dest="db_path", help="Store the report in this history database")

    generate = commands.add_parser("generate", parents=[common],
                                   help="Sample an exact solution on a grid")
    generate.add_argument("--family", required=True,
                          choices=[f.value for f in solutions.SolutionFamily])
    generate.add_argument("--psi", default="exp(r1_0 - r2_0/4)", help="Klein-Gordon seed (regular)")
    generate.add_argument("--w", dest="W", help="Closed form W(u)")
    generate.add_argument("--theta-fn", dest="Theta", default="exp",
                          help="Closed form Theta(u) of the singular families")
    generate.add_argument("--c", default="0", help="Fixed invariant of the singular families")
    generate.add_argument("--c1", default="3/10")
    generate.add_argument("--c2", default="1/5")
    generate.add_argument("--size", type=int, default=51)
    generate.add_argument("--csv", help="Grid CSV path; the JSON sidecar goes next to it")
    generate.add_argument("--study", action="store_true", help="Add a grid refinement study")

    apply = commands.add_parser("apply-recursion", parents=[common],
                                help="Apply a recursion operator to a symmetry")
    apply.add_argument("--op", required=True, help="T, R1:<word>, R2:<word>, R3:<w0;1;...>, R4:<convention>")
    apply.add_argument("--field", required=True, help="D, G1, G2, W(<expr>), P(<expr>), R(<word>)")
    apply.add_argument("--size", type=int, default=51, help="Grid size for R4")
    apply.add_argument("--seed", type=int, default=0)

    history = commands.add_parser("history", parents=[common], help="Inspect stored reports")
    history.add_argument("--db", dest="db_path", required=True)
    history.add_argument("--suite")
    history.add_argument("--show", type=int, help="Print the stored report of a run")
    history.add_argument("--compare", type=int, nargs=2, metavar=("FIRST", "SECOND"))
    return parser


def configure_logging(args) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')


def emit(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text)
        logger.info("Wrote %s", args.out)
    else:
        print(text)


def _render(report: VerificationReport, args) -> str:
    return report.to_json() if args.format == "json" else report.to_text()


def command_run(args) -> int:
    overrides = {key: getattr(args, key) for key in
                 ("suite", "seed", "workers", "theta", "xi", "c0", "include", "r4_convention",
                  "db_path")}
    config = SuiteConfig.load(args.config, overrides)
    report = VerificationRunner(config).run()
    report.validate()
    if config.db_path:
        store = ReportStore(config.db_path)
        store.initialize_database()
        run_id = store.save_report(report)
        logger.info("Stored run %d in %s", run_id, config.db_path)
    emit(_render(report, args), args)
    return EXIT_OK if report.passed else EXIT_FAILED


def command_generate(args) -> int:
    family = solutions.SolutionFamily(args.family)
    if family == solutions.SolutionFamily.REGULAR:
        solution = solutions.make_regular(solutions.KGSolution.parse(args.psi), args.W or "identity")
    elif family == solutions.SolutionFamily.ULTRA:
        solution = solutions.make_ultra(sp.Rational(args.c1), sp.Rational(args.c2), args.W or "tanh")
    else:
        side = "r1" if family == solutions.SolutionFamily.SINGULAR_R1 else "r2"
        solution = solutions.make_singular(side, sp.Rational(args.c), args.Theta, args.W or "tanh")
    grid = solutions.sample_on_grid(solution, solutions.GridSpec.square(solution, args.size))
    study = solutions.convergence_study(solution) if args.study else None
    if args.csv:
        csv_path = solutions.write_grid_csv(grid, args.csv)
        solutions.write_sidecar(csv_path.with_suffix(".json"), solution, grid, study)
    norms = solutions.pde_residual(grid)
    summary = {"family": family.value, "parameters": solution.parameters,
               "newton_certificate": grid.certificate,
               "residual_norms": {"max": list(norms.max), "l2": list(norms.l2)},
               "convergence": study.to_dict() if study else None}
    if args.format == "json":
        emit(json.dumps(summary, indent=2, default=str), args)
    else:
        emit("\n".join(f"{key}: {value}" for key, value in summary.items()), args)
    return EXIT_OK


def command_apply_recursion(args) -> int:
    rng = np.random.default_rng(args.seed)
    operator = recursion.parse_recursion(args.op)
    eta = recursion.parse_field(args.field)
    if isinstance(operator, recursion.NonlocalRecursion):
        sample = solutions.make_regular(sp.exp(r1 - r2 / 4))
        grid = solutions.sample_on_grid(sample, solutions.GridSpec.square(sample, args.size))
        result = recursion.apply_R4(eta, grid, operator.convention)
        image = None
    else:
        image = operator.apply(eta)
        result = CheckResult(f"{operator.label}({eta.label})", CheckStatus.PASS) \
            if image.is_zero(rng) else is_symmetry(image, rng=rng)
    data = {"operator": operator.label, "field": eta.label,
            "image": [serialize(c) for c in image] if image is not None else None,
            "status": result.status.value, "residuals": result.residuals,
            "details": result.details}
    if args.format == "json":
        emit(json.dumps(data, indent=2, default=str), args)
    else:
        lines = [f"{data['operator']} applied to {data['field']}: {data['status'].upper()}"]
        if image is not None:
            lines += [f"  component {k + 1}: {sp.sstr(c)}" for k, c in enumerate(image)]
        lines += [f"  residual: {r}" for r in result.residuals]
        emit("\n".join(lines), args)
    return EXIT_OK if result.passed else EXIT_FAILED


def command_history(args) -> int:
    store = ReportStore(args.db_path)
    store.initialize_database()
    if args.show is not None:
        report = store.get_report(args.show)
        if report is None:
            print(f"Run {args.show} not found", file=sys.stderr)
            return EXIT_USAGE
        emit(_render(report, args), args)
        return EXIT_OK
    if args.compare:
        comparison = store.compare_runs(*args.compare)
        data = {"identical": comparison.identical, "changed": comparison.changed,
                "only_first": comparison.only_first, "only_second": comparison.only_second}
        emit(json.dumps(data, indent=2) if args.format == "json"
             else "\n".join(f"{k}: {v}" for k, v in data.items()), args)
        return EXIT_OK if comparison.identical else EXIT_FAILED
    runs = store.list_runs(args.suite)
    if args.format == "json":
        emit(json.dumps([{"id": r.id, "suite": r.suite, "seed": r.seed, "passed": r.passed,
                          "started_at": r.started_at.isoformat(), "counts": r.counts}
                         for r in runs], indent=2), args)
    else:
        emit("\n".join(f"{r.id:5d}  {r.started_at:%Y-%m-%d %H:%M}  {r.suite:12}  seed={r.seed}  "
                       f"{'PASS' if r.passed else 'FAIL'}  {r.counts}" for r in runs)
             or "No stored runs", args)
    return EXIT_OK


COMMANDS = {
    "run": command_run,
    "generate": command_generate,
    "apply-recursion": command_apply_recursion,
    "history": command_history,
}


def main(argv=None) -> int:
    """
    Entry point of the drift flux verification engine.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DegenerateSeed, GrammarError) as e:
        print(f"error: {str(e)}", file=sys.stderr)
        return EXIT_USAGE
    except DriftFluxError as e:
        logger.error("%s: %s", type(e).__name__, str(e))
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
