#!/usr/bin/env python3
"""
Command-line entry point for quenched CLT experiments.

Usage:
    qclt kernel chain.yaml
    qclt kernel --builder two_state --param p=0.3 --param q=0.1
    qclt simulate --config experiment.toml --seed 42 --out runs/a
    qclt diagnose --config experiment.toml --threads 4 --allow-inconclusive
    qclt counterexample --K 3 --count 10000 --seed 7

Exit codes:
    0  success, every requested verdict satisfied
    1  a condition or check violated
    2  invalid kernel
    3  I/O failure
    4  configuration validation failure
    5  inconclusive verdicts (unless --allow-inconclusive)
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from enum import IntEnum
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from .config import Config
from .counterexample import (
    MAX_LEVELS,
    CounterexampleError,
    EnumerationTooLarge,
    build_truncated_example,
    contrast,
    describe,
    exact_sup_value,
)
from .diagnostics import (
    ConditionId,
    ConditionReport,
    ReportSerializer,
    Verdict,
    clt_test,
    coboundary_check,
    conjecture_series,
    fclt_test,
    martingale_average_check,
    maximal_bound_check,
    mixing_clt_condition,
    mixture_identity_check,
    negligibility_probe,
    projective_series,
    rio_bound_check,
    strong_condition_series,
    transition_frequency_check,
    ui_probe,
)
from .diagnostics.types import DiagnosticsError
from .experiment import ExperimentConfig, ExperimentError, load_experiment
from .kernel import KernelError, KernelLoader, MarkovKernel, check_ergodic, check_reversible
from .logging_setup import setup_logging
from .manifest import RunManifest
from .operators import NotCentered, OperatorError, Observable, long_run_variance, martingale_scheme
from .simulation import (
    EnsembleSerializer,
    EnsembleSummary,
    annealed_ensemble,
    quenched_by_state,
    quenched_ensemble,
)
from .simulation.types import SimulationError

try:
    from colorama import Fore, Style, init as colorama_init
    colorama_init()
    COLOR_ENABLED = True
except ImportError:
    COLOR_ENABLED = False
    class Fore:
        CYAN = YELLOW = GREEN = MAGENTA = BLUE = RED = ""
    class Style:
        RESET_ALL = BRIGHT = DIM = ""


logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    VIOLATED = 1
    INVALID_KERNEL = 2
    IO_ERROR = 3
    CONFIG_ERROR = 4
    INCONCLUSIVE = 5


VERDICT_COLORS = {
    Verdict.SATISFIED.value: Fore.GREEN,
    Verdict.VIOLATED.value: Fore.RED,
    Verdict.INCONCLUSIVE.value: Fore.YELLOW,
}


def colorize(text: str, color: str) -> str:
    """Apply color if available."""
    if COLOR_ENABLED:
        return f"{color}{text}{Style.RESET_ALL}"
    return text


def _label(state: Any) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", str(state))


def _write_json(data: Any, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _parse_param(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise ExperimentError(f"--param expects key=value, got '{text}'")
    key, raw = text.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def _aggregate(verdicts: list[str], fail_on_any: bool) -> str:
    """Per-state verdicts folded into one."""
    if fail_on_any:
        if Verdict.VIOLATED.value in verdicts:
            return Verdict.VIOLATED.value
        if all(v == Verdict.SATISFIED.value for v in verdicts):
            return Verdict.SATISFIED.value
        return Verdict.INCONCLUSIVE.value
    if all(v == Verdict.VIOLATED.value for v in verdicts):
        return Verdict.VIOLATED.value
    if Verdict.SATISFIED.value in verdicts:
        return Verdict.SATISFIED.value
    return Verdict.INCONCLUSIVE.value


def _exit_for(verdicts: dict[str, str], allow_inconclusive: bool) -> ExitCode:
    values = set(verdicts.values())
    if Verdict.VIOLATED.value in values:
        return ExitCode.VIOLATED
    if Verdict.INCONCLUSIVE.value in values and not allow_inconclusive:
        return ExitCode.INCONCLUSIVE
    return ExitCode.OK


# =============================================================================
# kernel
# =============================================================================

def cmd_kernel(args: argparse.Namespace) -> ExitCode:
    """Inspect a kernel: stationary law, ergodicity and reversibility."""
    loader = KernelLoader()
    if args.source:
        kernel = loader.load_file(args.source, hold=args.hold)
    elif args.builder:
        params = dict(_parse_param(p) for p in args.param)
        kernel = loader.load_dict({"builder": args.builder, "params": params, "hold": args.hold})
    else:
        raise ExperimentError("kernel needs a file or --builder")

    ergodicity = check_ergodic(kernel.transition)
    reversibility = check_reversible(kernel)
    report = {
        "kernel": kernel.to_dict(),
        "ergodicity": ergodicity.to_dict(),
        "reversible": reversibility.reversible,
        "max_detailed_balance_violation": reversibility.max_violation,
        "stationary_residual": kernel.stationary_residual(),
    }

    print(colorize(f"\n{kernel.size}-state kernel", Style.BRIGHT))
    for state, weight in zip(kernel.states, kernel.stationary):
        print(f"  {colorize('pi(' + str(state) + ')', Fore.CYAN)} = {weight:.12g}")
    print(f"  {colorize('spectral gap:', Fore.CYAN)} {ergodicity.spectral_gap_estimate:.6g} ({ergodicity.gap_method})")
    print(f"  {colorize('period:', Fore.CYAN)} {ergodicity.period}")
    verdict = colorize("reversible", Fore.GREEN) if reversibility.reversible else colorize("not reversible", Fore.YELLOW)
    print(f"  {verdict} (max violation {reversibility.max_violation:.3e})")

    if args.out:
        path = _write_json(report, Path(args.out) / "kernel.json")
        print(colorize(f"\nWrote {path}", Style.DIM))
    return ExitCode.OK


# =============================================================================
# simulate
# =============================================================================

def _prepare(args: argparse.Namespace) -> tuple[ExperimentConfig, Config, MarkovKernel, Observable, int, Path]:
    experiment = load_experiment(args.config)
    if args.seed is not None:
        experiment = experiment.model_copy(update={"seed": args.seed})
    config = experiment.runtime_config()
    setup_logging(config.logging, args.log_level)
    kernel = experiment.build_kernel()
    f = experiment.build_observable(kernel)
    if not f.centered:
        raise ExperimentError(f"Observable is not centered under pi (mean {f.mean_under_pi!r}); set center = true")
    threads = config.resolve_threads(args.threads)
    out = Path(args.out or experiment.outputs.dir)
    return experiment, config, kernel, f, threads, out


def _write_ensemble(
    summary: EnsembleSummary, stem: str, out: Path, experiment: ExperimentConfig, manifest: RunManifest
) -> None:
    serializer = EnsembleSerializer()
    if experiment.outputs.csv:
        manifest.record_output(serializer.write_csv(summary, out / f"{stem}.csv"))
    if experiment.outputs.json_:
        manifest.record_output(serializer.write_json(summary, out / f"{stem}.json"))


def cmd_simulate(args: argparse.Namespace) -> ExitCode:
    """Quenched (and optionally annealed) ensembles per start state and horizon."""
    experiment, config, kernel, f, threads, out = _prepare(args)
    manifest = RunManifest(command="simulate", config_digest=experiment.digest(), seed=experiment.seed)
    scheme = martingale_scheme(kernel, f, experiment.m)
    count = experiment.count

    for n in sorted(set(experiment.n_grid)):
        if experiment.quenched:
            for x in experiment.start_states(kernel):
                with manifest.step("quenched"):
                    summary = quenched_ensemble(
                        kernel, f, experiment.m, x, n, count, experiment.seed,
                        grid=experiment.t_grid, config=config.simulation, threads=threads,
                        scheme=scheme, path_offset=kernel.resolve(x) * count,
                    )
                _write_ensemble(summary, f"quenched_x{_label(x)}_n{n}", out, experiment, manifest)
                print(f"  x={x} n={n}: endpoint variance {summary.aggregates()['endpoint_variance']:.6g}")
        if experiment.annealed:
            with manifest.step("annealed"):
                summary = annealed_ensemble(
                    kernel, f, experiment.m, n, count, experiment.seed,
                    grid=experiment.t_grid, config=config.simulation, threads=threads,
                    scheme=scheme, path_offset=kernel.size * count,
                )
            _write_ensemble(summary, f"annealed_n{n}", out, experiment, manifest)
            print(f"  pi n={n}: endpoint variance {summary.aggregates()['endpoint_variance']:.6g}")

    manifest.exit_code = ExitCode.OK
    manifest.write(out)
    print(colorize(f"\nWrote {len(manifest.outputs)} file(s) to {out}", Style.DIM))
    return ExitCode.OK


# =============================================================================
# diagnose
# =============================================================================

def _failed_report(condition: ConditionId, error: Exception) -> ConditionReport:
    return ConditionReport(
        condition_id=condition,
        sequence=(),
        verdict=Verdict.INCONCLUSIVE,
        notes=(f"Evaluation failed: {error}",),
    )


def _evaluate_conditions(
    experiment: ExperimentConfig,
    config: Config,
    kernel: MarkovKernel,
    f: Observable,
    threads: int,
) -> tuple[list[ConditionReport], dict[str, str]]:
    reports: list[ConditionReport] = []
    verdicts: dict[str, str] = {}
    paired: dict[str, tuple[ConditionReport, ConditionReport]] = {}

    for condition in dict.fromkeys(experiment.conditions):
        if condition in (ConditionId.NEGL_CLT, ConditionId.NEGL_FCLT):
            per_state = []
            for x in experiment.start_states(kernel):
                for eps in experiment.eps_grid:
                    report = negligibility_probe(
                        kernel, f, x, experiment.m_grid, experiment.n_grid, eps,
                        experiment.count, experiment.seed,
                        maximal=condition is ConditionId.NEGL_FCLT,
                        config=config.simulation, threads=threads,
                    )
                    reports.append(report)
                    per_state.append(report.verdict.value)
            verdicts[condition.value] = _aggregate(per_state, config.verdicts.fail_on_any_state)
            continue

        try:
            if condition is ConditionId.UI_FMGF:
                report = ui_probe(kernel, f, experiment.m_grid, experiment.level_grid)
            elif condition is ConditionId.STRONG:
                report = strong_condition_series(kernel, f, experiment.m_grid, experiment.j_max)
            elif condition is ConditionId.PROJECTIVE:
                report = projective_series(kernel, f, experiment.j_max)
            elif condition in (ConditionId.CONJ_DR, ConditionId.CONJ_KV):
                if "conjecture" not in paired:
                    paired["conjecture"] = conjecture_series(kernel, f)
                dr, kv = paired["conjecture"]
                report = dr if condition is ConditionId.CONJ_DR else kv
            elif condition in (ConditionId.COBOUNDARY, ConditionId.LQ_GF):
                if "coboundary" not in paired:
                    paired["coboundary"] = coboundary_check(kernel, f, m_grid=experiment.m_grid)
                cob, lq = paired["coboundary"]
                report = cob if condition is ConditionId.COBOUNDARY else lq
            else:
                report = mixing_clt_condition(kernel, f, experiment.j_max)
        except (OperatorError, DiagnosticsError) as e:
            logger.warning(f"{condition.value} could not be evaluated: {e}")
            report = _failed_report(condition, e)
        reports.append(report)
        verdicts[condition.value] = report.verdict.value
    return reports, verdicts


def _as_verdict(passed: bool) -> str:
    return Verdict.SATISFIED.value if passed else Verdict.VIOLATED.value


def _run_checks(
    experiment: ExperimentConfig,
    config: Config,
    kernel: MarkovKernel,
    f: Observable,
    threads: int,
) -> tuple[dict[str, Any], dict[str, str]]:
    checks: dict[str, Any] = {}
    verdicts: dict[str, str] = {}
    sim = config.simulation
    seed, count = experiment.seed, experiment.count
    n = max(experiment.n_grid)
    requested = list(dict.fromkeys(experiment.checks))
    starts = experiment.start_states(kernel)
    tolerances = config.tolerances
    sigma_sq = (
        long_run_variance(
            kernel, f, tolerance=tolerances.variance_series, clamp=tolerances.variance_clamp
        ).sigma_sq
        if {"clt", "fclt", "mixture"} & set(requested)
        else 0.0
    )
    bias, finite_n = tolerances.ks_bias_allowance, tolerances.ks_finite_n

    if "clt" in requested or "fclt" in requested:
        clt_verdicts, fclt_verdicts = [], []
        for x in starts:
            summary = quenched_ensemble(
                kernel, f, 1, x, n, count, seed, grid=experiment.t_grid, config=sim,
                threads=threads, path_offset=kernel.resolve(x) * count,
            )
            if "clt" in requested:
                test = clt_test(summary.normalized_endpoints, sigma_sq, bias_allowance=bias, n=n, finite_n=finite_n)
                checks[f"clt[x={x}]"] = test
                clt_verdicts.append(_as_verdict(test.passed))
            if "fclt" in requested:
                report = fclt_test(summary, sigma_sq, bias_allowance=bias, finite_n=finite_n)
                checks[f"fclt[x={x}]"] = report
                fclt_verdicts.append(_as_verdict(report.passed))
        if clt_verdicts:
            verdicts["clt"] = _aggregate(clt_verdicts, config.verdicts.fail_on_any_state)
        if fclt_verdicts:
            verdicts["fclt"] = _aggregate(fclt_verdicts, config.verdicts.fail_on_any_state)

    if "mixture" in requested:
        annealed = annealed_ensemble(
            kernel, f, 1, n, count, seed, config=sim, threads=threads, path_offset=kernel.size * count,
        )
        per_state = quenched_by_state(kernel, f, 1, n, count, seed, config=sim, threads=threads)
        test = mixture_identity_check(kernel, annealed, per_state)
        checks["mixture"] = test
        verdicts["mixture"] = _as_verdict(test.passed)

    if "rio" in requested:
        check = rio_bound_check(kernel, f, min(experiment.n_grid), count=count, seed=seed, config=sim)
        checks["rio"] = check
        verdicts["rio"] = _as_verdict(check.holds)

    if "maximal" in requested:
        outcomes = []
        for x in starts:
            report = maximal_bound_check(
                kernel, f, x, experiment.n_grid, count, seed, config=sim, threads=threads
            )
            checks[f"maximal[x={x}]"] = report
            outcomes.append(_as_verdict(report.holds))
        verdicts["maximal"] = _aggregate(outcomes, config.verdicts.fail_on_any_state)

    if "martingale_average" in requested:
        # reported only; convergence of the averages has no finite-n verdict
        for x in starts:
            checks[f"martingale_average[x={x}]"] = martingale_average_check(
                kernel, f, experiment.m, x, n, seed, grid=experiment.t_grid
            )

    if "transition_frequency" in requested:
        outcomes = []
        for x in starts:
            check = transition_frequency_check(kernel, x, n, seed)
            checks[f"transition_frequency[x={x}]"] = check
            outcomes.append(_as_verdict(check.passed))
        verdicts["transition_frequency"] = _aggregate(outcomes, config.verdicts.fail_on_any_state)

    return checks, verdicts


def cmd_diagnose(args: argparse.Namespace) -> ExitCode:
    """Evaluate the requested conditions and checks and fold them into an exit code."""
    experiment, config, kernel, f, threads, out = _prepare(args)
    if not experiment.conditions and not experiment.checks:
        raise ExperimentError("No conditions or checks requested")
    manifest = RunManifest(command="diagnose", config_digest=experiment.digest(), seed=experiment.seed)

    with manifest.step("conditions"):
        reports, verdicts = _evaluate_conditions(experiment, config, kernel, f, threads)
    with manifest.step("checks"):
        checks, check_verdicts = _run_checks(experiment, config, kernel, f, threads)
    verdicts.update(check_verdicts)

    serializer = ReportSerializer()
    if experiment.outputs.json_:
        manifest.record_output(serializer.write_json(reports, out / "diagnostics.json", checks))
    if experiment.outputs.csv and reports:
        manifest.record_output(serializer.write_csv(reports, out / "diagnostics.csv"))

    print(colorize("\nVerdicts:", Style.BRIGHT))
    for name, verdict in verdicts.items():
        print(f"  {name:<22} {colorize(verdict, VERDICT_COLORS.get(verdict, ''))}")

    allow = args.allow_inconclusive or config.verdicts.allow_inconclusive
    code = _exit_for(verdicts, allow)
    manifest.verdicts = verdicts
    manifest.exit_code = int(code)
    manifest.write(out)
    return code


# =============================================================================
# counterexample
# =============================================================================

def cmd_counterexample(args: argparse.Namespace) -> ExitCode:
    """Divergent series against the bounded maximal function at truncation K."""
    if not 1 <= args.K <= MAX_LEVELS:
        raise ExperimentError(f"K must lie in [1, {MAX_LEVELS}], got {args.K}")
    config = Config.from_toml(args.config) if args.config else Config()
    setup_logging(config.logging, args.log_level)
    threads = config.resolve_threads(args.threads)
    manifest = RunManifest(command="counterexample", seed=args.seed)

    with manifest.step("contrast"):
        try:
            report = contrast(args.K, args.count, args.seed, a=args.a, threads=threads)
        except CounterexampleError as e:
            raise ExperimentError(str(e)) from e
    example = build_truncated_example(args.K, a=args.a, seed=args.seed)
    report["example"] = describe(example)
    try:
        report["exact_sup"] = exact_sup_value(example)
    except EnumerationTooLarge:
        report["exact_sup"] = None

    print(colorize(f"\nTruncated example, K={args.K}", Style.BRIGHT))
    for level in report["series"]:
        print(f"  K={level['K']}: series {level['value']:.6f} (lower bound {level['lower_bound']:.6f})")
    sup = report["sup"]
    print(
        f"  sup estimate {sup['estimate']:.4f} +/- {sup['standard_error']:.4f} "
        f"(bound {sup['upper_bound']:.4f})"
    )

    series_ok = all(level["value"] >= level["lower_bound"] - 1e-12 for level in report["series"])
    verdicts = {
        "series_lower_bound": _as_verdict(series_ok),
        "sup_bound": _as_verdict(sup["holds"]),
    }
    code = _exit_for(verdicts, allow_inconclusive=False)

    if args.out:
        out = Path(args.out)
        manifest.record_output(_write_json(report, out / "counterexample.json"))
        manifest.verdicts = verdicts
        manifest.exit_code = int(code)
        manifest.write(out)
    return code


# =============================================================================
# entry point
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qclt",
        description="Quenched CLT toolkit for finite Markov chains",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="Logging level (default: from config, INFO)")

    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    kernel_parser = subparsers.add_parser("kernel", help="Inspect a kernel")
    kernel_parser.add_argument("source", nargs="?", help="Kernel file (YAML or JSON)")
    kernel_parser.add_argument("--builder", help="Corpus builder name (e.g. two_state)")
    kernel_parser.add_argument("--param", action="append", default=[], help="Builder parameter key=value")
    kernel_parser.add_argument("--hold", type=float, default=None, help="Holding probability (lazy version)")
    kernel_parser.add_argument("--out", help="Directory for kernel.json")

    for name, help_text in (("simulate", "Run quenched/annealed ensembles"), ("diagnose", "Evaluate conditions")):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", "-c", required=True, help="Experiment file (TOML, YAML or JSON)")
        sub.add_argument("--seed", type=int, default=None, help="Override the experiment's master seed")
        sub.add_argument("--threads", type=int, default=None, help="Worker threads (default: QCLT_THREADS or config)")
        sub.add_argument("--out", help="Output directory (default: outputs.dir)")
        if name == "diagnose":
            sub.add_argument("--allow-inconclusive", action="store_true", help="Exit 0 on inconclusive verdicts")

    ce_parser = subparsers.add_parser("counterexample", help="Truncated counterexample contrast")
    ce_parser.add_argument("--K", type=int, default=3, help=f"Number of levels (1..{MAX_LEVELS})")
    ce_parser.add_argument("--count", type=int, default=10_000, help="Monte Carlo draws")
    ce_parser.add_argument("--seed", type=int, required=True, help="Master seed")
    ce_parser.add_argument("--a", type=float, default=0.25, help="Base of rho_k = a^k")
    ce_parser.add_argument("--threads", type=int, default=None, help="Worker threads")
    ce_parser.add_argument("--config", "-c", default=None, help="Runtime settings (TOML)")
    ce_parser.add_argument("--out", help="Output directory")

    return parser


COMMANDS = {
    "kernel": cmd_kernel,
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
    "counterexample": cmd_counterexample,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return ExitCode.CONFIG_ERROR

    setup_logging(level=args.log_level)
    try:
        return int(COMMANDS[args.command](args))
    except KernelError as e:
        print(colorize(f"Invalid kernel: {e}", Fore.RED), file=sys.stderr)
        return ExitCode.INVALID_KERNEL
    except (ValidationError, ExperimentError, NotCentered, SimulationError, ValueError) as e:
        print(colorize(f"Invalid configuration: {e}", Fore.RED), file=sys.stderr)
        return ExitCode.CONFIG_ERROR
    except OSError as e:
        print(colorize(f"I/O error: {e}", Fore.RED), file=sys.stderr)
        return ExitCode.IO_ERROR


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
