"""Command-line entry point: ``mpss evaluate | sweep | describe | audit``.

Exit codes: 0 success, 2 invalid input or config, 3 solver failure,
4 certificate audit failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from mpssnet import engine
from mpssnet import io as dio
from mpssnet.datasets import SharedInputDataset, alpha_grid, omega_weights
from mpssnet.errors import DatasetError, IterationLimitError, MpssError

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_AUDIT = 0, 2, 3, 4

log = logging.getLogger("mpssnet")


@dataclass
class RunConfig:
    dataset: Path
    config: Path
    mode: str = "decoupled"
    alpha_mode: str = "uniform"
    epsilon: float = 0.1
    alpha: float = 0.5
    omega: Optional[List[float]] = None
    tau: float = engine.TAU_CLASS
    out: Optional[Path] = None
    fmt: str = "csv"
    jobs: int = 1
    verbosity: int = 0


def _parse_omega(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--omega expects a comma list of numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", required=True, type=Path, help="CSV dataset")
    common.add_argument("--config", type=Path,
                        help="sidecar config (default: dataset path with .cfg suffix)")
    common.add_argument("--mode", choices=["decoupled", "joint"],
                        help="solve subsystems separately or as one relational program (default: decoupled)")
    common.add_argument("--alpha-mode", choices=["uniform", "target-only"],
                        help="how the shared-input split enters the programs (default: uniform)")
    common.add_argument("--epsilon", type=float, help="alpha grid spacing for sweeps (default: 0.1)")
    common.add_argument("--alpha", type=float,
                        help="split used by evaluate/audit on a shared-input dataset (default: 0.5)")
    common.add_argument("--omega", type=_parse_omega, help="subsystem weights, comma list (default: all 1)")
    common.add_argument("--tolerance-class", type=float, dest="tau",
                        help=f"score at or below which a DMU counts as MPSS (default: {engine.TAU_CLASS:g})")
    common.add_argument("--out", type=Path, help="output file (default: stdout for csv/json text)")
    common.add_argument("--format", choices=["csv", "json"], dest="fmt", help="output format (default: csv)")
    common.add_argument("--jobs", type=int, help="worker processes (default: 1)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="mpss", description="Most productive scale size of parallel networks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("evaluate", parents=[common], help="score every DMU")
    sub.add_parser("sweep", parents=[common], help="score every DMU over the alpha grid (shared inputs)")
    sub.add_parser("describe", parents=[common], help="descriptive statistics of the data columns")
    sub.add_parser("audit", parents=[common], help="re-solve and check every LP certificate")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, sidecar run settings and flags; flags win."""
    cfg_path = args.config or dio.default_config_path(args.dataset)
    run = RunConfig(dataset=args.dataset, config=cfg_path)
    file_cfg = dio.read_config(cfg_path) if Path(cfg_path).exists() else {}
    if "mode" in file_cfg:
        run.mode = file_cfg["mode"]
    if "alpha_mode" in file_cfg:
        run.alpha_mode = file_cfg["alpha_mode"]
    if "epsilon" in file_cfg:
        run.epsilon = float(file_cfg["epsilon"])
    if "omega" in file_cfg:
        run.omega = _parse_omega(file_cfg["omega"])
    if "tolerance_class" in file_cfg:
        run.tau = float(file_cfg["tolerance_class"])
    for name in ("mode", "alpha_mode", "epsilon", "alpha", "omega", "tau", "out", "fmt", "jobs"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(run, name, value)
    run.verbosity = args.verbose
    if run.mode not in ("decoupled", "joint") or run.alpha_mode not in ("uniform", "target-only"):
        raise ValueError(f"invalid mode {run.mode!r} / alpha mode {run.alpha_mode!r}")
    if run.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    return run


def _emit(text: str, run: RunConfig) -> None:
    if run.out is None:
        sys.stdout.write(text)
    else:
        with open(run.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_evaluate(run: RunConfig, ds) -> int:
    alpha = run.alpha if isinstance(ds, SharedInputDataset) else None
    results = engine.evaluate_all(ds, run.omega, run.mode, alpha=alpha, alpha_mode=run.alpha_mode,
                                  tau=run.tau, jobs=run.jobs)
    _emit(dio.render_results(results, run.fmt, subsystems=ds.subsystems), run)
    failed = [r for r in results if r.status == "Error"]
    for r in failed:
        print(f"error: DMU {r.dmu}: {r.error}", file=sys.stderr)
    for r in results:
        if r.status not in ("Optimal", "Error"):
            print(f"note: DMU {r.dmu}: program {r.status} in {r.mode} mode", file=sys.stderr)
    n_mpss = sum(bool(r.overall_mpss) for r in results)
    print(f"MPSS: {n_mpss} / {len(results)} DMUs ({run.mode} mode)", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_sweep(run: RunConfig, ds) -> int:
    if not isinstance(ds, SharedInputDataset):
        raise ValueError("sweep needs a shared-input dataset (structure = shared)")
    alpha_grid(run.epsilon)
    result = engine.sweep(ds, run.epsilon, run.omega, run.mode, run.alpha_mode,
                          tau=run.tau, jobs=run.jobs)
    if run.out is not None:
        paths = dio.write_sweep_tables(result, run.out, run.fmt)
        for p in paths:
            print(f"wrote {p}", file=sys.stderr)
    elif run.fmt == "json":
        _emit(dio.render_results(result, "json"), run)
    else:
        for name in result.table_names:
            sys.stdout.write(dio.sweep_table_csv(result, name) + "\n")
    failed = [c for col in result.cells for c in col if c.status == "Error"]
    for c in failed:
        print(f"error: DMU {c.dmu} alpha={c.alpha:g}: {c.error}", file=sys.stderr)
    counts = " ".join(str(s.count) for s in result.summary("overall"))
    print(f"overall MPSS counts per partition: {counts}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_describe(run: RunConfig, ds) -> int:
    _emit(dio.render_stats(dio.describe(ds), run.fmt), run)
    return EXIT_OK


def cmd_audit(run: RunConfig, ds) -> int:
    shared = isinstance(ds, SharedInputDataset)
    alphas = alpha_grid(run.epsilon).alphas if shared else None
    report = engine.audit(ds, run.omega, run.mode, alphas=alphas, alpha_mode=run.alpha_mode)
    lines = [f"# certificate audit; mode={run.mode}"]
    for label, rep in report.checked:
        lines.append(f"{label}: {rep}")
    for label, status in report.not_optimal:
        lines.append(f"{label}: not audited ({status})")
    for label, msg in report.errors:
        lines.append(f"{label}: error ({msg})")
    lines.append(f"audited {len(report.checked)} LPs, {len(report.failures)} failed, "
                 f"{len(report.not_optimal)} without an optimum")
    _emit("\n".join(lines) + "\n", run)
    print(lines[-1], file=sys.stderr)
    if report.failures:
        for label, rep in report.failures:
            print(f"certificate failed: {label}: {rep}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_SOLVER if report.errors else EXIT_OK


COMMANDS = {"evaluate": cmd_evaluate, "sweep": cmd_sweep, "describe": cmd_describe, "audit": cmd_audit}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = resolve_config(args)
        ds = dio.load_dataset(run.dataset, run.config)
        if run.omega is not None:
            omega_weights(ds.h, run.omega)
        return COMMANDS[args.command](run, ds)
    except DatasetError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INVALID
    except IterationLimitError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (MpssError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
