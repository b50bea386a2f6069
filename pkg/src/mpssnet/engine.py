"""Evaluation, classification, decomposition checks and alpha sweeps."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from mpssnet import models
from mpssnet.datasets import ParallelDataset, SharedInputDataset, alpha_grid, omega_weights
from mpssnet.errors import MpssError, UnclassifiableError
from mpssnet.lp import LinearProgram, LpSolution, Status, Tolerances, check_certificate, solve

log = logging.getLogger(__name__)

TAU_CLASS = 1e-6
# 4-decimal tables print anything below this as 0.0000
TAU_DISPLAY = 5e-5

Dataset = Union[ParallelDataset, SharedInputDataset]


@dataclass(frozen=True)
class SolvedLp:
    label: str
    lp: LinearProgram
    solution: LpSolution
    certified: Optional[bool] = None


@dataclass(frozen=True)
class MpssResult:
    """Scores of one DMU. Score fields are ``None`` unless every program was optimal."""

    dmu: str
    mode: str
    status: str
    subsystems: Tuple[str, ...] = ()
    statuses: Tuple[str, ...] = ()
    omega: Tuple[float, ...] = ()
    theta_sub: Optional[Tuple[float, ...]] = None
    phi_sub: Optional[Tuple[float, ...]] = None
    theta: Optional[float] = None
    phi: Optional[float] = None
    certified: Tuple[bool, ...] = ()
    alpha: Optional[float] = None
    overall_mpss: Optional[bool] = None
    subsystem_mpss: Optional[Tuple[bool, ...]] = None
    warnings: Tuple[str, ...] = ()
    error: Optional[str] = None

    @property
    def optimal(self) -> bool:
        return self.status == Status.OPTIMAL.value

    @property
    def scores(self) -> Optional[Tuple[float, ...]]:
        if self.theta_sub is None:
            return None
        return tuple(p - t for p, t in zip(self.phi_sub, self.theta_sub))

    @property
    def score(self) -> Optional[float]:
        if self.theta is None:
            return None
        return self.phi - self.theta

    @property
    def audited(self) -> bool:
        return bool(self.certified) and all(self.certified)


@dataclass(frozen=True)
class Classification:
    overall: bool
    subsystems: Tuple[bool, ...]


def _solve_all(lps: Sequence[Tuple[str, LinearProgram]], tol: Tolerances) -> List[SolvedLp]:
    out = []
    for label, lp in lps:
        sol = solve(lp, tol)
        cert = check_certificate(lp, sol, tol).passed if sol.optimal else None
        out.append(SolvedLp(label, lp, sol, cert))
    return out


def build_programs(
    ds: Dataset,
    o: int,
    omega=None,
    structure_mode: str = "decoupled",
    alpha: Optional[float] = None,
    alpha_mode: str = "uniform",
) -> List[Tuple[str, LinearProgram]]:
    """Labelled programs needed to score DMU ``o``."""
    if structure_mode not in models.STRUCTURE_MODES:
        raise ValueError(f"structure_mode must be one of {models.STRUCTURE_MODES}")
    dmu = ds.dmus[o]
    tag = "" if alpha is None else f" alpha={alpha:g}"
    if isinstance(ds, SharedInputDataset):
        if alpha is None:
            raise ValueError("a shared-input dataset needs alpha")
        lps = models.build_shared_mpss(ds, o, alpha, omega, structure_mode, alpha_mode)
        if structure_mode == "joint":
            return [(f"{dmu}{tag} joint", lps[0])]
        return [(f"{dmu}{tag} {ds.subsystems[t]}", lp) for t, lp in enumerate(lps)]
    if structure_mode == "joint":
        return [(f"{dmu} joint", models.build_joint_parallel_mpss(ds, o, omega))]
    return [(f"{dmu} {ds.subsystems[t]}", models.build_subsystem_mpss(ds, t, o)) for t in range(ds.h)]


def _decode(ds: Dataset, o: int, w, structure_mode, solved: List[SolvedLp], alpha, alpha_mode, tau) -> MpssResult:
    h = ds.h
    statuses = tuple(s.solution.status.value for s in solved)
    certified = tuple(bool(s.certified) for s in solved if s.solution.optimal)
    common = dict(dmu=ds.dmus[o], mode=structure_mode, statuses=statuses, subsystems=ds.subsystems,
                  omega=tuple(float(v) for v in w), certified=certified, alpha=alpha)
    bad = [s for s in solved if not s.solution.optimal]
    if bad:
        return MpssResult(status=bad[0].solution.status.value, **common)
    if structure_mode == "joint":
        x = solved[0].solution.x
        n = ds.n
        base = (h + 1) * n
        theta_sub = tuple(float(v) for v in x[base:base + h])
        phi_sub = tuple(float(v) for v in x[base + h:base + 2 * h])
        theta, phi = float(x[base + 2 * h]), float(x[base + 2 * h + 1])
    else:
        theta_sub = tuple(s.solution.x[-2] for s in solved)
        phi_sub = tuple(s.solution.x[-1] for s in solved)
        theta_sub = tuple(float(v) for v in theta_sub)
        phi_sub = tuple(float(v) for v in phi_sub)
        theta = float(np.dot(w, theta_sub))
        phi = float(np.dot(w, phi_sub))
    notes = []
    for t in range(h):
        score_t = phi_sub[t] - theta_sub[t]
        if score_t < -tau:
            notes.append(f"negative score {score_t:.6g} in subsystem {ds.subsystems[t]}")
    if not all(certified):
        notes.append("certificate check failed; result unaudited")
    # negative subsystem scores are expected under the target-only split
    level = logging.WARNING if structure_mode == "joint" or alpha_mode == "uniform" else logging.DEBUG
    for note in notes:
        log.log(level, "DMU %s: %s", ds.dmus[o], note)
    res = MpssResult(status=Status.OPTIMAL.value, theta_sub=theta_sub, phi_sub=phi_sub,
                     theta=theta, phi=phi, warnings=tuple(notes), **common)
    flags = classify(res, tau)
    return replace(res, overall_mpss=flags.overall, subsystem_mpss=flags.subsystems)


def evaluate(
    ds: Dataset,
    o: int,
    omega=None,
    structure_mode: str = "decoupled",
    *,
    alpha: Optional[float] = None,
    alpha_mode: str = "uniform",
    tol: Optional[Tolerances] = None,
    tau: float = TAU_CLASS,
) -> MpssResult:
    """Score DMU ``o`` overall and per subsystem.

    In ``"decoupled"`` mode each subsystem is solved alone and the overall
    factors are the omega-weighted sums of the subsystem factors. In
    ``"joint"`` mode the single relational program is solved and every factor
    is read off its optimal solution; an infeasible joint program yields a
    result without scores.
    """
    w = omega_weights(ds.h, omega)
    tol = tol or Tolerances()
    lps = build_programs(ds, o, w, structure_mode, alpha, alpha_mode)
    solved = _solve_all(lps, tol)
    return _decode(ds, o, w, structure_mode, solved, alpha, alpha_mode, tau)


def classify(result: MpssResult, tau: float = TAU_CLASS) -> Classification:
    """MPSS flags: a score counts as zero when it does not exceed ``tau``."""
    if not result.optimal or result.scores is None:
        raise UnclassifiableError(f"DMU {result.dmu} has status {result.status}")
    return Classification(result.score <= tau, tuple(s <= tau for s in result.scores))


def verify_decomposition(result: MpssResult, omega=None, tau: float = 1e-7) -> Tuple[bool, float]:
    """Check that the overall score equals the omega-weighted subsystem scores."""
    if result.scores is None:
        raise UnclassifiableError(f"DMU {result.dmu} has status {result.status}")
    w = omega_weights(len(result.scores), omega if omega is not None else result.omega)
    residual = abs(result.score - float(np.dot(w, result.scores)))
    return residual <= tau, residual


def _failed(ds: Dataset, o: int, mode: str, alpha, exc: Exception) -> MpssResult:
    return MpssResult(dmu=ds.dmus[o], mode=mode, status="Error", alpha=alpha, subsystems=ds.subsystems,
                      error=f"{type(exc).__name__}: {exc}")


def _evaluate_cell(args) -> MpssResult:
    ds, o, w, mode, alpha, alpha_mode, tol, tau = args
    try:
        return evaluate(ds, o, w, mode, alpha=alpha, alpha_mode=alpha_mode, tol=tol, tau=tau)
    except MpssError as exc:
        return _failed(ds, o, mode, alpha, exc)


def _run(tasks: list, jobs: int) -> List[MpssResult]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_evaluate_cell, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_evaluate_cell(t) for t in tasks]


def evaluate_all(
    ds: Dataset,
    omega=None,
    structure_mode: str = "decoupled",
    *,
    alpha: Optional[float] = None,
    alpha_mode: str = "uniform",
    tol: Optional[Tolerances] = None,
    tau: float = TAU_CLASS,
    jobs: int = 1,
) -> List[MpssResult]:
    """Evaluate every DMU in dataset order. Per-DMU failures are recorded, not raised."""
    if ds.n == 0:
        return []
    w = omega_weights(ds.h, omega)
    tasks = [(ds, o, w, structure_mode, alpha, alpha_mode, tol, tau) for o in range(ds.n)]
    return _run(tasks, jobs)


@dataclass(frozen=True)
class Summary:
    """Footer row values for one column. Fields are NaN when no cell was scored."""

    count: int
    mean: float
    min: float
    max: float

    @property
    def available(self) -> bool:
        return not math.isnan(self.mean)


def summarize_scores(values: Sequence[Optional[float]], tau: float = TAU_CLASS) -> Summary:
    """Count of MPSS cells plus mean/min/max over the scored cells."""
    vals = [v for v in values if v is not None]
    if not vals:
        return Summary(0, math.nan, math.nan, math.nan)
    arr = np.array(vals, dtype=float)
    return Summary(int(np.sum(arr <= tau)), float(arr.mean()), float(arr.min()), float(arr.max()))


@dataclass(frozen=True)
class SweepResult:
    """Scores over an alpha grid: ``cells[k][o]`` is DMU ``o`` at ``alphas[k]``."""

    dmus: Tuple[str, ...]
    subsystems: Tuple[str, ...]
    alphas: Tuple[float, ...]
    epsilon: float
    mode: str
    alpha_mode: str
    cells: Tuple[Tuple[MpssResult, ...], ...]
    tau: float = TAU_CLASS
    table_names: Tuple[str, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "table_names", ("overall",) + tuple(self.subsystems))

    def table(self, name: str = "overall") -> List[List[Optional[float]]]:
        """Rows = DMUs, columns = alphas; ``None`` where the cell has no score."""
        if name == "overall":
            pick = lambda r: r.score  # noqa: E731
        else:
            t = self.subsystems.index(name)
            pick = lambda r: None if r.scores is None else r.scores[t]  # noqa: E731
        return [[pick(self.cells[k][o]) for k in range(len(self.alphas))]
                for o in range(len(self.dmus))]

    def summary(self, name: str = "overall") -> List[Summary]:
        grid = self.table(name)
        return [summarize_scores([row[k] for row in grid], self.tau) for k in range(len(self.alphas))]


def sweep(
    ds: SharedInputDataset,
    epsilon: float = 0.1,
    omega=None,
    structure_mode: str = "decoupled",
    alpha_mode: str = "uniform",
    *,
    tol: Optional[Tolerances] = None,
    tau: float = TAU_CLASS,
    jobs: int = 1,
) -> SweepResult:
    """Evaluate every DMU at each split ``alpha = k * epsilon``."""
    grid = alpha_grid(epsilon)
    w = omega_weights(ds.h, omega)
    tasks = [(ds, o, w, structure_mode, a, alpha_mode, tol, tau)
             for a in grid.alphas for o in range(ds.n)]
    flat = _run(tasks, jobs)
    n = ds.n
    cells = tuple(tuple(flat[k * n:(k + 1) * n]) for k in range(len(grid.alphas)))
    return SweepResult(ds.dmus, ds.subsystems, grid.alphas, epsilon, structure_mode,
                       alpha_mode, cells, tau)


def summarize(
    data: Union[Sequence[MpssResult], SweepResult], tau: Optional[float] = None
) -> dict:
    """Footer rows keyed by column name.

    For a result list the columns are the subsystems plus ``"overall"``; for a
    sweep the keys are table names mapping to one :class:`Summary` per alpha.
    """
    if isinstance(data, SweepResult):
        if tau is not None and tau != data.tau:
            data = SweepResult(data.dmus, data.subsystems, data.alphas, data.epsilon,
                               data.mode, data.alpha_mode, data.cells, tau)
        return {name: data.summary(name) for name in data.table_names}
    tau = TAU_CLASS if tau is None else tau
    results = list(data)
    h = max((len(r.scores) for r in results if r.scores is not None), default=0)
    out = {}
    for t in range(h):
        out[t] = summarize_scores([None if r.scores is None else r.scores[t] for r in results], tau)
    out["overall"] = summarize_scores([r.score for r in results], tau)
    return out


@dataclass
class AuditReport:
    checked: List[Tuple[str, object]] = field(default_factory=list)  # (label, CertificateReport)
    not_optimal: List[Tuple[str, str]] = field(default_factory=list)  # (label, status)
    errors: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def failures(self):
        return [(label, rep) for label, rep in self.checked if not rep.passed]

    @property
    def passed(self) -> bool:
        return not self.failures


def audit(
    ds: Dataset,
    omega=None,
    structure_mode: str = "decoupled",
    *,
    alphas: Optional[Sequence[float]] = None,
    alpha_mode: str = "uniform",
    tol: Optional[Tolerances] = None,
) -> AuditReport:
    """Re-solve every program for the dataset and check each optimal certificate."""
    tol = tol or Tolerances()
    w = omega_weights(ds.h, omega)
    report = AuditReport()
    grid = [None] if alphas is None else list(alphas)
    for a in grid:
        for o in range(ds.n):
            try:
                lps = build_programs(ds, o, w, structure_mode, a, alpha_mode)
            except MpssError as exc:
                report.errors.append((ds.dmus[o], str(exc)))
                continue
            for label, lp in lps:
                try:
                    sol = solve(lp, tol)
                except MpssError as exc:
                    report.errors.append((label, str(exc)))
                    continue
                if sol.optimal:
                    report.checked.append((label, check_certificate(lp, sol, tol)))
                else:
                    report.not_optimal.append((label, sol.status.value))
    return report
