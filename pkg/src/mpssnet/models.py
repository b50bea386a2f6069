"""Linear programs for MPSS and CCR scores of parallel and shared-input networks.

All MPSS programs maximise ``phi - theta`` where ``theta`` scales the
evaluated DMU's inputs and ``phi`` its outputs, against a convex (VRS)
combination of observed DMUs. A score of zero means the DMU is at its most
productive scale size.

Variable order of the joint program, relied on for decoding::

    lambda[t=1] (n) ... lambda[t=h] (n), mu (n),
    theta[1] ... theta[h], phi[1] ... phi[h], theta, phi
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np

from mpssnet.datasets import ParallelDataset, SharedInputDataset, omega_weights
from mpssnet.errors import AlphaOutOfRangeError, DegenerateDmuError, ShapeMismatchError
from mpssnet.lp import LinearProgram, Relation

STRUCTURE_MODES = ("decoupled", "joint")
ALPHA_MODES = ("uniform", "target-only")


def _as_2d(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    return arr.reshape(-1, 1) if arr.ndim == 1 else arr


def _check_dmu(X, Y, o: int, label: str = "") -> None:
    n = X.shape[0]
    if Y.shape[0] != n:
        raise ShapeMismatchError(f"inputs have {n} rows, outputs {Y.shape[0]}")
    if not 0 <= o < n:
        raise IndexError(f"DMU index {o} outside 0..{n - 1}")
    if not np.any(Y[o] > 0):
        raise DegenerateDmuError(f"DMU {o} has no positive output{label}")


class _Rows:
    """Accumulates constraint rows over a fixed number of variables."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.A: List[np.ndarray] = []
        self.rel: List[Relation] = []
        self.b: List[float] = []
        self.names: List[str] = []

    def add(self, coeffs: list, rel: Relation, rhs: float, name: str) -> None:
        row = np.zeros(self.n_vars)
        for idx, val in coeffs:
            row[idx] += val
        self.A.append(row)
        self.rel.append(rel)
        self.b.append(rhs)
        self.names.append(name)

    def envelope(self, lam: slice, theta: int, phi: int, X, Y, x_ref, y_ref, tag: str) -> None:
        """sum lam X <= theta x_ref, sum lam Y >= phi y_ref, sum lam = 1."""
        for i in range(X.shape[1]):
            self.add([(lam, X[:, i]), (theta, -x_ref[i])], Relation.LE, 0.0, f"{tag}.input{i + 1}")
        for r in range(Y.shape[1]):
            self.add([(lam, Y[:, r]), (phi, -y_ref[r])], Relation.GE, 0.0, f"{tag}.output{r + 1}")
        self.add([(lam, 1.0)], Relation.EQ, 1.0, f"{tag}.convexity")

    def program(self, objective, names) -> LinearProgram:
        A = np.array(self.A).reshape(len(self.A), self.n_vars)
        return LinearProgram(objective, A, tuple(self.rel), self.b, names=names, row_names=tuple(self.names))


def _vrs_mpss(X, Y, o: int, x_ref=None, tag: str = "sys", var_tag: str = "") -> LinearProgram:
    X, Y = _as_2d(X), _as_2d(Y)
    _check_dmu(X, Y, o)
    n = X.shape[0]
    x_ref = X[o] if x_ref is None else np.asarray(x_ref, dtype=float)
    rows = _Rows(n + 2)
    rows.envelope(slice(0, n), n, n + 1, X, Y, x_ref, Y[o], tag)
    c = np.zeros(n + 2)
    c[n], c[n + 1] = -1.0, 1.0
    names = tuple(f"lambda{var_tag}[{j}]" for j in range(n)) + (f"theta{var_tag}", f"phi{var_tag}")
    return rows.program(c, names)


def build_subsystem_mpss(ds: ParallelDataset, t: int, o: int) -> LinearProgram:
    """MPSS program of subsystem ``t`` alone: variables ``[lambda_1..n, theta, phi]``."""
    if not 0 <= t < ds.h:
        raise IndexError(f"subsystem index {t} outside 0..{ds.h - 1}")
    return _vrs_mpss(ds.X[t], ds.Y[t], o, tag=f"sub{t + 1}", var_tag=f"{t + 1}")


def build_blackbox_mpss(X, Y, o: int) -> LinearProgram:
    """MPSS program on aggregate data: variables ``[mu_1..n, theta, phi]``."""
    lp = _vrs_mpss(X, Y, o, tag="sys")
    n = lp.n_vars - 2
    names = tuple(f"mu[{j}]" for j in range(n)) + ("theta", "phi")
    return LinearProgram(lp.objective, lp.A, lp.relations, lp.rhs, names=names, row_names=lp.row_names)


def build_ccr(X, Y, o: int) -> LinearProgram:
    """Input-oriented CRS envelopment: ``min theta`` posed as ``max -theta``.

    Variables ``[lambda_1..n, theta]``; the optimum objective is ``-theta*``.
    """
    X, Y = _as_2d(X), _as_2d(Y)
    _check_dmu(X, Y, o)
    n = X.shape[0]
    rows = _Rows(n + 1)
    lam = slice(0, n)
    for i in range(X.shape[1]):
        rows.add([(lam, X[:, i]), (n, -X[o, i])], Relation.LE, 0.0, f"ccr.input{i + 1}")
    for r in range(Y.shape[1]):
        rows.add([(lam, Y[:, r])], Relation.GE, Y[o, r], f"ccr.output{r + 1}")
    c = np.zeros(n + 1)
    c[n] = -1.0
    return rows.program(c, tuple(f"lambda[{j}]" for j in range(n)) + ("theta",))


def _joint(blocks: Sequence[tuple], X_sys, Y_sys, o: int, omega) -> LinearProgram:
    """Joint program; ``blocks`` holds ``(X_t, Y_t, x_ref_t)`` per subsystem."""
    h = len(blocks)
    X_sys, Y_sys = _as_2d(X_sys), _as_2d(Y_sys)
    n = X_sys.shape[0]
    w = omega_weights(h, omega)
    _check_dmu(X_sys, Y_sys, o, " in the system totals")
    lam = [slice(t * n, (t + 1) * n) for t in range(h)]
    mu = slice(h * n, (h + 1) * n)
    th = [(h + 1) * n + t for t in range(h)]
    ph = [(h + 1) * n + h + t for t in range(h)]
    theta, phi = (h + 1) * n + 2 * h, (h + 1) * n + 2 * h + 1
    rows = _Rows(phi + 1)
    for t, (Xt, Yt, x_ref) in enumerate(blocks):
        Xt, Yt = _as_2d(Xt), _as_2d(Yt)
        _check_dmu(Xt, Yt, o, f" in subsystem {t + 1}")
        rows.envelope(lam[t], th[t], ph[t], Xt, Yt, x_ref, Yt[o], f"sub{t + 1}")
    rows.envelope(mu, theta, phi, X_sys, Y_sys, X_sys[o], Y_sys[o], "sys")
    rows.add([(theta, 1.0)] + [(th[t], -w[t]) for t in range(h)], Relation.EQ, 0.0, "link.theta")
    rows.add([(phi, 1.0)] + [(ph[t], -w[t]) for t in range(h)], Relation.EQ, 0.0, "link.phi")
    c = np.zeros(phi + 1)
    c[theta], c[phi] = -1.0, 1.0
    names = (
        tuple(f"lambda{t + 1}[{j}]" for t in range(h) for j in range(n))
        + tuple(f"mu[{j}]" for j in range(n))
        + tuple(f"theta{t + 1}" for t in range(h))
        + tuple(f"phi{t + 1}" for t in range(h))
        + ("theta", "phi")
    )
    return rows.program(c, names)


def build_joint_parallel_mpss(ds: ParallelDataset, o: int, omega=None) -> LinearProgram:
    """Relational program scoring subsystems and system in one solve.

    The optimum is the overall score; ``phi[t] - theta[t]`` in the optimal
    solution is the subsystem score. With ``omega = 1`` the program can be
    feasible only when the system can match the summed subsystem factors.
    """
    blocks = [(ds.X[t], ds.Y[t], ds.X[t][o]) for t in range(ds.h)]
    return _joint(blocks, ds.X_total, ds.Y_total, o, omega)


def split_shared_inputs(X, alpha: float):
    """Return ``(alpha * X, (1 - alpha) * X)`` with the pieces adding back to ``X`` exactly.

    The larger piece is the rounded product; the smaller one is ``X`` minus it,
    a subtraction that is exact because the larger piece lies in ``[X/2, X]``.
    """
    if not (0.0 < alpha < 1.0):
        raise AlphaOutOfRangeError(f"alpha must lie strictly inside (0, 1), got {alpha}")
    X = np.asarray(X, dtype=float)
    if alpha >= 0.5:
        first = alpha * X
        return first, X - first
    second = (1.0 - alpha) * X
    return X - second, second


def build_shared_mpss(
    ds: SharedInputDataset,
    o: int,
    alpha: float,
    omega=None,
    structure_mode: str = "decoupled",
    alpha_mode: str = "uniform",
) -> List[LinearProgram]:
    """Programs for a two-subsystem shared-input network at split ``alpha``.

    ``alpha_mode="uniform"`` splits every DMU's inputs, as in the substituted
    model, so ``alpha`` cancels from each input row. ``"target-only"`` is an
    experimental reading that keeps the reference DMUs' full inputs and splits
    only the evaluated DMU's right-hand side.

    Returns one joint program, or one program per subsystem when decoupled.
    """
    if structure_mode not in STRUCTURE_MODES:
        raise ValueError(f"structure_mode must be one of {STRUCTURE_MODES}")
    if alpha_mode not in ALPHA_MODES:
        raise ValueError(f"alpha_mode must be one of {ALPHA_MODES}")
    if ds.h != 2:
        raise ValueError(f"input splitting needs exactly 2 subsystems, dataset has {ds.h}")
    parts = split_shared_inputs(ds.X, alpha)
    if alpha_mode == "uniform":
        blocks = [(parts[t], ds.Y[t], parts[t][o]) for t in range(2)]
    else:
        blocks = [(ds.X, ds.Y[t], parts[t][o]) for t in range(2)]
    if structure_mode == "joint":
        return [_joint(blocks, ds.X, ds.Y_system, o, omega)]
    return [
        _vrs_mpss(Xt, Yt, o, x_ref=x_ref, tag=f"sub{t + 1}", var_tag=f"{t + 1}")
        for t, (Xt, Yt, x_ref) in enumerate(blocks)
    ]
