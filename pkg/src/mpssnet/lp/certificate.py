"""Independent optimality audit for a reported LP solution.

Everything here is recomputed from the program data and the reported
primal/dual vectors; nothing is taken from the solver's tableau.

For ``max c@x, A x rel b, l <= x <= u`` and row multipliers ``y`` the
Lagrangian bound is ``b@y + sum_j sup_{l_j <= x_j <= u_j} d_j x_j`` with
``d = c - A.T @ y``. It is a valid upper bound when ``y_i >= 0`` on ``<=``
rows, ``y_i <= 0`` on ``>=`` rows and every ``d_j`` points towards a finite
bound. The duality gap is the distance between that bound and ``c@x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mpssnet.errors import ShapeMismatchError
from mpssnet.lp.program import LinearProgram, LpSolution, Relation, Tolerances


@dataclass(frozen=True)
class CertificateReport:
    primal_violation: float
    dual_violation: float
    gap: float
    passed: bool

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{verdict}: primal {self.primal_violation:.3e}, "
            f"dual {self.dual_violation:.3e}, gap {self.gap:.3e}"
        )


def _row_scale(lp: LinearProgram) -> np.ndarray:
    # residuals are measured on rows normalised by their largest magnitude,
    # the same normalisation the solver applies
    scale = np.max(np.abs(np.column_stack([lp.A, lp.rhs])), axis=1) if lp.n_rows else np.ones(0)
    scale[scale == 0] = 1.0
    return scale


def check_certificate(
    lp: LinearProgram, sol: LpSolution, tol: Tolerances | None = None
) -> CertificateReport:
    """Audit primal feasibility, dual feasibility and the duality gap of ``sol``."""
    tol = tol or Tolerances()
    if sol.x is None or sol.duals is None:
        raise ShapeMismatchError("solution carries no primal/dual values")
    x = np.asarray(sol.x, dtype=float)
    y = np.asarray(sol.duals, dtype=float)
    if x.shape != (lp.n_vars,) or y.shape != (lp.n_rows,):
        raise ShapeMismatchError(
            f"solution shapes x{x.shape}, y{y.shape} do not match "
            f"program ({lp.n_vars} vars, {lp.n_rows} rows)"
        )

    scale = _row_scale(lp)
    resid = (lp.A @ x - lp.rhs) / scale
    le = np.array([r is Relation.LE for r in lp.relations], dtype=bool)
    ge = np.array([r is Relation.GE for r in lp.relations], dtype=bool)
    eq = ~(le | ge)
    viol = np.zeros(lp.n_rows)
    viol[le] = np.maximum(resid[le], 0.0)
    viol[ge] = np.maximum(-resid[ge], 0.0)
    viol[eq] = np.abs(resid[eq])
    bound_viol = np.concatenate([
        np.maximum(lp.lower - x, 0.0)[np.isfinite(lp.lower)],
        np.maximum(x - lp.upper, 0.0)[np.isfinite(lp.upper)],
    ])
    primal = float(max(viol.max(initial=0.0), bound_viol.max(initial=0.0)))

    # sign conditions on row multipliers, in normalised-row units
    ys = y * scale
    sign_viol = np.zeros(lp.n_rows)
    sign_viol[le] = np.maximum(-ys[le], 0.0)
    sign_viol[ge] = np.maximum(ys[ge], 0.0)
    d = lp.objective - lp.A.T @ y
    pos, neg = d > 0, d < 0
    unbacked = np.concatenate([d[pos & ~np.isfinite(lp.upper)], -d[neg & ~np.isfinite(lp.lower)]])
    dual = float(max(sign_viol.max(initial=0.0), unbacked.max(initial=0.0)))

    bound = float(lp.rhs @ y)
    bound += float(d[pos & np.isfinite(lp.upper)] @ lp.upper[pos & np.isfinite(lp.upper)])
    bound += float(d[neg & np.isfinite(lp.lower)] @ lp.lower[neg & np.isfinite(lp.lower)])
    gap = abs(bound - float(lp.objective @ x))

    passed = primal <= tol.feas and dual <= tol.feas and gap <= tol.gap
    return CertificateReport(primal, dual, gap, passed)
