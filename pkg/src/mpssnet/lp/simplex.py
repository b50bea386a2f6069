"""Dense two-phase primal simplex on a full tableau.

The program is brought to standard form ``min d @ z, T z = r, z >= 0, r >= 0``:

* variables are shifted to their lower bound, mirrored when only an upper
  bound is finite, and split into a positive and a negative part when free;
* finite upper bounds on shifted variables become ``<=`` rows;
* every row is divided by its largest coefficient magnitude and negated if
  its right-hand side is negative;
* ``<=`` rows get a slack, ``>=`` rows a surplus and an artificial, ``=`` rows
  an artificial.

Each row therefore owns exactly one column of the starting identity basis.
Artificial columns stay in the tableau during phase 2 (they may never enter),
so the reduced costs of those identity columns are the row duals.
"""

from __future__ import annotations

import numpy as np

from mpssnet.errors import IterationLimitError
from mpssnet.lp.program import LinearProgram, LpSolution, Relation, Status, Tolerances

# variable transform kinds
_SHIFT, _MIRROR, _SPLIT = 0, 1, 2


class _StandardForm:
    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        lo, hi = lp.lower, lp.upper
        cols = []  # (kind, first column index)
        k = 0
        for j in range(n):
            if np.isfinite(lo[j]):
                cols.append((_SHIFT, k))
                k += 1
            elif np.isfinite(hi[j]):
                cols.append((_MIRROR, k))
                k += 1
            else:
                cols.append((_SPLIT, k))
                k += 2
        self.kinds = cols
        n_struct = k

        # original rows followed by upper-bound rows for shifted variables
        bound_vars = [j for j in range(n) if cols[j][0] == _SHIFT and np.isfinite(hi[j])]
        m_orig = lp.n_rows
        m = m_orig + len(bound_vars)
        A = np.zeros((m, n_struct))
        b = np.zeros(m)
        rel = list(lp.relations) + [Relation.LE] * len(bound_vars)
        c = np.zeros(n_struct)
        const = 0.0
        for j, (kind, col) in enumerate(cols):
            a = lp.A[:, j]
            if kind == _SHIFT:
                A[:m_orig, col] = a
                b[:m_orig] -= a * lo[j]
                c[col] = lp.objective[j]
                const += lp.objective[j] * lo[j]
            elif kind == _MIRROR:
                A[:m_orig, col] = -a
                b[:m_orig] -= a * hi[j]
                c[col] = -lp.objective[j]
                const += lp.objective[j] * hi[j]
            else:
                A[:m_orig, col] = a
                A[:m_orig, col + 1] = -a
                c[col] = lp.objective[j]
                c[col + 1] = -lp.objective[j]
        b[:m_orig] += lp.rhs
        for r, j in enumerate(bound_vars):
            A[m_orig + r, cols[j][1]] = 1.0
            b[m_orig + r] = hi[j] - lo[j]

        scale = np.abs(A).max(axis=1) if n_struct else np.zeros(m)
        scale[scale == 0] = 1.0
        A /= scale[:, None]
        b /= scale
        sign = np.where(b < 0, -1.0, 1.0)
        A *= sign[:, None]
        b *= sign
        flip = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}
        rel = [flip[r] if s < 0 else r for r, s in zip(rel, sign)]

        n_slack = sum(r is not Relation.EQ for r in rel)
        n_art = sum(r is not Relation.LE for r in rel)
        width = n_struct + n_slack + n_art
        T = np.zeros((m, width + 1))
        T[:, :n_struct] = A
        T[:, -1] = b
        basis = np.empty(m, dtype=int)
        ident = np.empty(m, dtype=int)  # column holding e_i at the start
        s_col = n_struct
        a_col = n_struct + n_slack
        for i, r in enumerate(rel):
            if r is Relation.LE:
                T[i, s_col] = 1.0
                basis[i] = ident[i] = s_col
                s_col += 1
            elif r is Relation.GE:
                T[i, s_col] = -1.0
                T[i, a_col] = 1.0
                basis[i] = ident[i] = a_col
                s_col += 1
                a_col += 1
            else:
                T[i, a_col] = 1.0
                basis[i] = ident[i] = a_col
                a_col += 1

        self.lp = lp
        self.m_orig = m_orig
        self.n_struct = n_struct
        self.art_start = n_struct + n_slack
        self.width = width
        self.T = T
        self.basis = basis
        self.ident = ident
        self.row_factor = sign / scale  # original dual = scaled dual * factor
        self.cost = np.zeros(width)
        self.cost[:n_struct] = -c  # internal problem minimises
        self.const = const

    def recover_x(self, z: np.ndarray) -> np.ndarray:
        lp = self.lp
        x = np.empty(lp.n_vars)
        for j, (kind, col) in enumerate(self.kinds):
            if kind == _SHIFT:
                x[j] = lp.lower[j] + z[col]
            elif kind == _MIRROR:
                x[j] = lp.upper[j] - z[col]
            else:
                x[j] = z[col] - z[col + 1]
        return x


class _Tableau:
    """Owns the working tableau and the pivoting rules."""

    def __init__(self, sf: _StandardForm, tol: Tolerances):
        self.sf = sf
        self.T = sf.T
        self.basis = sf.basis
        self.tol = tol
        self.iterations = 0

    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        T = self.T
        return cost - cost[self.basis] @ T[:, :-1]

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        colv = T[:, col].copy()
        colv[row] = 0.0
        T -= np.outer(colv, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col

    def ratio_row(self, col: int) -> int:
        """Leaving row by minimum ratio; ties go to the lowest basic variable index."""
        T = self.T
        a = T[:, col]
        rows = np.flatnonzero(a > self.tol.pivot)
        if rows.size == 0:
            return -1
        ratios = np.maximum(T[rows, -1], 0.0) / a[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * (1.0 + best)]
        return int(tied[np.argmin(self.basis[tied])])

    def run(self, cost: np.ndarray, allowed: np.ndarray) -> str:
        """Minimise ``cost`` over the current basis. Returns 'optimal' or 'unbounded'."""
        tol = self.tol
        degenerate_run = 0
        while True:
            d = self.reduced_costs(cost)
            d[~allowed] = 0.0
            candidates = np.flatnonzero(d < -tol.pivot)
            if candidates.size == 0:
                return "optimal"
            if self.iterations >= tol.max_iter:
                raise IterationLimitError(
                    f"simplex stopped after {self.iterations} iterations"
                )
            if degenerate_run >= tol.degenerate_switch:
                col = int(candidates[0])  # Bland
            else:
                # Dantzig; near-equal prices resolve to the lowest index
                best = d[candidates].min()
                col = int(candidates[d[candidates] <= best + 1e-12 * (1.0 - best)][0])
            row = self.ratio_row(col)
            if row < 0:
                return "unbounded"
            degenerate_run = degenerate_run + 1 if self.T[row, -1] <= tol.pivot else 0
            self.pivot(row, col)
            self.iterations += 1

    def drive_out_artificials(self) -> None:
        """Pivot zero-level artificials out of the basis where a real column allows it.

        Rows where no real column has a usable entry are redundant; they keep
        their artificial basic at zero, and later pivots leave them untouched.
        """
        sf = self.sf
        for i in range(self.T.shape[0]):
            if self.basis[i] >= sf.art_start:
                row = self.T[i, : sf.art_start]
                cand = np.flatnonzero(np.abs(row) > self.tol.pivot)
                if cand.size:
                    self.pivot(i, int(cand[np.argmax(np.abs(row[cand]))]))


def solve(lp: LinearProgram, tol: Tolerances | None = None) -> LpSolution:
    """Solve ``lp`` with the two-phase primal simplex method.

    Raises
    ------
    IterationLimitError
        If ``tol.max_iter`` pivots are exhausted.
    """
    tol = tol or Tolerances()
    sf = _StandardForm(lp)
    tab = _Tableau(sf, tol)
    allowed = np.ones(sf.width, dtype=bool)

    if sf.art_start < sf.width:
        phase1 = np.zeros(sf.width)
        phase1[sf.art_start:] = 1.0
        tab.run(phase1, allowed)
        infeas = float(tab.T[:, -1] @ phase1[tab.basis])
        if infeas > tol.feas:
            return LpSolution(Status.INFEASIBLE, iterations=tab.iterations)
        tab.drive_out_artificials()
        allowed[sf.art_start:] = False

    verdict = tab.run(sf.cost, allowed)
    if verdict == "unbounded":
        return LpSolution(Status.UNBOUNDED, iterations=tab.iterations)

    z = np.zeros(sf.width)
    z[tab.basis] = np.maximum(tab.T[:, -1], 0.0)
    x = sf.recover_x(z[: sf.n_struct])

    d = tab.reduced_costs(sf.cost)
    scaled_duals = d[sf.ident]  # duals of the maximisation, scaled rows
    duals = (scaled_duals * sf.row_factor)[: sf.m_orig]
    duals = duals + 0.0  # normalise -0.0
    x = x + 0.0
    objective = float(lp.objective @ x)
    x.setflags(write=False)
    duals.setflags(write=False)
    return LpSolution(Status.OPTIMAL, x, duals, objective, tab.iterations)
