"""Independent reference computations. Nothing here touches the simplex code."""

import itertools

import numpy as np


def vertex_enumeration(c, A, rel, b, lower, upper):
    """Best objective of ``max c@x`` over all basic feasible points.

    Every choice of ``n`` active constraints among the rows and finite bounds
    is solved as an equation system; feasible points are compared. Only
    meaningful for small, bounded programs.
    """
    c = np.asarray(c, float)
    n = c.size
    rows = [(np.asarray(a, float), float(bi)) for a, bi in zip(A, b)]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lower[j]):
            rows.append((e, float(lower[j])))
        if np.isfinite(upper[j]):
            rows.append((e, float(upper[j])))
    best, arg = -np.inf, None
    for combo in itertools.combinations(range(len(rows)), n):
        M = np.array([rows[i][0] for i in combo])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, np.array([rows[i][1] for i in combo]))
        if not _feasible(x, A, rel, b, lower, upper):
            continue
        val = float(c @ x)
        if val > best:
            best, arg = val, x
    return best, arg


def _feasible(x, A, rel, b, lower, upper, tol=1e-9):
    for a, r, bi in zip(A, rel, b):
        lhs = float(np.dot(a, x))
        scale = max(1.0, abs(bi), float(np.max(np.abs(a))))
        if r == "<=" and lhs > bi + tol * scale:
            return False
        if r == ">=" and lhs < bi - tol * scale:
            return False
        if r == "=" and abs(lhs - bi) > tol * scale:
            return False
    return bool(np.all(x >= np.asarray(lower) - tol) and np.all(x <= np.asarray(upper) + tol))


def single_factor_mpss(x, y, o):
    """MPSS score with one input and one output.

    The objective ``sum_j lam_j (y_j/y_o - x_j/x_o)`` is linear over the
    simplex of convex weights, so the optimum sits at a single DMU.
    """
    x = np.asarray(x, float).ravel()
    y = np.asarray(y, float).ravel()
    return float(np.max(y / y[o] - x / x[o]))


def single_factor_ccr(x, y, o):
    """Input-oriented CRS efficiency with one input and one output."""
    x = np.asarray(x, float).ravel()
    y = np.asarray(y, float).ravel()
    return float((y[o] / x[o]) / np.max(y / x))
