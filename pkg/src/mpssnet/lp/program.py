"""Immutable containers for a linear program and its solution."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from mpssnet.errors import InvalidProgramError


class Relation(str, enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs for :func:`mpssnet.lp.solve` and certificate checks."""

    feas: float = 1e-7
    pivot: float = 1e-9
    gap: float = 1e-7
    max_iter: int = 100_000
    degenerate_switch: int = 1000

    def __post_init__(self):
        for name in ("feas", "pivot", "gap"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"tolerance {name} must be positive, got {value}")
        if self.max_iter < 1 or self.degenerate_switch < 1:
            raise ValueError("iteration caps must be >= 1")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LinearProgram:
    """``maximize c @ x`` subject to ``A[i] @ x  rel[i]  b[i]`` and ``lower <= x <= upper``.

    Only maximisation is modelled; minimise ``f`` by maximising ``-f``.
    Arrays are copied and made read-only on construction.
    """

    objective: np.ndarray
    A: np.ndarray
    relations: tuple
    rhs: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    names: tuple = ()
    row_names: tuple = ()

    def __post_init__(self):
        c = _frozen(self.objective).reshape(-1)
        n = c.size
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2 or A.shape[1] != n:
            raise InvalidProgramError(
                f"constraint matrix has shape {A.shape}, expected (*, {n})"
            )
        A.setflags(write=False)
        b = _frozen(self.rhs).reshape(-1)
        rel = tuple(Relation(r) for r in self.relations)
        if len(rel) != A.shape[0] or b.size != A.shape[0]:
            raise InvalidProgramError("relations/rhs length differs from the row count")
        lo = np.zeros(n) if self.lower is None else np.array(self.lower, dtype=float)
        hi = np.full(n, np.inf) if self.upper is None else np.array(self.upper, dtype=float)
        if lo.shape != (n,) or hi.shape != (n,):
            raise InvalidProgramError("bounds must have one entry per variable")
        lo.setflags(write=False)
        hi.setflags(write=False)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidProgramError("coefficients and right-hand sides must be finite")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise InvalidProgramError("invalid variable bounds")
        if np.any(lo > hi):
            raise InvalidProgramError("lower bound exceeds upper bound")
        names = tuple(self.names) or tuple(f"x{j}" for j in range(n))
        if len(names) != n:
            raise InvalidProgramError("one name per variable is required")
        row_names = tuple(self.row_names) or tuple(f"r{i}" for i in range(A.shape[0]))
        if len(row_names) != A.shape[0]:
            raise InvalidProgramError("one row name per constraint is required")
        for attr, value in (
            ("objective", c), ("A", A), ("relations", rel), ("rhs", b),
            ("lower", lo), ("upper", hi), ("names", names), ("row_names", row_names),
        ):
            object.__setattr__(self, attr, value)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def __eq__(self, other):
        if not isinstance(other, LinearProgram):
            return NotImplemented
        return (
            np.array_equal(self.objective, other.objective)
            and np.array_equal(self.A, other.A)
            and self.relations == other.relations
            and np.array_equal(self.rhs, other.rhs)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    __hash__ = None


@dataclass(frozen=True)
class LpSolution:
    """Solver verdict. ``x`` and ``duals`` are ``None`` unless optimal."""

    status: Status
    x: Optional[np.ndarray] = None
    duals: Optional[np.ndarray] = None
    objective: float = math.nan
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def value(self, lp: LinearProgram, name: str) -> float:
        return float(self.x[lp.index(name)])


def _fmt(v: float) -> str:
    if v == np.inf:
        return "inf"
    if v == -np.inf:
        return "-inf"
    return f"{v:.17e}"


def dump_lp(lp: LinearProgram, path) -> None:
    """Write ``lp`` as fixed-point text for cross-checking with other tools.

    Layout::

        # mpssnet-lp v1
        vars <n> rows <m>
        names <name_1> ... <name_n>
        max <c_1> ... <c_n>
        lower <l_1> ... <l_n>
        upper <u_1> ... <u_n>
        <a_i1> ... <a_in> <= | >= | = <b_i>     (one line per constraint)

    Numbers use 17 significant digits so a reader recovers the exact doubles.
    """
    lines = [
        "# mpssnet-lp v1",
        f"vars {lp.n_vars} rows {lp.n_rows}",
        "names " + " ".join(lp.names),
        "max " + " ".join(_fmt(v) for v in lp.objective),
        "lower " + " ".join(_fmt(v) for v in lp.lower),
        "upper " + " ".join(_fmt(v) for v in lp.upper),
    ]
    for row, rel, b in zip(lp.A, lp.relations, lp.rhs):
        lines.append(" ".join(_fmt(v) for v in row) + f" {rel.value} " + _fmt(b))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_lp(path) -> LinearProgram:
    """Read a file written by :func:`dump_lp`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    head = lines[0].split()
    n, m = int(head[1]), int(head[3])
    names = lines[1].split()[1:]
    c = [float(v) for v in lines[2].split()[1:]]
    lo = [float(v) for v in lines[3].split()[1:]]
    hi = [float(v) for v in lines[4].split()[1:]]
    A, rel, b = [], [], []
    for ln in lines[5:5 + m]:
        tok = ln.split()
        A.append([float(v) for v in tok[:n]])
        rel.append(Relation(tok[n]))
        b.append(float(tok[n + 1]))
    return LinearProgram(c, np.array(A).reshape(m, n), rel, b, lo, hi, names)


def make_lp(
    objective: Sequence[float],
    constraints: Sequence[tuple] = (),
    lower=None,
    upper=None,
    names=(),
) -> LinearProgram:
    """Build a program from ``(coefficients, relation, rhs)`` triples."""
    n = len(objective)
    A = np.array([c[0] for c in constraints], dtype=float).reshape(len(constraints), n)
    return LinearProgram(
        objective,
        A,
        tuple(c[1] for c in constraints),
        [c[2] for c in constraints],
        lower,
        upper,
        names,
    )


__all__ = [
    "LinearProgram", "LpSolution", "Relation", "Status", "Tolerances",
    "dump_lp", "load_lp", "make_lp",
]
