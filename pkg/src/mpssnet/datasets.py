"""In-memory datasets for parallel and shared-input networks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from mpssnet.errors import DatasetError, EpsilonNotUnitFractionError


@dataclass(frozen=True)
class Violation:
    """One validation problem. ``row``/``column`` are None when not cell-specific."""

    code: str
    reason: str
    row: Optional[str] = None
    column: Optional[str] = None

    def __str__(self):
        where = []
        if self.row is not None:
            where.append(f"row {self.row}")
        if self.column is not None:
            where.append(f"column {self.column!r}")
        loc = (" at " + ", ".join(where)) if where else ""
        return f"{self.code}{loc}: {self.reason}"


def _matrix(a, n: int) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(n, -1) if n else arr.reshape(0, 1)
    if arr.ndim != 2 or arr.shape[0] != n:
        raise DatasetError([Violation("SchemaMismatch", f"expected {n} rows, got shape {arr.shape}")])
    arr.setflags(write=False)
    return arr


def _col_labels(prefix: str, names, k: int) -> tuple:
    if names:
        return tuple(names)
    return tuple(f"{prefix}{i + 1}" for i in range(k))


def _check_block(ids, X, Y, x_names, y_names, tag) -> list:
    out = []
    if X is not None:
        for j, i in zip(*np.nonzero(~np.isfinite(X))):
            out.append(Violation("NonfiniteValue", "input is not finite", str(ids[j]), x_names[i]))
        for j, i in zip(*np.nonzero(np.isfinite(X) & (X <= 0))):
            out.append(Violation("NonpositiveInput", f"input {X[j, i]:g} must be > 0",
                                 str(ids[j]), x_names[i]))
    for j, r in zip(*np.nonzero(~np.isfinite(Y))):
        out.append(Violation("NonfiniteValue", "output is not finite", str(ids[j]), y_names[r]))
    for j, r in zip(*np.nonzero(np.isfinite(Y) & (Y < 0))):
        out.append(Violation("NegativeOutput", f"output {Y[j, r]:g} must be >= 0",
                             str(ids[j]), y_names[r]))
    for j in np.flatnonzero(~np.any(Y > 0, axis=1)) if Y.shape[1] else range(Y.shape[0]):
        out.append(Violation("ZeroOutputRow", f"no positive output in subsystem {tag}", str(ids[j])))
    return out


@dataclass(frozen=True, eq=False)
class ParallelDataset:
    """Classical parallel network: every subsystem has its own inputs and outputs.

    ``X[t]`` is ``n x m`` and ``Y[t]`` is ``n x s`` for subsystem ``t``; all
    subsystems share ``m`` and ``s`` so the system totals are elementwise sums.
    """

    X: tuple
    Y: tuple
    dmus: tuple = ()
    subsystems: tuple = ()
    input_names: tuple = ()
    output_names: tuple = ()

    def __post_init__(self):
        if len(self.X) != len(self.Y) or not self.X:
            raise DatasetError([Violation("SchemaMismatch", "need matching X and Y blocks for >= 1 subsystem")])
        n = np.asarray(self.X[0]).shape[0] if np.asarray(self.X[0]).ndim else 0
        n = len(self.dmus) if self.dmus else n
        X = tuple(_matrix(x, n) for x in self.X)
        Y = tuple(_matrix(y, n) for y in self.Y)
        if len({x.shape for x in X}) != 1 or len({y.shape for y in Y}) != 1:
            raise DatasetError([Violation(
                "SchemaMismatch", "all subsystems must have the same number of inputs and outputs")])
        h = len(X)
        dmus = tuple(self.dmus) or tuple(str(j + 1) for j in range(n))
        subs = tuple(self.subsystems) or tuple(str(t + 1) for t in range(h))
        if len(subs) != h or len(dmus) != n:
            raise DatasetError([Violation("SchemaMismatch", "identifier count does not match data")])
        xn = self.input_names or tuple(_col_labels(f"x{t + 1}:", (), X[0].shape[1]) for t in range(h))
        yn = self.output_names or tuple(_col_labels(f"y{t + 1}:", (), Y[0].shape[1]) for t in range(h))
        for attr, value in (("X", X), ("Y", Y), ("dmus", dmus), ("subsystems", subs),
                            ("input_names", tuple(map(tuple, xn))),
                            ("output_names", tuple(map(tuple, yn)))):
            object.__setattr__(self, attr, value)
        problems = []
        for t in range(h):
            problems += _check_block(dmus, X[t], Y[t], self.input_names[t], self.output_names[t], subs[t])
        if problems:
            raise DatasetError(problems)

    @property
    def n(self) -> int:
        return len(self.dmus)

    @property
    def h(self) -> int:
        return len(self.X)

    @property
    def X_total(self) -> np.ndarray:
        return np.sum(self.X, axis=0)

    @property
    def Y_total(self) -> np.ndarray:
        return np.sum(self.Y, axis=0)

    def __eq__(self, other):
        if not isinstance(other, ParallelDataset):
            return NotImplemented
        return (
            self.dmus == other.dmus and self.subsystems == other.subsystems
            and self.input_names == other.input_names and self.output_names == other.output_names
            and all(np.array_equal(a, b) for a, b in zip(self.X, other.X))
            and all(np.array_equal(a, b) for a, b in zip(self.Y, other.Y))
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SharedInputDataset:
    """Subsystems draw on one pooled input matrix ``X`` and report their own outputs.

    ``aggregation`` sets the system-level outputs: ``"concat"`` stacks the
    subsystem output columns, ``"sum"`` adds them (requires equal widths).
    """

    X: np.ndarray
    Y: tuple
    dmus: tuple = ()
    subsystems: tuple = ()
    aggregation: str = "concat"
    input_names: tuple = ()
    output_names: tuple = ()

    def __post_init__(self):
        n = len(self.dmus) if self.dmus else np.asarray(self.X).shape[0]
        X = _matrix(self.X, n)
        Y = tuple(_matrix(y, n) for y in self.Y)
        if not Y:
            raise DatasetError([Violation("SchemaMismatch", "need at least one subsystem")])
        if self.aggregation not in ("concat", "sum"):
            raise DatasetError([Violation("SchemaMismatch", f"unknown aggregation {self.aggregation!r}")])
        if self.aggregation == "sum" and len({y.shape[1] for y in Y}) != 1:
            raise DatasetError([Violation(
                "SchemaMismatch", "aggregation 'sum' needs the same number of outputs in every subsystem")])
        dmus = tuple(self.dmus) or tuple(str(j + 1) for j in range(n))
        subs = tuple(self.subsystems) or tuple(str(t + 1) for t in range(len(Y)))
        if len(subs) != len(Y) or len(dmus) != n:
            raise DatasetError([Violation("SchemaMismatch", "identifier count does not match data")])
        xn = tuple(self.input_names) or _col_labels("x", (), X.shape[1])
        yn = self.output_names or tuple(_col_labels(f"y{t + 1}:", (), y.shape[1]) for t, y in enumerate(Y))
        for attr, value in (("X", X), ("Y", Y), ("dmus", dmus), ("subsystems", subs),
                            ("input_names", xn), ("output_names", tuple(map(tuple, yn)))):
            object.__setattr__(self, attr, value)
        problems = _check_block(dmus, X, np.ones((n, 1)), xn, ("-",), "-")
        for t in range(len(Y)):
            problems += _check_block(dmus, None, Y[t], (), self.output_names[t], subs[t])
        if problems:
            raise DatasetError(problems)

    @property
    def n(self) -> int:
        return len(self.dmus)

    @property
    def h(self) -> int:
        return len(self.Y)

    @property
    def Y_system(self) -> np.ndarray:
        if self.aggregation == "sum":
            return np.sum(self.Y, axis=0)
        return np.hstack(self.Y)

    def __eq__(self, other):
        if not isinstance(other, SharedInputDataset):
            return NotImplemented
        return (
            self.dmus == other.dmus and self.subsystems == other.subsystems
            and self.aggregation == other.aggregation
            and self.input_names == other.input_names and self.output_names == other.output_names
            and np.array_equal(self.X, other.X)
            and all(np.array_equal(a, b) for a, b in zip(self.Y, other.Y))
        )

    __hash__ = None


def omega_weights(h: int, values: Optional[Sequence[float]] = None) -> np.ndarray:
    """Validated subsystem preference weights; all ones by default."""
    w = np.ones(h) if values is None else np.array(values, dtype=float)
    if w.shape != (h,):
        raise ValueError(f"expected {h} omega weights, got {w.size}")
    if not np.all(np.isfinite(w) & (w > 0)):
        raise ValueError("omega weights must be positive and finite")
    return w


@dataclass(frozen=True)
class AlphaGrid:
    epsilon: float
    alphas: tuple

    @property
    def k_max(self) -> int:
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def __len__(self):
        return len(self.alphas)


def alpha_grid(epsilon: float) -> AlphaGrid:
    """Split fractions ``k * epsilon`` for ``k = 1 .. 1/epsilon - 1``."""
    if not (0 < epsilon <= 0.5) or not math.isfinite(epsilon):
        raise EpsilonNotUnitFractionError(f"epsilon must lie in (0, 0.5], got {epsilon}")
    inv = 1.0 / epsilon
    steps = round(inv)
    if abs(inv - steps) > 1e-9:
        raise EpsilonNotUnitFractionError(f"1/epsilon = {inv} is not an integer")
    # k / steps instead of k * epsilon keeps 0.3 == 0.3 rather than 0.30000000000000004
    return AlphaGrid(epsilon, tuple(k / steps for k in range(1, steps)))
