"""Dataset files, descriptive statistics and result tables.

A dataset is a comma-separated file with a header row plus a sidecar config
of ``key = value`` lines (``#`` starts a comment)::

    structure = parallel          # or: shared
    id = DMU                      # identifier column
    subsystems = I, II            # display names, in subsystem order
    x1 = X1                       # inputs of subsystem 1 (comma list)
    y1 = Y1                       # outputs of subsystem 1
    x2 = X2
    y2 = Y2
    x = X                         # optional system totals, parallel only
    y = Y
    shared = Population, GDP      # shared inputs, shared only
    aggregation = concat          # system outputs of a shared dataset: concat | sum

Run settings (``mode``, ``alpha_mode``, ``epsilon``, ``omega``,
``tolerance_class``) may also appear; the CLI uses them as defaults.
Every CSV column must be claimed by exactly one role.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from mpssnet.datasets import ParallelDataset, SharedInputDataset, Violation
from mpssnet.engine import MpssResult, SweepResult, summarize, summarize_scores
from mpssnet.errors import DatasetError

Dataset = Union[ParallelDataset, SharedInputDataset]

_ROLE = re.compile(r"^([xy])(\d+)$")
RUN_KEYS = ("mode", "alpha_mode", "epsilon", "omega", "tolerance_class")


def _split_list(value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def read_config(path) -> Dict[str, str]:
    """Parse a ``key = value`` sidecar file. Later keys override earlier ones."""
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DatasetError([Violation("SchemaMismatch", f"config line {lineno} has no '='")])
            key, value = line.split("=", 1)
            cfg[key.strip().lower()] = value.strip()
    return cfg


def default_config_path(dataset_path) -> Path:
    return Path(dataset_path).with_suffix(".cfg")


def _parse_roles(cfg: Dict[str, str]):
    structure = cfg.get("structure", "parallel").lower()
    if structure not in ("parallel", "shared"):
        raise DatasetError([Violation("SchemaMismatch", f"unknown structure {structure!r}")])
    if "id" not in cfg:
        raise DatasetError([Violation("SchemaMismatch", "config lacks the 'id' column key")])
    xs, ys = {}, {}
    for key, value in cfg.items():
        m = _ROLE.match(key)
        if m:
            (xs if m.group(1) == "x" else ys)[int(m.group(2))] = _split_list(value)
    h = max(list(ys) + list(xs), default=0)
    problems = []
    for t in range(1, h + 1):
        if t not in ys:
            problems.append(Violation("SchemaMismatch", f"no outputs declared for subsystem {t} (key y{t})"))
        if structure == "parallel" and t not in xs:
            problems.append(Violation("SchemaMismatch", f"no inputs declared for subsystem {t} (key x{t})"))
    if structure == "shared":
        if xs:
            problems.append(Violation("SchemaMismatch", "shared datasets take inputs from 'shared', not x<t>"))
        if not _split_list(cfg.get("shared", "")):
            problems.append(Violation("SchemaMismatch", "config lacks the 'shared' input columns"))
    if h == 0:
        problems.append(Violation("SchemaMismatch", "no subsystems declared"))
    names = _split_list(cfg.get("subsystems", "")) or [str(t) for t in range(1, h + 1)]
    if len(names) != h:
        problems.append(Violation("SchemaMismatch", f"{len(names)} subsystem names for {h} subsystems"))
    if problems:
        raise DatasetError(problems)
    return structure, h, xs, ys, names


def _cell(value: str, row_id: str, col: str, problems: list) -> float:
    try:
        v = float(value)
    except ValueError:
        problems.append(Violation("NotNumeric", f"cannot parse {value!r}", row_id, col))
        return math.nan
    if not math.isfinite(v):
        problems.append(Violation("NonfiniteValue", f"{value!r} is not finite", row_id, col))
    return v


def load_dataset(path, config=None) -> Dataset:
    """Read and validate a dataset.

    ``config`` is a path to the sidecar file or an already parsed mapping;
    by default ``<dataset>.cfg`` is used. All problems found are reported
    together in one :class:`~mpssnet.errors.DatasetError`.
    """
    if config is None:
        config = default_config_path(path)
    cfg = config if isinstance(config, dict) else read_config(config)
    structure, h, xs, ys, names = _parse_roles(cfg)

    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise DatasetError([Violation("SchemaMismatch", "file has no header row")])
    header = [c.strip() for c in rows[0]]
    body = rows[1:]
    problems = []
    for j, r in enumerate(body):
        if len(r) != len(header):
            problems.append(Violation("SchemaMismatch", f"{len(r)} cells for {len(header)} columns", str(j + 1)))
    if problems:
        raise DatasetError(problems)

    claimed = [cfg["id"]]
    for t in range(1, h + 1):
        claimed += xs.get(t, []) + ys.get(t, [])
    shared_cols = _split_list(cfg.get("shared", "")) if structure == "shared" else []
    total_x = _split_list(cfg.get("x", "")) if structure == "parallel" else []
    total_y = _split_list(cfg.get("y", "")) if structure == "parallel" else []
    claimed += shared_cols + total_x + total_y
    for col in claimed:
        if col not in header:
            problems.append(Violation("SchemaMismatch", "declared column missing from the file", column=col))
    seen = set()
    for col in claimed:
        if col in seen:
            problems.append(Violation("SchemaMismatch", "column claimed by more than one role", column=col))
        seen.add(col)
    for col in header:
        if col not in seen:
            problems.append(Violation("SchemaMismatch", "column has no role in the config", column=col))
    if problems:
        raise DatasetError(problems)

    pos = {c: i for i, c in enumerate(header)}
    ids = [r[pos[cfg["id"]]].strip() for r in body]

    def block(cols):
        out = np.empty((len(body), len(cols)))
        for j, r in enumerate(body):
            for k, c in enumerate(cols):
                out[j, k] = _cell(r[pos[c]].strip(), ids[j], c, problems)
        return out

    X = [block(xs.get(t, [])) for t in range(1, h + 1)]
    Y = [block(ys[t]) for t in range(1, h + 1)]
    shared = block(shared_cols)
    tx, ty = block(total_x), block(total_y)
    if problems:
        raise DatasetError(problems)

    x_names = tuple(tuple(xs.get(t, [])) for t in range(1, h + 1))
    y_names = tuple(tuple(ys[t]) for t in range(1, h + 1))
    if structure == "shared":
        return SharedInputDataset(
            shared, tuple(Y), tuple(ids), tuple(names),
            aggregation=cfg.get("aggregation", "concat").lower(),
            input_names=tuple(shared_cols), output_names=y_names,
        )
    ds = ParallelDataset(tuple(X), tuple(Y), tuple(ids), tuple(names), x_names, y_names)
    for total, parts, cols in ((tx, ds.X_total, total_x), (ty, ds.Y_total, total_y)):
        if not cols:
            continue
        if total.shape != parts.shape:
            raise DatasetError([Violation("SchemaMismatch", "system total columns do not match subsystem width")])
        bad = np.abs(total - parts) > 1e-9 * np.maximum(np.abs(total), 1e-300)
        for j, k in zip(*np.nonzero(bad)):
            problems.append(Violation("AggregateMismatch",
                                      f"total {total[j, k]!r} differs from subsystem sum {parts[j, k]!r}",
                                      ids[j], cols[k]))
    if problems:
        raise DatasetError(problems)
    return ds


def _columns(ds: Dataset) -> List[tuple]:
    """(column name, values) in file order."""
    cols = []
    if isinstance(ds, SharedInputDataset):
        cols += [(name, ds.X[:, i]) for i, name in enumerate(ds.input_names)]
    else:
        for t in range(ds.h):
            cols += [(name, ds.X[t][:, i]) for i, name in enumerate(ds.input_names[t])]
    for t in range(ds.h):
        cols += [(name, ds.Y[t][:, r]) for r, name in enumerate(ds.output_names[t])]
    return cols


def write_dataset(ds: Dataset, path, config_path=None) -> Path:
    """Write ``ds`` as CSV plus sidecar config; returns the config path.

    Values are written with ``repr`` so reading them back is lossless.
    """
    config_path = Path(config_path) if config_path else default_config_path(path)
    cols = _columns(ds)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["DMU"] + [c for c, _ in cols])
        for j, dmu in enumerate(ds.dmus):
            w.writerow([dmu] + [repr(float(v[j])) for _, v in cols])
    lines = ["id = DMU", "subsystems = " + ", ".join(ds.subsystems)]
    if isinstance(ds, SharedInputDataset):
        lines.insert(0, "structure = shared")
        lines.append("shared = " + ", ".join(ds.input_names))
        lines.append(f"aggregation = {ds.aggregation}")
    else:
        lines.insert(0, "structure = parallel")
        for t in range(ds.h):
            lines.append(f"x{t + 1} = " + ", ".join(ds.input_names[t]))
    for t in range(ds.h):
        lines.append(f"y{t + 1} = " + ", ".join(ds.output_names[t]))
    config_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return config_path


@dataclass(frozen=True)
class ColumnStats:
    min: float
    max: float
    mean: float
    sd: Optional[float]  # sample SD (n - 1); None when n == 1


def describe(ds: Dataset) -> Dict[str, ColumnStats]:
    """Min, max, mean and sample standard deviation of every data column."""
    if ds.n == 0:
        raise ValueError("cannot describe an empty dataset")
    out = {}
    for name, v in _columns(ds):
        sd = float(np.std(v, ddof=1)) if v.size > 1 else None
        out[name] = ColumnStats(float(v.min()), float(v.max()), float(v.mean()), sd)
    return out


def write_stats(stats: Dict[str, ColumnStats], path, fmt: str = "csv") -> None:
    """Descriptive statistics laid out with one column per variable."""
    _write_text(path, render_stats(stats, fmt))


def format_score(value: Optional[float]) -> str:
    """Four decimals, round-half-even applied to the shortest decimal repr of ``value``."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "n/a"
    d = Decimal(repr(float(value))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_EVEN)
    if d == 0:
        d = abs(d)
    return f"{d:.4f}"


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json_num(v):
    if v is None:
        return None
    v = float(v)
    return None if math.isnan(v) else v


def _footer(w, summaries) -> None:
    w.writerow(["No."] + [str(s.count) if s.available else "n/a" for s in summaries])
    w.writerow(["Mean"] + [format_score(s.mean) for s in summaries])
    w.writerow(["Min"] + [format_score(s.min) for s in summaries])
    w.writerow(["Max"] + [format_score(s.max) for s in summaries])


def _results_csv(results: Sequence[MpssResult], subsystems: Sequence[str]) -> str:
    buf = io.StringIO()
    mode = results[0].mode if results else ""
    buf.write(f"# MPSS scores; mode={mode}; 4 decimals, round-half-even\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["DMU"] + [f"MPSS^{s}" for s in subsystems] + ["MPSS^S", "overall MPSS", "status"])
    for r in results:
        if r.scores is None:
            w.writerow([r.dmu] + [""] * len(subsystems) + ["", "", r.status])
        else:
            w.writerow([r.dmu] + [format_score(s) for s in r.scores]
                       + [format_score(r.score), "yes" if r.overall_mpss else "no", r.status])
    return buf.getvalue()


def _result_json(r: MpssResult) -> dict:
    return {
        "dmu": r.dmu,
        "status": r.status,
        "statuses": list(r.statuses),
        "alpha": r.alpha,
        "theta_sub": None if r.theta_sub is None else list(r.theta_sub),
        "phi_sub": None if r.phi_sub is None else list(r.phi_sub),
        "scores": None if r.scores is None else list(r.scores),
        "theta": r.theta,
        "phi": r.phi,
        "score": r.score,
        "overall_mpss": r.overall_mpss,
        "subsystem_mpss": None if r.subsystem_mpss is None else list(r.subsystem_mpss),
        "certified": list(r.certified),
        "warnings": list(r.warnings),
        "error": r.error,
    }


def _summary_json(s) -> dict:
    return {"count": s.count if s.available else None,
            "mean": _json_num(s.mean), "min": _json_num(s.min), "max": _json_num(s.max)}


def sweep_table_csv(sweep: SweepResult, name: str = "overall") -> str:
    """One sweep grid: rows = DMUs, columns = partitions, plus the No./Mean/Min/Max footer."""
    buf = io.StringIO()
    buf.write(f"# {name} MPSS scores; mode={sweep.mode}; alpha_mode={sweep.alpha_mode}; "
              f"epsilon={sweep.epsilon:g}; tau={sweep.tau:g}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["DMU"] + [f"k={k + 1} (alpha={a:g})" for k, a in enumerate(sweep.alphas)])
    for dmu, row, cells in zip(sweep.dmus, sweep.table(name), zip(*sweep.cells)):
        w.writerow([dmu] + [format_score(v) if v is not None else c.status for v, c in zip(row, cells)])
    _footer(w, sweep.summary(name))
    return buf.getvalue()


def render_results(
    data: Union[Sequence[MpssResult], SweepResult],
    fmt: str = "csv",
    *,
    table: str = "overall",
    subsystems: Sequence[str] = (),
) -> str:
    """Text of :func:`write_results`."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(data, SweepResult):
        if fmt == "csv":
            return sweep_table_csv(data, table)
        doc = {
            "kind": "sweep",
            "mode": data.mode,
            "alpha_mode": data.alpha_mode,
            "epsilon": data.epsilon,
            "tau": data.tau,
            "alphas": list(data.alphas),
            "dmus": list(data.dmus),
            "tables": {
                name: {
                    "rows": [{"dmu": d, "scores": [_json_num(v) for v in row]}
                             for d, row in zip(data.dmus, data.table(name))],
                    "summary": [_summary_json(s) for s in data.summary(name)],
                }
                for name in data.table_names
            },
            "status": [[c.status for c in col] for col in data.cells],
        }
    else:
        results = list(data)
        subs = list(results[0].subsystems) if results else list(subsystems)
        if fmt == "csv":
            return _results_csv(results, subs)
        summ = summarize(results)
        doc = {
            "kind": "evaluate",
            "mode": results[0].mode if results else None,
            "subsystems": subs,
            "results": [_result_json(r) for r in results],
            "summary": {("overall" if k == "overall" else subs[k]): _summary_json(v)
                        for k, v in summ.items()},
        }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_results(
    data: Union[Sequence[MpssResult], SweepResult],
    path,
    fmt: str = "csv",
    *,
    table: str = "overall",
    subsystems: Sequence[str] = (),
) -> None:
    """Serialise evaluation results or one sweep table.

    CSV prints scores with 4 decimals; JSON keeps full precision and, for a
    sweep, carries every table and its footer. Output is byte-identical for
    equal inputs.
    """
    _write_text(path, render_results(data, fmt, table=table, subsystems=subsystems))


def render_stats(stats: Dict[str, ColumnStats], fmt: str = "csv") -> str:
    if fmt == "json":
        doc = {k: {"min": v.min, "max": v.max, "mean": v.mean, "sd": v.sd} for k, v in stats.items()}
        return json.dumps(doc, indent=2) + "\n"
    names = list(stats)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    buf.write("# descriptive statistics; S.D. is the sample standard deviation (n-1)\n")
    w.writerow(["stat"] + names)
    for label, attr in (("Min", "min"), ("Max", "max"), ("Mean", "mean"), ("S.D.", "sd")):
        vals = [getattr(stats[c], attr) for c in names]
        w.writerow([label] + ["n/a" if v is None else repr(v) for v in vals])
    return buf.getvalue()


def write_sweep_tables(sweep: SweepResult, out, fmt: str = "csv") -> List[Path]:
    """Write the overall table and one table per subsystem next to ``out``.

    ``results.csv`` becomes ``results_overall.csv``, ``results_<subsystem>.csv``;
    JSON output is a single file holding all tables.
    """
    out = Path(out)
    if fmt == "json":
        write_results(sweep, out, "json")
        return [out]
    paths = []
    for name in sweep.table_names:
        slug = re.sub(r"[^A-Za-z0-9_.-]+", "_", name)
        p = out.with_name(f"{out.stem}_{slug}{out.suffix or '.csv'}")
        write_results(sweep, p, "csv", table=name)
        paths.append(p)
    return paths


def read_table_csv(path) -> List[List[str]]:
    """Rows of a CSV written by this module, comment lines dropped."""
    with open(path, newline="", encoding="utf-8") as fh:
        return [r for r in csv.reader(fh) if r and not r[0].startswith("#")]


__all__ = [
    "ColumnStats", "default_config_path", "describe", "format_score", "load_dataset", "render_results", "render_stats",
    "read_config", "read_table_csv", "summarize_scores", "sweep_table_csv", "write_dataset",
    "write_results", "write_stats", "write_sweep_tables",
]
