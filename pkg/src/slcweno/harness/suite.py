"""Batch runs and CSV output."""

from __future__ import annotations

import csv
import os
from collections import defaultdict
from dataclasses import astuple
from pathlib import Path
from typing import Iterable

import numpy as np

from ..config import RunConfig
from ..problems import make_test
from ..solver import RunResult, run
from .metrics import MetricsRow, convergence_order, l1_error


def fmt(v) -> str:
    """CSV cell: floats with 17 significant digits, None as empty."""
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def parse_float(s: str) -> float | None:
    return None if s == "" else float(s)


def n_label(n) -> str:
    return "x".join(str(int(v)) for v in np.atleast_1d(n))


def _write(path: Path, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def run_one(rc: RunConfig) -> tuple[RunResult, float | None]:
    prob, exact = make_test(rc.test)
    res = run(prob, rc)
    err = None if exact is None else l1_error(res.final, exact, res.times[-1])
    return res, err


def _counts_rows(res: RunResult, mode: str):
    grid = res.final.grid
    centres = grid.cell_centers()
    counts = res.final_counts if res.final_counts is not None else np.zeros(len(centres), dtype=np.int64)
    for i, (c, k) in enumerate(zip(centres, counts)):
        yield [mode, i, *c.tolist(), int(k)]


def _reach_rows(res: RunResult, mode: str):
    pts = res.final.grid.points()
    for p, s in zip(pts, res.first_reach.ravel()):
        yield [mode, *p.tolist(), int(s)]


def run_suite(configs: Iterable[RunConfig], out_dir: str | os.PathLike) -> list[MetricsRow]:
    """Run every config and write ``errors.csv``, ``gains.csv`` and per-grid files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"cannot write to {out}")
    rows: list[MetricsRow] = []
    counts = defaultdict(list)
    reach = defaultdict(list)
    for rc in configs:
        res, err = run_one(rc)
        label = n_label(res.final.grid.n)
        rows.append(
            MetricsRow(rc.test, rc.mode, label, err, None, res.wall, res.weight_computations, res.evaluations, res.minimizer_evaluations)
        )
        counts[(rc.test, label, res.final.grid.dim)].extend(_counts_rows(res, rc.mode))
        if res.first_reach is not None:
            reach[(rc.test, label, res.final.grid.dim)].extend(_reach_rows(res, rc.mode))

    groups = defaultdict(list)
    for r in rows:
        groups[(r.test, r.mode)].append(r)
    for grp in groups.values():
        grp = [r for r in grp if r.l1_error is not None]
        grp.sort(key=lambda r: int(r.n.split("x")[0]))
        if len(grp) > 1:
            orders = convergence_order([r.l1_error for r in grp], [int(r.n.split("x")[0]) for r in grp])
            for r, o in zip(grp[1:], orders):
                r.order = o

    _write(out / "errors.csv", MetricsRow.header(), (astuple(r) for r in rows))
    _write(out / "gains.csv", ["test", "n", "mode", "gain_percent"], gains(rows))
    for (test, label, dim), body in counts.items():
        coords = ["x"] if dim == 1 else ["x", "y"]
        _write(out / f"counts_{test}_{label}.csv", ["mode", "cell", *coords, "count"], body)
    for (test, label, dim), body in reach.items():
        coords = ["x"] if dim == 1 else ["x", "y"]
        _write(out / f"reach_{test}_{label}.csv", ["mode", *coords, "first_step"], body)
    return rows


def gains(rows: list[MetricsRow]) -> list[list]:
    """``100 * (1 - t_mode / t_baseline)`` for each cached mode with a baseline on the same grid."""
    base = {(r.test, r.n): r.wall_seconds for r in rows if r.mode == "baseline"}
    out = []
    for r in rows:
        key = (r.test, r.n)
        if r.mode != "baseline" and key in base and base[key] > 0:
            out.append([r.test, r.n, r.mode, 100.0 * (1.0 - r.wall_seconds / base[key])])
    return out


def read_errors(path: str | os.PathLike) -> list[MetricsRow]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        return [
            MetricsRow(
                int(d["test"]), d["mode"], d["n"], parse_float(d["l1_error"]), parse_float(d["order"]),
                float(d["wall_seconds"]), int(d["weight_computations"]), int(d["reconstruction_evaluations"]),
                int(d["minimizer_evaluations"]),
            )  # fmt: skip
            for d in rd
        ]
