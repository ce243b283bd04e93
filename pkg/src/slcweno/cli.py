"""Command line entry point ``hjb``."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from .config import MODES, RunConfig
from .harness.suite import fmt, n_label, run_one, run_suite
from .problems import NUM_TESTS
from .reconstruction.forms import derive_indicator_forms


def _n_arg(s: str):
    parts = s.lower().split("x")
    vals = tuple(int(p) for p in parts)
    return vals[0] if len(vals) == 1 else vals


def _expand(obj: dict) -> list[RunConfig]:
    """One JSON object; list-valued ``n`` / ``mode`` / ``test`` expand to a product.

    A 2D grid with unequal counts is written as a string such as ``"101x81"``.
    """
    obj = dict(obj)
    if isinstance(obj.get("n"), str):
        obj["n"] = _n_arg(obj["n"])
    elif isinstance(obj.get("n"), list):
        obj["n"] = [_n_arg(v) if isinstance(v, str) else v for v in obj["n"]]
    keys = [k for k in ("test", "n", "mode") if isinstance(obj.get(k), list)]
    if not keys:
        return [RunConfig.from_dict(obj)]
    out = []
    for combo in itertools.product(*(obj[k] for k in keys)):
        d = dict(obj)
        d.update(zip(keys, combo))
        out.append(RunConfig.from_dict(d))
    return out


def load_suite(path: str) -> tuple[list[RunConfig], str | None]:
    data = json.loads(Path(path).read_text())
    out_dir = None
    if isinstance(data, dict) and "runs" in data:
        out_dir = data.get("out")
        data = data["runs"]
    items = data if isinstance(data, list) else [data]
    cfgs = []
    for it in items:
        cfgs.extend(_expand(it))
    if out_dir is None and cfgs:
        out_dir = cfgs[0].out
    return cfgs, out_dir


def _cmd_run(a: argparse.Namespace) -> int:
    rc = RunConfig(
        test=a.test, n=a.n, mode=a.mode, dt_ratio=a.dt_ratio, out=a.out, threads=a.threads, backend=a.backend,
    )  # fmt: skip
    if a.out:
        rows = run_suite([rc], a.out)
        r = rows[0]
        err, wall, w, ev, me = r.l1_error, r.wall_seconds, r.weight_computations, r.reconstruction_evaluations, r.minimizer_evaluations
        label = r.n
    else:
        res, err = run_one(rc)
        wall, w, ev, me = res.wall, res.weight_computations, res.evaluations, res.minimizer_evaluations
        label = n_label(res.final.grid.n)
    print(
        f"test={rc.test} n={label} mode={rc.mode} l1_error={fmt(err) or 'n/a'} wall_seconds={wall:.3f} "
        f"weight_computations={w} reconstruction_evaluations={ev} minimizer_evaluations={me}"
    )
    return 0


def _cmd_suite(a: argparse.Namespace) -> int:
    cfgs, out_dir = load_suite(a.config)
    out_dir = a.out or out_dir
    if not out_dir:
        print("suite needs an output directory (--out or an 'out' key)", file=sys.stderr)
        return 2
    rows = run_suite(cfgs, out_dir)
    for r in rows:
        print(f"test={r.test} n={r.n} mode={r.mode} l1_error={fmt(r.l1_error) or 'n/a'} order={fmt(r.order) or '-'}")
    print(f"wrote {Path(out_dir) / 'errors.csv'}")
    return 0


def _cmd_forms(a: argparse.Namespace) -> int:
    dims = (1, 2) if a.dim is None else (a.dim,)
    for d in dims:
        sys.stdout.write(derive_indicator_forms(d).dump())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hjb", description="Semi-Lagrangian CWENO solver for HJB benchmark problems")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run one benchmark problem")
    r.add_argument("--test", type=int, required=True, choices=range(1, NUM_TESTS + 1))
    r.add_argument("--n", type=_n_arg, required=True, help="nodes per axis, e.g. 81 or 101x81")
    r.add_argument("--mode", choices=MODES, default="cweno")
    r.add_argument("--dt-ratio", type=float, default=None, help="dt / dx (default: problem setting)")
    r.add_argument("--out", default=None, help="directory for CSV output")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--backend", choices=("compiled", "python"), default=None)
    r.add_argument(
        "--seed-free", action="store_true",
        help="accepted for script compatibility; runs never draw random numbers",
    )  # fmt: skip
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("suite", help="run a series of configurations from a JSON file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=_cmd_suite)

    f = sub.add_parser("forms", help="indicator matrices")
    f.add_argument("--dump", action="store_true", required=True, help="print all matrices as rationals")
    f.add_argument("--dim", type=int, choices=(1, 2), default=None)
    f.set_defaults(func=_cmd_forms)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
