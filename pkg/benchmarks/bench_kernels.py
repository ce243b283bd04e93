"""Compare the compiled and numpy reconstruction kernels.

    python benchmarks/bench_kernels.py [--cells 20000] [--points 200000] [--repeat 5]

Times cell reconstruction, cached evaluation and the per-point baseline in
1D and 2D, and checks that both backends return identical bits.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from slcweno._kernels import available_backends, get_backend
from slcweno.reconstruction import ReconConfig, ReconMode, derive_indicator_forms
from slcweno.reconstruction.core import _kernel_args


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(dim: int, cells: int, points: int, rng):
    U = rng.normal(size=(cells, 4 if dim == 1 else 16))
    args = _kernel_args(ReconConfig(ReconMode.CWENOZ, dim), derive_indicator_forms(dim), 0.01)
    idx = rng.integers(0, cells, points)
    x, y = rng.random(points), rng.random(points)

    def recon(k):
        return k.reconstruct(U, *args)

    def evaluate(k, coef):
        return k.eval_poly_1d(coef, idx, x) if dim == 1 else k.eval_poly_2d(coef, idx, x, y)

    def pointwise(k):
        st = U[idx]
        return k.pointwise_1d(st, x, *args) if dim == 1 else k.pointwise_2d(st, x, y, *args)

    return recon, evaluate, pointwise


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=20_000)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; only the numpy backend is timed")
    print(f"{'dim':>3} {'kernel':<12} " + " ".join(f"{b:>10}" for b in backends) + "   speedup  identical")
    for dim in (1, 2):
        recon, evaluate, pointwise = cases(dim, a.cells, a.points, np.random.default_rng(dim))
        rows = {"reconstruct": {}, "evaluate": {}, "pointwise": {}}
        for b in backends:
            k = get_backend(b)
            rows["reconstruct"][b] = best_of(lambda: recon(k), a.repeat)
            coef = rows["reconstruct"][b][1][0]
            rows["evaluate"][b] = best_of(lambda: evaluate(k, coef), a.repeat)
            rows["pointwise"][b] = best_of(lambda: pointwise(k), a.repeat)
        for name, res in rows.items():
            times = " ".join(f"{res[b][0] * 1e3:8.2f}ms" for b in backends)
            if len(backends) == 2:
                speed = res["python"][0] / res["compiled"][0]
                oc, op = res["compiled"][1], res["python"][1]
                same = all(np.array_equal(p, q) for p, q in zip(oc, op)) if isinstance(oc, tuple) else np.array_equal(oc, op)
                print(f"{dim:>3} {name:<12} {times} {speed:8.1f}x  {same}")
            else:
                print(f"{dim:>3} {name:<12} {times}")


if __name__ == "__main__":
    main()
