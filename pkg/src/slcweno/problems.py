"""The five benchmark problems and their exact solutions.

Callbacks are vectorised: ``x`` is (P, dim), ``a`` is (P, m), ``t`` a float.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .characteristics import ButcherTableau, QuadratureRule
from .control import ControlSet, NMParams
from .grid import BoundaryPolicy, GridSpec

PointFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExactSolution:
    v: Callable[[float, np.ndarray], np.ndarray]
    note: str = ""

    def __call__(self, t: float, x) -> np.ndarray:
        return self.v(t, np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    f_D: Callable
    f_C: Callable | None  # None: zero running cost
    controls: ControlSet
    v0: PointFn
    policy: BoundaryPolicy
    tableau: str
    dt_ratio: float
    T: float
    g: PointFn | None = None
    nm: NMParams = field(default_factory=NMParams)
    default_n: tuple[int, ...] = (81,)

    @property
    def tab(self) -> ButcherTableau:
        return ButcherTableau.by_name(self.tableau)

    @property
    def rule(self) -> QuadratureRule:
        return QuadratureRule.for_tableau(self.tab)

    def grid(self, n: int | tuple[int, ...] | None = None) -> GridSpec:
        """Grid with ``n`` nodes per axis.

        A single count on a non-square 2D domain sets the x axis; the y
        count follows from keeping square cells.
        """
        if n is None:
            n = self.default_n
        n = tuple(np.atleast_1d(n).astype(int))
        if self.dim == 2 and len(n) == 1:
            lx, ly = self.hi[0] - self.lo[0], self.hi[1] - self.lo[1]
            ny = (n[0] - 1) * ly / lx
            if abs(ny - round(ny)) > 1e-9:
                raise ValueError(f"{n[0]} nodes in x do not give square cells on this domain")
            n = (n[0], int(round(ny)) + 1)
        return GridSpec(self.lo, self.hi, n)

    def validate(self, grid: GridSpec) -> None:
        """Setup checks: periodic data must match at both ends of each axis."""
        if self.policy is not BoundaryPolicy.PERIODIC:
            return
        pts = grid.points()
        for ax in range(grid.dim):
            a = pts[np.isclose(pts[:, ax], grid.lo[ax])]
            b = a.copy()
            b[:, ax] = grid.hi[ax]
            if np.max(np.abs(self.v0(a) - self.v0(b))) > 1e-12:
                raise ValueError("periodic boundary needs v0(lo) == v0(hi)")


# ---------------------------------------------------------------- Test 1

BUMP_CENTER = (0.3, 0.7)
BUMP_M = 0.15
BUMP_R = 0.15
ROT_CENTER = (0.5, 0.5)


def bump(x: np.ndarray) -> np.ndarray:
    """C^2 radial bump of height 0.15 and radius 0.15."""
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    r = np.hypot(x[:, 0] - BUMP_CENTER[0], x[:, 1] - BUMP_CENTER[1])
    s = np.minimum(r / BUMP_R, 1.0)
    return BUMP_M * (1.0 + s**3 * (-10.0 + s * (15.0 - 6.0 * s)))


def _rotation(t: float, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.stack([-2 * np.pi * (x[:, 1] - 0.5), 2 * np.pi * (x[:, 0] - 0.5)], axis=1)


def _exact1(t: float, x: np.ndarray) -> np.ndarray:
    x = x.reshape(-1, 2)
    c, s = np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)
    dx, dy = x[:, 0] - ROT_CENTER[0], x[:, 1] - ROT_CENTER[1]
    y = np.stack([ROT_CENTER[0] + c * dx - s * dy, ROT_CENTER[1] + s * dx + c * dy], axis=1)
    return bump(y)


# ---------------------------------------------------------------- Test 2


def v0_test2(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    return np.minimum(-np.cos(np.pi * x / 2), 0.0)


def _g_test2(t: float, x: float, a: float) -> float:
    if a > np.pi / 2:
        return np.pi / 2
    if a < -np.pi / 2:
        return -np.pi / 2
    return -2.0 / (np.pi * t) * np.arcsin(2.0 * a / np.pi) + x / t


def optimal_control_test2(t: float, x: float, tol: float = 1e-13) -> float:
    """Fixed point ``a = g(t, x, a)``: damped iteration, then a bracketing solve."""
    if t <= 0:
        raise ValueError("t must be positive")
    h = lambda a: a - _g_test2(t, x, a)  # noqa: E731
    half = np.pi / 2
    a = min(max(0.5 * x * x * t, -half), half)
    for _ in range(100):
        a_new = min(max(0.5 * (a + _g_test2(t, x, a)), -half), half)
        if abs(a_new - a) <= tol:
            a = a_new
            break
        a = a_new
    if abs(h(a)) <= tol:
        return a
    if h(-half) > 0 or h(half) < 0:
        raise ValueError(f"no root bracketed for t={t}, x={x}")
    return brentq(h, -half, half, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)


def exact_test2(t: float, x: float, tol: float = 1e-13) -> float:
    a = optimal_control_test2(t, x, tol)
    return min(0.0, 0.5 * t * a * a + float(v0_test2(np.array([x - t * a]))[0]))


def _exact2(t: float, x: np.ndarray) -> np.ndarray:
    x = x.reshape(-1)
    if t == 0:
        return v0_test2(x)
    out = np.zeros(len(x))
    # beyond this distance every admissible foot lies where v0 vanishes
    reach = 1.0 + 0.5 * np.pi * t
    for i, xi in enumerate(x):
        if abs(xi) < reach:
            out[i] = exact_test2(t, float(xi))
    return out


def _minus_a(t: float, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    return -a


def _half_sq(t: float, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    return 0.5 * np.sum(a * a, axis=1)


# ---------------------------------------------------------------- Test 3


def source_test3(t: float, x: np.ndarray) -> np.ndarray:
    return -np.sin(x) + (9.0 / 8.0 + (t * t - 3.0 * t) / 2.0) * np.cos(x) ** 2


def _cost3(t: float, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    return 0.5 * a[:, 0] * a[:, 0] + source_test3(t, x[:, 0])


def _exact3(t: float, x: np.ndarray) -> np.ndarray:
    return (1.5 - t) * np.sin(x.reshape(-1))


# ---------------------------------------------------------------- Test 4


def v0_test4(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    return np.maximum(1.0 - np.sum(x * x, axis=1), 0.0)


def _exact4(t: float, x: np.ndarray) -> np.ndarray:
    x = x.reshape(-1, 2)
    if t == 0:
        return v0_test4(x)
    r = np.hypot(x[:, 0], x[:, 1])
    out = np.where(r < 1.0, (1.0 - np.minimum(r, 1.0)) ** 2 / (2.0 * t), 0.0)
    if t < 0.5:
        inner = r <= 1.0 - 2.0 * t
        out = np.where(inner, np.minimum(out, 1.0 - r * r / (1.0 - 2.0 * t)), out)
    return out


# ---------------------------------------------------------------- Test 5

TARGET_CENTER = (1.0, 0.0)
TARGET_RADIUS = 0.25
LEVEL_SCALE = 20.0
GAMMA = 0.2
OBSTACLES = ((0.3, 0.4), (-1.0, -1.5))


def v0_test5(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    r = np.hypot(x[:, 0] - TARGET_CENTER[0], x[:, 1] - TARGET_CENTER[1])
    return LEVEL_SCALE * np.minimum(r - TARGET_RADIUS, TARGET_RADIUS)


def obstacle_test5(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    out = np.full(len(x), -GAMMA)
    for cx, cy in OBSTACLES:
        d = np.maximum(np.abs(x[:, 0] - cx), np.abs(x[:, 1] - cy))
        out = np.maximum(out, LEVEL_SCALE * (GAMMA - d))
    return out


def _zermelo(t: float, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.stack([2.0 - 0.5 * x[:, 1] ** 2 + a[:, 0], a[:, 1]], axis=1)


# ----------------------------------------------------------------

NUM_TESTS = 5


def make_test(k: int) -> tuple[ProblemSpec, ExactSolution | None]:
    if k == 1:
        spec = ProblemSpec(
            "rotation", 2, (0.0, 0.0), (1.0, 1.0), _rotation, None, ControlSet.empty(), bump,
            BoundaryPolicy.EXTRAPOLATE, "rk3", 3.0, 1.0, default_n=(81, 81),
        )  # fmt: skip
        return spec, ExactSolution(_exact1, "rigid rotation of the initial bump")
    if k == 2:
        spec = ProblemSpec(
            "semiconcave-1d", 1, (-2.0,), (2.0,), _minus_a, _half_sq, ControlSet.box(-2.0, 2.0), v0_test2,
            BoundaryPolicy.EXTRAPOLATE, "euler", 10.0, 1.0, default_n=(161,),
        )  # fmt: skip
        return spec, ExactSolution(_exact2, "Hopf-Lax value through the optimal-control fixed point")
    if k == 3:
        spec = ProblemSpec(
            "eikonal-1d", 1, (0.0,), (2 * np.pi,), _minus_a, _cost3, ControlSet.box(-2.0, 2.0),
            lambda x: 1.5 * np.sin(np.asarray(x, dtype=float).reshape(-1)),
            BoundaryPolicy.PERIODIC, "rk3", 1.0, 0.5, default_n=(126,),
        )  # fmt: skip
        return spec, ExactSolution(_exact3, "(3/2 - t) sin x")
    if k == 4:
        spec = ProblemSpec(
            "semiconvex-2d", 2, (-2.0, -2.0), (2.0, 2.0), _minus_a, _half_sq, ControlSet.box((-2.0, -2.0), (2.0, 2.0)),
            v0_test4, BoundaryPolicy.EXTRAPOLATE, "euler", 1.25, 0.5, default_n=(81, 81),
        )  # fmt: skip
        return spec, ExactSolution(_exact4, "Hopf-Lax formula; closed form for every t > 0")
    if k == 5:
        spec = ProblemSpec(
            "zermelo-obstacles", 2, (-3.0, -2.0), (2.0, 2.0), _zermelo, None, ControlSet.circle(1.0), v0_test5,
            BoundaryPolicy.EXTRAPOLATE, "rk3", 1.0, 3.0, g=obstacle_test5, nm=NMParams(coarse_pts=4, xtol=1e-3),
            default_n=(101, 81),
        )  # fmt: skip
        return spec, None
    raise ValueError(f"no test {k}; valid ids are 1..{NUM_TESTS}")
