"""Minimisation over discrete control tuples.

A control tuple holds one control per RK stage.  It is searched in a flat
parameter space of dimension ``nu * param_dim``: boxes use the components
directly, the circle uses one angle per stage.  The search tabulates a
coarse grid and polishes the best point with Nelder-Mead.  Every vertex is
mapped through :func:`embed` before evaluation, so the objective never sees
a control outside the set.

:func:`minimize_batch` runs many independent problems (one per grid node)
in lockstep.  Per-node arithmetic does not depend on the batch, so any
split of the nodes gives the same bits.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np


class ControlKind(enum.Enum):
    EMPTY = "empty"
    BOX = "box"
    CIRCLE = "circle"


class NonFiniteObjective(FloatingPointError):
    def __init__(self, control: np.ndarray, value: float):
        super().__init__(f"objective returned {value} at control {control.tolist()}")
        self.control, self.value = control, value


@dataclass(frozen=True)
class ControlSet:
    kind: ControlKind
    lo: tuple[float, ...] = ()
    hi: tuple[float, ...] = ()
    radius: float = 1.0

    def __post_init__(self):
        if self.kind is ControlKind.BOX:
            lo = tuple(float(v) for v in np.atleast_1d(self.lo))
            hi = tuple(float(v) for v in np.atleast_1d(self.hi))
            if len(lo) != len(hi) or not lo or any(a >= b for a, b in zip(lo, hi)):
                raise ValueError("box needs lo < hi componentwise")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)
        elif self.kind is ControlKind.CIRCLE and self.radius <= 0:
            raise ValueError("circle radius must be positive")

    @classmethod
    def empty(cls) -> "ControlSet":
        return cls(ControlKind.EMPTY)

    @classmethod
    def box(cls, lo, hi) -> "ControlSet":
        return cls(ControlKind.BOX, lo, hi)

    @classmethod
    def circle(cls, radius: float = 1.0) -> "ControlSet":
        return cls(ControlKind.CIRCLE, radius=radius)

    @property
    def param_dim(self) -> int:
        return {ControlKind.EMPTY: 0, ControlKind.BOX: len(self.lo), ControlKind.CIRCLE: 1}[self.kind]

    @property
    def control_dim(self) -> int:
        return {ControlKind.EMPTY: 0, ControlKind.BOX: len(self.lo), ControlKind.CIRCLE: 2}[self.kind]

    def contains(self, a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        """Membership test for controls of shape (..., control_dim)."""
        a = np.asarray(a, dtype=float)
        if self.kind is ControlKind.EMPTY:
            return np.full(a.shape[:-1], a.shape[-1] == 0)
        if self.kind is ControlKind.BOX:
            return np.all((a >= np.asarray(self.lo) - tol) & (a <= np.asarray(self.hi) + tol), axis=-1)
        return np.abs(np.hypot(a[..., 0], a[..., 1]) - self.radius) <= tol * max(1.0, self.radius)


@dataclass(frozen=True)
class NMParams:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_iter: int = 200
    ftol: float = 1e-9
    coarse_pts: int = 9
    xtol: float = 1e-6  # max parameter distance of any vertex from the best one

    def __post_init__(self):
        if not (self.reflection > 0 and self.expansion > max(1.0, self.reflection)):
            raise ValueError("need reflection > 0 and expansion > max(1, reflection)")
        if not (0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise ValueError("contraction and shrink must lie in (0, 1)")
        if self.coarse_pts < 3 or self.max_iter < 0 or self.ftol < 0 or self.xtol < 0:
            raise ValueError("need coarse_pts >= 3, max_iter >= 0, ftol >= 0")


def _project(cs: ControlSet, params: np.ndarray, nu: int) -> np.ndarray:
    """Keep box parameters inside the box; angles are left alone."""
    if cs.kind is not ControlKind.BOX:
        return params
    lo = np.tile(cs.lo, nu)
    hi = np.tile(cs.hi, nu)
    return np.clip(params, lo, hi)


def embed(cs: ControlSet, params, nu: int | None = None) -> np.ndarray:
    """Parameters (..., nu * param_dim) to controls (..., nu, control_dim).

    With ``nu`` omitted a single stage is assumed and the stage axis is
    dropped.
    """
    p = np.asarray(params, dtype=float)
    squeeze = nu is None
    nu = 1 if nu is None else nu
    lead = p.shape[:-1] if p.ndim else ()
    if cs.kind is ControlKind.EMPTY:
        out = np.zeros(lead + (nu, 0))
    elif cs.kind is ControlKind.BOX:
        m = len(cs.lo)
        out = np.clip(p.reshape(lead + (nu, m)), np.asarray(cs.lo), np.asarray(cs.hi))
    else:
        th = p.reshape(lead + (nu,))
        out = cs.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    return out[..., 0, :] if squeeze else out


def _param_box(cs: ControlSet, nu: int) -> tuple[np.ndarray, np.ndarray, bool]:
    if cs.kind is ControlKind.BOX:
        return np.tile(cs.lo, nu), np.tile(cs.hi, nu), False
    return np.zeros(nu), np.full(nu, 2 * np.pi), True


def coarse_grid(cs: ControlSet, nu: int, p: NMParams) -> tuple[np.ndarray, np.ndarray]:
    """Coarse parameter grid (G, D), lexicographic with the last parameter fastest, and the spacing per parameter."""
    lo, hi, periodic = _param_box(cs, nu)
    n = p.coarse_pts
    axes = []
    for a, b in zip(lo, hi):
        axes.append(a + (b - a) * np.arange(n) / n if periodic else np.linspace(a, b, n))
    h = (hi - lo) / (n if periodic else n - 1)
    grid = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, len(lo))
    return grid, h


BatchObjective = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class BatchResult:
    params: np.ndarray  # (P, D)
    controls: np.ndarray  # (P, nu, m)
    values: np.ndarray  # (P,)
    coarse_values: np.ndarray  # (P,) best coarse-grid value
    evaluations: int
    iterations: np.ndarray  # (P,)


class _Counted:
    def __init__(self, f: BatchObjective, cs: ControlSet, nu: int):
        self.f, self.cs, self.nu, self.count = f, cs, nu, 0

    def __call__(self, params: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        if len(nodes) == 0:
            return np.zeros(0)
        ctrl = embed(self.cs, params, self.nu)
        v = np.asarray(self.f(ctrl, nodes), dtype=float).reshape(len(nodes))
        self.count += len(nodes)
        bad = ~np.isfinite(v)
        if bad.any():
            i = np.flatnonzero(bad)[0]
            raise NonFiniteObjective(ctrl[i], v[i])
        return v


def minimize_batch(
    objective: BatchObjective,
    cs: ControlSet,
    nu: int,
    nodes: np.ndarray,
    p: NMParams = NMParams(),
    chunk: int = 1 << 19,
) -> BatchResult:
    """Minimise ``objective(controls, nodes)`` independently for every node.

    ``objective`` receives controls of shape (k, nu, m) and the matching
    node ids (k,) and returns k values.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    P = len(nodes)
    f = _Counted(objective, cs, nu)
    if cs.kind is ControlKind.EMPTY:
        vals = f(np.zeros((P, 0)), nodes)
        return BatchResult(np.zeros((P, 0)), np.zeros((P, nu, 0)), vals, vals.copy(), f.count, np.zeros(P, dtype=np.int64))

    G, h = coarse_grid(cs, nu, p)
    nG, D = G.shape
    best = np.empty(P, dtype=np.int64)
    fbest = np.empty(P)
    step = max(1, chunk // nG)
    for s in range(0, P, step):
        sl = slice(s, min(P, s + step))
        k = sl.stop - sl.start
        vals = f(np.tile(G, (k, 1)), np.repeat(nodes[sl], nG)).reshape(k, nG)
        best[sl] = np.argmin(vals, axis=1)
        fbest[sl] = vals[np.arange(k), best[sl]]
    coarse_values = fbest.copy()

    lo, hi, periodic = _param_box(cs, nu)
    simplex = np.empty((P, D + 1, D))
    simplex[:, 0] = G[best]
    for i in range(D):
        v = simplex[:, 0].copy()
        hstep = 0.5 * h[i]
        if periodic:
            v[:, i] += hstep
        else:
            up = v[:, i] + hstep <= hi[i]
            v[:, i] = np.where(up, v[:, i] + hstep, v[:, i] - hstep)
        simplex[:, i + 1] = v
    fs = np.empty((P, D + 1))
    fs[:, 0] = fbest
    flat = simplex[:, 1:].reshape(P * D, D)
    fs[:, 1:] = f(flat, np.repeat(nodes, D)).reshape(P, D)

    iters = np.zeros(P, dtype=np.int64)
    idx = np.arange(P)
    for _ in range(p.max_iter):
        S = simplex[idx]
        F = fs[idx]
        order = np.argsort(F, axis=1, kind="stable")
        S = np.take_along_axis(S, order[:, :, None], axis=1)
        F = np.take_along_axis(F, order, axis=1)
        simplex[idx] = S
        fs[idx] = F
        spread = F[:, D] - F[:, 0]
        width = np.max(np.abs(S[:, 1:] - S[:, :1]), axis=(1, 2))
        keep = (spread > 0) & ((spread > p.ftol) | (width > p.xtol))
        idx, S, F = idx[keep], S[keep], F[keep]
        if idx.size == 0:
            break
        iters[idx] += 1
        nd = nodes[idx]
        cen = S[:, 0].copy()
        for j in range(1, D):
            cen = cen + S[:, j]
        cen = cen / D
        worst = S[:, D]
        xr = _project(cs, cen + p.reflection * (cen - worst), nu)
        fr = f(xr, nd)

        new_x = S[:, D].copy()
        new_f = F[:, D].copy()
        shrink = np.zeros(len(idx), dtype=bool)

        exp = fr < F[:, 0]
        if exp.any():
            xe = _project(cs, cen[exp] + p.expansion * (xr[exp] - cen[exp]), nu)
            fe = f(xe, nd[exp])
            take_e = fe < fr[exp]
            new_x[exp] = np.where(take_e[:, None], xe, xr[exp])
            new_f[exp] = np.where(take_e, fe, fr[exp])

        acc = ~exp & (fr < F[:, D - 1])
        new_x[acc] = xr[acc]
        new_f[acc] = fr[acc]

        outside = ~exp & ~acc & (fr < F[:, D])
        inside = ~exp & ~acc & ~outside
        for mask, base, fref, strict in ((outside, xr, fr, False), (inside, worst, F[:, D], True)):
            if not mask.any():
                continue
            xc = _project(cs, cen[mask] + p.contraction * (base[mask] - cen[mask]), nu)
            fc = f(xc, nd[mask])
            ok = fc < fref[mask] if strict else fc <= fref[mask]
            sel = np.flatnonzero(mask)
            new_x[sel[ok]] = xc[ok]
            new_f[sel[ok]] = fc[ok]
            shrink[sel[~ok]] = True

        S[:, D] = new_x
        F[:, D] = new_f
        if shrink.any():
            ss = np.flatnonzero(shrink)
            x0 = S[ss, 0]
            pts = x0[:, None, :] + p.shrink * (S[ss, 1:] - x0[:, None, :])
            pts = _project(cs, pts.reshape(-1, D), nu).reshape(len(ss), D, D)
            fv = f(pts.reshape(-1, D), np.repeat(nd[ss], D)).reshape(len(ss), D)
            S[ss, 1:] = pts
            F[ss, 1:] = fv
        simplex[idx] = S
        fs[idx] = F

    ib = np.argmin(fs, axis=1)
    bp = simplex[np.arange(P), ib]
    bv = fs[np.arange(P), ib]
    return BatchResult(bp, embed(cs, bp, nu), bv, coarse_values, f.count, iters)


def minimize(
    objective: Callable[[np.ndarray], float], cs: ControlSet, nu: int, p: NMParams = NMParams()
) -> tuple[np.ndarray, float]:
    """Single problem: ``objective`` maps a (nu, m) control tuple to a real."""

    def batch(ctrl: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        return np.array([objective(c) for c in ctrl])

    res = minimize_batch(batch, cs, nu, np.zeros(1, dtype=np.int64), p)
    return res.controls[0], float(res.values[0])


__all__ = [
    "BatchResult",
    "ControlKind",
    "ControlSet",
    "NMParams",
    "NonFiniteObjective",
    "coarse_grid",
    "embed",
    "minimize",
    "minimize_batch",
]

