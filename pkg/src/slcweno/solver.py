"""Semi-Lagrangian time marching with optional obstacle and reachable sets."""

from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .characteristics import ButcherTableau, QuadratureRule, cost_integral, trace
from .config import RunConfig
from .control import NMParams, minimize_batch
from .grid import BoundaryPolicy, Field, clamp_feet
from .problems import ProblemSpec
from .reconstruction.core import CellReconstruction, ReconConfig, ReconMode


@dataclass(frozen=True)
class StepContext:
    t_next: float
    dt: float
    tableau: ButcherTableau
    rule: QuadratureRule
    recon: ReconConfig
    policy: BoundaryPolicy

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        self.rule.check_pairing(self.tableau)


@dataclass
class StepStats:
    evaluations: int = 0
    weight_computations: int = 0
    minimizer_evaluations: int = 0
    clamped: int = 0
    counts: np.ndarray | None = None  # evaluations per cell
    seconds: float = 0.0


def _solve_nodes(grid, policy) -> np.ndarray:
    """Nodes that are updated; periodic copies of node 0 are filled afterwards."""
    idx = np.arange(int(np.prod(grid.n))).reshape(grid.shape)
    if policy is BoundaryPolicy.PERIODIC:
        idx = idx[(slice(None, -1),) * grid.dim]
    return idx.ravel()


def _fill_periodic(values: np.ndarray) -> None:
    for ax in range(values.ndim):
        sl_last = [slice(None)] * values.ndim
        sl_first = [slice(None)] * values.ndim
        sl_last[ax], sl_first[ax] = -1, 0
        values[tuple(sl_last)] = values[tuple(sl_first)]


def sl_step(
    u: Field,
    prob: ProblemSpec,
    ctx: StepContext,
    nm: NMParams | None = None,
    threads: int = 1,
    backend: str | None = None,
    stats: StepStats | None = None,
) -> Field:
    """One step of the scheme from ``t_next - dt`` to ``t_next``."""
    if abs(u.time - (ctx.t_next - ctx.dt)) > 1e-9 * max(1.0, abs(ctx.t_next)):
        raise ValueError(f"field time {u.time} does not match step start {ctx.t_next - ctx.dt}")
    t0 = time.perf_counter()
    grid = u.grid
    nm = prob.nm if nm is None else nm
    recon = CellReconstruction(u, ctx.policy, ctx.recon, backend=backend)
    pts = grid.points()
    tab, rule = ctx.tableau, ctx.rule
    clamped = [0]
    lock = threading.Lock()

    def objective(ctrl: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        stages = [ctrl[:, k, :] for k in range(tab.nu)]
        fr = trace(tab, prob.f_D, pts[nodes], ctx.t_next, ctx.dt, stages)
        foot, moved = clamp_feet(grid, ctx.policy, fr.foot)
        with lock:
            clamped[0] += int(np.count_nonzero(moved))
        val = recon(foot)
        if prob.f_C is not None:
            val = val + cost_integral(rule, prob.f_C, fr, stages, ctx.t_next, ctx.dt)
        return val

    nodes = _solve_nodes(grid, ctx.policy)
    chunks = [nodes] if threads <= 1 else [c for c in np.array_split(nodes, threads) if len(c)]
    if len(chunks) == 1:
        results = [minimize_batch(objective, prob.controls, tab.nu, nodes, nm)]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as ex:
            results = list(ex.map(lambda c: minimize_batch(objective, prob.controls, tab.nu, c, nm), chunks))

    out = u.values.ravel().copy()
    for c, r in zip(chunks, results):
        out[c] = r.values
    out = out.reshape(grid.shape)
    if ctx.policy is BoundaryPolicy.PERIODIC:
        _fill_periodic(out)
    if stats is not None:
        stats.evaluations += recon.evaluations
        stats.weight_computations += recon.weight_computations
        stats.minimizer_evaluations += sum(r.evaluations for r in results)
        stats.clamped += clamped[0]
        stats.counts = recon.counts.copy()
        stats.seconds += time.perf_counter() - t0
    return Field(grid, out, ctx.t_next)


def apply_obstacle(u: Field, g_values: Field | np.ndarray) -> Field:
    g = g_values.values if isinstance(g_values, Field) else np.asarray(g_values, dtype=float).reshape(u.grid.shape)
    return Field(u.grid, np.maximum(u.values, g), u.time)


def reachable_union(mask: np.ndarray | None, u: Field) -> np.ndarray:
    """Running union of the sub-zero sets of the fields seen so far."""
    now = u.values <= 0
    return now if mask is None else (mask | now)


@dataclass
class RunResult:
    final: Field
    config: RunConfig
    times: list[float] = field(default_factory=list)
    snapshots: list[Field] = field(default_factory=list)
    masks: list[np.ndarray] = field(default_factory=list)  # R^0, R^1, ...
    first_reach: np.ndarray | None = None  # step of first inclusion, -1 if never
    final_counts: np.ndarray | None = None
    steps: list[StepStats] = field(default_factory=list)
    wall: float = 0.0

    @property
    def weight_computations(self) -> int:
        return sum(s.weight_computations for s in self.steps)

    @property
    def evaluations(self) -> int:
        return sum(s.evaluations for s in self.steps)

    @property
    def minimizer_evaluations(self) -> int:
        return sum(s.minimizer_evaluations for s in self.steps)


def time_levels(T: float, dt: float) -> list[tuple[float, float]]:
    """(t_next, dt) per step; the last step is shortened to land on ``T``."""
    if T <= 0:
        return []
    nt = max(1, math.ceil(T / dt - 1e-12))
    out = [((k + 1) * dt, dt) for k in range(nt - 1)]
    t_last = (nt - 1) * dt
    out.append((T, T - t_last))
    return out


def recon_config(rc: RunConfig, dim: int) -> ReconConfig:
    mode = ReconMode(rc.mode)
    if rc.d is None:
        return ReconConfig(mode, dim, None, rc.l, rc.eps)
    return ReconConfig.with_side_weight(mode, dim, rc.d, l=rc.l, eps=rc.eps)


def run(prob: ProblemSpec, rc: RunConfig, track_reach: bool | None = None) -> RunResult:
    grid = prob.grid(rc.n)
    prob.validate(grid)
    recon = recon_config(rc, grid.dim)
    tab, rule = prob.tab, prob.rule
    nm = prob.nm if rc.coarse_pts is None else replace(prob.nm, coarse_pts=rc.coarse_pts)
    T = prob.T if rc.T is None else rc.T
    dt = (prob.dt_ratio if rc.dt_ratio is None else rc.dt_ratio) * grid.dx[0]
    track_reach = prob.g is not None if track_reach is None else track_reach

    pts = grid.points()
    u0 = np.asarray(prob.v0(pts), dtype=float)
    g_vals = None
    if prob.g is not None:
        g_vals = np.asarray(prob.g(pts), dtype=float).reshape(grid.shape)
        u0 = np.maximum(u0.reshape(grid.shape), g_vals)
    u = Field(grid, u0, 0.0)
    res = RunResult(u, rc, times=[0.0])
    if rc.snapshots:
        res.snapshots.append(u.copy())
    mask = None
    if track_reach:
        mask = reachable_union(None, u)
        res.masks.append(mask.copy())
        res.first_reach = np.where(mask, 0, -1)

    start = time.perf_counter()
    for k, (t_next, h) in enumerate(time_levels(T, dt), start=1):
        ctx = StepContext(t_next, h, tab, rule, recon, prob.policy)
        st = StepStats()
        u = sl_step(u, prob, ctx, nm, rc.threads, rc.backend, st)
        if g_vals is not None:
            u = apply_obstacle(u, g_vals)
        res.steps.append(st)
        res.times.append(t_next)
        if rc.snapshots:
            res.snapshots.append(u.copy())
        if track_reach:
            new = reachable_union(mask, u)
            res.first_reach[new & ~mask] = k
            mask = new
            res.masks.append(mask.copy())
    res.wall = time.perf_counter() - start
    res.final = u
    res.final_counts = res.steps[-1].counts if res.steps else None
    return res
