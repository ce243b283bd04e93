"""Central WENO reconstruction from point values.

Each cell gets one blended cubic (1D) or bicubic (2D) polynomial, built from
the 4 or 16 surrounding nodes.  The hot path runs in the kernel backend; the
small pure functions here (``fit_poly_1d``, ``oscillation_1d``, ``blend``,
...) are straightforward reference implementations used by tests and for
single-cell work.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .._kernels import get_backend
from ..grid import BoundaryPolicy, Field, GridSpec, all_stencils, locate_cells
from .forms import (
    BASIS_2D,
    CANDIDATES_1D,
    CANDIDATES_2D,
    TAU_COEFFS_1D,
    TAU_COEFFS_2D,
    IndicatorForms,
    derive_indicator_forms,
)

D_BOUND_1D = 0.332


class ReconMode(enum.Enum):
    CWENO = "cweno"
    CWENOZ = "cwenoz"
    BASELINE = "baseline"  # same weights as CWENO, recomputed for every point


@dataclass(frozen=True)
class ReconConfig:
    """Blend parameters.

    ``d`` lists the linear coefficients with the optimal candidate first;
    ``None`` picks (3/4, 1/8, 1/8) in 1D and (3/4, 1/16 x 4) in 2D.  ``eps``
    of ``None`` means ``dx**2``.  ``zmode`` selects the CWENOZ weights; the
    baseline mode uses the CWENO formula.
    """

    mode: ReconMode = ReconMode.CWENO
    dim: int = 1
    d: tuple[float, ...] | None = None
    l: float = 2.0
    eps: float | None = None

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", ReconMode(self.mode))
        if self.dim not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        d = self.d
        if d is None:
            d = (0.75, 0.125, 0.125) if self.dim == 1 else (0.75,) + (1.0 / 16,) * 4
        d = tuple(float(v) for v in d)
        ncand = 3 if self.dim == 1 else 5
        if len(d) != ncand:
            raise ValueError(f"need {ncand} linear coefficients, got {len(d)}")
        if any(v <= 0 for v in d):
            raise ValueError("linear coefficients must be positive")
        if abs(sum(d) - 1.0) > 1e-12:
            raise ValueError("linear coefficients must sum to 1")
        if self.dim == 1 and (d[1] != d[2] or d[1] > D_BOUND_1D):
            raise ValueError(f"1D side coefficients must be equal and <= {D_BOUND_1D}")
        if self.l < 1:
            raise ValueError("exponent l must be >= 1")
        if self.eps is not None and self.eps <= 0:
            raise ValueError("eps must be positive")
        object.__setattr__(self, "d", d)

    @classmethod
    def with_side_weight(cls, mode, dim: int, side: float, **kw) -> "ReconConfig":
        """Config whose non-optimal candidates all get weight ``side``."""
        k = 2 if dim == 1 else 4
        return cls(mode, dim, (1.0 - k * side,) + (side,) * k, **kw)

    @property
    def zmode(self) -> bool:
        return self.mode is ReconMode.CWENOZ

    def eps_for(self, dx: float) -> float:
        return dx * dx if self.eps is None else self.eps


@dataclass
class Polynomial1D:
    z: np.ndarray
    dx: float = 1.0

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float).reshape(4)

    def __call__(self, xh):
        z = self.z
        xh = np.asarray(xh, dtype=float)
        return ((z[3] * xh + z[2]) * xh + z[1]) * xh + z[0]


@dataclass
class Polynomial2D:
    z: np.ndarray
    dx: float = 1.0

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float).reshape(16)

    def __call__(self, xh, yh):
        xh = np.asarray(xh, dtype=float)
        yh = np.asarray(yh, dtype=float)
        return sum(c * xh**a * yh**b for c, (a, b) in zip(self.z, BASIS_2D))


@dataclass
class ReconPolynomial:
    poly: Polynomial1D | Polynomial2D
    weights: np.ndarray
    indicators: np.ndarray
    tau: float | None = None


def _forms(dim: int, forms: IndicatorForms | None) -> IndicatorForms:
    return derive_indicator_forms(dim) if forms is None else forms


def fit_poly_1d(values: Sequence[float], which: str = "Q") -> Polynomial1D:
    """Interpolant on nodes -1, 0, 1, 2 (``Q``), -1, 0, 1 (``L``) or 0, 1, 2 (``R``)."""
    if which not in CANDIDATES_1D:
        raise ValueError(f"unknown 1D candidate {which!r}")
    W = derive_indicator_forms(1).W_stack()[CANDIDATES_1D.index(which)]
    return Polynomial1D(W @ np.asarray(values, dtype=float))


def fit_candidates(values: Sequence[float], dim: int) -> list[Polynomial1D | Polynomial2D]:
    """All candidate polynomials of a stencil, optimal one first."""
    W = derive_indicator_forms(dim).W_stack()
    U = np.asarray(values, dtype=float)
    cls = Polynomial1D if dim == 1 else Polynomial2D
    return [cls(Wk @ U) for Wk in W]


def oscillation(poly: Polynomial1D | Polynomial2D) -> float:
    dim = 1 if isinstance(poly, Polynomial1D) else 2
    M = derive_indicator_forms(dim).M_float
    return float(poly.z @ M @ poly.z) / poly.dx**2


def oscillation_1d(poly: Polynomial1D) -> float:
    return oscillation(poly)


def oscillation_data(values: Sequence[float], which: str, forms: IndicatorForms | None = None, dx: float = 1.0) -> float:
    """Indicator of candidate ``which`` straight from the stencil data."""
    U = np.asarray(values, dtype=float)
    forms = _forms(1 if U.size == 4 else 2, forms)
    return float(U @ forms.A_float(which) @ U) / dx**2


def tau_1d(I_Q: float, I_L: float, I_R: float) -> float:
    return abs(2.0 * I_Q - I_L - I_R)


def tau_2d(I_opt: float, I_ne: float, I_se: float, I_sw: float, I_nw: float) -> float:
    return abs(4.0 * I_opt - I_ne - I_se - I_sw - I_nw)


def blend(candidates: Sequence[Polynomial1D | Polynomial2D], cfg: ReconConfig, dx: float) -> ReconPolynomial:
    """Reference blend of candidate polynomials (optimal one first)."""
    d = np.asarray(cfg.d)
    if len(candidates) != len(d):
        raise ValueError("candidate count does not match the linear coefficients")
    Z = np.stack([np.asarray(p.z, dtype=float) for p in candidates])
    cls = type(candidates[0])
    I = np.array([oscillation(cls(z, dx)) for z in Z])
    tau = None
    eps = cfg.eps_for(dx)
    if cfg.zmode:
        tau = tau_1d(*I) if len(I) == 3 else tau_2d(*I)
        alpha = d * (1.0 + (tau / (I + eps)) ** cfg.l)
    else:
        alpha = d / (I + eps) ** cfg.l
    omega = alpha / alpha.sum()
    p0 = (Z[0] - d[1:] @ Z[1:]) / d[0]
    z = omega[0] * p0 + omega[1:] @ Z[1:]
    return ReconPolynomial(cls(z, dx), omega, I, tau)


def _kernel_args(cfg: ReconConfig, forms: IndicatorForms, dx: float) -> tuple:
    tc = TAU_COEFFS_1D if forms.dim == 1 else TAU_COEFFS_2D
    return (
        forms.W_stack(),
        forms.M_float,
        np.asarray(cfg.d, dtype=float),
        np.asarray(tc, dtype=float),
        float(cfg.eps_for(dx)),
        float(cfg.l),
        cfg.zmode,
        1.0 / (dx * dx),
    )


def reconstruct_cell(
    values: Sequence[float], cfg: ReconConfig, forms: IndicatorForms | None = None, dx: float = 1.0, backend: str | None = None
) -> ReconPolynomial:
    U = np.asarray(values, dtype=float).reshape(1, -1)
    forms = _forms(1 if U.shape[1] == 4 else 2, forms)
    kern = get_backend(backend)
    coef, omega, ind, tau = kern.reconstruct(U, *_kernel_args(cfg, forms, dx))
    cls = Polynomial1D if forms.dim == 1 else Polynomial2D
    return ReconPolynomial(cls(coef[0], dx), omega[0], ind[0], float(tau[0]) if cfg.zmode else None)


@dataclass
class EvalCounter:
    evaluations: int = 0
    weight_computations: int = 0


def evaluate(rp: ReconPolynomial, xh, counter: EvalCounter | None = None, backend: str | None = None) -> float:
    """Value of a reconstruction at local coordinates ``xh`` (scalar or pair)."""
    kern = get_backend(backend)
    xh = np.atleast_1d(np.asarray(xh, dtype=float))
    coef = rp.poly.z.reshape(1, -1)
    cells = np.zeros(1, dtype=np.int64)
    if isinstance(rp.poly, Polynomial1D):
        out = kern.eval_poly_1d(coef, cells, xh[:1])
    else:
        out = kern.eval_poly_2d(coef, cells, xh[:1], xh[1:2])
    if counter is not None:
        counter.evaluations += 1
    return float(out[0])


def baseline_pointwise(
    values: Sequence[float],
    xh,
    cfg: ReconConfig,
    forms: IndicatorForms | None = None,
    dx: float = 1.0,
    counter: EvalCounter | None = None,
    backend: str | None = None,
) -> float:
    """Reconstruct and evaluate in one go, with no reuse across points."""
    U = np.asarray(values, dtype=float).reshape(1, -1)
    forms = _forms(1 if U.shape[1] == 4 else 2, forms)
    kern = get_backend(backend)
    xh = np.atleast_1d(np.asarray(xh, dtype=float))
    args = _kernel_args(cfg, forms, dx)
    if forms.dim == 1:
        out = kern.pointwise_1d(U, xh[:1], *args)
    else:
        out = kern.pointwise_2d(U, xh[:1], xh[1:2], *args)
    if counter is not None:
        counter.evaluations += 1
        counter.weight_computations += 1
    return float(out[0])


@dataclass
class CellReconstruction:
    """Reconstruction of a whole field, queried at arbitrary in-domain points.

    In the cached modes a cell polynomial is built the first time a point
    lands in that cell and reused afterwards.  In the baseline mode every
    query rebuilds the weights.  ``counts`` holds the number of evaluations
    per cell (lexicographic cell order).
    """

    field_: Field
    policy: BoundaryPolicy
    cfg: ReconConfig
    backend: str | None = None
    counts: np.ndarray = field(init=False, repr=False)
    weight_computations: int = field(init=False, default=0)
    evaluations: int = field(init=False, default=0)

    def __post_init__(self):
        grid = self.grid
        if grid.dim != self.cfg.dim:
            raise ValueError("reconstruction dimension does not match the grid")
        if grid.dim == 2 and not grid.is_square():
            raise ValueError("anisotropic grids (dx != dy) are not supported")
        self._kern = get_backend(self.backend)
        forms = derive_indicator_forms(grid.dim)
        self._args = _kernel_args(self.cfg, forms, grid.dx[0])
        self._stencils = all_stencils(self.field_.values, self.policy)
        ncells = self._stencils.shape[0]
        self.counts = np.zeros(ncells, dtype=np.int64)
        self._coef = np.zeros((ncells, 4 if grid.dim == 1 else 16))
        self._built = np.zeros(ncells, dtype=bool)
        self._lock = threading.Lock()

    @property
    def grid(self) -> GridSpec:
        return self.field_.grid

    def _ensure(self, cells: np.ndarray) -> None:
        need = np.unique(cells[~self._built[cells]])
        if need.size:
            coef = self._kern.reconstruct(self._stencils[need], *self._args)[0]
            self._coef[need] = coef
            self._built[need] = True
            self.weight_computations += int(need.size)

    def build_all(self) -> None:
        self._ensure(np.arange(len(self._built)))

    def coefficients(self, cell: int) -> np.ndarray:
        self._ensure(np.array([cell]))
        return self._coef[cell].copy()

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Values at in-domain points of shape (P, dim)."""
        loc = locate_cells(self.grid, points)
        cells = loc.flat
        P = len(cells)
        with self._lock:
            self.evaluations += P
            self.counts += np.bincount(cells, minlength=len(self.counts))
            if self.cfg.mode is ReconMode.BASELINE:
                self.weight_computations += P
            else:
                self._ensure(cells)
        if self.cfg.mode is ReconMode.BASELINE:
            st = self._stencils[cells]
            if self.grid.dim == 1:
                return self._kern.pointwise_1d(st, loc.local[:, 0], *self._args)
            return self._kern.pointwise_2d(st, loc.local[:, 0], loc.local[:, 1], *self._args)
        if self.grid.dim == 1:
            return self._kern.eval_poly_1d(self._coef, cells, loc.local[:, 0])
        return self._kern.eval_poly_2d(self._coef, cells, loc.local[:, 0], loc.local[:, 1])
