"""Exact quadratic forms of the oscillation indicators.

Everything here is computed once with rational arithmetic and cached.  The
coefficient-space matrix ``M`` gives ``I[P] = z^T M z / dx**2`` for a
polynomial with coefficients ``z`` in the local monomial basis; the
data-space matrices ``A_k = W_k^T M W_k`` give the same number directly
from the stencil values, ``W_k`` being the (zero-padded) inverse
interpolation matrix of candidate ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

import numpy as np
import sympy as sp

from .._kernels._layout import BASIS_2D

BIQUADRATIC = tuple(i for i, (a, b) in enumerate(BASIS_2D) if a <= 2 and b <= 2)

# stencil nodes in local coordinates of the reconstruction cell
NODES_1D = (-1, 0, 1, 2)
NODES_2D = tuple((kx, ky) for ky in (-1, 0, 1, 2) for kx in (-1, 0, 1, 2))

CANDIDATES_1D = ("Q", "L", "R")
CANDIDATES_2D = ("opt", "ne", "se", "sw", "nw")

# lower-left node offset of each 3x3 sub-stencil
_SUBSTENCIL_ORIGIN = {"ne": (0, 0), "nw": (-1, 0), "sw": (-1, -1), "se": (0, -1)}
_SUBSTENCIL_1D = {"Q": (0, 1, 2, 3), "L": (0, 1, 2), "R": (1, 2, 3)}

# coefficients of the global smoothness indicator tau = |sum c_k I_k|
TAU_COEFFS_1D = (2, -1, -1)
TAU_COEFFS_2D = (4, -1, -1, -1, -1)


def _integral_unit(a: int) -> sp.Rational:
    return sp.Rational(1, a + 1)


def _deriv_coeff(power: int, order: int) -> int:
    """d^order/dx^order x^power = c * x^(power - order); returns c (0 if vanishing)."""
    if order > power:
        return 0
    c = 1
    for k in range(order):
        c *= power - k
    return c


@lru_cache(maxsize=None)
def coefficient_matrix(dim: int, scale: str = "side") -> sp.Matrix:
    """Exact ``M`` for the basis of dimension ``dim``.

    ``scale`` selects the length used for the derivative weights in 2D:
    ``"side"`` weights every derivative order |a| >= 2 by 1, ``"diagonal"``
    by ``2**(|a|-2)`` (the cell diameter of a square cell).  In 1D both
    coincide.
    """
    if dim == 1:
        n = 4
        M = sp.zeros(n, n)
        for i, j in product(range(n), repeat=2):
            s = sp.Integer(0)
            for order in range(2, 4):
                ci, cj = _deriv_coeff(i, order), _deriv_coeff(j, order)
                if ci and cj:
                    s += ci * cj * _integral_unit(i + j - 2 * order)
            M[i, j] = s
        return M
    if scale not in ("side", "diagonal"):
        raise ValueError(f"unknown scale {scale!r}")
    factor = 1 if scale == "side" else 2
    M = sp.zeros(16, 16)
    for (i, (ai, bi)), (j, (aj, bj)) in product(enumerate(BASIS_2D), repeat=2):
        s = sp.Integer(0)
        for ox, oy in product(range(4), repeat=2):
            if ox + oy < 2:
                continue
            cx = _deriv_coeff(ai, ox) * _deriv_coeff(aj, ox)
            cy = _deriv_coeff(bi, oy) * _deriv_coeff(bj, oy)
            if cx and cy:
                s += (
                    sp.Integer(factor) ** (ox + oy - 2)
                    * cx
                    * cy
                    * _integral_unit(ai + aj - 2 * ox)
                    * _integral_unit(bi + bj - 2 * oy)
                )
        M[i, j] = s
    return M


@lru_cache(maxsize=None)
def inverse_interpolation(dim: int) -> dict[str, sp.Matrix]:
    """Exact ``W_k`` (ncoef x nstencil) mapping stencil data to coefficients."""
    out = {}
    if dim == 1:
        for name, idx in _SUBSTENCIL_1D.items():
            deg = len(idx)
            V = sp.Matrix([[sp.Integer(NODES_1D[k]) ** p for p in range(deg)] for k in idx])
            Vi = V.inv()
            W = sp.zeros(4, 4)
            for r in range(deg):
                for c, k in enumerate(idx):
                    W[r, k] = Vi[r, c]
            out[name] = W
        return out
    V = sp.Matrix([[sp.Integer(px) ** a * sp.Integer(py) ** b for a, b in BASIS_2D] for px, py in NODES_2D])
    out["opt"] = V.inv()
    mono = [BASIS_2D[i] for i in BIQUADRATIC]
    for name in CANDIDATES_2D[1:]:
        ox, oy = _SUBSTENCIL_ORIGIN[name]
        sub = [(ox + i, oy + j) for j in range(3) for i in range(3)]
        Vk = sp.Matrix([[sp.Integer(px) ** a * sp.Integer(py) ** b for a, b in mono] for px, py in sub])
        Vi = Vk.inv()
        W = sp.zeros(16, 16)
        cols = [NODES_2D.index(p) for p in sub]
        for r, row in enumerate(BIQUADRATIC):
            for c, col in enumerate(cols):
                W[row, col] = Vi[r, c]
        out[name] = W
    return out


@dataclass(frozen=True)
class IndicatorForms:
    """Exact indicator matrices for one dimension plus float copies.

    ``A`` maps candidate names (``Q, L, R`` in 1D; ``opt, ne, se, sw, nw``
    in 2D) to data-space matrices; ``W`` to inverse interpolation matrices.
    """

    dim: int
    M: sp.Matrix
    A: dict
    W: dict

    @property
    def names(self) -> tuple[str, ...]:
        return CANDIDATES_1D if self.dim == 1 else CANDIDATES_2D

    @cached_property
    def M_float(self) -> np.ndarray:
        return _readonly(_to_float(self.M))

    @cached_property
    def _A_float(self) -> dict:
        return {k: _readonly(_to_float(v)) for k, v in self.A.items()}

    @cached_property
    def _W_stack(self) -> np.ndarray:
        return _readonly(np.stack([_to_float(self.W[k]) for k in self.names]))

    def A_float(self, name: str) -> np.ndarray:
        return self._A_float[name]

    def W_stack(self) -> np.ndarray:
        """(ncand, ncoef, nstencil) float stack in candidate order."""
        return self._W_stack

    def dump(self) -> str:
        """Plain-text listing of all matrices as rationals."""
        lines = [f"# oscillation indicator forms, dimension {self.dim}", "M ="]
        lines += [_row_text(self.M, r) for r in range(self.M.rows)]
        for name in self.names:
            lines.append(f"A_{name} =")
            A = self.A[name]
            lines += [_row_text(A, r) for r in range(A.rows)]
        return "\n".join(lines) + "\n"


def _row_text(m: sp.Matrix, r: int) -> str:
    return "  " + " ".join(str(m[r, c]) for c in range(m.cols))


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _to_float(m: sp.Matrix) -> np.ndarray:
    return np.array([[float(v) for v in m.row(r)] for r in range(m.rows)], dtype=float)


@lru_cache(maxsize=None)
def derive_indicator_forms(dim: int) -> IndicatorForms:
    if dim not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    M = coefficient_matrix(dim)
    W = inverse_interpolation(dim)
    names = CANDIDATES_1D if dim == 1 else CANDIDATES_2D
    A = {k: W[k].T * M * W[k] for k in names}
    return IndicatorForms(dim, M, A, W)
