"""Error norms, convergence orders and the per-run metrics record."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from ..grid import Field
from ..problems import ExactSolution


def l1_norm(residuals, cell_volume: float) -> float:
    """Discrete L1 norm: ``cell_volume * sum |r_i|``."""
    return float(cell_volume * np.sum(np.abs(np.asarray(residuals, dtype=float))))


def l1_error(u: Field, exact: ExactSolution, T: float) -> float:
    ref = exact(T, u.grid.points())
    return l1_norm(u.values.ravel() - ref, float(np.prod(u.grid.dx)))


def _spacing(n) -> float:
    return 1.0 / (int(np.atleast_1d(n)[0]) - 1)


def convergence_order(errors: Sequence[float], ns: Sequence) -> list[float]:
    """Orders between consecutive grids; +inf when the finer error is zero."""
    if len(errors) != len(ns):
        raise ValueError("errors and ns must have the same length")
    h = [_spacing(n) for n in ns]
    if any(b >= a for a, b in zip(h, h[1:])):
        raise ValueError("grids must be strictly refining")
    out = []
    for k in range(1, len(errors)):
        e0, e1 = errors[k - 1], errors[k]
        if e0 < 0 or e1 < 0:
            raise ValueError("errors must be non-negative")
        if e1 == 0:
            out.append(math.inf)
        elif e0 == 0:
            out.append(-math.inf)
        else:
            out.append(math.log(e0 / e1) / math.log(h[k - 1] / h[k]))
    return out


@dataclass
class MetricsRow:
    test: int
    mode: str
    n: str  # "81" or "101x81"
    l1_error: float | None
    order: float | None
    wall_seconds: float
    weight_computations: int
    reconstruction_evaluations: int
    minimizer_evaluations: int

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]
