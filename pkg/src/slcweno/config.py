"""Run configuration shared by the solver and the harness."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any

from .reconstruction.core import D_BOUND_1D, ReconMode

MODES = tuple(m.value for m in ReconMode)


@dataclass(frozen=True)
class RunConfig:
    """One solver run.

    ``n`` is the node count per axis (an int, or a pair for 2D).  ``None``
    in the override fields means the problem default.  ``d`` is the weight
    of each non-optimal candidate; the optimal one gets the remainder.
    """

    test: int
    n: int | tuple[int, ...]
    mode: str = "cweno"
    dt_ratio: float | None = None
    T: float | None = None
    eps: float | None = None
    l: float = 2.0
    d: float | None = None
    out: str | None = None
    snapshots: bool = False
    threads: int = 1
    coarse_pts: int | None = None
    backend: str | None = None

    def __post_init__(self):
        n = self.n
        if isinstance(n, (list, tuple)):
            n = tuple(int(v) for v in n)
            object.__setattr__(self, "n", n)
            if any(v < 5 for v in n):
                raise ValueError("need n >= 5 per axis")
        elif int(n) < 5:
            raise ValueError("need n >= 5 per axis")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.dt_ratio is not None and not (0 < self.dt_ratio <= 100):
            raise ValueError("dt_ratio must lie in (0, 100]")
        if self.T is not None and self.T < 0:
            raise ValueError("T must be non-negative")
        if self.eps is not None and self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.l < 1:
            raise ValueError("l must be >= 1")
        if self.d is not None and not (0 < self.d <= D_BOUND_1D):
            raise ValueError(f"side weight d must lie in (0, {D_BOUND_1D}]")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.coarse_pts is not None and self.coarse_pts < 3:
            raise ValueError("coarse_pts must be >= 3")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
