"""Explicit Runge-Kutta tracing of characteristic feet and the matching cost quadrature.

Everything is vectorised over a batch of P starting points.  Callbacks take
``(t, x, a)`` with ``x`` of shape (P, dim) and ``a`` of shape (P, m) and
return (P, dim) for the dynamics and (P,) for the running cost.  Stage
``k`` is evaluated at time ``t_next - c_k * dt``: the trajectory is followed
backwards from ``t_next`` over one step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Dynamics = Callable[[float, np.ndarray, np.ndarray], np.ndarray]
RunningCost = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


class DynamicsBlewUp(FloatingPointError):
    def __init__(self, t: float, X: np.ndarray, a: np.ndarray):
        super().__init__(f"dynamics blew up at t={t}, X={X}, a={a}")
        self.t, self.X, self.a = t, X, a


class PairingError(ValueError):
    """Quadrature rule does not match the tableau."""


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    A: tuple[tuple[float, ...], ...]
    b: tuple[float, ...]
    c: tuple[float, ...]

    def __post_init__(self):
        nu = len(self.b)
        if len(self.c) != nu or len(self.A) != nu or any(len(r) != nu for r in self.A):
            raise ValueError("inconsistent tableau sizes")
        if any(self.A[i][j] != 0 for i in range(nu) for j in range(i, nu)):
            raise ValueError("tableau must be explicit")
        if abs(sum(self.b) - 1.0) > 1e-14 or self.c[0] != 0:
            raise ValueError("need sum(b) = 1 and c_1 = 0")

    @property
    def nu(self) -> int:
        return len(self.b)

    @classmethod
    def euler(cls) -> "ButcherTableau":
        return cls("euler", ((0.0,),), (1.0,), (0.0,))

    @classmethod
    def heun(cls) -> "ButcherTableau":
        return cls("heun", ((0.0, 0.0), (1.0, 0.0)), (0.5, 0.5), (0.0, 1.0))

    @classmethod
    def rk3(cls) -> "ButcherTableau":
        return cls(
            "rk3",
            ((0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (-1.0, 2.0, 0.0)),
            (1 / 6, 2 / 3, 1 / 6),
            (0.0, 0.5, 1.0),
        )

    @classmethod
    def by_name(cls, name: str) -> "ButcherTableau":
        try:
            return {"euler": cls.euler, "rk1": cls.euler, "heun": cls.heun, "rk2": cls.heun, "rk3": cls.rk3}[name.lower()]()
        except KeyError:
            raise ValueError(f"unknown tableau {name!r}") from None


class QuadKind(enum.Enum):
    RECTANGLE = "rectangle"
    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"


_PAIRING = {QuadKind.RECTANGLE: "euler", QuadKind.TRAPEZOID: "heun", QuadKind.SIMPSON: "rk3"}


@dataclass(frozen=True)
class QuadratureRule:
    kind: QuadKind
    nodes: tuple[float, ...]
    weights: tuple[float, ...]

    @classmethod
    def of(cls, kind: QuadKind | str) -> "QuadratureRule":
        kind = QuadKind(kind)
        if kind is QuadKind.RECTANGLE:
            return cls(kind, (0.0,), (1.0,))
        if kind is QuadKind.TRAPEZOID:
            return cls(kind, (0.0, 1.0), (0.5, 0.5))
        return cls(kind, (0.0, 0.5, 1.0), (1 / 6, 2 / 3, 1 / 6))

    @classmethod
    def for_tableau(cls, tab: ButcherTableau) -> "QuadratureRule":
        for kind, name in _PAIRING.items():
            if name == tab.name:
                return cls.of(kind)
        raise PairingError(f"no quadrature rule pairs with tableau {tab.name!r}")

    def check_pairing(self, tab: ButcherTableau) -> None:
        if _PAIRING[self.kind] != tab.name or self.nodes != tab.c:
            raise PairingError(f"{self.kind.value} rule cannot be used with the {tab.name} tableau")


@dataclass
class FootResult:
    foot: np.ndarray  # (P, dim)
    X: list[np.ndarray]  # stage points, each (P, dim)
    K: list[np.ndarray]  # stage slopes, each (P, dim)


def _controls(a, nu: int, P: int) -> list[np.ndarray]:
    if len(a) != nu:
        raise ValueError(f"need {nu} stage controls, got {len(a)}")
    return [np.asarray(ak, dtype=float).reshape(P, -1) for ak in a]


def trace(tab: ButcherTableau, f_D: Dynamics, x: np.ndarray, t_next: float, dt: float, a: Sequence) -> FootResult:
    """Feet of a batch of starting points ``x`` (P, dim); ``a`` holds one (P, m) array per stage."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.asarray(x, dtype=float)
    P = x.shape[0]
    a = _controls(a, tab.nu, P)
    X: list[np.ndarray] = []
    K: list[np.ndarray] = []
    for k in range(tab.nu):
        Xk = x
        if k:
            acc = np.zeros_like(x)
            for j in range(k):
                if tab.A[k][j] != 0:
                    acc = acc + tab.A[k][j] * K[j]
            Xk = x + dt * acc
        tk = t_next - tab.c[k] * dt
        Kk = np.asarray(f_D(tk, Xk, a[k]), dtype=float).reshape(x.shape)
        if not np.all(np.isfinite(Kk)):
            bad = np.flatnonzero(~np.all(np.isfinite(Kk), axis=1))[0]
            raise DynamicsBlewUp(tk, Xk[bad], a[k][bad])
        X.append(Xk)
        K.append(Kk)
    acc = np.zeros_like(x)
    for k in range(tab.nu):
        acc = acc + tab.b[k] * K[k]
    return FootResult(x + dt * acc, X, K)


def trace_foot(tab: ButcherTableau, f_D: Dynamics, x, t_next: float, dt: float, a: Sequence) -> FootResult:
    """Single-point form of :func:`trace`; stage controls may be scalars or tuples."""
    x = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    stages = [np.atleast_1d(np.asarray(ak, dtype=float))[None, :] for ak in a]
    fr = trace(tab, f_D, x, t_next, dt, stages)
    return FootResult(fr.foot[0], [s[0] for s in fr.X], [s[0] for s in fr.K])


def cost_integral(rule: QuadratureRule, f_C: RunningCost, fr: FootResult, a: Sequence, t_next: float, dt: float) -> np.ndarray:
    """Running cost over one step: ``dt * sum_k w_k f_C(t_next - c_k dt, X_k, a_k)``."""
    if len(rule.weights) != len(fr.X):
        raise PairingError("quadrature rule and tableau have different stage counts")
    single = fr.X[0].ndim == 1
    X = [np.atleast_2d(s) for s in fr.X]
    P = X[0].shape[0]
    a = _controls(a, len(X), P)
    acc = np.zeros(P)
    for k, (node, w) in enumerate(zip(rule.nodes, rule.weights)):
        acc = acc + w * np.asarray(f_C(t_next - node * dt, X[k], a[k]), dtype=float).reshape(P)
    out = dt * acc
    return out[0] if single else out
