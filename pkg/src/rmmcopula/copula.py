"""RMM and maxmin copulas: evaluation, reflection, volumes, bounds and geometry.

An RMM copula is ``C_{f,g}(u, v) = max{0, uv - f(u) g(v)}``; its maxmin partner is
``C_{phi,psi}(u, v) = min{u, phi(u) v - phi(u) psi(v) + u psi(v)}`` and the two are
related by ``C_{f,g}(u, v) = u - C_{phi,psi}(u, 1 - v)``.

The *stand* is the closure of ``{f(u) g(v) < uv}``; below its boundary curve
``v = v0(u)`` the copula vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from . import _kernels
from .errors import MathDomainError
from .generator import (
    Generator,
    MaxminGenerators,
    TOL,
    f_star_at_zero,
    generators_from_maxmin,
    maxmin_from_generators,
    require_valid,
)

BISECT_TOL = 1e-12
BISECT_MAXIT = 100


class CopulaEvaluator(Protocol):
    """Any vectorised map [0,1]^2 -> [0,1]."""

    def __call__(self, u, v): ...


def _as_unit(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if np.any(~((a >= 0.0) & (a <= 1.0))):
        raise MathDomainError(f"{name} must lie in [0, 1]")
    return a


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class RmmCopula:
    """The copula ``max{0, uv - f(u) g(v)}``."""

    f: Generator
    g: Generator
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.checked:
            require_valid(self.f, "f")
            require_valid(self.g, "g")

    @classmethod
    def symmetric_from(cls, f: Generator) -> "RmmCopula":
        return cls(f, f)

    @classmethod
    def from_preset(cls, key: str) -> "RmmCopula":
        from .presets import get_preset

        p = get_preset(key)
        return cls(p.f, p.g, checked=False)

    @property
    def symmetric(self) -> bool:
        return self.f == self.g

    @property
    def is_product(self) -> bool:
        return self.f.is_zero or self.g.is_zero

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return _out(np.maximum(0.0, u * v - self.f(u) * self.g(v)))

    def star_form(self, u, v):
        """``uv max{0, 1 - f*(u) g*(v)}``; points with u or v = 0 use the direct form."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        pos = (u > 0) & (v > 0)
        us, vs = np.where(pos, u, 1.0), np.where(pos, v, 1.0)
        star = us * vs * np.maximum(0.0, 1.0 - (self.f(us) / us) * (self.g(vs) / vs))
        return _out(np.where(pos, star, self(u, v)))

    def boundary_v0(self, u):
        """sup{v : f(u) g(v) >= uv}: the lower edge of the stand above ``u``."""
        return _out(_kernels.boundary_v0(self.f.packed, self.g.packed, np.asarray(u, dtype=float)))


def eval_rmm(c: RmmCopula, u, v):
    return c(_as_unit(u, "u"), _as_unit(v, "v"))


@dataclass(frozen=True)
class MaxminCopula:
    """The copula ``min{u, phi(u) v - phi(u) psi(v) + u psi(v)}``."""

    mm: MaxminGenerators

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        ph = self.mm.phi_at(u)
        ps = self.mm.psi_at(v)
        return _out(np.minimum(u, ph * v - ph * ps + u * ps))

    @classmethod
    def from_preset(cls, key: str) -> "MaxminCopula":
        return reflect_rmm_to_maxmin(RmmCopula.from_preset(key))


def eval_maxmin(c: MaxminCopula, u, v):
    return c(_as_unit(u, "u"), _as_unit(v, "v"))


def reflect_rmm_to_maxmin(c: RmmCopula) -> MaxminCopula:
    """The maxmin copula with ``C_mm(u, v) = u - C(u, 1 - v)``."""
    return MaxminCopula(maxmin_from_generators(c.f, c.g))


def reflect_maxmin_to_rmm(c: MaxminCopula) -> RmmCopula:
    f, g = generators_from_maxmin(c.mm)
    return RmmCopula(f, g, checked=False)


def rectangle_volume(c: CopulaEvaluator, u1, u2, v1, v2):
    """C-volume of ``[u1, u2] x [v1, v2]``."""
    u1, u2, v1, v2 = (np.asarray(x, dtype=float) for x in (u1, u2, v1, v2))
    if np.any(u1 > u2) or np.any(v1 > v2):
        raise MathDomainError("rectangle corners must satisfy u1 <= u2 and v1 <= v2")
    return _out(c(u2, v2) - c(u2, v1) - c(u1, v2) + c(u1, v1))


def grid_values(c: CopulaEvaluator, us, vs) -> np.ndarray:
    """Matrix ``C(us[i], vs[j])``."""
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    return np.asarray(c(us[:, None], vs[None, :]), dtype=float)


@dataclass(frozen=True)
class BoundsReport:
    passed: bool
    max_violation: float
    worst_point: tuple[float, float] | None
    max_gap_to_upper: float  # max of uv - C
    max_gap_to_lower: float  # max of C - W


def frechet_bounds_check(c: CopulaEvaluator, grid_n: int = 201, slack: float = TOL) -> BoundsReport:
    """Check ``max{0, u+v-1} <= C(u, v) <= uv`` on a ``grid_n`` x ``grid_n`` grid."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    t = np.linspace(0.0, 1.0, grid_n)
    U, V = np.meshgrid(t, t, indexing="ij")
    C = grid_values(c, t, t)
    lower = np.maximum(0.0, U + V - 1.0)
    upper = U * V
    viol = np.maximum(lower - C, C - upper)
    k = int(np.argmax(viol))
    worst = float(viol.flat[k])
    passed = worst <= slack
    return BoundsReport(passed, max(worst, 0.0),
                        None if passed else (float(U.flat[k]), float(V.flat[k])),
                        float(np.max(upper - C)), float(np.max(C - lower)))


# -- geometry -----------------------------------------------------------------------

@dataclass(frozen=True)
class StandGeometry:
    """Samples ``(u, v0(u))`` of the zero-level curve inside the open unit square."""

    boundary: np.ndarray  # shape (k, 2)
    u_range: tuple[float, float] | None

    @property
    def empty(self) -> bool:
        return self.boundary.shape[0] == 0


def sample_grid(breaks: list[float], n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Chebyshev-Lobatto nodes on each interval between breakpoints, breakpoints included."""
    knots = sorted({lo, hi, *[b for b in breaks if lo < b < hi]})
    per = max(3, n // max(1, len(knots) - 1))
    k = np.arange(per)
    cheb = 0.5 * (1.0 - np.cos(np.pi * k / (per - 1)))
    pts = [a + (b - a) * cheb for a, b in zip(knots[:-1], knots[1:])]
    return np.unique(np.concatenate(pts))


def _bisect_last_true(pred: Callable[[float], bool], lo: float, hi: float) -> float:
    """sup of the initial segment of [lo, hi] on which ``pred`` holds (pred(lo) assumed)."""
    for _ in range(BISECT_MAXIT):
        if hi - lo <= BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def v0_at_zero(c: RmmCopula) -> float:
    """Right limit of v0(u) as u -> 0: sup{v : f*(0) g*(v) >= 1}."""
    fs0 = f_star_at_zero(c.f)
    if fs0 == 0.0:
        return 0.0
    if math.isinf(fs0):
        # {g > 0} is an interval [0, s) because g* is nonincreasing
        if c.g(1.0 - 1e-9) > 0.0:
            return 1.0
        return _bisect_last_true(lambda v: v == 0.0 or c.g(v) > 0.0, 0.0, 1.0)
    return _bisect_last_true(lambda v: v == 0.0 or fs0 * c.g(v) >= v, 0.0, 1.0)


def boundary_curve(c: RmmCopula, n_samples: int = 201) -> StandGeometry:
    """Zero-level curve ``v = v0(u)`` for u in [0, 1), restricted to 0 < v0 < 1."""
    if c.is_product:
        return StandGeometry(np.empty((0, 2)), None)
    u = sample_grid(c.f.breakpoints + c.g.breakpoints, n_samples)
    u = u[(u > 0.0) & (u < 1.0)]
    v = np.asarray(c.boundary_v0(u))
    pts = [(0.0, v0_at_zero(c))] + list(zip(u.tolist(), v.tolist()))
    arr = np.array([p for p in pts if 0.0 < p[1] < 1.0], dtype=float).reshape(-1, 2)
    if arr.shape[0] == 0:
        return StandGeometry(arr, None)
    return StandGeometry(arr, (float(arr[0, 0]), float(arr[-1, 0])))


def level_curve(c: CopulaEvaluator, t: float, n_samples: int = 201) -> np.ndarray:
    """Points ``(u, v)`` with ``C(u, v) = t``; one per sampled u in [t, 1]."""
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise MathDomainError("level t must lie in (0, 1]")
    if t == 1.0:
        return np.array([[1.0, 1.0]])
    u = np.linspace(t, 1.0, n_samples)
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(BISECT_MAXIT):
        if np.all(hi - lo <= BISECT_TOL):
            break
        mid = 0.5 * (lo + hi)
        above = np.asarray(c(u, mid)) >= t
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return np.column_stack([u, hi])


def maxmin_singular_curve(c: MaxminCopula, n_samples: int = 201) -> np.ndarray:
    """Image of the reflected RMM boundary under ``(u, v) -> (u, 1 - v)``."""
    geo = boundary_curve(reflect_maxmin_to_rmm(c), n_samples)
    if geo.empty:
        return np.empty((0, 2))
    return np.column_stack([geo.boundary[:, 0], 1.0 - geo.boundary[:, 1]])


# -- partial derivatives --------------------------------------------------------------

def _check_derivative_point(gen: Generator, x: np.ndarray, name: str) -> None:
    if gen.zero_limit > 0 and np.any(x == 0.0):
        raise MathDomainError(f"derivative in {name} undefined at 0: generator jumps there")


def partial_derivative_u(c: RmmCopula, u, v):
    """dC/du: 0 where C = 0, else ``v - f'(u) g(v)`` (right derivative at breakpoints)."""
    u, v = _as_unit(u, "u"), _as_unit(v, "v")
    _check_derivative_point(c.f, u, "u")
    val = v - c.f.derivative(u, 1) * c.g(v)
    return _out(np.where(np.asarray(c(u, v)) > 0.0, val, 0.0))


def partial_derivative_v(c: RmmCopula, u, v):
    """dC/dv: 0 where C = 0, else ``u - f(u) g'(v)``."""
    u, v = _as_unit(u, "u"), _as_unit(v, "v")
    _check_derivative_point(c.g, v, "v")
    val = u - c.f(u) * c.g.derivative(v, 1)
    return _out(np.where(np.asarray(c(u, v)) > 0.0, val, 0.0))
