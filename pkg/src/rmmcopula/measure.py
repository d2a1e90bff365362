"""Lebesgue decomposition of RMM copula measures.

On the open stand the copula has density ``1 - f'(u) g'(v)``; the rest of the mass
sits on the zero-level curve ``v = v0(u)``. Conditioning on ``U = u`` the d.f. of
``V`` is 0 below ``v0(u)``, jumps by ``jump(u) = v0(u) - f'(u) g(v0(u))`` there and
continues as ``v - f'(u) g(v)``; integrating the jump over u gives the singular mass.

Quadrature is tensor Gauss-Legendre of order 32 on cells bounded by generator
breakpoints and the curve, refined adaptively until the halving estimate meets
the per-cell budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.polynomial.legendre import leggauss

from . import _poly as poly
from ._numbers import fmt
from .copula import RmmCopula, boundary_curve
from .errors import MathDomainError, NumericalNonconvergenceError
from .generator import TOL, Generator, f_star_at_zero

GL_ORDER = 32
TARGET = 1e-8
CROSS_CHECK = 1e-6
MAX_DEPTH = 40

_X, _W = leggauss(GL_ORDER)


def _on_breakpoint(gen: Generator, x: np.ndarray) -> np.ndarray:
    bp = np.asarray(gen.breakpoints, dtype=float)
    if bp.size == 0:
        return np.zeros(np.shape(x), dtype=bool)
    return np.isin(x, bp)


def density(c: RmmCopula, u, v, return_flag: bool = False):
    """``1 - f'(u) g'(v)`` on the stand, 0 on the open zero set.

    Points on the boundary curve or on a breakpoint line use right derivatives;
    with ``return_flag=True`` a boolean array marking such points is returned too.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
        raise MathDomainError("density arguments must lie in [0, 1]")
    gap = u * v - c.f(u) * c.g(v)
    val = np.where(gap >= -TOL, 1.0 - c.f.derivative(u, 1) * c.g.derivative(v, 1), 0.0)
    if not return_flag:
        return float(val) if np.ndim(val) == 0 else val
    flag = (np.abs(gap) <= TOL) | _on_breakpoint(c.f, u) | _on_breakpoint(c.g, v)
    if np.ndim(val) == 0:
        return float(val), bool(flag)
    return val, flag


def jump(c: RmmCopula, u, side: int = 0):
    """Atom of the conditional d.f. at ``v0(u)``; ``side=0`` averages one-sided f'."""
    u = np.asarray(u, dtype=float)
    v0 = np.asarray(c.boundary_v0(u))
    out = np.where(v0 > 0.0, v0 - c.f.derivative(u, side) * c.g(v0), 0.0)
    return float(out) if np.ndim(out) == 0 else out


# -- quadrature ---------------------------------------------------------------------

def _gl_vec(fun, a: float, b: float) -> np.ndarray:
    """Integrate a vector-valued ``fun`` (returning shape (k, n) for n nodes)."""
    h = 0.5 * (b - a)
    x = a + h * (_X + 1.0)
    return h * (np.atleast_2d(fun(x)) @ _W)


def adaptive_gl(fun, a: float, b: float, tol: float = 1e-11) -> tuple[np.ndarray, float]:
    """Adaptive Gauss-Legendre on [a, b]; returns (integral, estimated error)."""
    total = np.zeros(np.atleast_2d(fun(np.array([0.5 * (a + b)]))).shape[0])
    err = 0.0
    stack = [(a, b, _gl_vec(fun, a, b), tol, 0)]
    while stack:
        lo, hi, whole, t, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = _gl_vec(fun, lo, mid), _gl_vec(fun, mid, hi)
        e = float(np.max(np.abs(whole - left - right)))
        if e <= t or depth >= MAX_DEPTH or hi - lo < 1e-14:
            total += left + right
            err += e
        else:
            stack.append((lo, mid, left, 0.5 * t, depth + 1))
            stack.append((mid, hi, right, 0.5 * t, depth + 1))
    return total, err


# -- cell decomposition ------------------------------------------------------------

def _piece_roots(gen: Generator, num_fn) -> list[float]:
    """Roots, inside each piece of ``gen``, of the polynomial ``num_fn(piece)``."""
    out = []
    for p in gen.pieces:
        c = num_fn(p)
        if c is None:
            continue
        out.extend(poly.real_roots_in(c, float(p.lo), float(p.hi)))
    return out


def u_knots(c: RmmCopula) -> list[float]:
    """u-values where the cell structure of the stand changes."""
    f, g = c.f, c.g
    knots = {0.0, 1.0, *f.breakpoints}

    def level(b: float, gb: float):
        # f(u) g(b) = u b, squared out for sqrt pieces
        def num(p):
            if p.kind == "poly":
                return P.polysub(gb * poly.to_float(p.coeffs), [0.0, b])
            if p.kind == "sqrt":
                return P.polysub(gb * gb * poly.to_float(p.rad), [0.0, 0.0, b * b])
            return None
        return num

    for b in g.breakpoints:
        knots.update(_piece_roots(f, level(b, c.g(b))))
    gs0 = f_star_at_zero(g)
    if math.isinf(gs0):
        knots.update(_piece_roots(f, lambda p: poly.to_float(p.coeffs) if p.kind == "poly"
                                  else poly.to_float(p.rad) if p.kind == "sqrt" else None))
    elif gs0 > 0.0:
        # v0 leaves the axis v = 0 where f(u) g*(0) = u
        knots.update(_piece_roots(f, lambda p: P.polysub(gs0 * poly.to_float(p.coeffs), [0.0, 1.0])
                                  if p.kind == "poly" else
                                  P.polysub(gs0 * gs0 * poly.to_float(p.rad), [0.0, 0.0, 1.0])
                                  if p.kind == "sqrt" else None))
    return sorted(k for k in knots if 0.0 <= k <= 1.0)


def _stand_integrand(c: RmmCopula, v_breaks: np.ndarray):
    """u -> rows (ac inner integral, v0(u), jump(u)) at GL nodes."""
    segs = np.concatenate([[0.0], v_breaks, [1.0]])

    def fun(u: np.ndarray) -> np.ndarray:
        v0 = np.asarray(c.boundary_v0(u), dtype=float)
        fp = c.f.derivative(u, 1)
        inner = np.zeros_like(u)
        for s0, s1 in zip(segs[:-1], segs[1:]):
            lo = np.maximum(v0, s0)
            h = 0.5 * np.maximum(s1 - lo, 0.0)
            vv = lo[:, None] + h[:, None] * (_X[None, :] + 1.0)
            gp = c.g.derivative(vv, 1)
            inner += h * ((1.0 - fp[:, None] * gp) @ _W)
        jmp = np.where(v0 > 0.0, v0 - fp * c.g(v0), 0.0)
        return np.vstack([inner, v0, jmp])

    return fun


@dataclass(frozen=True)
class _Integrals:
    ac: float
    zero_area: float
    singular: float
    error: float


def _integrate_stand(c: RmmCopula, lo: float = 0.0, hi: float = 1.0,
                     target: float = TARGET) -> _Integrals:
    knots = [k for k in u_knots(c) if lo < k < hi]
    edges = [lo, *knots, hi]
    fun = _stand_integrand(c, np.asarray(c.g.breakpoints, dtype=float))
    total = np.zeros(3)
    err = 0.0
    cell_tol = min(1e-11, target / (10 * len(edges)))
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0.0:
            continue
        val, e = adaptive_gl(fun, a, b, cell_tol)
        total += val
        err += e
    if err > target:
        raise NumericalNonconvergenceError(
            f"quadrature error estimate {err:.3g} exceeds target {target:.3g}", achieved=err)
    return _Integrals(float(total[0]), float(total[1]), float(total[2]), err)


def ac_mass(c: RmmCopula) -> float:
    """Mass of the absolutely continuous part: integral of the density over the stand."""
    return _integrate_stand(c).ac


def singular_mass(c: RmmCopula) -> float:
    """``1 - ac_mass``, cross-checked against the integral of the conditional jump."""
    r = _integrate_stand(c)
    s = 1.0 - r.ac
    if abs(s - r.singular) > CROSS_CHECK:
        raise NumericalNonconvergenceError(
            f"singular mass {s:.12g} disagrees with jump integral {r.singular:.12g}",
            achieved=abs(s - r.singular))
    return max(s, 0.0)


def arc_mass(c: RmmCopula, u_lo: float, u_hi: float) -> float:
    """Singular mass carried by the part of the curve above ``u in [u_lo, u_hi]``."""
    if not 0.0 <= u_lo <= u_hi <= 1.0:
        raise MathDomainError("need 0 <= u_lo <= u_hi <= 1")
    if u_lo == u_hi:
        return 0.0
    return _integrate_stand(c, u_lo, u_hi).singular


def singular_profile(c: RmmCopula, n_samples: int = 201) -> np.ndarray:
    """Rows ``(u, jump(u))`` along the sampled boundary curve (empty without one)."""
    geo = boundary_curve(c, n_samples)
    if geo.empty:
        return np.empty((0, 2))
    u = geo.boundary[:, 0]
    inner = u > 0.0
    j = np.empty_like(u)
    j[inner] = jump(c, u[inner], side=0)
    if np.any(~inner):
        # u -> 0+: limit of v0 - f'(u) g(v0)
        eps = 1e-9
        j[~inner] = jump(c, np.array([eps]), side=1)[0]
    return np.column_stack([u, j])


def integrate_density(c: RmmCopula, u1: float, u2: float, v1: float, v2: float) -> float:
    """Tensor GL integral of the density over a rectangle, split at breakpoints."""
    ue = sorted({u1, u2, *[b for b in c.f.breakpoints if u1 < b < u2]})
    ve = sorted({v1, v2, *[b for b in c.g.breakpoints if v1 < b < v2]})
    total = 0.0
    for a, b in zip(ue[:-1], ue[1:]):
        hu = 0.5 * (b - a)
        uu = a + hu * (_X + 1.0)
        for s, t in zip(ve[:-1], ve[1:]):
            hv = 0.5 * (t - s)
            vv = s + hv * (_X + 1.0)
            d = density(c, uu[:, None], vv[None, :])
            total += hu * hv * float(_W @ d @ _W)
    return total


@dataclass(frozen=True)
class MassDecomposition:
    ac_mass: float
    singular_mass: float
    zero_set_area: float
    boundary_mass_profile: np.ndarray = field(repr=False)
    error_estimate: float = 0.0

    def to_dict(self) -> dict:
        return {"ac_mass": float(fmt(self.ac_mass)),
                "singular_mass": float(fmt(self.singular_mass)),
                "zero_set_area": float(fmt(self.zero_set_area)),
                "profile": [[float(fmt(u)), float(fmt(j))] for u, j in self.boundary_mass_profile]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def mass_decomposition(c: RmmCopula, n_profile: int = 201) -> MassDecomposition:
    r = _integrate_stand(c)
    s = 1.0 - r.ac
    if abs(s - r.singular) > CROSS_CHECK:
        raise NumericalNonconvergenceError(
            f"singular mass {s:.12g} disagrees with jump integral {r.singular:.12g}",
            achieved=abs(s - r.singular))
    clip = lambda x: min(max(x, 0.0), 1.0)  # noqa: E731
    return MassDecomposition(clip(r.ac), clip(s), clip(r.zero_area),
                             singular_profile(c, n_profile), r.error)
