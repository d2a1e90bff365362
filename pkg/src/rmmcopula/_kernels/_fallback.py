"""Numpy-vectorised kernels; same contract as the compiled ``_ckernels`` module.

A generator is passed as its packed arrays ``(breaks, a, b, sign, zero_limit)``:
on piece ``i`` (``breaks[i] < t <= breaks[i+1]``) the value is
``polyval(a[i], t) + sign[i] * sqrt(max(polyval(b[i], t), 0))``; the value at 0 is 0.
"""

from __future__ import annotations

import numpy as np

BISECT_TOL = 1e-12
BISECT_MAXIT = 100


def _horner(coef: np.ndarray, idx: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for k in range(coef.shape[1] - 1, -1, -1):
        out = out * t + coef[idx, k]
    return out


def _horner_d(coef: np.ndarray, idx: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for k in range(coef.shape[1] - 1, 0, -1):
        out = out * t + k * coef[idx, k]
    return out


def _piece_index(breaks: np.ndarray, t: np.ndarray, right: bool) -> np.ndarray:
    n = breaks.size - 1
    side = "right" if right else "left"
    idx = np.searchsorted(breaks, t, side=side) - 1
    return np.clip(idx, 0, n - 1)


def eval_gen(breaks, a, b, sign, zero_limit, t):
    t = np.asarray(t, dtype=float)
    idx = _piece_index(breaks, t, right=False)
    val = _horner(a, idx, t)
    sg = sign[idx]
    if np.any(sg != 0):
        p = np.maximum(_horner(b, idx, t), 0.0)
        val = val + sg * np.sqrt(p)
    return np.where(t <= 0.0, 0.0, val)


def deriv_gen(breaks, a, b, sign, zero_limit, t, side):
    """One-sided derivative: side=+1 right, -1 left, 0 average of both."""
    t = np.asarray(t, dtype=float)
    if side == 0:
        return 0.5 * (deriv_gen(breaks, a, b, sign, zero_limit, t, 1)
                      + deriv_gen(breaks, a, b, sign, zero_limit, t, -1))
    idx = _piece_index(breaks, t, right=side > 0)
    d = _horner_d(a, idx, t)
    sg = sign[idx]
    if np.any(sg != 0):
        p = _horner(b, idx, t)
        dp = _horner_d(b, idx, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            rad = np.where(p > 0, dp / (2.0 * np.sqrt(np.where(p > 0, p, 1.0))),
                           np.sign(dp) * np.inf)
        rad = np.where((p <= 0) & (dp == 0), 0.0, rad)
        d = d + np.where(sg != 0, sg * rad, 0.0)
    return d


def boundary_v0(F, G, u):
    """sup{v in [0,1] : f(u) g(v) >= u v}, by bisection; 1 at u <= 0."""
    u = np.asarray(u, dtype=float)
    fu = eval_gen(*F, u)
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    active = (u > 0) & (fu > 0)
    for _ in range(BISECT_MAXIT):
        if not np.any(active & (hi - lo > BISECT_TOL)):
            break
        mid = 0.5 * (lo + hi)
        zero = fu * eval_gen(*G, mid) >= u * mid
        upd = active & (hi - lo > BISECT_TOL)
        lo = np.where(upd & zero, mid, lo)
        hi = np.where(upd & ~zero, mid, hi)
    return np.where(u <= 0, 1.0, lo)


def _nudge_off_breaks(breaks, u):
    inner = breaks[1:-1]
    if inner.size == 0:
        return u
    hit = np.isin(u, inner)
    return np.where(hit, np.nextafter(u, 1.0), u)


def sample_conditional(F, G, u, w):
    """Invert the conditional d.f. of V given U=u at level w.

    Returns ``(u_used, v, singular)``; ``u_used`` differs from ``u`` only where u sat
    exactly on a breakpoint of f and was moved one ulp to the right.
    """
    u = _nudge_off_breaks(F[0], np.asarray(u, dtype=float))
    w = np.asarray(w, dtype=float)
    v0 = boundary_v0(F, G, u)
    fp = deriv_gen(*F, u, 1)
    gv0 = eval_gen(*G, v0)
    jump = v0 - fp * gv0
    singular = (jump > 0) & (w <= jump)
    lo = v0.copy()
    hi = np.ones_like(u)
    active = ~singular
    for _ in range(BISECT_MAXIT):
        todo = active & (hi - lo > BISECT_TOL)
        if not np.any(todo):
            break
        mid = 0.5 * (lo + hi)
        above = mid - fp * eval_gen(*G, mid) >= w
        hi = np.where(todo & above, mid, hi)
        lo = np.where(todo & ~above, mid, lo)
    v = np.where(singular, v0, hi)
    return u, v, singular
