"""Low-degree polynomial arithmetic and real-root isolation on intervals.

Coefficients are ascending (``c[k]`` multiplies ``t**k``). Exact arithmetic works
on tuples of Fractions; the numerical routines take float sequences.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

FracPoly = tuple[Fraction, ...]

_ZERO = Fraction(0)


# -- exact arithmetic on Fraction coefficient tuples ---------------------------------

def trim(c: Sequence[Fraction]) -> FracPoly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (_ZERO,)


def padd(a: Sequence[Fraction], b: Sequence[Fraction]) -> FracPoly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else _ZERO) + (b[i] if i < len(b) else _ZERO)
                 for i in range(n)])


def pneg(a: Sequence[Fraction]) -> FracPoly:
    return trim([-x for x in a])


def psub(a: Sequence[Fraction], b: Sequence[Fraction]) -> FracPoly:
    return padd(a, pneg(b))


def pmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> FracPoly:
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def pscale(a: Sequence[Fraction], s: Fraction) -> FracPoly:
    return trim([x * s for x in a])


def pder(a: Sequence[Fraction]) -> FracPoly:
    return trim([a[k] * k for k in range(1, len(a))])


def reflect(a: Sequence[Fraction]) -> FracPoly:
    """Coefficients of ``t -> a(1 - t)``."""
    out = [_ZERO] * len(a)
    for k, ak in enumerate(a):
        if ak == 0:
            continue
        # (1 - t)^k = sum_j C(k, j) (-t)^j
        for j in range(k + 1):
            out[j] += ak * comb(k, j) * (-1) ** j
    return trim(out)


def peval_exact(a: Sequence[Fraction], t: Fraction) -> Fraction:
    acc = _ZERO
    for x in reversed(a):
        acc = acc * t + x
    return acc


def is_zero(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


def exact_sqrt_poly(p: Sequence[Fraction]) -> FracPoly | None:
    """Return q with q*q == p exactly (leading coefficient > 0), or None."""
    p = trim(p)
    if is_zero(p):
        return (_ZERO,)
    deg = len(p) - 1
    if deg % 2:
        return None
    m = deg // 2
    lead = _frac_sqrt(p[-1])
    if lead is None:
        return None
    q = [_ZERO] * (m + 1)
    q[m] = lead
    # match coefficients from the top down: p[m+k] = sum_{i+j=m+k} q_i q_j
    for k in range(m - 1, -1, -1):
        s = p[m + k] - sum(q[i] * q[m + k - i] for i in range(k + 1, m + 1)
                           if 0 <= m + k - i <= m and m + k - i != k)
        q[k] = s / (2 * lead)
    cand = trim(q)
    return cand if pmul(cand, cand) == p else None


def _frac_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    from math import isqrt

    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# -- numerics ------------------------------------------------------------------------

def to_float(a: Sequence[Fraction]) -> np.ndarray:
    return np.array([float(x) for x in a], dtype=float)


def real_roots_in(c: Sequence[float], lo: float, hi: float, *, open_interval: bool = True,
                  eps: float = 1e-13) -> list[float]:
    """Real roots of ``c`` inside (lo, hi), sorted. The zero polynomial has none."""
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    if c.size <= 1:
        return []
    raw = P.polyroots(c)
    scale = max(1.0, float(np.max(np.abs(c))))
    dc = P.polyder(c)
    out = []
    for r in raw:
        if abs(r.imag) > 1e-7 * (1.0 + abs(r.real)):
            continue
        x = float(r.real)
        for _ in range(3):  # Newton polish
            d = P.polyval(x, dc)
            if d == 0:
                break
            step = P.polyval(x, c) / d
            x -= step
            if abs(step) < 1e-17:
                break
        if abs(P.polyval(x, c)) > 1e-9 * scale:
            continue
        if open_interval:
            if lo + eps < x < hi - eps:
                out.append(x)
        elif lo - eps <= x <= hi + eps:
            out.append(min(max(x, lo), hi))
    out.sort()
    uniq: list[float] = []
    for x in out:
        if not uniq or x - uniq[-1] > 1e-12:
            uniq.append(x)
    return uniq


def extrema_on(c: Sequence[float], lo: float, hi: float) -> tuple[float, float, float, float]:
    """(min, argmin, max, argmax) of the polynomial over [lo, hi], from critical points."""
    c = np.asarray(c, dtype=float)
    cands = [lo, hi]
    if c.size > 2:
        cands += real_roots_in(P.polyder(c), lo, hi)
    xs = np.array(cands)
    vals = P.polyval(xs, c)
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    return float(vals[i]), float(xs[i]), float(vals[j]), float(xs[j])


def sign_segments(c: Sequence[float], lo: float, hi: float) -> list[tuple[float, float, int]]:
    """Split [lo, hi] at roots of ``c``; return (a, b, sign at midpoint) per segment."""
    cuts = [lo] + real_roots_in(c, lo, hi) + [hi]
    segs = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        s = P.polyval(0.5 * (a + b), np.asarray(c, dtype=float))
        segs.append((a, b, int(np.sign(s))))
    return segs
