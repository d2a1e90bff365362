"""Diagonal sections ``delta(t) = C(t, t)`` of RMM copulas.

For an RMM copula ``delta(t) = max{0, t^2 - f(t) g(t)}``. With
``delta#(t) = delta(t) / t^2`` and ``delta^(t) = t + sqrt(t^2 - delta(t))`` the class
D-hat collects the diagonal functions with ``delta <= t^2``, ``delta#`` nondecreasing
and ``delta^`` nondecreasing; these are exactly the diagonals of symmetric RMM
copulas, realised by the generator ``f(t) = sqrt(t^2 - delta(t))``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from . import _kernels
from . import _poly as poly
from ._numbers import as_fraction
from .copula import RmmCopula, grid_values
from .errors import InputFormatError, MathDomainError
from .generator import (
    TOL,
    FORMAT_VERSION,
    Generator,
    Piece,
    _check_partition,
    _json_num,
    _pack,
    loads_json,
    require_valid,
)

_T2 = (Fraction(0), Fraction(0), Fraction(1))


def _snap(x: float, q) -> Fraction:
    """Exact rational for a float root of the Fraction polynomial ``q`` when a small one exists."""
    for den in (1000, 10**6):
        r = Fraction(x).limit_denominator(den)
        if abs(float(r) - x) < 1e-12 and poly.peval_exact(q, r) == 0:
            return r
    return as_fraction(x)


def _merge(pieces: list[Piece]) -> tuple[Piece, ...]:
    out: list[Piece] = []
    for p in pieces:
        if out and out[-1].coeffs == p.coeffs and out[-1].rad == p.rad \
                and out[-1].rad_sign == p.rad_sign:
            out[-1] = Piece(out[-1].lo, p.hi, p.coeffs, p.rad, p.rad_sign)
        else:
            out.append(p)
    return tuple(out)


@dataclass(frozen=True)
class DiagonalSection:
    """Piecewise-polynomial diagonal function on [0, 1]."""

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if any(p.rad_sign for p in pieces):
            raise InputFormatError("diagonal pieces must be polynomials")
        _check_partition(pieces, "diagonal")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def from_pieces(cls, pieces: Sequence[Any]) -> "DiagonalSection":
        return cls(tuple(p if isinstance(p, Piece) else Piece(p[0], p[1], tuple(p[2]))
                         for p in pieces))

    @cached_property
    def _packed(self):
        return _pack(self.pieces, 0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = _kernels.eval_gen(*self._packed, t)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t, side: int = 1):
        out = _kernels.deriv_gen(*self._packed, np.asarray(t, dtype=float), side)
        return float(out) if np.ndim(out) == 0 else out

    @cached_property
    def a_delta(self) -> Fraction:
        """Largest t with delta(t) = 0 (the end of the initial zero run)."""
        a = Fraction(0)
        for p in self.pieces:
            if poly.is_zero(p.coeffs):
                a = p.hi
                continue
            # a nonzero piece may still vanish on an initial stretch only at isolated roots
            roots = poly.real_roots_in(poly.to_float(p.coeffs), float(p.lo), float(p.hi),
                                       open_interval=False)
            if roots and abs(roots[0] - float(p.lo)) < 1e-12:
                a = p.lo
            break
        return a

    def to_dict(self) -> dict:
        return {"version": FORMAT_VERSION,
                "delta_pieces": [{"from": _json_num(p.lo), "to": _json_num(p.hi),
                                  "coeffs": [_json_num(c) for c in p.coeffs]}
                                 for p in self.pieces]}

    @classmethod
    def from_dict(cls, d: dict) -> "DiagonalSection":
        if not isinstance(d, dict) or d.get("version") != FORMAT_VERSION:
            raise InputFormatError("diagonal document must be an object with version 1")
        if "delta_pieces" not in d:
            raise InputFormatError("diagonal document has no 'delta_pieces'")
        try:
            return cls(tuple(Piece(as_fraction(p["from"]), as_fraction(p["to"]),
                                   tuple(as_fraction(c) for c in p["coeffs"]))
                             for p in d["delta_pieces"]))
        except InputFormatError:
            raise
        except (TypeError, ValueError, KeyError, ZeroDivisionError) as exc:
            raise InputFormatError(f"malformed diagonal document: {exc}") from exc


def load_diagonal(path: str | Path) -> DiagonalSection:
    return DiagonalSection.from_dict(loads_json(Path(path).read_text(encoding="utf-8")))


def dump_diagonal(d: DiagonalSection, path: str | Path) -> None:
    Path(path).write_text(json.dumps(d.to_dict(), indent=2) + "\n", encoding="utf-8")


def _product_pieces(f: Generator, g: Generator):
    """Yield (lo, hi, exact polynomial f*g) over the common refinement."""
    knots = sorted({p.lo for p in f.pieces} | {p.lo for p in g.pieces} | {Fraction(1)})

    def piece_at(gen: Generator, mid: Fraction) -> Piece:
        for p in gen.pieces:
            if p.lo <= mid <= p.hi:
                return p
        raise AssertionError("unreachable")

    for lo, hi in zip(knots[:-1], knots[1:]):
        mid = (lo + hi) / 2
        pf, pg = piece_at(f, mid), piece_at(g, mid)
        if pf.rad_sign == 0 and pg.rad_sign == 0:
            yield lo, hi, poly.pmul(pf.coeffs, pg.coeffs)
        elif pf == pg and pf.kind == "sqrt":
            yield lo, hi, pf.rad
        else:
            raise MathDomainError("diagonal of this generator pair is not piecewise polynomial")


def diagonal_of(c: RmmCopula) -> DiagonalSection:
    """Exact piecewise form of ``max{0, t^2 - f(t) g(t)}``."""
    pieces: list[Piece] = []
    for lo, hi, fg in _product_pieces(c.f, c.g):
        q = poly.psub(_T2, fg)
        cuts = [lo] + [_snap(r, q) for r in poly.real_roots_in(poly.to_float(q),
                                                              float(lo), float(hi))] + [hi]
        for a, b in zip(cuts[:-1], cuts[1:]):
            if not a < b:
                continue
            mid = float((a + b) / 2)
            positive = P.polyval(mid, poly.to_float(q)) > 0.0
            pieces.append(Piece(a, b, q if positive else (Fraction(0),)))
    return DiagonalSection(_merge(pieces))


def delta_sharp(d: DiagonalSection, t):
    """delta(t) / t^2 on (0, 1]."""
    t = np.asarray(t, dtype=float)
    if np.any((t <= 0) | (t > 1)):
        raise MathDomainError("delta# is defined on (0, 1]")
    out = d(t) / (t * t)
    return float(out) if np.ndim(out) == 0 else out


def delta_hat(d: DiagonalSection, t):
    """t + sqrt(t^2 - delta(t))."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise MathDomainError("delta^ is defined on [0, 1]")
    gap = t * t - d(t)
    if np.any(gap < -TOL):
        raise MathDomainError("delta(t) exceeds t^2")
    out = t + np.sqrt(np.maximum(gap, 0.0))
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class DHatReport:
    """Outcome of :func:`in_D_hat`."""

    conditions: dict[str, bool] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    witness: tuple[float, float, float, float] | None = None  # (s, hat(s), t, hat(t)), s < t
    boundary_case: bool = False
    equivalent_form: bool = True
    grid: dict[str, bool] = field(default_factory=dict)

    @property
    def member(self) -> bool:
        return all(self.conditions.values())

    def to_dict(self) -> dict:
        return {"member": self.member, "conditions": dict(self.conditions),
                "failures": dict(self.failures), "witness": self.witness,
                "boundary_case": self.boundary_case, "equivalent_form": self.equivalent_form,
                "grid_crosscheck": dict(self.grid)}


def _identically_zero(c: np.ndarray) -> bool:
    return bool(np.all(np.abs(c) <= TOL))


def in_D_hat(d: DiagonalSection, grid_n: int = 1001) -> DHatReport:
    """Membership in D-hat by exact per-piece sign analysis, plus grid diagnostics."""
    rep = DHatReport()
    names = ("D1", "D2", "D3", "D4", "below_square", "sharp_nondecreasing", "hat_nondecreasing")
    for k in names:
        rep.conditions[k] = True

    def fail(k, msg):
        rep.conditions[k] = False
        rep.failures.setdefault(k, msg)

    if abs(d.pieces[0].value(0.0)) > TOL or abs(d.pieces[-1].value(1.0) - 1.0) > TOL:
        fail("D1", "delta(0) != 0 or delta(1) != 1")
    for p in d.pieces:
        lo, hi = float(p.lo), float(p.hi)
        c = poly.to_float(p.coeffs)
        dc = P.polyder(c) if c.size > 1 else np.zeros(1)
        where = f"on [{lo:.6g}, {hi:.6g}]"
        if poly.extrema_on(P.polysub([0.0, 1.0], c), lo, hi)[0] < -TOL:
            fail("D2", f"delta(t) > t {where}")
        mn, at, mx, _ = poly.extrema_on(dc, lo, hi)
        if mn < -TOL:
            fail("D3", f"delta decreasing near t={at:.6g}")
        if mx > 2.0 + TOL:
            fail("D4", f"slope exceeds 2 {where}")
        pc = P.polysub([0.0, 0.0, 1.0], c)  # t^2 - delta
        above_square = poly.extrema_on(pc, lo, hi)[0] < -TOL
        if above_square:
            fail("below_square", f"delta(t) > t^2 {where}")
        sharp = P.polysub(P.polymulx(dc), 2.0 * c)  # t delta' - 2 delta
        smin, sat, _, _ = poly.extrema_on(sharp, lo, hi)
        if smin < -TOL:
            fail("sharp_nondecreasing", f"delta# decreasing near t={sat:.6g}")
        if above_square:
            continue  # delta^ undefined on this piece
        dp = P.polyder(pc)
        q = P.polysub(4.0 * pc, P.polymul(dp, dp))  # hat' >= 0 iff q >= 0 where p' < 0
        hat_flat = False
        for s0, s1, sgn in poly.sign_segments(dp, lo, hi):
            if sgn >= 0:
                continue
            qmin, qat, _, _ = poly.extrema_on(q, s0, s1)
            if _identically_zero(q):
                hat_flat = True
            if qmin < -TOL:
                fail("hat_nondecreasing", f"delta^ decreasing near t={qat:.6g}")
                if rep.witness is None:
                    rep.witness = _hat_witness(d, q, s0, s1)
        if _identically_zero(sharp) or hat_flat:
            rep.boundary_case = True
    # equivalent form: delta^ nondecreasing and delta^/t nonincreasing
    t = np.linspace(0.0, 1.0, grid_n)
    try:
        hat = delta_hat(d, t)
    except MathDomainError:
        rep.grid["hat_nondecreasing"] = False
        rep.equivalent_form = not rep.conditions["below_square"]
        return rep
    ratio = hat[1:] / t[1:]
    rep.grid["hat_nondecreasing"] = bool(np.all(np.diff(hat) >= -1e-9))
    rep.grid["hat_over_t_nonincreasing"] = bool(np.all(np.diff(ratio) <= 1e-9))
    rep.grid["sharp_nondecreasing"] = bool(np.all(np.diff(d(t[1:]) / t[1:] ** 2) >= -1e-9))
    exact = rep.conditions["hat_nondecreasing"] and rep.conditions["sharp_nondecreasing"]
    rep.equivalent_form = exact == (rep.grid["hat_nondecreasing"]
                                    and rep.grid["hat_over_t_nonincreasing"])
    return rep


def _hat_witness(d: DiagonalSection, q: np.ndarray, s0: float, s1: float):
    """Endpoints of a stretch of [s0, s1] on which delta^ strictly decreases."""
    for a, b, sgn in poly.sign_segments(q, s0, s1):
        if sgn < 0:
            return (float(a), float(delta_hat(d, a)), float(b), float(delta_hat(d, b)))
    return None


def _sqrt_pieces(lo: Fraction, hi: Fraction, p: tuple[Fraction, ...]) -> list[Piece]:
    """|r| when p = r^2 exactly, else a sqrt piece."""
    if poly.is_zero(p):
        return [Piece(lo, hi, (0,))]
    r = poly.exact_sqrt_poly(p)
    if r is None:
        return [Piece(lo, hi, (0,), p, 1)]
    cuts = [lo] + [_snap(x, r) for x in poly.real_roots_in(poly.to_float(r), float(lo),
                                                          float(hi))] + [hi]
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if a < b:
            mid = (a + b) / 2
            sign = 1 if poly.peval_exact(r, mid) >= 0 else -1
            out.append(Piece(a, b, r if sign > 0 else poly.pneg(r)))
    return out


def sqrt_generator(d: DiagonalSection, start: Fraction = Fraction(0)) -> list[Piece]:
    """Pieces of sqrt(t^2 - delta(t)) restricted to [start, 1]."""
    out: list[Piece] = []
    for p in d.pieces:
        if p.hi <= start:
            continue
        out.extend(_sqrt_pieces(max(p.lo, start), p.hi, poly.psub(_T2, p.coeffs)))
    return out


def srmm_from_diagonal(d: DiagonalSection) -> RmmCopula:
    """The symmetric RMM copula with generator ``sqrt(t^2 - delta(t))``."""
    rep = in_D_hat(d)
    if not rep.member:
        raise MathDomainError("diagonal is not in D-hat: " + "; ".join(rep.failures.values()))
    f = Generator(_merge(sqrt_generator(d)))
    require_valid(f, "sqrt(t^2 - delta)")
    return RmmCopula(f, f, checked=False)


def diagonal_bounds(d: DiagonalSection) -> tuple[RmmCopula, RmmCopula]:
    """(lower, upper) SRMM copulas sharing the diagonal ``d``.

    The upper copula uses ``sqrt(t^2 - delta)``; the lower one replaces it by
    ``2 a - t`` on ``(0, a]`` with ``a = a_delta``. They coincide when ``a = 0``.
    """
    upper = srmm_from_diagonal(d)
    a = d.a_delta
    if a == 0:
        return upper, upper
    pieces = [Piece(0, a, (2 * a, -1))] + sqrt_generator(d, a)
    h = Generator(_merge(pieces))
    require_valid(h, "lower-bound generator")
    return RmmCopula(h, h, checked=False), upper


def ordering_check(lower: RmmCopula, middle: RmmCopula, upper: RmmCopula,
                   grid_n: int = 201) -> bool:
    """``lower <= middle <= upper`` on a grid (slack 1e-12)."""
    t = np.linspace(0.0, 1.0, grid_n)
    lo, mid, up = (grid_values(c, t, t) for c in (lower, middle, upper))
    return bool(np.all(lo <= mid + TOL) and np.all(mid <= up + TOL))


def srmm_uniqueness_check(d: DiagonalSection) -> bool:
    """True iff delta > 0 on (0, 1], i.e. the SRMM copula with this diagonal is unique."""
    return d.a_delta == 0


def semilinear_from_diagonal(d: DiagonalSection, u, v):
    """Lower semilinear copula ``min(u,v) delta(max(u,v)) / max(u,v)`` with 0/0 = 0."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    hi = np.maximum(u, v)
    lo = np.minimum(u, v)
    safe = np.where(hi > 0, hi, 1.0)
    out = np.where(hi > 0, lo * d(safe) / safe, 0.0)
    return float(out) if np.ndim(out) == 0 else out


# -- named diagonals --------------------------------------------------------------

def _knot_sqrt2() -> Fraction:
    return as_fraction(1.0 - math.sqrt(2.0) / 2.0)


def square_diagonal() -> DiagonalSection:
    """delta(t) = t^2 (independence)."""
    return DiagonalSection((Piece(0, 1, _T2),))


def w_diagonal() -> DiagonalSection:
    """max{0, 2t - 1}."""
    h = Fraction(1, 2)
    return DiagonalSection((Piece(0, h, (0,)), Piece(h, 1, (-1, 2))))


def sharp_only_diagonal() -> DiagonalSection:
    """0 on [0,1/4], 2t - 1/2 up to 1 - sqrt(2)/2, then t^2: delta# monotone, delta^ not."""
    q = Fraction(1, 4)
    k = _knot_sqrt2()
    return DiagonalSection((Piece(0, q, (0,)), Piece(q, k, (Fraction(-1, 2), 2)),
                            Piece(k, 1, _T2)))


def asymmetric_diagonal() -> DiagonalSection:
    """0 on [0,1/4], 2t^2 - t/2 on [1/4,1/2], t^2 after (diagonal of the tent-ramp pair)."""
    q, h = Fraction(1, 4), Fraction(1, 2)
    return DiagonalSection((Piece(0, q, (0,)), Piece(q, h, (0, Fraction(-1, 2), 2)),
                            Piece(h, 1, _T2)))


NAMED_DIAGONALS = {
    "square": square_diagonal,
    "w": w_diagonal,
    "sharp-only": sharp_only_diagonal,
    "asymmetric": asymmetric_diagonal,
}


def get_diagonal(key: str) -> DiagonalSection:
    """``diag:<name>`` for a named diagonal, otherwise the diagonal of the preset copula."""
    key = key.strip()
    if key.lower().startswith("diag:"):
        name = key[5:]
        if name not in NAMED_DIAGONALS:
            raise InputFormatError(f"unknown diagonal {name!r}; known: {sorted(NAMED_DIAGONALS)}")
        return NAMED_DIAGONALS[name]()
    return diagonal_of(RmmCopula.from_preset(key))
