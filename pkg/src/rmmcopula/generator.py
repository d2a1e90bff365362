"""Generator functions of RMM and maxmin copulas.

A generator ``f`` lives on [0, 1] with ``f(0) = 0`` by convention, is continuous on
(0, 1] and may jump at 0 (its right limit is ``zero_limit``). It is stored as an
exact piece list; each piece has the form ``a(t) + s*sqrt(b(t))`` with rational
coefficients. Ordinary generators only use ``a`` ("poly" pieces); generators built
from diagonal sections may use ``sqrt(b)`` ("sqrt" pieces); the maxmin functions
phi and psi of a sqrt generator need both ("radical" pieces).

The defining conditions checked by :func:`validate_generator` are

* (G1) ``f(0) = f(1) = 0``,
* (G2) ``t + f(t)`` nondecreasing on [0, 1],
* (G3) ``f(t) / t`` nonincreasing on (0, 1].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from . import _kernels
from . import _poly as poly
from ._numbers import Number, as_fraction, frac_str
from .errors import GeneratorConditionError, InputFormatError, MathDomainError

TOL = 1e-12
FORMAT_VERSION = 1

_ONE = Fraction(1)
_T = (Fraction(0), Fraction(1))  # the polynomial t


@dataclass(frozen=True)
class Piece:
    """One piece ``a(t) + rad_sign*sqrt(rad(t))`` on ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction
    coeffs: tuple[Fraction, ...]
    rad: tuple[Fraction, ...] = ()
    rad_sign: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        object.__setattr__(self, "coeffs", poly.trim([as_fraction(c) for c in self.coeffs]))
        sign = int(self.rad_sign)
        rad = poly.trim([as_fraction(c) for c in self.rad]) if sign else ()
        if sign and poly.is_zero(rad):
            sign, rad = 0, ()
        object.__setattr__(self, "rad", rad)
        object.__setattr__(self, "rad_sign", sign)

    @property
    def kind(self) -> str:
        if self.rad_sign == 0:
            return "poly"
        if self.rad_sign == 1 and poly.is_zero(self.coeffs):
            return "sqrt"
        return "radical"

    def value(self, t: float) -> float:
        v = float(P.polyval(t, poly.to_float(self.coeffs)))
        if self.rad_sign:
            v += self.rad_sign * math.sqrt(max(0.0, float(P.polyval(t, poly.to_float(self.rad)))))
        return v

    def exact_value(self, t: Fraction) -> Fraction | None:
        """Exact value when no square root is involved (else None)."""
        if self.rad_sign:
            return None
        return poly.peval_exact(self.coeffs, t)

    def shifted(self, add: Sequence[Fraction]) -> "Piece":
        return Piece(self.lo, self.hi, poly.padd(self.coeffs, add), self.rad, self.rad_sign)

    def reflected(self) -> "Piece":
        """The piece of ``t -> value(1 - t)`` on ``[1 - hi, 1 - lo]``."""
        return Piece(1 - self.hi, 1 - self.lo, poly.reflect(self.coeffs),
                     poly.reflect(self.rad) if self.rad_sign else (), self.rad_sign)

    def negated(self) -> "Piece":
        return Piece(self.lo, self.hi, poly.pneg(self.coeffs), self.rad, -self.rad_sign)


class Packed(NamedTuple):
    """Float arrays consumed by the kernels."""

    breaks: np.ndarray
    a: np.ndarray
    b: np.ndarray
    sign: np.ndarray
    zero_limit: float


def _pack(pieces: Sequence[Piece], zero_limit: float) -> Packed:
    n = len(pieces)
    wa = max(len(p.coeffs) for p in pieces)
    wb = max([len(p.rad) for p in pieces] + [1])
    breaks = np.array([float(pieces[0].lo)] + [float(p.hi) for p in pieces])
    a = np.zeros((n, wa))
    b = np.zeros((n, wb))
    sign = np.zeros(n)
    for i, p in enumerate(pieces):
        a[i, :len(p.coeffs)] = poly.to_float(p.coeffs)
        if p.rad_sign:
            b[i, :len(p.rad)] = poly.to_float(p.rad)
            sign[i] = p.rad_sign
    return Packed(breaks, np.ascontiguousarray(a), np.ascontiguousarray(b), sign,
                  float(zero_limit))


def _check_partition(pieces: Sequence[Piece], what: str) -> None:
    if not pieces:
        raise InputFormatError(f"{what}: empty piece list")
    if pieces[0].lo != 0:
        raise InputFormatError(f"{what}: first piece starts at {pieces[0].lo}, not 0")
    if pieces[-1].hi != 1:
        raise InputFormatError(f"{what}: last piece ends at {pieces[-1].hi}, not 1")
    for p in pieces:
        if not p.lo < p.hi:
            raise InputFormatError(f"{what}: empty or reversed piece [{p.lo}, {p.hi}]")
    for p, q in zip(pieces[:-1], pieces[1:]):
        if p.hi < q.lo:
            raise InputFormatError(f"{what}: gap between {p.hi} and {q.lo}")
        if p.hi > q.lo:
            raise InputFormatError(f"{what}: overlap between {q.lo} and {p.hi}")
        x = float(p.hi)
        if abs(p.value(x) - q.value(x)) > TOL:
            raise InputFormatError(
                f"{what}: discontinuous at t={x:.12g} ({p.value(x):.12g} vs {q.value(x):.12g})")


def _coerce_piece(p: Any) -> Piece:
    if isinstance(p, Piece):
        return p
    if isinstance(p, dict):
        return _piece_from_dict(p)
    lo, hi, coeffs = p[:3]
    return Piece(lo, hi, tuple(coeffs))


@dataclass(frozen=True)
class Generator:
    """Piecewise generator with ``f(0) = 0`` and right limit ``zero_limit`` at 0."""

    pieces: tuple[Piece, ...]
    zero_limit: Fraction = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pieces = tuple(_coerce_piece(p) for p in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        _check_partition(pieces, "generator")
        first = pieces[0]
        at0 = first.exact_value(Fraction(0))
        if self.zero_limit is None:
            zl = at0 if at0 is not None else as_fraction(first.value(0.0))
        else:
            zl = as_fraction(self.zero_limit)
            if abs(first.value(0.0) - float(zl)) > TOL:
                raise InputFormatError(
                    f"zero_limit {zl} disagrees with first piece value {first.value(0.0):.12g} at 0+")
        object.__setattr__(self, "zero_limit", zl)

    # -- construction -----------------------------------------------------------------
    @classmethod
    def from_pieces(cls, pieces: Iterable[Any], zero_limit: Number | None = None) -> "Generator":
        """Build from ``(lo, hi, coeffs)`` triples (or Piece / dict entries)."""
        return cls(tuple(pieces), None if zero_limit is None else as_fraction(zero_limit))

    @classmethod
    def zero(cls) -> "Generator":
        return cls((Piece(0, 1, (0,)),))

    @classmethod
    def polynomial(cls, coeffs: Sequence[Number]) -> "Generator":
        return cls((Piece(0, 1, tuple(coeffs)),))

    # -- evaluation -------------------------------------------------------------------
    @cached_property
    def packed(self) -> Packed:
        return _pack(self.pieces, float(self.zero_limit))

    def __call__(self, t):
        out = _kernels.eval_gen(*self.packed, np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t, side: int = 1):
        out = _kernels.deriv_gen(*self.packed, np.asarray(t, dtype=float), side)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def breakpoints(self) -> list[float]:
        """Interior breakpoints as floats."""
        return [float(p.hi) for p in self.pieces[:-1]]

    @property
    def is_zero(self) -> bool:
        return all(p.rad_sign == 0 and poly.is_zero(p.coeffs) for p in self.pieces)

    @property
    def is_polynomial(self) -> bool:
        return all(p.rad_sign == 0 for p in self.pieces)

    def scaled(self, lam: Number) -> "Generator":
        lam = as_fraction(lam)
        if lam <= 0:
            raise MathDomainError("scale factor must be positive")
        pieces = tuple(Piece(p.lo, p.hi, poly.pscale(p.coeffs, lam),
                             poly.pscale(p.rad, lam * lam) if p.rad_sign else (), p.rad_sign)
                       for p in self.pieces)
        return Generator(pieces, self.zero_limit * lam)

    # -- serialisation ----------------------------------------------------------------
    def to_dict(self) -> dict:
        return {"version": FORMAT_VERSION, "zero_limit": _json_num(self.zero_limit),
                "pieces": [_piece_to_dict(p) for p in self.pieces]}

    @classmethod
    def from_dict(cls, d: dict) -> "Generator":
        if not isinstance(d, dict):
            raise InputFormatError("generator document must be an object")
        if d.get("version") != FORMAT_VERSION:
            raise InputFormatError(f"unsupported generator format version {d.get('version')!r}")
        if "pieces" not in d:
            raise InputFormatError("generator document has no 'pieces'")
        try:
            pieces = tuple(_piece_from_dict(p, max_degree=3) for p in d["pieces"])
            zl = d.get("zero_limit")
            return cls(pieces, None if zl is None else as_fraction(zl))
        except InputFormatError:
            raise
        except (TypeError, ValueError, KeyError, ZeroDivisionError) as exc:
            raise InputFormatError(f"malformed generator document: {exc}") from exc


def _json_num(x: Fraction):
    f = float(x)
    if as_fraction(f) == x:
        return f
    return frac_str(x)


def _piece_to_dict(p: Piece) -> dict:
    d: dict[str, Any] = {"from": _json_num(p.lo), "to": _json_num(p.hi)}
    if p.kind == "sqrt":
        d["kind"] = "sqrt"
        d["radicand"] = [_json_num(c) for c in p.rad]
        return d
    d["coeffs"] = [_json_num(c) for c in p.coeffs]
    if p.rad_sign:
        d["radicand"] = [_json_num(c) for c in p.rad]
        d["radicand_sign"] = p.rad_sign
    return d


def _piece_from_dict(d: dict, max_degree: int | None = None) -> Piece:
    if not isinstance(d, dict):
        raise InputFormatError("each piece must be an object")
    for key in ("from", "to"):
        if key not in d:
            raise InputFormatError(f"piece is missing '{key}'")
    lo, hi = as_fraction(d["from"]), as_fraction(d["to"])
    if d.get("kind", "poly") == "sqrt":
        return Piece(lo, hi, (0,), tuple(as_fraction(c) for c in d["radicand"]), 1)
    if "coeffs" not in d:
        raise InputFormatError("piece is missing 'coeffs'")
    coeffs = tuple(as_fraction(c) for c in d["coeffs"])
    if not coeffs:
        raise InputFormatError("empty coefficient list")
    if max_degree is not None and "radicand" not in d and len(coeffs) > max_degree + 1:
        raise InputFormatError(f"piece degree exceeds {max_degree}")
    rad = tuple(as_fraction(c) for c in d.get("radicand", ()))
    return Piece(lo, hi, coeffs, rad, int(d.get("radicand_sign", 1 if rad else 0)))


def loads_json(text: str) -> Any:
    """Parse JSON keeping decimal literals exact."""
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}") from exc


def load_generator(path: str | Path) -> Generator:
    return Generator.from_dict(loads_json(Path(path).read_text(encoding="utf-8")))


def dump_generator(gen: Generator, path: str | Path) -> None:
    Path(path).write_text(json.dumps(gen.to_dict(), indent=2) + "\n", encoding="utf-8")


# -- pointwise operations -----------------------------------------------------------

def _check_unit(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise MathDomainError(f"argument {t} outside [0, 1]")
    return t


def eval_f(gen: Generator, t: float) -> float:
    """f(t); 0 at t = 0 whatever the right limit."""
    return gen(_check_unit(t))


def f_star_at_zero(gen: Generator) -> float:
    """Right limit of f(t)/t at 0 (``math.inf`` when it diverges)."""
    if gen.zero_limit > 0:
        return math.inf
    p = gen.pieces[0]
    if p.kind == "poly":
        return float(p.coeffs[1]) if len(p.coeffs) > 1 else 0.0
    if p.kind == "sqrt":
        # sqrt(b(t))/t -> sqrt(b2) if b0 = b1 = 0, else diverges
        b = list(p.rad) + [Fraction(0)] * 3
        if b[0] == 0 and b[1] == 0:
            return math.sqrt(float(b[2]))
        return math.inf
    lo = float(p.hi) * 1e-9  # radical pieces: numerical limit
    return gen(lo) / lo


def eval_f_star(gen: Generator, t: float) -> float:
    """f(t)/t for t > 0; at 0 the right limit, possibly ``math.inf``."""
    t = _check_unit(t)
    if t == 0.0:
        return f_star_at_zero(gen)
    return gen(t) / t


def eval_f_hat(gen: Generator, t: float, right: bool = False) -> float:
    """t + f(t); with ``right=True`` at t = 0 the right limit ``zero_limit``."""
    t = _check_unit(t)
    if t == 0.0 and right:
        return float(gen.zero_limit)
    return t + gen(t)


def derivative_f(gen: Generator, t: float, side: str = "right") -> float:
    """One-sided derivative of the piece polynomial at t ("left" or "right")."""
    t = _check_unit(t)
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if t == 0.0:
        if side == "left":
            raise MathDomainError("no left derivative at 0")
        if gen.zero_limit > 0:
            raise MathDomainError("derivative undefined at 0: generator jumps there")
    if t == 1.0 and side == "right":
        raise MathDomainError("no right derivative at 1")
    return gen.derivative(t, 1 if side == "right" else -1)


# -- validation ---------------------------------------------------------------------

@dataclass
class ValidationReport:
    """Outcome of :func:`validate_generator` (or :func:`validate_maxmin`)."""

    structural_ok: bool = True
    structural_error: str | None = None
    conditions: dict[str, bool] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    grid: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.structural_ok and all(self.conditions.values())

    def failed(self) -> list[str]:
        return [k for k, ok in self.conditions.items() if not ok]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "structural_ok": self.structural_ok,
                "structural_error": self.structural_error, "conditions": dict(self.conditions),
                "failures": dict(self.failures), "grid_crosscheck": dict(self.grid)}


def _fail(report: ValidationReport, cond: str, msg: str) -> None:
    report.conditions[cond] = False
    report.failures.setdefault(cond, msg)


def _grid_piece(p: Piece, n: int = 2001) -> tuple[np.ndarray, np.ndarray]:
    t = np.linspace(float(p.lo), float(p.hi), n)
    if t[0] == 0.0:
        t[0] = float(p.hi) * 1e-9
    return t, np.array([p.value(x) for x in t])


def _check_piece_conditions(p: Piece, report: ValidationReport) -> None:
    lo, hi = float(p.lo), float(p.hi)
    where = f"on [{lo:.6g}, {hi:.6g}]"
    if p.kind == "poly":
        a = poly.to_float(p.coeffs)
        mn, at, _, _ = poly.extrema_on(a, lo, hi)
        if mn < -TOL:
            _fail(report, "nonneg", f"f({at:.6g}) = {mn:.3g} < 0")
        da = P.polyder(a) if a.size > 1 else np.zeros(1)
        mn, at, _, _ = poly.extrema_on(P.polyadd([1.0], da), lo, hi)
        if mn < -TOL:
            _fail(report, "G2", f"t + f(t) decreasing {where}: 1 + f'({at:.6g}) = {mn:.3g}")
        # (f/t)' <= 0  <=>  t f'(t) - f(t) <= 0
        num = P.polysub(P.polymulx(da), a)
        _, _, mx, at = poly.extrema_on(num, lo, hi)
        if mx > TOL:
            _fail(report, "G3", f"f(t)/t increasing {where}: t f' - f = {mx:.3g} at {at:.6g}")
    elif p.kind == "sqrt":
        b = poly.to_float(p.rad)
        mn, at, _, _ = poly.extrema_on(b, lo, hi)
        if mn < -TOL:
            _fail(report, "nonneg", f"radicand negative at {at:.6g}")
        db = P.polyder(b) if b.size > 1 else np.zeros(1)
        # 1 + b'/(2 sqrt b) >= 0  <=>  4b - b'^2 >= 0 wherever b' < 0
        q = P.polysub(4.0 * b, P.polymul(db, db))
        for s0, s1, sgn in poly.sign_segments(db, lo, hi):
            if sgn < 0:
                mn, at, _, _ = poly.extrema_on(q, s0, s1)
                if mn < -TOL:
                    _fail(report, "G2", f"t + f(t) decreasing near t={at:.6g}")
        # (b/t^2)' <= 0  <=>  t b' - 2b <= 0
        num = P.polysub(P.polymulx(db), 2.0 * b)
        _, _, mx, at = poly.extrema_on(num, lo, hi)
        if mx > TOL:
            _fail(report, "G3", f"f(t)/t increasing near t={at:.6g}")
    else:
        t, v = _grid_piece(p)
        if v.min() < -TOL:
            _fail(report, "nonneg", f"negative value {where}")
        if np.min(np.diff(t + v)) < -TOL:
            _fail(report, "G2", f"t + f(t) decreasing {where} (grid)")
        if np.max(np.diff(v / t)) > TOL:
            _fail(report, "G3", f"f(t)/t increasing {where} (grid)")


def validate_generator(gen: Generator | dict | Sequence, grid_n: int = 1001) -> ValidationReport:
    """Check (G1)-(G3) and nonnegativity exactly per piece, plus a grid cross-check.

    ``gen`` may also be a raw document or piece list; a malformed one yields a
    report with ``structural_ok = False`` instead of raising.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    report = ValidationReport()
    if not isinstance(gen, Generator):
        try:
            gen = Generator.from_dict(gen) if isinstance(gen, dict) else Generator.from_pieces(gen)
        except (InputFormatError, TypeError, ValueError) as exc:
            report.structural_ok = False
            report.structural_error = str(exc)
            return report
    for cond in ("G1", "G2", "G3", "nonneg"):
        report.conditions[cond] = True
    end = gen.pieces[-1].value(1.0)
    if abs(end) > TOL:
        _fail(report, "G1", f"f(1) = {end:.12g} != 0")
    if gen.zero_limit < 0:
        _fail(report, "nonneg", "negative right limit at 0")
    for p in gen.pieces:
        _check_piece_conditions(p, report)
    # redundant sampled diagnostics
    t = np.linspace(0.0, 1.0, grid_n)[1:]
    v = gen(t)
    report.grid["G2"] = bool(np.all(np.diff(np.concatenate([[0.0], t + v])) >= -TOL))
    report.grid["G3"] = bool(np.all(np.diff(v / t) <= TOL))
    report.grid["nonneg"] = bool(np.all(v >= -TOL))
    return report


def require_valid(gen: Generator, name: str = "generator") -> Generator:
    rep = validate_generator(gen)
    if not rep.passed:
        raise GeneratorConditionError(
            f"{name} fails {', '.join(rep.failed())}: "
            + "; ".join(rep.failures.values()), rep)
    return gen


# -- maxmin generators --------------------------------------------------------------

@dataclass(frozen=True)
class MaxminGenerators:
    """The pair (phi, psi) of a maxmin copula.

    ``phi`` is stored on [0, 1] with ``phi(0) = 0`` imposed (it may jump at 0);
    ``psi`` is stored on [0, 1] with ``psi(1) = 1`` imposed (it may jump at 1).
    """

    phi: tuple[Piece, ...]
    psi: tuple[Piece, ...]

    def __post_init__(self):
        phi = tuple(_coerce_piece(p) for p in self.phi)
        psi = tuple(_coerce_piece(p) for p in self.psi)
        _check_partition(phi, "phi")
        _check_partition(psi, "psi")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)

    @cached_property
    def _phi_packed(self) -> Packed:
        return _pack(self.phi, 0.0)

    @cached_property
    def _psi_packed(self) -> Packed:
        return _pack(self.psi, 0.0)

    def phi_at(self, u):
        u = np.asarray(u, dtype=float)
        out = _kernels.eval_gen(*self._phi_packed, u)  # 0 at u <= 0
        return float(out) if np.ndim(out) == 0 else out

    def psi_at(self, v):
        v = np.asarray(v, dtype=float)
        pk = self._psi_packed
        # evaluate with the piece containing v on its left end: psi is continuous on [0, 1)
        from ._kernels import _fallback
        idx = _fallback._piece_index(pk.breaks, v, right=True)
        val = _fallback._horner(pk.a, idx, v)
        sg = pk.sign[idx]
        if np.any(sg != 0):
            val = val + sg * np.sqrt(np.maximum(_fallback._horner(pk.b, idx, v), 0.0))
        out = np.where(v >= 1.0, 1.0, val)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def phi_zero_limit(self) -> float:
        return self.phi[0].value(0.0)

    @property
    def psi_one_limit(self) -> float:
        return self.psi[-1].value(1.0)

    def phi_star(self, u):
        u = np.asarray(u, dtype=float)
        return self.phi_at(u) / u

    def psi_lower_star(self, v):
        """(1 - psi(v)) / (v - psi(v)), infinite where psi(v) = v."""
        v = np.asarray(v, dtype=float)
        ps = self.psi_at(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(v - ps > 0, (1.0 - ps) / np.where(v - ps > 0, v - ps, 1.0), np.inf)
        return float(out) if np.ndim(out) == 0 else out

    @classmethod
    def from_functions(cls, phi: Iterable[Any], psi: Iterable[Any]) -> "MaxminGenerators":
        return cls(tuple(phi), tuple(psi))


def validate_maxmin(mm: MaxminGenerators, grid_n: int = 1001) -> ValidationReport:
    """Check (F1)-(F3); exact on polynomial pieces, sampled on radical ones."""
    report = ValidationReport()
    for cond in ("F1", "F2", "F3"):
        report.conditions[cond] = True
    if abs(mm.phi[-1].value(1.0) - 1.0) > TOL:
        _fail(report, "F1", "phi(1) != 1")
    if abs(mm.psi[0].value(0.0)) > TOL:
        _fail(report, "F1", "psi(0) != 0")
    if mm.phi_zero_limit < -TOL:
        _fail(report, "F2", "phi jumps downward at 0")
    if mm.psi_one_limit > 1.0 + TOL:
        _fail(report, "F2", "psi jumps downward at 1")
    for name, pieces in (("phi", mm.phi), ("psi", mm.psi)):
        for p in pieces:
            lo, hi = float(p.lo), float(p.hi)
            if p.kind == "poly":
                a = poly.to_float(p.coeffs)
                da = P.polyder(a) if a.size > 1 else np.zeros(1)
                if poly.extrema_on(da, lo, hi)[0] < -TOL:
                    _fail(report, "F2", f"{name} decreasing on [{lo:.6g}, {hi:.6g}]")
                if name == "phi":
                    if poly.extrema_on(P.polysub(a, [0.0, 1.0]), lo, hi)[0] < -TOL:
                        _fail(report, "F3", "phi(u) < u somewhere")
                    num = P.polysub(P.polymulx(da), a)
                    if poly.extrema_on(num, lo, hi)[2] > TOL:
                        _fail(report, "F3", f"phi* increasing on [{lo:.6g}, {hi:.6g}]")
                else:
                    if poly.extrema_on(P.polysub([0.0, 1.0], a), lo, hi)[0] < -TOL:
                        _fail(report, "F3", "psi(v) > v somewhere")
                    # sign of d/dv (1-psi)/(v-psi): -psi'(v-psi) - (1-psi)(1-psi')
                    gap = P.polysub([0.0, 1.0], a)
                    num = P.polysub(P.polymul(-da, gap),
                                    P.polymul(P.polysub([1.0], a), P.polysub([1.0], da)))
                    if poly.extrema_on(num, lo, hi)[2] > TOL:
                        _fail(report, "F3", f"psi_* increasing on [{lo:.6g}, {hi:.6g}]")
            else:
                t, v = _grid_piece(p)
                if np.min(np.diff(v)) < -TOL:
                    _fail(report, "F2", f"{name} decreasing on [{lo:.6g}, {hi:.6g}] (grid)")
    t = np.linspace(0.0, 1.0, grid_n)[1:-1]
    report.grid["F2"] = bool(np.all(np.diff(mm.phi_at(t)) >= -TOL)
                             and np.all(np.diff(mm.psi_at(t)) >= -TOL))
    ps = mm.psi_lower_star(t)
    fin = np.isfinite(ps)
    report.grid["F3"] = bool(np.all(np.diff(mm.phi_star(t)) <= 1e-9)
                             and np.all(np.diff(ps[fin]) <= 1e-9))
    return report


def generators_from_maxmin(mm: MaxminGenerators) -> tuple[Generator, Generator]:
    """f(u) = phi(u) - u and g(v) = 1 - v - psi(1 - v), exactly on coefficients."""
    rep = validate_maxmin(mm)
    if not rep.passed:
        raise GeneratorConditionError(
            f"maxmin generators fail {', '.join(rep.failed())}: " + "; ".join(rep.failures.values()),
            rep)
    minus_t = poly.pneg(_T)
    f = Generator(tuple(p.shifted(minus_t) for p in mm.phi))
    one_minus_t = (Fraction(1), Fraction(-1))
    g = Generator(tuple(p.negated().reflected().shifted(one_minus_t) for p in reversed(mm.psi)))
    return f, g


def maxmin_from_generators(f: Generator, g: Generator) -> MaxminGenerators:
    """phi(u) = u + f(u) and psi(v) = v - g(1 - v), exactly on coefficients."""
    require_valid(f, "f")
    require_valid(g, "g")
    phi = tuple(p.shifted(_T) for p in f.pieces)
    psi = tuple(p.reflected().negated().shifted(_T) for p in reversed(g.pieces))
    return MaxminGenerators(phi, psi)


def scale_generator_pair(f: Generator, g: Generator, lam: Number) -> tuple[Generator, Generator]:
    """(lam*f, g/lam); the RMM copula is unchanged. Raises if either fails (G1)-(G3)."""
    lam = as_fraction(lam)
    if lam <= 0:
        raise MathDomainError("lambda must be positive")
    fs, gs = f.scaled(lam), g.scaled(1 / lam)
    require_valid(fs, f"{lam}*f")
    require_valid(gs, f"g/{lam}")
    return fs, gs
