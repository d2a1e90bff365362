"""Generator recovery from copula values.

For an RMM copula ``Delta_C(u, v) = uv - C(u, v)`` equals ``f(u) g(v)`` on the
stand, so ratios ``Q_C(u1, v; u2, v) = Delta_C(u1, v) / Delta_C(u2, v)`` do not depend
on ``v``. For a symmetric copula the anchor ``u_min`` (the largest zero of the
diagonal) satisfies ``f(u_min) = u_min``, whence ``f(u) = u_min Q_C(u, v; u_min, v)``.

Every routine accepts any *evaluator*: a vectorised map ``(u, v) -> C(u, v)``. The
analytic copulas and :class:`EmpiricalCopula` are interchangeable.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._numbers import fmt
from .copula import CopulaEvaluator, grid_values
from .errors import AnchorUndefinedError, InputFormatError, UndefinedQuotientError

ANALYTIC_THRESHOLD = 1e-9
ANALYTIC_MARGIN_TOL = 1e-9
BISECT_TOL = 1e-10
SCAN_POINTS = 101
FALLBACK_DEPTH = 30
REFINE_LEVELS = 4


class NonNQDWarning(UserWarning):
    """uv - C(u, v) is negative beyond tolerance: the input is not an RMM copula."""


# -- empirical copula ---------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalCopula:
    """Rank-based empirical copula of a bivariate sample.

    Pseudo-observations are ``rank / (n + 1)``; ``C_n(u, v)`` is the fraction of them
    lying in ``[0, u] x [0, v]``.
    """

    pu: np.ndarray = field(repr=False)
    pv: np.ndarray = field(repr=False)

    @classmethod
    def from_sample(cls, u: Sequence[float], v: Sequence[float]) -> "EmpiricalCopula":
        u = np.asarray(u, dtype=float).ravel()
        v = np.asarray(v, dtype=float).ravel()
        if u.size != v.size:
            raise InputFormatError("u and v samples differ in length")
        if u.size == 0:
            raise InputFormatError("empirical copula needs at least one observation")
        n = u.size
        ru = np.empty(n)
        rv = np.empty(n)
        ru[np.argsort(u, kind="stable")] = np.arange(1, n + 1)
        rv[np.argsort(v, kind="stable")] = np.arange(1, n + 1)
        return cls(ru / (n + 1), rv / (n + 1))

    @property
    def n(self) -> int:
        return int(self.pu.size)

    @property
    def threshold(self) -> float:
        return 10.0 / self.n

    @property
    def margin_tol(self) -> float:
        return 2.0 / math.sqrt(self.n)

    def grid(self, us, vs) -> np.ndarray:
        """Matrix ``C_n(us[i], vs[j])`` via a 2-D histogram and cumulative sums."""
        us = np.asarray(us, dtype=float).ravel()
        vs = np.asarray(vs, dtype=float).ravel()
        ou, ov = np.argsort(us), np.argsort(vs)
        su, sv = us[ou], vs[ov]
        # observation k counts for every query u_i >= pu_k
        iu = np.searchsorted(su, self.pu, side="left")
        iv = np.searchsorted(sv, self.pv, side="left")
        keep = (iu < su.size) & (iv < sv.size)
        counts = np.zeros((su.size, sv.size))
        np.add.at(counts, (iu[keep], iv[keep]), 1.0)
        cum = counts.cumsum(axis=0).cumsum(axis=1) / self.n
        out = np.empty_like(cum)
        out[np.ix_(ou, ov)] = cum
        return out

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if u.ndim == 2 and v.ndim == 2 and u.shape[1] == 1 and v.shape[0] == 1:
            return self.grid(u[:, 0], v[0, :])
        ub, vb = np.broadcast_arrays(u, v)
        flat_u, flat_v = ub.ravel(), vb.ravel()
        out = np.empty(flat_u.size)
        chunk = max(1, 2_000_000 // self.n)
        for s in range(0, flat_u.size, chunk):
            cu = flat_u[s:s + chunk, None]
            cv = flat_v[s:s + chunk, None]
            out[s:s + chunk] = np.count_nonzero((self.pu[None, :] <= cu)
                                                & (self.pv[None, :] <= cv), axis=1)
        out = (out / self.n).reshape(ub.shape)
        return float(out) if out.ndim == 0 else out


def empirical_copula(samples) -> EmpiricalCopula:
    """Empirical copula of a :class:`~rmmcopula.sampler.SampleSet` or an (n, 2) array."""
    if hasattr(samples, "u") and hasattr(samples, "v"):
        return EmpiricalCopula.from_sample(samples.u, samples.v)
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise InputFormatError("samples must be an (n, 2) array")
    return EmpiricalCopula.from_sample(arr[:, 0], arr[:, 1])


def threshold_for(c: CopulaEvaluator) -> float:
    """Denominator guard: 10/n for empirical copulas, 1e-9 otherwise."""
    return c.threshold if isinstance(c, EmpiricalCopula) else ANALYTIC_THRESHOLD


def _margin_tol(c: CopulaEvaluator) -> float:
    return c.margin_tol if isinstance(c, EmpiricalCopula) else ANALYTIC_MARGIN_TOL


def check_margins(c: CopulaEvaluator, n: int = 101) -> bool:
    t = np.linspace(0.0, 1.0, n)
    tol = _margin_tol(c)
    return bool(np.all(np.abs(np.asarray(c(t, np.ones_like(t))) - t) <= tol)
                and np.all(np.abs(np.asarray(c(np.ones_like(t), t)) - t) <= tol))


# -- Delta and Q --------------------------------------------------------------------

def _clamp_delta(d: np.ndarray, tol: float) -> np.ndarray:
    if np.any(d < -tol):
        warnings.warn(f"uv - C(u,v) reaches {float(np.min(d)):.3g} < 0: input is not NQD",
                      NonNQDWarning, stacklevel=3)
    return np.maximum(d, 0.0)


def delta_C(c: CopulaEvaluator, u, v):
    """``uv - C(u, v)``, clamped at 0 (with a warning beyond tolerance)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = _clamp_delta(u * v - np.asarray(c(u, v), dtype=float), _margin_tol(c))
    return float(out) if np.ndim(out) == 0 else out


def q_C(c: CopulaEvaluator, u1, v1, u2, v2, threshold: float | None = None) -> float:
    """``Delta_C(u1, v1) / Delta_C(u2, v2)``; undefined below the threshold."""
    thr = threshold_for(c) if threshold is None else threshold
    den = delta_C(c, u2, v2)
    if den <= thr:
        raise UndefinedQuotientError(
            f"Delta_C({u2:.6g}, {v2:.6g}) = {den:.3g} is below the threshold {thr:.3g}")
    return delta_C(c, u1, v1) / den


def find_u_min(c: CopulaEvaluator) -> float:
    """Largest t with C(t, t) = 0, by bisection on the diagonal (0 if none)."""
    zero_tol = 1.5 / c.n if isinstance(c, EmpiricalCopula) else 0.0

    def positive(t: float) -> bool:
        return float(c(t, t)) > zero_tol

    lo, hi = 0.0, 1.0
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            hi = mid
        else:
            lo = mid
    return lo


def is_product(c: CopulaEvaluator, n: int = 51) -> bool:
    """Delta_C vanishes (below threshold) on an interior grid."""
    t = np.linspace(0.0, 1.0, n)[1:-1]
    d = np.outer(t, t) - grid_values(c, t, t)
    return bool(np.max(np.abs(d)) <= threshold_for(c))


# -- admissible v scans ---------------------------------------------------------------

def scan_points() -> np.ndarray:
    """The 101-point scan without endpoints, then points accumulating at 1."""
    main = np.linspace(0.0, 1.0, SCAN_POINTS)[1:-1]
    tail = 1.0 - 0.01 * 2.0 ** -np.arange(1, FALLBACK_DEPTH + 1)
    return np.concatenate([main, tail])


@dataclass(frozen=True)
class _Scan:
    """Delta and admissibility of each scan v for each query u, against an anchor."""

    v: np.ndarray
    d_u: np.ndarray  # (k, m) Delta(u_i, v_j)
    d_a: np.ndarray  # (m,) Delta(anchor, v_j)
    ok: np.ndarray  # (k, m) admissible

    def choice(self, rank: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Index of the ``rank``-th best admissible v per row and a validity mask.

        The main scan is ranked by min{Delta(u,v), Delta(anchor,v)} (ties: smaller v);
        the accumulating tail is used only when the main scan has nothing admissible.
        """
        m_main = SCAN_POINTS - 2
        score = np.minimum(self.d_u, self.d_a[None, :])
        score = np.where(self.ok, score, -np.inf)
        idx = np.full(score.shape[0], -1)
        for i in range(score.shape[0]):
            for block in (slice(0, m_main), slice(m_main, None)):
                s = score[i, block]
                good = np.flatnonzero(np.isfinite(s))
                if good.size > rank:
                    order = good[np.lexsort((good, -s[good]))]
                    idx[i] = order[rank] + block.start
                    break
        return idx, idx >= 0


def _scan(c: CopulaEvaluator, us: np.ndarray, anchor: float, thr: float,
          v: np.ndarray | None = None) -> _Scan:
    v = scan_points() if v is None else v
    pts = np.concatenate([us, [anchor]])
    C = grid_values(c, pts, v)
    D = _clamp_delta(np.outer(pts, v) - C, _margin_tol(c))
    ok = (C[:-1] > thr) & (C[-1][None, :] > thr) & (D[-1][None, :] > thr)
    return _Scan(v, D[:-1], D[-1], ok)


def _ranked(sc: _Scan, row: int, rank: int) -> int:
    """Index of the rank-th best admissible v of one row over the whole scan, or -1."""
    good = np.flatnonzero(sc.ok[row])
    if good.size <= rank:
        return -1
    score = np.minimum(sc.d_u[row, good], sc.d_a[good])
    return int(good[np.lexsort((sc.v[good], -score))[rank]])


def _refine_row(c: CopulaEvaluator, u: float, anchor: float, thr: float, rank: int,
                v: np.ndarray, ok: np.ndarray) -> tuple[float, float] | None:
    """Rescan one row more finely until it has ``rank + 1`` admissible v.

    The admissible v form an interval; each level rescans the stretch between the
    inadmissible neighbours of the admissible points found so far, or the whole
    range ten times more densely when none were found.
    """
    order = np.argsort(v)
    v, ok = v[order], ok[order]
    lo, hi, n = 0.0, 1.0, SCAN_POINTS
    for _ in range(REFINE_LEVELS):
        good = np.flatnonzero(ok)
        if good.size:
            lo = float(v[good[0] - 1]) if good[0] > 0 else lo
            hi = float(v[good[-1] + 1]) if good[-1] + 1 < v.size else hi
            n = SCAN_POINTS
        else:
            n *= 10
        v = np.linspace(lo, hi, n)[1:-1]
        sc = _scan(c, np.array([u]), anchor, thr, v)
        j = _ranked(sc, 0, rank)
        if j >= 0:
            return float(sc.d_u[0, j]), float(sc.d_a[j])
        ok = sc.ok[0]
    return None


def _select(c: CopulaEvaluator, us: np.ndarray, anchor: float, thr: float,
            rank: int = 0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Delta(u, v) and Delta(anchor, v) at the rank-th best admissible v of each u."""
    sc = _scan(c, us, anchor, thr)
    idx, valid = sc.choice(rank)
    du = np.full(us.size, np.nan)
    da = np.full(us.size, np.nan)
    rows = np.flatnonzero(valid)
    du[rows] = sc.d_u[rows, idx[rows]]
    da[rows] = sc.d_a[idx[rows]]
    for i in np.flatnonzero(~valid):
        hit = _refine_row(c, float(us[i]), anchor, thr, rank, sc.v, sc.ok[i])
        if hit is not None:
            du[i], da[i] = hit
            valid[i] = True
    return du, da, valid


# -- recovery -----------------------------------------------------------------------

@dataclass(frozen=True)
class RecoveryResult:
    """Sampled generator ``(u, f(u))``; points without an admissible v are invalid."""

    u: np.ndarray
    f: np.ndarray
    valid: np.ndarray
    u_min: float
    threshold: float
    method: str = "anchored"
    scale: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "f_u", "valid"])
        for u, f, ok in zip(self.u, self.f, self.valid):
            w.writerow([fmt(u), fmt(f) if ok else "", int(ok)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"method": self.method, "u_min": float(fmt(self.u_min)),
                "threshold": self.threshold, "n_points": int(self.u.size),
                "n_valid": int(np.count_nonzero(self.valid)),
                "scale": None if self.scale is None else float(fmt(self.scale)),
                **self.diagnostics}

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def default_grid(n: int = 101) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)[1:]


def _anchored_values(c: CopulaEvaluator, us: np.ndarray, anchor: float, thr: float,
                     rank: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """anchor * Delta(u, v) / Delta(anchor, v) with the rank-th best admissible v."""
    du, da, valid = _select(c, us, anchor, thr, rank)
    return np.where(valid, anchor * du / np.where(valid, da, 1.0), np.nan), valid


def recover_generator(c: CopulaEvaluator, u_grid: Sequence[float] | None = None,
                      threshold: float | None = None) -> RecoveryResult:
    """Recover the generator of a symmetric RMM copula from its values.

    Raises :class:`AnchorUndefinedError` when ``u_min = 0``; see
    :func:`recover_generator_up_to_scale` for that case.
    """
    us = default_grid() if u_grid is None else np.asarray(u_grid, dtype=float)
    thr = threshold_for(c) if threshold is None else threshold
    if is_product(c):
        return RecoveryResult(us, np.zeros_like(us), np.ones(us.size, dtype=bool), 0.0, thr,
                              method="product")
    u_min = find_u_min(c)
    if u_min <= 0.0:
        raise AnchorUndefinedError(
            "u_min = 0: the anchor f(u_min) = u_min is unavailable; "
            "use recover_generator_up_to_scale")
    f, valid = _anchored_values(c, us, u_min, thr)
    return RecoveryResult(us, f, valid, u_min, thr)


def recover_generator_up_to_scale(c: CopulaEvaluator, u_grid: Sequence[float] | None = None,
                                  threshold: float | None = None) -> RecoveryResult:
    """``f(u) / f(u_ref)`` with ``u_ref = argmax Delta(u, u)``.

    ``scale`` holds ``sqrt(Delta(u_ref, u_ref))``, the value of ``f(u_ref)`` when the copula
    is symmetric and ``(u_ref, u_ref)`` lies on the stand; ``f`` is reported relative.
    """
    us = default_grid() if u_grid is None else np.asarray(u_grid, dtype=float)
    thr = threshold_for(c) if threshold is None else threshold
    t = np.linspace(0.0, 1.0, 201)[1:-1]
    diag = t * t - np.asarray(c(t, t), dtype=float)
    u_ref = float(t[int(np.argmax(diag))])
    f, valid = _ratio_values(c, us, u_ref, thr)
    on_stand = float(c(u_ref, u_ref)) > thr
    scale = math.sqrt(max(float(diag.max()), 0.0)) if on_stand else None
    return RecoveryResult(us, f, valid, 0.0, thr, method="relative", scale=scale,
                          diagnostics={"u_ref": u_ref})


def _ratio_values(c, us, ref, thr):
    du, da, valid = _select(c, us, ref, thr)
    return np.where(valid, du / np.where(valid, da, 1.0), np.nan), valid


def q_invariance(c: CopulaEvaluator, u: float, anchor: float, n_choices: int = 5,
                 threshold: float | None = None) -> np.ndarray:
    """Q_C(u, v; anchor, v) for the ``n_choices`` best admissible v (fewer if unavailable)."""
    thr = threshold_for(c) if threshold is None else threshold
    vals = []
    for r in range(n_choices):
        f, ok = _anchored_values(c, np.array([u]), anchor, thr, rank=r)
        if ok[0]:
            vals.append(f[0] / anchor)
    return np.array(vals)


# -- assembly -----------------------------------------------------------------------

class _AnchoredGenerator:
    """f(x) = anchor * Q_C(x, w; anchor, w) evaluated on demand."""

    def __init__(self, c: CopulaEvaluator, rank: int = 0):
        if is_product(c):
            self.anchor = 0.0
            self.zero = True
        else:
            self.zero = False
            self.anchor = find_u_min(c)
            if self.anchor <= 0.0:
                raise AnchorUndefinedError("anchored quotient undefined: u_min = 0")
        self.c = c
        self.rank = rank
        self.thr = threshold_for(c)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.zero:
            return np.zeros_like(x)
        flat = x.ravel()
        uniq, inv = np.unique(flat, return_inverse=True)
        inner = (uniq > 0.0) & (uniq < 1.0)
        vals = np.zeros(uniq.size)  # f(0) = f(1) = 0
        if np.any(inner):
            f, ok = _anchored_values(self.c, uniq[inner], self.anchor, self.thr, self.rank)
            vals[inner] = np.where(ok, f, np.nan)
        return vals[inv].reshape(x.shape)


@dataclass
class AssembledRmm:
    """``max{0, uv - f(u) g(v)}`` with f, g recovered from two symmetric copulas."""

    c1: CopulaEvaluator
    c2: CopulaEvaluator
    rank: int = 0

    def __post_init__(self):
        self._f = _AnchoredGenerator(self.c1, self.rank)
        self._g = _AnchoredGenerator(self.c2, self.rank)

    @property
    def u_min(self) -> float:
        return self._f.anchor

    @property
    def v_min(self) -> float:
        return self._g.anchor

    def with_rank(self, rank: int) -> "AssembledRmm":
        return AssembledRmm(self.c1, self.c2, rank)

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.maximum(0.0, u * v - self._f(u) * self._g(v))
        return float(out) if out.ndim == 0 else out


def assemble_rmm_from_two_srmm(c1: CopulaEvaluator, c2: CopulaEvaluator,
                               rank: int = 0) -> AssembledRmm:
    """RMM copula whose generators are recovered from symmetric copulas ``c1`` and ``c2``.

    ``rank`` selects which admissible w (ordered by the scan score) is used, for
    checking that the result does not depend on that choice.
    """
    return AssembledRmm(c1, c2, rank)


@dataclass
class AssembledMaxmin:
    """``u - max{0, u(1-v) - f(u) g(1-v)}``: the reflected assembly."""

    rmm: AssembledRmm

    @property
    def v_max(self) -> float:
        return 1.0 - self.rmm.v_min

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = u - np.asarray(self.rmm(u, 1.0 - v))
        return float(out) if np.ndim(out) == 0 else out


def maxmin_closed_form(c1: CopulaEvaluator, c2: CopulaEvaluator, rank: int = 0) -> AssembledMaxmin:
    """Maxmin copula from the two symmetric factors of its reflected RMM copula."""
    return AssembledMaxmin(AssembledRmm(c1, c2, rank))


# -- CSV ------------------------------------------------------------------------------

def read_samples_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a CSV with header containing ``u`` and ``v``; values must lie in [0, 1]."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise InputFormatError("empty sample file") from None
    if "u" not in header or "v" not in header:
        raise InputFormatError("sample CSV header must contain 'u' and 'v'")
    iu, iv = header.index("u"), header.index("v")
    us, vs = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            u, v = float(row[iu]), float(row[iv])
        except (ValueError, IndexError) as exc:
            raise InputFormatError(f"line {lineno}: {exc}") from exc
        if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
            raise InputFormatError(f"line {lineno}: values must lie in [0, 1]")
        us.append(u)
        vs.append(v)
    return np.array(us), np.array(vs)
