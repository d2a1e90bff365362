"""Named generator pairs, addressed by string keys such as ``"ex3a:theta=1/3,eta=1/3"``.

A key is ``family`` or ``family:name=value,...``; values are exact rationals
(``1/3``) or decimal literals (``0.5``). :data:`CATALOG` lists the canonical
instances used throughout the tests and the figure bundle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ._numbers import as_fraction, frac_str
from .errors import InputFormatError, MathDomainError
from .generator import Generator, Piece, require_valid

_0, _1 = Fraction(0), Fraction(1)


def zero_gen() -> Generator:
    return Generator.zero()


def w_gen() -> Generator:
    """1 - t on (0, 1], jumping to 1 at 0."""
    return Generator((Piece(0, 1, (1, -1)),))


def tent(scale: Fraction = _1) -> Generator:
    """scale * min{t, 1 - t}."""
    h = Fraction(1, 2)
    return Generator((Piece(0, h, (0, scale)), Piece(h, 1, (scale, -scale))))


def parabola(a: Fraction) -> Generator:
    """a * t * (1 - t)."""
    return Generator.polynomial((0, a, -a))


def ramp(mu: Fraction) -> Generator:
    """mu - t on (0, mu], 0 on [mu, 1]."""
    if mu == 1:
        return Generator((Piece(0, 1, (1, -1)),))
    return Generator((Piece(0, mu, (mu, -1)), Piece(mu, 1, (0,))))


def kinked(theta: Fraction) -> Generator:
    """(1/theta - 1) t on [0, theta], 1 - t on [theta, 1]."""
    return Generator((Piece(0, theta, (0, 1 / theta - 1)), Piece(theta, 1, (1, -1))))


def plateau(delta: Fraction) -> Generator:
    """delta on (0, delta], t on [delta, 1/2], 1 - t on [1/2, 1]."""
    h = Fraction(1, 2)
    pieces = [Piece(0, delta, (delta,))]
    if delta < h:
        pieces.append(Piece(delta, h, (0, 1)))
    pieces.append(Piece(h, 1, (1, -1)))
    return Generator(tuple(pieces))


def half_then_reverse() -> Generator:
    """t/2 on [0, 2/3], 1 - t on [2/3, 1]."""
    c = Fraction(2, 3)
    return Generator((Piece(0, c, (0, Fraction(1, 2))), Piece(c, 1, (1, -1))))


@dataclass(frozen=True)
class Preset:
    key: str
    f: Generator
    g: Generator
    description: str

    @property
    def symmetric(self) -> bool:
        return self.f == self.g


def _in_open(name: str, x: Fraction, lo: Fraction, hi: Fraction, hi_closed: bool = False) -> None:
    if not (lo < x and (x <= hi if hi_closed else x < hi)):
        close = "]" if hi_closed else ")"
        raise MathDomainError(f"parameter {name}={frac_str(x)} outside ({lo}, {hi}{close}")


def _efgm(p):
    a = p["a"]
    _in_open("a", a, _0, _1, True)
    return parabola(a), parabola(a)


def _ex31(p):
    a, b = p["a"], p["b"]
    _in_open("a", a, _0, _1, True)
    _in_open("b", b, _0, _1, True)
    return tent(a), parabola(b)


def _ex3a(p):
    th, eta = p["theta"], p["eta"]
    _in_open("theta", th, _0, _1)
    _in_open("eta", eta, _0, _1)
    return kinked(th), kinked(eta)


def _ex3b(p):
    d = p["delta"]
    _in_open("delta", d, _0, Fraction(1, 2), True)
    return plateau(d), plateau(d)


def _ex3c(p):
    mu = p["mu"]
    _in_open("mu", mu, _0, _1, True)
    return parabola(_1), ramp(mu)


def _ramp(p):
    mu = p["mu"]
    _in_open("mu", mu, _0, _1, True)
    return ramp(mu), ramp(mu)


_FIG2: dict[str, Callable[[], tuple[Generator, Generator]]] = {
    "1": lambda: (kinked(Fraction(1, 3)), ramp(Fraction(2, 3))),
    "2": lambda: (ramp(Fraction(1, 2)), ramp(Fraction(2, 3))),
    "3": lambda: (plateau(Fraction(1, 2)), plateau(Fraction(1, 2))),
    "4": lambda: (kinked(Fraction(1, 3)), parabola(_1)),
    "5": lambda: (half_then_reverse(), parabola(_1)),
    "6": lambda: (plateau(Fraction(1, 3)), parabola(_1)),
}

# family -> (builder, parameter names, description)
FAMILIES: dict[str, tuple[Callable, tuple[str, ...], str]] = {
    "pi": (lambda p: (zero_gen(), zero_gen()), (), "f = g = 0: independence copula uv"),
    "w": (lambda p: (w_gen(), w_gen()), (),
          "f = g = 1 - t on (0,1]: lower Frechet bound max{0, u+v-1}"),
    "efgm": (_efgm, ("a",), "f = g = a t(1-t), 0 < a <= 1: EFGM copula uv - a^2 uv(1-u)(1-v)"),
    "ex31": (_ex31, ("a", "b"),
             "f = a min{t,1-t}, g = b t(1-t): absolutely continuous, depends on ab only"),
    "ex3a": (_ex3a, ("theta", "eta"),
             "f = (1/theta-1)t then 1-t, g likewise with eta: singular segment on u+v=1 "
             "when theta+eta < 1"),
    "ex3b": (_ex3b, ("delta",),
             "f = g = delta on (0,delta], t up to 1/2, 1-t after: two singular arcs of mass "
             "delta ln 2 each"),
    "ex3c": (_ex3c, ("mu",),
             "f = t(1-t), g = max{0, mu-t} on (0,1]: singular arc v = mu(1-u)/(2-u)"),
    "tent": (lambda p: (tent(), tent()), (),
             "f = g = min{t,1-t}: the SRMM copula with the largest generator for diagonal "
             "max{0,2t-1}"),
    "tent-ramp": (lambda p: (tent(), ramp(Fraction(1, 2))), (),
                  "f = min{t,1-t}, g = max{0,1/2-t} on (0,1]: diagonal whose t+sqrt(t^2-delta) "
                  "is not monotone"),
    "ramp": (_ramp, ("mu",), "f = g = max{0, mu-t} on (0,1]"),
    "fig2": (None, ("n",), "scatterplot gallery pairs fig2:1 ... fig2:6"),  # type: ignore[dict-item]
}

CATALOG: tuple[str, ...] = (
    "pi", "w", "efgm:a=0.5", "ex31:a=0.4,b=0.6",
    "ex3a:theta=1/3,eta=1/3", "ex3a:theta=1/3,eta=2/3", "ex3a:theta=2/3,eta=2/3",
    "ex3b:delta=1/3", "ex3c:mu=1", "ex3c:mu=1/2",
    "tent", "tent-ramp", "ramp:mu=1/2",
    "fig2:1", "fig2:2", "fig2:3", "fig2:4", "fig2:5", "fig2:6",
)

FIGURE1: tuple[str, ...] = (
    "ex3a:theta=1/3,eta=1/3", "ex3a:theta=1/3,eta=2/3", "ex3a:theta=2/3,eta=2/3",
    "ex3b:delta=1/3", "ex3c:mu=1", "ex3c:mu=1/2",
)
FIGURE2: tuple[str, ...] = tuple(f"fig2:{i}" for i in range(1, 7))


def parse_key(key: str) -> tuple[str, dict[str, str]]:
    """Split ``"family:a=1,b=2"`` into ``("family", {"a": "1", "b": "2"})``."""
    key = key.strip()
    family, _, rest = key.partition(":")
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            name, eq, value = item.partition("=")
            if not eq or not name.strip() or not value.strip():
                raise InputFormatError(f"bad parameter {item!r} in preset key {key!r}")
            params[name.strip()] = value.strip()
    return family.strip().lower(), params


def get_preset(key: str) -> Preset:
    """Build and validate the generator pair named by ``key``."""
    if key.strip().lower().startswith("fig2"):
        _, _, n = key.strip().partition(":")
        n = n.removeprefix("n=")
        if n not in _FIG2:
            raise InputFormatError(f"unknown gallery pair {key!r}; use fig2:1 ... fig2:6")
        f, g = _FIG2[n]()
        desc = FAMILIES["fig2"][2]
    else:
        family, raw = parse_key(key)
        if family not in FAMILIES:
            raise InputFormatError(f"unknown preset family {family!r}")
        build, names, desc = FAMILIES[family]
        if set(raw) != set(names):
            raise InputFormatError(
                f"preset {family!r} takes parameters {list(names)}, got {sorted(raw)}")
        try:
            params = {k: as_fraction(v) for k, v in raw.items()}
        except (ValueError, ZeroDivisionError) as exc:
            raise InputFormatError(f"bad numeric parameter in {key!r}: {exc}") from exc
        f, g = build(params)
    require_valid(f, f"{key} f")
    require_valid(g, f"{key} g")
    return Preset(key, f, g, desc)


def symmetric_catalog() -> tuple[str, ...]:
    return tuple(k for k in CATALOG if get_preset(k).symmetric)


def describe_catalog() -> str:
    """One line per family, for CLI help."""
    lines = []
    for fam, (_, names, desc) in FAMILIES.items():
        sig = fam + (":" + ",".join(f"{n}=..." for n in names) if names and fam != "fig2" else "")
        lines.append(f"  {sig:<22} {desc}")
    lines.append("  canonical keys: " + ", ".join(CATALOG))
    return "\n".join(lines)
