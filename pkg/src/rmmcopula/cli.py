"""Command-line front end: ``rmmcopula <command> [flags]``.

Every command is a pure function of its flags, input files and seed. Numbers are
printed with 12 significant digits; CSV output is comma-separated with LF endings.
Exit codes: 0 success, 1 math-domain error (including failed generator conditions),
2 input-format error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from ._numbers import fmt
from .copula import (
    RmmCopula,
    boundary_curve,
    eval_maxmin,
    eval_rmm,
    level_curve,
    rectangle_volume,
    reflect_rmm_to_maxmin,
)
from .diagonal import (
    DiagonalSection,
    delta_hat,
    delta_sharp,
    get_diagonal,
    in_D_hat,
    load_diagonal,
    srmm_from_diagonal,
)
from .errors import InputFormatError, RmmError
from .generator import Generator, loads_json, validate_generator
from .inference import (
    EmpiricalCopula,
    read_samples_csv,
    recover_generator,
    recover_generator_up_to_scale,
)
from .measure import density, mass_decomposition
from .presets import describe_catalog, get_preset
from .sampler import figure_bundle, sample_maxmin, sample_rmm

# flags a --config file may set, with their types
_CONFIG_KEYS = {
    "preset": str, "file": str, "file_g": str, "grid": int, "seed": int, "n": int,
    "out": str, "u": str, "v": str, "u1": float, "u2": float, "v1": float, "v2": float,
    "t": float, "threads": int, "samples": str, "maxmin": bool, "json": bool,
    "check_dhat": bool, "srmm": bool, "up_to_scale": bool,
}


# -- helpers --------------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _floats(text: str | None, name: str) -> np.ndarray:
    if text is None:
        raise InputFormatError(f"--{name} is required")
    try:
        return np.array([float(x) for x in str(text).split(",") if x.strip()], dtype=float)
    except ValueError as exc:
        raise InputFormatError(f"--{name}: {exc}") from exc


def _read_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    return loads_json(text)


def _copula(args) -> RmmCopula:
    if args.preset and args.file:
        raise InputFormatError("give either --preset or --file, not both")
    if args.preset:
        return RmmCopula.from_preset(args.preset)
    if args.file:
        f = Generator.from_dict(_read_json(args.file))
        g = Generator.from_dict(_read_json(args.file_g)) if args.file_g else f
        return RmmCopula(f, g)
    raise InputFormatError("one of --preset or --file is required")


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------------

def cmd_validate(args) -> int:
    if args.preset and not args.file:
        p = get_preset(args.preset)
        reports = {"f": validate_generator(p.f, args.grid), "g": validate_generator(p.g, args.grid)}
    elif args.file:
        reports = {"f": validate_generator(_read_json(args.file), args.grid)}
        if args.file_g:
            reports["g"] = validate_generator(_read_json(args.file_g), args.grid)
    else:
        raise InputFormatError("one of --preset or --file is required")
    out, messages, code = {}, [], 0
    for name, rep in reports.items():
        out[name] = rep.to_dict()
        if not rep.to_dict()["structural_ok"]:
            messages.append(f"{name}: structural error: {rep.to_dict()['structural_error']}")
            code = 2
            continue
        for cond in rep.failed():
            messages.append(f"{name}: ({cond}) failed: {rep.failures.get(cond, '')}")
            code = max(code, 1)
    out["passed"] = code == 0
    out["messages"] = messages
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    for m in messages:
        print(m, file=sys.stderr)
    return code


def cmd_eval(args) -> int:
    c = _copula(args)
    u, v = _floats(args.u, "u"), _floats(args.v, "v")
    if u.size != v.size and 1 not in (u.size, v.size):
        raise InputFormatError("--u and --v must have equal length or length 1")
    u, v = np.broadcast_arrays(u, v)
    val = eval_maxmin(reflect_rmm_to_maxmin(c), u, v) if args.maxmin else eval_rmm(c, u, v)
    _emit("".join(f"{fmt(x)}\n" for x in np.atleast_1d(val)), args.out)
    return 0


def cmd_volume(args) -> int:
    c = _copula(args)
    target = reflect_rmm_to_maxmin(c) if args.maxmin else c
    vol = rectangle_volume(target, args.u1, args.u2, args.v1, args.v2)
    _emit(f"{fmt(vol)}\n", args.out)
    return 0


def cmd_density(args) -> int:
    c = _copula(args)
    u, v = np.broadcast_arrays(_floats(args.u, "u"), _floats(args.v, "v"))
    val, flag = density(c, u, v, return_flag=True)
    rows = [f"{fmt(a)},{int(b)}" for a, b in zip(np.atleast_1d(val), np.atleast_1d(flag))]
    _emit("density,on_boundary\n" + "\n".join(rows) + "\n", args.out)
    return 0


def cmd_mass(args) -> int:
    c = _copula(args)
    m = mass_decomposition(c, n_profile=args.grid)
    if args.json:
        _emit(m.to_json() + "\n", args.out)
    else:
        _emit(f"ac_mass {fmt(m.ac_mass)}\nsingular_mass {fmt(m.singular_mass)}\n"
              f"zero_set_area {fmt(m.zero_set_area)}\n", args.out)
    return 0


def cmd_levelset(args) -> int:
    c = _copula(args)
    if args.t is None or args.t == 0.0:
        pts = boundary_curve(c, args.grid).boundary
    else:
        pts = level_curve(c, args.t, args.grid)
    _emit(_csv(["u", "v"], pts), args.out)
    return 0


def _diagonal(args) -> DiagonalSection:
    if args.file:
        return load_diagonal(args.file)
    if args.preset:
        return get_diagonal(args.preset)
    raise InputFormatError("one of --preset or --file is required")


def cmd_diagonal(args) -> int:
    d = _diagonal(args)
    if args.check_dhat:
        rep = in_D_hat(d, args.grid)
        lines = ["member of D-hat" if rep.member else "not a member of D-hat"]
        for k, msg in rep.failures.items():
            lines.append(f"{k}: {msg}")
        if rep.witness is not None:
            s, hs, t, ht = rep.witness
            lines.append(f"witness: hat({fmt(s)}) = {fmt(hs)} > hat({fmt(t)}) = {fmt(ht)}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.srmm:
        c = srmm_from_diagonal(d)
        _emit(json.dumps(c.f.to_dict(), indent=2) + "\n", args.out)
        return 0
    t = np.linspace(0.0, 1.0, args.grid)
    inner = t[1:]
    sharp = np.concatenate([[np.nan], np.atleast_1d(delta_sharp(d, inner))])
    rows = zip(t, np.atleast_1d(d(t)), sharp, np.atleast_1d(delta_hat(d, t)))
    _emit(_csv(["t", "delta", "delta_sharp", "delta_hat"], rows).replace("nan", ""), args.out)
    return 0


def cmd_recover(args) -> int:
    if args.samples:
        c = EmpiricalCopula.from_sample(*read_samples_csv(args.samples))
    else:
        c = _copula(args)
    grid = np.linspace(0.0, 1.0, args.grid)[1:]
    res = recover_generator_up_to_scale(c, grid) if args.up_to_scale else recover_generator(c, grid)
    _emit(res.to_csv(), args.out)
    if args.out:
        Path(args.out + ".json").write_text(res.summary_json() + "\n", encoding="utf-8")
    return 0


def cmd_sample(args) -> int:
    c = _copula(args)
    if args.n is None or args.n < 0:
        raise InputFormatError("--n must be a nonnegative integer")
    source = args.preset or args.file
    if args.maxmin:
        s = sample_maxmin(reflect_rmm_to_maxmin(c), args.n, args.seed, args.threads, source)
    else:
        s = sample_rmm(c, args.n, args.seed, args.threads, source)
    if args.out:
        s.write(args.out, preset=source, copula="maxmin" if args.maxmin else "rmm")
    else:
        sys.stdout.write(s.to_csv())
    return 0


def cmd_figures(args) -> int:
    if not args.out:
        raise InputFormatError("--out DIR is required")
    for p in figure_bundle(args.out, args.n, args.seed, args.threads):
        print(p.as_posix())
    return 0


# -- parser ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, grid: int) -> None:
    p.add_argument("--preset", help="preset key (see `rmmcopula --help`)")
    p.add_argument("--file", help="generator JSON file (f, and g unless --file-g)")
    p.add_argument("--file-g", dest="file_g", help="generator JSON file for g")
    p.add_argument("--grid", type=int, default=grid, help="grid size (default %(default)s)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--config", help="JSON file of flag values; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmmcopula",
        description="Reflected maxmin (RMM) and maxmin copulas from generator functions.",
        epilog="presets:\n" + describe_catalog() + "\n\nexit codes: 1 math-domain, "
               "2 input-format, 3 numerical non-convergence",
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--backend-info", action="store_true", help="print kernel backend and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("validate", help="check generator conditions G1-G3")
    _common(p, 1001)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="evaluate C(u, v); comma lists allowed")
    _common(p, 0)
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--maxmin", action="store_true", help="evaluate the maxmin partner")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("volume", help="C-volume of [u1,u2] x [v1,v2]")
    _common(p, 0)
    for k in ("u1", "u2", "v1", "v2"):
        p.add_argument(f"--{k}", type=float, required=True)
    p.add_argument("--maxmin", action="store_true")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("density", help="density of the absolutely continuous part")
    _common(p, 0)
    p.add_argument("--u")
    p.add_argument("--v")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("mass", help="absolutely continuous / singular mass decomposition")
    _common(p, 201)
    p.add_argument("--json", action="store_true", help="full decomposition with the jump profile")
    p.set_defaults(func=cmd_mass)

    p = sub.add_parser("levelset", help="points of the level curve C = t (t = 0: zero-level curve)")
    _common(p, 201)
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(func=cmd_levelset)

    p = sub.add_parser("diagonal", help="diagonal section, D-hat membership, SRMM generator")
    _common(p, 1001)
    p.add_argument("--check-dhat", dest="check_dhat", action="store_true")
    p.add_argument("--srmm", action="store_true", help="print the SRMM generator with this diagonal")
    p.set_defaults(func=cmd_diagonal)

    p = sub.add_parser("recover", help="recover the generator of a symmetric RMM copula")
    _common(p, 101)
    p.add_argument("--samples", help="CSV of (u, v) samples; uses the empirical copula")
    p.add_argument("--up-to-scale", dest="up_to_scale", action="store_true")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("sample", help="draw random pairs (CSV with a JSON metadata sidecar)")
    _common(p, 0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--maxmin", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("figures", help="write the Figure-1 / Figure-2 scatter data bundle")
    _common(p, 0)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_figures)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` fill only flags not given explicitly."""
    args = parser.parse_args(argv)
    path = getattr(args, "config", None)
    if not path:
        return args
    cfg = _read_json(path)
    if not isinstance(cfg, dict):
        raise InputFormatError("config file must hold a JSON object")
    defaults = {}
    for key, value in cfg.items():
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise InputFormatError(f"unknown config key {key!r}")
        defaults[key] = _CONFIG_KEYS[key](str(value) if _CONFIG_KEYS[key] is str else value)
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        if args.backend_info:
            print(_kernels.BACKEND)
            return 0
        if not args.command:
            parser.print_help()
            return 2
        return int(args.func(args))
    except RmmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InputFormatError.exit_code


if __name__ == "__main__":
    sys.exit(main())
