"""Compare the compiled and pure-Python kernel backends.

Usage: ``python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 5]``

Each kernel runs on the same inputs under both backends; the table lists the best
wall time over ``--repeat`` runs, the speed-up and the largest output difference.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from rmmcopula._kernels import available_backends, get_backend
from rmmcopula.presets import get_preset

PRESETS = ("tent", "ex3b:delta=1/3", "ex3c:mu=1/2", "w")


def _cases(key: str, n: int, rng: np.random.Generator):
    p = get_preset(key)
    F, G = p.f.packed, p.g.packed
    t = rng.random(n)
    u = 1.0 - rng.random(n)
    w = rng.random(n)
    return {
        "eval_gen": lambda k: k.eval_gen(*F, t),
        "deriv_gen": lambda k: k.deriv_gen(*F, t, 1),
        "boundary_v0": lambda k: k.boundary_v0(F, G, u),
        "sample_conditional": lambda k: k.sample_conditional(F, G, u, w)[1],
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; only the python kernels are available")
    rng = np.random.default_rng(args.seed)
    print(f"{'preset':18s} {'kernel':20s} " + " ".join(f"{b:>11s}" for b in backends)
          + f" {'speed-up':>9s} {'max |diff|':>11s}")
    for key in PRESETS:
        for name, fn in _cases(key, args.n, rng).items():
            times, outs = {}, {}
            for b in backends:
                mod = get_backend(b)
                outs[b] = np.asarray(fn(mod))
                times[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
            speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
            diff = (float(np.max(np.abs(outs["compiled"] - outs["python"])))
                    if "compiled" in outs else 0.0)
            print(f"{key:18s} {name:20s} " + " ".join(f"{times[b]*1e3:9.2f}ms" for b in backends)
                  + f" {speed:8.1f}x {diff:11.2e}")


if __name__ == "__main__":
    main()
