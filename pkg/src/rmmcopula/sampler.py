"""Random pairs from RMM and maxmin copulas by conditional inversion.

Given ``U = u`` the d.f. of ``V`` is 0 below ``v0(u)``, has an atom of size
``jump(u) = v0(u) - f'(u) g(v0(u))`` at ``v0(u)`` and equals ``v - f'(u) g(v)`` above.
A uniform ``w <= jump(u)`` therefore yields the singular draw ``v = v0(u)``; otherwise
``v - f'(u) g(v) = w`` is solved by bisection to 1e-12.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``; the draws are
split into fixed-size chunks, each with its own spawned substream, so the output does
not depend on the number of worker threads.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from ._numbers import fmt
from .copula import MaxminCopula, RmmCopula, reflect_maxmin_to_rmm
from .presets import FIGURE1, FIGURE2

CHUNK = 1 << 16
ALGORITHM = f"numpy.random.PCG64 / SeedSequence.spawn per {CHUNK}-draw chunk"


@dataclass(frozen=True)
class SampleSet:
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    singular: np.ndarray = field(repr=False)
    seed: int
    source: str

    @property
    def n(self) -> int:
        return int(self.u.size)

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.u, self.v])

    def singular_fraction(self) -> float:
        return float(np.mean(self.singular)) if self.n else 0.0

    def to_csv(self) -> str:
        lines = ["u,v,singular"]
        lines.extend(f"{fmt(a)},{fmt(b)},{int(s)}"
                     for a, b, s in zip(self.u.tolist(), self.v.tolist(), self.singular.tolist()))
        return "\n".join(lines) + "\n"

    def metadata(self, **extra) -> dict:
        return {"source": self.source, "n": self.n, "seed": self.seed,
                "algorithm": ALGORITHM, "kernel_backend": _kernels.BACKEND, **extra}

    def write(self, path: str | Path, **extra) -> tuple[Path, Path]:
        """Write ``path`` (CSV) and ``path.json`` (metadata sidecar)."""
        path = Path(path)
        path.write_text(self.to_csv(), encoding="utf-8", newline="\n")
        meta = path.with_suffix(path.suffix + ".json")
        meta.write_text(json.dumps(self.metadata(**extra), indent=2) + "\n", encoding="utf-8")
        return path, meta


def _draw_chunk(c: RmmCopula, child: np.random.SeedSequence, m: int):
    rng = np.random.Generator(np.random.PCG64(child))
    u = 1.0 - rng.random(m)  # (0, 1]
    w = rng.random(m)
    return _kernels.sample_conditional(c.f.packed, c.g.packed, u, w)


def sample_rmm(c: RmmCopula, n: int, seed: int = 0, threads: int = 1,
               source: str = "rmm") -> SampleSet:
    """n draws from ``c``; bit-identical for equal (c, n, seed) whatever ``threads``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    seed = int(seed)
    if n == 0:
        empty = np.empty(0)
        return SampleSet(empty, empty, np.empty(0, dtype=bool), seed, source)
    sizes = [min(CHUNK, n - s) for s in range(0, n, CHUNK)]
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(children, sizes))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda job: _draw_chunk(c, *job), jobs))
    else:
        parts = [_draw_chunk(c, *job) for job in jobs]
    u = np.concatenate([p[0] for p in parts])
    v = np.concatenate([p[1] for p in parts])
    s = np.concatenate([p[2] for p in parts]).astype(bool)
    return SampleSet(u, v, s, seed, source)


def sample_maxmin(c: MaxminCopula, n: int, seed: int = 0, threads: int = 1,
                  source: str = "maxmin") -> SampleSet:
    """Draw from the reflected RMM copula and map ``(u, v) -> (u, 1 - v)``."""
    s = sample_rmm(reflect_maxmin_to_rmm(c), n, seed, threads, source)
    return SampleSet(s.u, 1.0 - s.v, s.singular, s.seed, source)


def figure_dataset(preset_key: str, n: int, seed: int = 0, threads: int = 1) -> SampleSet:
    return sample_rmm(RmmCopula.from_preset(preset_key), n, seed, threads, source=preset_key)


def figure_bundle(out_dir: str | Path, n: int, seed: int = 0, threads: int = 1) -> list[Path]:
    """Write CSV and metadata files for every Figure-1 and Figure-2 panel."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    panels = [("figure1", i, k) for i, k in enumerate(FIGURE1, 1)]
    panels += [("figure2", i, k) for i, k in enumerate(FIGURE2, 1)]
    for fig, i, key in panels:
        s = figure_dataset(key, n, seed, threads)
        csv_path, meta = s.write(out / f"{fig}_panel{i}.csv", figure=fig, panel=i, preset=key)
        written += [csv_path, meta]
    return written
