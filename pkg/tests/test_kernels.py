import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_array_equal

from rmmcopula import _kernels
from rmmcopula.presets import CATALOG, get_preset

BACKENDS = _kernels.available_backends()
needs_compiled = pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")


def test_python_backend_always_available():
    assert "python" in BACKENDS
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


def test_env_var_forces_fallback():
    out = subprocess.run(
        [sys.executable, "-c", "import rmmcopula; print(rmmcopula.BACKEND)"],
        env={**os.environ, "RMMCOPULA_PURE_PYTHON": "1"}, capture_output=True, text=True,
        check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@pytest.mark.parametrize("key", list(CATALOG))
def test_backends_agree(key):
    comp, pure = _kernels.get_backend("compiled"), _kernels.get_backend("python")
    p = get_preset(key)
    F, G = p.f.packed, p.g.packed
    rng = np.random.default_rng(0)
    t = np.concatenate([rng.random(2000), [0.0, 1.0], p.f.breakpoints])
    w = rng.random(t.size)
    u = np.clip(t, 1e-300, 1.0)
    assert_array_equal(comp.eval_gen(*F, t), pure.eval_gen(*F, t))
    for side in (-1, 0, 1):
        assert_array_equal(comp.deriv_gen(*F, t, side), pure.deriv_gen(*F, t, side))
    assert_array_equal(comp.boundary_v0(F, G, u), pure.boundary_v0(F, G, u))
    for a, b in zip(comp.sample_conditional(F, G, u, w), pure.sample_conditional(F, G, u, w)):
        assert_array_equal(a, b)


@needs_compiled
@given(st.sampled_from(list(CATALOG)), st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_backends_agree_property(key, ts):
    comp, pure = _kernels.get_backend("compiled"), _kernels.get_backend("python")
    F = get_preset(key).f.packed
    t = np.asarray(ts)
    assert_array_equal(comp.eval_gen(*F, t), pure.eval_gen(*F, t))


@pytest.mark.parametrize("backend", BACKENDS)
def test_breakpoint_nudge(backend):
    k = _kernels.get_backend(backend)
    p = get_preset("tent")
    u = np.array([0.5, 0.25])
    used, v, _ = k.sample_conditional(p.f.packed, p.g.packed, u, np.array([0.3, 0.3]))
    assert used[0] == np.nextafter(0.5, 1.0)
    assert used[1] == 0.25
    assert np.all((v >= 0) & (v <= 1))
