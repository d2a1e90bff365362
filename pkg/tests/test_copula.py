import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import PRESET_KEYS
from rmmcopula.copula import (
    MaxminCopula,
    RmmCopula,
    boundary_curve,
    eval_maxmin,
    eval_rmm,
    frechet_bounds_check,
    grid_values,
    level_curve,
    maxmin_singular_curve,
    partial_derivative_u,
    partial_derivative_v,
    rectangle_volume,
    reflect_maxmin_to_rmm,
    reflect_rmm_to_maxmin,
)
from rmmcopula.errors import GeneratorConditionError, MathDomainError
from rmmcopula.generator import Generator, MaxminGenerators

PI = RmmCopula.from_preset("pi")
W = RmmCopula.from_preset("w")
EFGM = RmmCopula.from_preset("efgm:a=0.5")
GRID = np.linspace(0, 1, 41)


def test_checked_constructor_rejects_invalid():
    with pytest.raises(GeneratorConditionError):
        RmmCopula(Generator.polynomial([0, 0, 1]), Generator.zero())


@pytest.mark.parametrize("c, u, v, expected", [
    (W, 0.5, 0.5, 0.0),
    (W, 0.75, 0.5, 0.25),
    (EFGM, 0.5, 0.5, 0.234375),
    (PI, 0.3, 0.7, 0.21),
])
def test_eval_rmm(c, u, v, expected):
    assert_allclose(eval_rmm(c, u, v), expected, rtol=0, atol=1e-15)


def test_eval_rejects_outside_unit_square():
    with pytest.raises(MathDomainError):
        eval_rmm(W, 1.2, 0.5)
    with pytest.raises(MathDomainError):
        eval_rmm(W, 0.5, np.nan)


def test_margins_and_groundedness(preset_copula):
    t = np.linspace(0, 1, 51)
    assert_allclose(preset_copula(t, 1.0), t, atol=1e-15)
    assert_allclose(preset_copula(1.0, t), t, atol=1e-15)
    assert_allclose(preset_copula(t, 0.0), 0.0, atol=0)
    assert_allclose(preset_copula(0.0, t), 0.0, atol=0)


def test_star_form_agrees(preset_copula):
    assert_allclose(grid_values(preset_copula.star_form, GRID, GRID),
                    grid_values(preset_copula, GRID, GRID), atol=1e-14)


# -- maxmin -------------------------------------------------------------------------

def test_maxmin_identity_is_product():
    mm = MaxminGenerators.from_functions([(0, 1, (0, 1))], [(0, 1, (0, 1))])
    U, V = np.meshgrid(GRID, GRID, indexing="ij")
    assert_allclose(eval_maxmin(MaxminCopula(mm), U, V), U * V, atol=1e-15)


def test_maxmin_jump_generators_give_m():
    mm = MaxminGenerators.from_functions([(0, 1, (1,))], [(0, 1, (0,))])
    U, V = np.meshgrid(GRID, GRID, indexing="ij")
    assert_allclose(eval_maxmin(MaxminCopula(mm), U, V), np.minimum(U, V), atol=1e-15)


def test_reflected_w_is_m():
    U, V = np.meshgrid(GRID, GRID, indexing="ij")
    assert_allclose(reflect_rmm_to_maxmin(W)(U, V), np.minimum(U, V), atol=1e-15)


def test_maxmin_value_from_reflection():
    g = Generator.polynomial([0, 0.5, -0.5])
    f = Generator.polynomial([0, 1, -1])
    c = RmmCopula(f, g)
    mm = reflect_rmm_to_maxmin(c)
    assert_allclose(mm.mm.phi_at(0.6), 2 * 0.6 - 0.36, atol=1e-15)
    assert_allclose(eval_maxmin(mm, 0.6, 0.4), 0.6 - eval_rmm(c, 0.6, 0.6), atol=1e-15)


def test_reflection_roundtrip(preset_key):
    c = RmmCopula.from_preset(preset_key)
    mm = reflect_rmm_to_maxmin(c)
    U, V = np.meshgrid(GRID, GRID, indexing="ij")
    assert_allclose(mm(U, V), U - c(U, 1 - V), atol=1e-12)
    back = reflect_maxmin_to_rmm(mm)
    assert back.f == c.f and back.g == c.g


# -- volumes and bounds ---------------------------------------------------------------

@pytest.mark.parametrize("c, rect, expected", [
    (W, (0, 1, 0, 1), 1.0),
    (W, (0, 0.5, 0, 0.5), 0.0),
    (EFGM, (0, 0.5, 0, 0.5), 0.234375),
    (PI, (0.2, 0.5, 0.1, 0.4), 0.09),
])
def test_rectangle_volume(c, rect, expected):
    assert_allclose(rectangle_volume(c, *rect), expected, rtol=0, atol=1e-15)


def test_rectangle_volume_rejects_reversed():
    with pytest.raises(MathDomainError):
        rectangle_volume(W, 0.5, 0.2, 0, 1)


def test_frechet_bounds(preset_copula):
    rep = frechet_bounds_check(preset_copula)
    assert rep.passed
    assert rep.worst_point is None


def test_frechet_extremes():
    assert frechet_bounds_check(PI).max_gap_to_upper <= 1e-15
    assert frechet_bounds_check(W).max_gap_to_lower <= 1e-15


@given(st.sampled_from(PRESET_KEYS),
       st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)))
def test_two_increasing(key, pts):
    u1, u2 = sorted(pts[:2])
    v1, v2 = sorted(pts[2:])
    assert rectangle_volume(RmmCopula.from_preset(key), u1, u2, v1, v2) >= -1e-12


# -- geometry -----------------------------------------------------------------------

def test_boundary_curve_ex3c():
    c = RmmCopula.from_preset("ex3c:mu=1")
    geo = boundary_curve(c)
    u, v = geo.boundary.T
    assert_allclose(v, (1 - u) / (2 - u), atol=1e-11)
    assert geo.boundary[0].tolist() == [0.0, pytest.approx(0.5, abs=1e-11)]


def test_boundary_curve_ex3a_segment():
    c = RmmCopula.from_preset("ex3a:theta=1/3,eta=1/3")
    u = np.linspace(1 / 3, 2 / 3, 21)
    assert_allclose(c.boundary_v0(u), 1 - u, atol=1e-11)


def test_boundary_curve_pi_empty():
    geo = boundary_curve(PI)
    assert geo.empty and geo.u_range is None


def test_boundary_w_is_antidiagonal():
    u, v = boundary_curve(W).boundary.T
    assert_allclose(u + v, 1.0, atol=1e-11)


def test_level_curve_trivial():
    assert level_curve(W, 1.0).tolist() == [[1.0, 1.0]]


def test_level_curve_product_hyperbola():
    pts = level_curve(PI, 0.25, 4)  # u = 0.25, 0.5, 0.75, 1
    assert_allclose(pts[:, 0] * pts[:, 1], 0.25, atol=1e-11)
    assert_allclose(pts[1], [0.5, 0.5], atol=1e-11)


def test_level_curve_lies_on_level(preset_copula):
    pts = level_curve(preset_copula, 0.3, 51)
    assert_allclose(preset_copula(pts[:, 0], pts[:, 1]), 0.3, atol=1e-11)


def _has_concave_chord(pts):
    # v(u) along a level curve of a copula with convex upper level set is convex
    u, v = pts.T
    mid = 0.5 * (v[:-2] + v[2:])
    return bool(np.any(v[1:-1] > mid + 1e-9))


def test_level_curve_non_convex_ex3b():
    c = RmmCopula.from_preset("ex3b:delta=1/3")
    assert _has_concave_chord(level_curve(c, 0.02, 401))
    assert not _has_concave_chord(level_curve(PI, 0.02, 401))


def test_maxmin_singular_curve_ex3c():
    mm = MaxminCopula.from_preset("ex3c:mu=1")
    u, v = maxmin_singular_curve(mm).T
    assert_allclose(v, 1 / (2 - u), atol=1e-11)


def test_maxmin_singular_curve_m_and_pi():
    u, v = maxmin_singular_curve(reflect_rmm_to_maxmin(W)).T
    assert_allclose(u, v, atol=1e-11)
    assert maxmin_singular_curve(reflect_rmm_to_maxmin(PI)).shape == (0, 2)


# -- partial derivatives ----------------------------------------------------------------

def test_partial_u_product():
    U, V = np.meshgrid(GRID, GRID, indexing="ij")
    assert_allclose(partial_derivative_u(PI, U[1:], V[1:]), V[1:], atol=1e-15)


def test_partial_u_w():
    # v - f'(u) g(v) = 0.5 + 0.5 = 1 = dW/du on {u + v > 1}
    assert partial_derivative_u(W, 0.75, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert partial_derivative_u(W, 0.25, 0.5) == 0.0


def test_partial_w_at_jump_raises():
    with pytest.raises(MathDomainError):
        partial_derivative_v(W, 0.5, 0.0)


def test_partial_u_nondecreasing_in_v(preset_copula):
    v = np.linspace(0, 1, 201)
    for u in (0.1, 0.37, 0.5, 0.81, 0.99):
        d = partial_derivative_u(preset_copula, np.full_like(v, u), v)
        assert np.all(np.diff(d) >= -1e-12)
