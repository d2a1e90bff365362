import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from rmmcopula.errors import GeneratorConditionError, InputFormatError, MathDomainError
from rmmcopula.generator import (
    Generator,
    MaxminGenerators,
    Piece,
    derivative_f,
    dump_generator,
    eval_f,
    eval_f_hat,
    eval_f_star,
    f_star_at_zero,
    generators_from_maxmin,
    load_generator,
    maxmin_from_generators,
    scale_generator_pair,
    validate_generator,
    validate_maxmin,
)
from rmmcopula.presets import CATALOG, get_preset, kinked, plateau, tent, w_gen

W = w_gen()
EFGM = Generator.polynomial([0, Fraction(1, 2), Fraction(-1, 2)])
LOGISTIC = Generator.polynomial([0, 1, -1])


# -- evaluation ----------------------------------------------------------------------

def test_eval_f_at_zero_ignores_jump():
    assert eval_f(W, 0.0) == 0.0
    assert W.zero_limit == 1


@pytest.mark.parametrize("gen, t, expected", [
    (W, 0.25, 0.75),
    (EFGM, 0.5, 0.125),
    (tent(), 0.3, 0.3),
    (tent(), 0.8, 0.2),
])
def test_eval_f(gen, t, expected):
    assert_allclose(eval_f(gen, t), expected, rtol=0, atol=1e-15)


def test_eval_vectorised_matches_scalar():
    t = np.linspace(0, 1, 17)
    assert_allclose(W(t), [eval_f(W, x) for x in t])


@pytest.mark.parametrize("gen, t, expected", [
    (W, 0.0, math.inf),
    (EFGM, 0.0, 0.5),
    (EFGM, 0.5, 0.25),
    (W, 0.5, 1.0),
])
def test_eval_f_star(gen, t, expected):
    assert eval_f_star(gen, t) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("key", list(CATALOG))
def test_f_star_vanishes_at_one(key):
    p = get_preset(key)
    assert eval_f_star(p.f, 1.0) == 0.0
    assert eval_f_star(p.g, 1.0) == 0.0


def test_f_star_at_zero_cases():
    assert f_star_at_zero(Generator.zero()) == 0.0
    assert f_star_at_zero(tent()) == 1.0
    assert math.isinf(f_star_at_zero(plateau(Fraction(1, 3))))


@pytest.mark.parametrize("gen, t, expected", [
    (W, 0.3, 1.0),
    (LOGISTIC, 0.5, 0.75),
    (LOGISTIC, 1.0, 1.0),
    (EFGM, 1.0, 1.0),
])
def test_eval_f_hat(gen, t, expected):
    assert eval_f_hat(gen, t) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("gen, t, side, expected", [
    (W, 0.5, "right", -1.0),
    (LOGISTIC, 0.5, "right", 0.0),
    (plateau(Fraction(1, 3)), 0.75, "left", -1.0),
    (plateau(Fraction(1, 3)), 0.75, "right", -1.0),
    (tent(), 0.5, "left", 1.0),
    (tent(), 0.5, "right", -1.0),
])
def test_derivative(gen, t, side, expected):
    assert derivative_f(gen, t, side) == pytest.approx(expected, abs=1e-15)


def test_derivative_at_jump_raises():
    with pytest.raises(MathDomainError):
        derivative_f(W, 0.0)


# -- validation ----------------------------------------------------------------------

def test_square_fails_g3():
    # t^2 also fails G1 because f(1) = 1
    rep = validate_generator(Generator.polynomial([0, 0, 1]))
    assert not rep.passed
    assert rep.conditions["G2"]
    assert not rep.conditions["G3"]
    assert not rep.conditions["G1"]


def test_g3_only_failure():
    rep = validate_generator(Generator.polynomial([0, 0, 1, -1]))
    assert rep.failed() == ["G3"]


def test_g2_failure():
    rep = validate_generator(Generator.polynomial([0, 2, -2]))
    assert "G2" in rep.failed()


@pytest.mark.parametrize("gen", [kinked(Fraction(1, 3)), Generator.zero(), W, tent(), EFGM])
def test_valid_generators(gen):
    assert validate_generator(gen).passed


@pytest.mark.parametrize("key", list(CATALOG))
def test_every_preset_validates(key):
    p = get_preset(key)
    assert validate_generator(p.f).passed
    assert validate_generator(p.g).passed


@pytest.mark.parametrize("pieces", [
    [],
    [(0, Fraction(1, 2), (0, 1))],
    [(0, Fraction(1, 2), (0, 1)), (Fraction(1, 3), 1, (1, -1))],
    [(0, Fraction(1, 2), (0, 1)), (Fraction(1, 2), 1, (2, -1))],
])
def test_malformed_partitions(pieces):
    with pytest.raises(InputFormatError):
        Generator.from_pieces(pieces)
    assert not validate_generator(pieces).to_dict()["structural_ok"]


# -- serialization ---------------------------------------------------------------------

def test_file_roundtrip(tmp_path):
    p = get_preset("ex3b:delta=1/3")
    path = tmp_path / "f.json"
    dump_generator(p.f, path)
    assert load_generator(path) == p.f
    assert json.loads(path.read_text())["version"] == 1


def test_file_degree_limit():
    d = {"version": 1, "pieces": [{"from": 0, "to": 1, "coeffs": [0, 1, 0, 0, -1]}]}
    with pytest.raises(InputFormatError):
        Generator.from_dict(d)


def test_decimal_literals_stay_exact():
    d = {"version": 1, "pieces": [{"from": 0, "to": 1, "coeffs": [0, 0.1, -0.1]}]}
    gen = Generator.from_dict(d)
    assert gen.pieces[0].coeffs[1] == Fraction(1, 10)


# -- maxmin conversion -----------------------------------------------------------------

def test_identity_maxmin_gives_zero_generators():
    mm = MaxminGenerators.from_functions([(0, 1, (0, 1))], [(0, 1, (0, 1))])
    f, g = generators_from_maxmin(mm)
    assert f.is_zero and g.is_zero


def test_tent_phi():
    h = Fraction(1, 2)
    mm = MaxminGenerators.from_functions([(0, h, (0, 2)), (h, 1, (1,))], [(0, 1, (0, 1))])
    f, g = generators_from_maxmin(mm)
    assert_allclose(f(np.linspace(0, 1, 11)), np.minimum(np.linspace(0, 1, 11), 1 - np.linspace(0, 1, 11)),
                    atol=1e-15)
    assert g.is_zero


def test_jump_generators_give_w():
    mm = MaxminGenerators.from_functions([(0, 1, (1,))], [(0, 1, (0,))])
    assert validate_maxmin(mm).passed
    f, g = generators_from_maxmin(mm)
    t = np.linspace(0.01, 1, 50)
    assert_allclose(f(t), 1 - t, atol=1e-15)
    assert_allclose(g(t), 1 - t, atol=1e-15)


def test_phi_of_logistic():
    mm = maxmin_from_generators(LOGISTIC, Generator.zero())
    u = np.linspace(0, 1, 21)
    assert_allclose(mm.phi_at(u), 2 * u - u * u, atol=1e-15)
    assert_allclose(mm.psi_at(u), u, atol=1e-15)


@pytest.mark.parametrize("key", list(CATALOG))
def test_maxmin_roundtrip_exact(key):
    p = get_preset(key)
    f, g = generators_from_maxmin(maxmin_from_generators(p.f, p.g))
    assert f == p.f
    assert g == p.g


def test_invalid_maxmin_rejected():
    mm = MaxminGenerators.from_functions([(0, 1, (0, 0, 1))], [(0, 1, (0, 1))])  # phi* = u increases
    with pytest.raises(GeneratorConditionError):
        generators_from_maxmin(mm)


# -- scaling ---------------------------------------------------------------------------

def test_scale_example_pair():
    f = tent(Fraction(2, 5))
    g = Generator.polynomial([0, Fraction(3, 5), Fraction(-3, 5)])
    fs, gs = scale_generator_pair(f, g, Fraction(3, 2))
    assert fs == tent(Fraction(3, 5))
    assert gs == Generator.polynomial([0, Fraction(2, 5), Fraction(-2, 5)])


def test_scale_identity():
    p = get_preset("ex31:a=0.4,b=0.6")
    assert scale_generator_pair(p.f, p.g, 1) == (p.f, p.g)


def test_scale_rejects_g2_violation():
    with pytest.raises(GeneratorConditionError):
        scale_generator_pair(W, W, 2)


# -- properties --------------------------------------------------------------------------

fractions01 = st.fractions(min_value=0, max_value=1, max_denominator=64)


@given(fractions01)
def test_tent_family_valid_for_scales_up_to_one(a):
    assert validate_generator(tent(a)).passed


@given(st.fractions(min_value=Fraction(1, 64), max_value=Fraction(63, 64), max_denominator=64))
def test_kinked_family_valid(theta):
    assert validate_generator(kinked(theta)).passed


@given(st.lists(st.floats(0, 1), min_size=1, max_size=20))
def test_generator_bounds(ts):
    # 0 <= f(t) <= 1 - t follows from G1 + G2
    t = np.asarray(ts)
    for key in ("w", "tent", "ex3b:delta=1/3", "ex3c:mu=1/2"):
        p = get_preset(key)
        vals = p.g(t)
        assert np.all(vals >= 0)
        assert np.all(vals <= np.where(t > 0, 1 - t, 0) + 1e-15)


@given(fractions01.filter(lambda x: 0 < x < 1))
def test_piece_exact_value(t):
    p = Piece(0, 1, (0, 1, -1))
    assert p.exact_value(t) == t * (1 - t)
