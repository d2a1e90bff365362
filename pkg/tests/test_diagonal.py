import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from rmmcopula.copula import RmmCopula, grid_values
from rmmcopula.diagonal import (
    DiagonalSection,
    asymmetric_diagonal,
    delta_hat,
    delta_sharp,
    diagonal_bounds,
    diagonal_of,
    dump_diagonal,
    get_diagonal,
    in_D_hat,
    load_diagonal,
    ordering_check,
    semilinear_from_diagonal,
    sharp_only_diagonal,
    square_diagonal,
    srmm_from_diagonal,
    srmm_uniqueness_check,
    w_diagonal,
)
from rmmcopula.errors import InputFormatError, MathDomainError

T = np.linspace(0, 1, 101)
M_DIAG = DiagonalSection.from_pieces([(0, 1, (0, 1))])


# -- diagonal of a copula --------------------------------------------------------------

def test_diagonal_of_w():
    d = diagonal_of(RmmCopula.from_preset("w"))
    assert d == w_diagonal()
    assert_allclose(d(T), np.maximum(0, 2 * T - 1), atol=1e-15)


def test_diagonal_of_tent_ramp_exact():
    d = diagonal_of(RmmCopula.from_preset("tent-ramp"))
    q, h = Fraction(1, 4), Fraction(1, 2)
    assert [(p.lo, p.hi) for p in d.pieces] == [(0, q), (q, h), (h, 1)]
    assert d.pieces[1].coeffs == (0, Fraction(-1, 2), 2)
    assert d.pieces[2].coeffs == (0, 0, 1)


def test_diagonal_of_product():
    assert_allclose(diagonal_of(RmmCopula.from_preset("pi"))(T), T * T, atol=0)


def test_diagonal_matches_copula(preset_copula):
    assert_allclose(diagonal_of(preset_copula)(T), preset_copula(T, T), atol=1e-14)


def test_a_delta():
    assert w_diagonal().a_delta == Fraction(1, 2)
    assert square_diagonal().a_delta == 0
    assert diagonal_of(RmmCopula.from_preset("ramp:mu=1/2")).a_delta == Fraction(1, 4)


# -- delta sharp / hat -------------------------------------------------------------------

def test_sharp_square():
    assert_allclose(delta_sharp(square_diagonal(), T[1:]), 1.0)


def test_sharp_w():
    assert delta_sharp(w_diagonal(), 0.75) == pytest.approx(8 / 9, abs=1e-15)


def test_sharp_second_counterexample():
    t = np.linspace(0.26, 1 - math.sqrt(2) / 2, 20)
    assert_allclose(delta_sharp(sharp_only_diagonal(), t), (4 * t - 1) / (2 * t * t), atol=1e-12)


def test_hat_square_and_w():
    assert_allclose(delta_hat(square_diagonal(), T), T, atol=1e-15)
    assert delta_hat(w_diagonal(), 0.25) == pytest.approx(0.5, abs=1e-15)


def test_hat_asymmetric_witness():
    d = asymmetric_diagonal()
    assert delta_hat(d, 3 / 8) == pytest.approx((3 + math.sqrt(3)) / 8, abs=1e-14)
    assert delta_hat(d, 0.5) == pytest.approx(0.5, abs=1e-15)


# -- membership -----------------------------------------------------------------------------

@pytest.mark.parametrize("d", [w_diagonal(), square_diagonal()])
def test_members(d):
    rep = in_D_hat(d)
    assert rep.member
    assert rep.witness is None


@pytest.mark.parametrize("d", [sharp_only_diagonal(), asymmetric_diagonal()])
def test_sharp_but_not_hat(d):
    rep = in_D_hat(d)
    assert not rep.member
    assert rep.conditions["sharp_nondecreasing"]
    assert not rep.conditions["hat_nondecreasing"]
    s, hs, t, ht = rep.witness
    assert s < t and hs > ht
    assert_allclose([delta_hat(d, s), delta_hat(d, t)], [hs, ht], atol=1e-12)


def test_sharp_only_witness_exact():
    d = sharp_only_diagonal()
    # delta^(1/4) = 1/2, and delta^(1 - sqrt2/2) = 1 - sqrt2/2 since t^2 = delta there
    assert delta_hat(d, 0.25) == pytest.approx(0.5, abs=1e-15)
    k = 1 - math.sqrt(2) / 2
    assert delta_hat(d, k) == pytest.approx(k, abs=1e-7)


def test_not_a_diagonal():
    d = DiagonalSection.from_pieces([(0, 1, (0, 0, 2))])  # 2t^2 > t
    rep = in_D_hat(d)
    assert not rep.member
    assert not rep.conditions["below_square"]
    assert not rep.conditions["D2"]


def test_preset_diagonals_of_srmm_are_members():
    for key in ("w", "tent", "efgm:a=0.5", "ex3b:delta=1/3", "ramp:mu=1/2", "pi"):
        assert in_D_hat(get_diagonal(key)).member, key


# -- construction -----------------------------------------------------------------------------

def test_srmm_from_w_diagonal():
    c = srmm_from_diagonal(w_diagonal())
    assert_allclose(c.f(T), np.minimum(T, 1 - T), atol=1e-15)
    assert c(0.25, 0.75) == 0.125


def test_srmm_from_square():
    assert srmm_from_diagonal(square_diagonal()).f.is_zero


def test_srmm_from_efgm_diagonal():
    c = srmm_from_diagonal(get_diagonal("efgm:a=0.5"))
    assert_allclose(c.f(T), 0.5 * T * (1 - T), atol=1e-14)


def test_srmm_rejects_non_member():
    with pytest.raises(MathDomainError):
        srmm_from_diagonal(sharp_only_diagonal())


@pytest.mark.parametrize("key", ["w", "tent", "efgm:a=0.5", "ex3b:delta=1/3", "ramp:mu=1/2"])
def test_srmm_reproduces_diagonal(key):
    d = get_diagonal(key)
    assert_allclose(diagonal_of(srmm_from_diagonal(d))(T), d(T), atol=1e-14)


def test_bounds_w():
    lower, upper = diagonal_bounds(w_diagonal())
    assert_allclose(lower.f(T[1:]), 1 - T[1:], atol=1e-15)
    assert upper(0.25, 0.75) == 0.125
    mid = RmmCopula.from_preset("ex3b:delta=1/2")
    assert ordering_check(lower, mid, upper)


def test_bounds_coincide_above_a_delta():
    lower, upper = diagonal_bounds(w_diagonal())
    t = np.linspace(0.5, 1, 51)
    assert_allclose(grid_values(lower, t, t), grid_values(upper, t, t), atol=1e-15)


def test_bounds_square():
    lower, upper = diagonal_bounds(square_diagonal())
    assert lower.is_product and upper.is_product


@pytest.mark.parametrize("d, expected", [
    (square_diagonal(), True),
    (w_diagonal(), False),
    (get_diagonal("efgm:a=0.5"), True),
])
def test_uniqueness(d, expected):
    assert srmm_uniqueness_check(d) is expected


def test_semilinear():
    u, v = np.meshgrid(T, T, indexing="ij")
    assert_allclose(semilinear_from_diagonal(square_diagonal(), u, v), u * v, atol=1e-15)
    assert_allclose(semilinear_from_diagonal(M_DIAG, u, v), np.minimum(u, v), atol=1e-15)
    assert semilinear_from_diagonal(w_diagonal(), 0.0, 0.0) == 0.0


# -- file format ------------------------------------------------------------------------------

def test_diagonal_file_roundtrip(tmp_path):
    path = tmp_path / "d.json"
    dump_diagonal(asymmetric_diagonal(), path)
    assert load_diagonal(path) == asymmetric_diagonal()
    assert "delta_pieces" in path.read_text()


def test_get_diagonal_unknown():
    with pytest.raises(InputFormatError):
        get_diagonal("diag:nope")


@given(st.fractions(min_value=Fraction(1, 50), max_value=1, max_denominator=50))
def test_efgm_diagonal_roundtrip(a):
    d = DiagonalSection.from_pieces([(0, 1, (0, 0, 1 - a * a, 2 * a * a, -a * a))])
    c = srmm_from_diagonal(d)
    assert_allclose(c.f(T), float(a) * T * (1 - T), atol=1e-13)
