from __future__ import annotations

import random
from fractions import Fraction

import pytest

from qbailey.bailey import (
    BaileyPair,
    alpha_from_beta,
    bailey_lemma_sides,
    beta_from_alpha,
    h_closed,
    h_closed_factor,
    h_series,
    new_pair,
    substitute_pair,
    transform_a1,
    transform_a2,
    transform_a3,
    truncated_transform,
    verify_pair,
)
from qbailey.errors import PoleError, UsageError
from qbailey.factory import INFINITY, euler, poch, tau
from qbailey.report import MISMATCH, PASS
from qbailey.series import Monomial, QSeries, div, equal_up_to, mul, substitute_base, truncate

Q = Monomial(1, 1)
ONE = Monomial(1, 0)
PAIR = new_pair()


def m(c, e):
    return Monomial(c, Fraction(e))


def assert_equal(a, b, order):
    cmp = equal_up_to(a, b, order)
    assert cmp, f"first mismatch at q^{cmp.exponent}: {cmp.lhs} != {cmp.rhs}"


# -- H(n) ------------------------------------------------------------------


def test_h_series_examples():
    assert h_series(0, 30).is_zero()
    assert_equal(h_series(1, 30), euler(30), 30)
    h2 = h_series(2, 30)
    assert h2.valuation == -1
    assert_equal(h2, mul(QSeries.monomial(1, -1), euler(31)), 30)


def test_h_closed_examples():
    assert h_closed(0, 30).is_zero()
    assert_equal(h_closed(1, 30), euler(30), 30)
    # n = -1 is the case 3L+2 with L = -1
    assert_equal(h_closed(-1, 30), -euler(30), 30)
    assert_equal(h_closed(-1, 30), -h_closed(1, 30), 30)


@pytest.mark.parametrize("n", range(-20, 21))
def test_h_series_matches_closed_form(n):
    assert_equal(h_series(n, 60), h_closed(n, 60), 60)


@pytest.mark.parametrize("n", range(1, 21))
def test_h_antisymmetry(n):
    assert_equal(h_series(-n, 60), -h_series(n, 60), 60)


@pytest.mark.parametrize("n", range(-30, 31))
def test_h_closed_lattice(n):
    # the case exponent -L(3L+1)/2 (and its shifts) is always an integer
    f = h_closed_factor(n)
    assert f.scale == 1
    assert f.is_exact
    assert h_closed(n, 20).scale == 1


# -- the new pair ------------------------------------------------------------


def test_new_pair_examples():
    assert PAIR.a == ONE
    assert PAIR.alpha(0, 40).is_zero()
    assert_equal(PAIR.alpha(1, 40), mul(QSeries.from_coefficients([-1, 1]), euler(40)), 40)
    beta1 = div(mul(QSeries.from_coefficients([-1, 1]), euler(40)), poch(Q, 1, 2), 40)
    assert_equal(PAIR.beta(1, 40), beta1, 40)


@pytest.mark.parametrize("n", range(0, 8))
def test_alpha_factored_build(n):
    direct = truncate(mul(tau(1, n).series() * (1 - QSeries.monomial(1, n)), h_series(n, 80)), 40)
    assert_equal(PAIR.alpha(n, 40), direct, 40)


def test_beta_from_alpha_examples():
    assert_equal(beta_from_alpha(PAIR.alpha, ONE, 0, 30), PAIR.alpha(0, 30), 30)
    assert_equal(beta_from_alpha(PAIR.alpha, ONE, 2, 40), PAIR.beta(2, 40), 40)
    zero = beta_from_alpha(lambda n, o: QSeries.zero(o), m(1, 2), 4, 30)
    assert zero.is_zero()


def test_alpha_from_beta_examples():
    assert_equal(alpha_from_beta(PAIR.beta, ONE, 0, 30), PAIR.beta(0, 30), 30)
    assert_equal(alpha_from_beta(PAIR.beta, ONE, 1, 40), PAIR.alpha(1, 40), 40)


def test_pole_for_bad_modulus():
    with pytest.raises(PoleError):
        beta_from_alpha(PAIR.alpha, m(1, -2), 3, 10)


def test_verify_new_pair_small():
    rep = verify_pair(PAIR, 5, 40)
    assert rep.status == PASS, rep.summary_line()


def corrupted_pair(bad_n):
    def beta(n, order):
        b = PAIR.beta(n, order)
        if n == bad_n:
            return b + QSeries.monomial(1, 7)
        return b

    return BaileyPair(ONE, PAIR.alpha, beta, "corrupted", PAIR.alpha_valuation, None)


def test_corrupted_beta_is_caught():
    rep = verify_pair(corrupted_pair(3), 6, 30)
    assert rep.status == MISMATCH
    assert rep.detail == {"n": 3, "relation": "defining"}
    assert rep.first_mismatch.exponent == 7


def unit_pair(a):
    def alpha(n, order):
        return QSeries.constant(1) if n == 0 else QSeries.zero()

    def beta(n, order):
        den = mul(poch(Q, 1, n), poch(a * Q, 1, n))
        return div(QSeries.constant(1), den, order)

    return BaileyPair(a, alpha, beta, "unit")


@pytest.mark.parametrize("a", [ONE, m(1, 1), m(-1, 1), m(1, 2)])
def test_unit_pair(a):
    rep = verify_pair(unit_pair(a), 6, 30)
    assert rep.status == PASS, rep.summary_line()


def random_beta(rng):
    table = {}
    for n in range(7):
        deg = rng.randint(0, 4)
        table[n] = QSeries.from_coefficients([rng.randint(-3, 3) for _ in range(deg + 1)])

    def beta(n, order):
        return table[n]

    return beta


def round_trip_ok(beta, a, order=20):
    cache = {}

    def alpha(k, o):
        key = (k, o)
        if key not in cache:
            cache[key] = alpha_from_beta(beta, a, k, o)
        return cache[key]

    for n in range(7):
        back = beta_from_alpha(alpha, a, n, order)
        if not equal_up_to(back, truncate(beta(n, order), order), order):
            return False
    return True


@pytest.mark.parametrize("a", [m(1, 1), m(1, 2), m(-1, 1)])
def test_inversion_round_trip(a):
    rng = random.Random(2024)
    for _ in range(5):
        assert round_trip_ok(random_beta(rng), a)


# -- Slater's lemma and the a = 1 transforms ------------------------------------


@pytest.mark.parametrize(
    "x,y",
    [(m(-1, 0), INFINITY), (m(-1, 1), INFINITY), (m(-1, 0), m(-1, 0)), (INFINITY, INFINITY)],
)
def test_slater_sides(x, y):
    lhs, rhs = bailey_lemma_sides(PAIR, x, y, 30)
    assert_equal(lhs, rhs, 30)


def test_slater_pole_names_factor():
    with pytest.raises(PoleError, match=r"\(1;q\)_n"):
        bailey_lemma_sides(PAIR, Q, INFINITY, 20)


def test_slater_needs_a_one():
    with pytest.raises(UsageError):
        bailey_lemma_sides(unit_pair(Q), INFINITY, INFINITY, 10)


def test_transforms_small():
    for sides in (
        transform_a1(PAIR, 40),
        transform_a2(substitute_pair(PAIR, 2), 40),
        transform_a3(PAIR, 40),
    ):
        assert_equal(*sides, 40)


def test_transform_a2_needs_base_two():
    with pytest.raises(UsageError):
        transform_a2(PAIR, 10)


def test_transform_a3_half_weight():
    # the n = 0 weight 1/(1+q^0) is 1/2; the unit pair isolates it
    a = unit_pair(ONE)
    lhs, rhs = transform_a3(a, 20)
    assert_equal(lhs, rhs, 20)


def test_substitute_pair_matches_direct_lift():
    lifted = substitute_pair(PAIR, 2)
    assert lifted.base == 2
    for n in range(4):
        assert_equal(lifted.beta(n, 40), substitute_base(PAIR.beta(n, 20), 2), 40)
        assert_equal(lifted.alpha(n, 40), substitute_base(PAIR.alpha(n, 20), 2), 40)


# -- truncated transform ----------------------------------------------------------


def test_truncated_transform_m0():
    lhs, rhs = truncated_transform(PAIR, 0, 30)
    assert lhs.is_zero() and rhs.is_zero()


def test_truncated_transform_m1():
    lhs, rhs = truncated_transform(PAIR, 1, 40)
    expected = mul(QSeries.from_coefficients([-1, 1]), euler(40))
    assert_equal(lhs, rhs, 40)
    assert_equal(rhs, expected, 40)


def test_truncated_transform_m5():
    lhs, rhs = truncated_transform(PAIR, 5, 60)
    assert_equal(lhs, rhs, 60)


def test_truncated_transform_rejects_negative_m():
    with pytest.raises(UsageError):
        truncated_transform(PAIR, -1, 10)
