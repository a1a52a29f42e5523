from __future__ import annotations

import re
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbailey.dsl.evaluator import evaluate, evaluate_monomial
from qbailey.dsl.formatting import format_series, series_from_json, series_to_json
from qbailey.dsl.parser import Binder, check_bindings, parse
from qbailey.errors import DslError, LatticeError, NonTerminationError, SeriesZeroDivisionError
from qbailey.factory import euler
from qbailey.identities import sides
from qbailey.series import Monomial, QSeries, equal_up_to
from qbailey.summation import recording

RR1 = "sum(n, 0, inf, q^(n^2)/poch(q,1,n))"
RR2 = "sum(n, 0, inf, q^(n^2+n)/poch(q,1,n))"
MOD24_LHS = "eulerq() * sum(n, 1, inf, q^(2*n^2-n)/((1+q^n)*poch(q,1,2*n-1)))"
MOD24_RHS = "jtp(-q^10,24) - jtp(-q^11,24) + q*jtp(-q^5,24) - q^2*jtp(-q^2,24)"

# 50 inputs outside the grammar or its binding rules
MALFORMED = [
    "", "   ", "q^^2", "1 +", "* q", "(1 + q", "1 + q)", "((q)", "q^", "q^)",
    "poch(q,1)", "poch(q,1,2,3)", "poch q", "poch(", "poch(q,,2)", "poch(,q,2)", "qbin(2)", "tau(1)",
    "eulerq(1)", "phi(q)", "psi(1,2)", "jtp(q)", "sum(n,0,inf)", "sum(0,0,5,q)", "sum(q,0,5,q)",
    "sum(n,0,5,q,1)", "bsum(n)", "bsum(k, q^k, 1)", "foo(q)", "eulerq", "inf", "q + inf",
    "poch(q,inf,3)", "sum(n,inf,3,q)", "1 $ q", "q # 2", "1/0/", "q^(1", "q^-", "q^-q",
    "--q", "1 +\n\n  )", "2 3", "q q", "n", "q^n", "sum(n,0,5,q^k)", "bsum(k, k) + k",
    "1/", "q,1",
]

POSITIONED = re.compile(r"^\d+:\d+: \S")


def assert_equal(a, b, order):
    cmp = equal_up_to(a, b, order)
    assert cmp, f"first mismatch at q^{cmp.exponent}: {cmp.lhs} != {cmp.rhs}"


# -- parser ----------------------------------------------------------------------


def test_parse_sum_node():
    node = parse(RR1)
    assert isinstance(node, Binder)
    assert node.name == "sum" and node.var == "n"


def test_parse_h1_definition():
    node = parse("bsum(k, tau(3,k)*(1-q^k)*q^(2*k))")
    assert isinstance(node, Binder) and node.name == "bsum"
    assert_equal(evaluate(node, 30), euler(30), 30)


def test_parse_double_caret():
    with pytest.raises(DslError) as info:
        parse("q^^2")
    assert (info.value.line, info.value.col) == (1, 3)


def test_rational_literal_binds_tightly():
    assert evaluate("q^3/2", 5, 2) == QSeries.monomial(1, Fraction(3, 2))
    assert evaluate("q^3 / 2", 5) == QSeries.monomial(Fraction(1, 2), 3)
    assert evaluate("q^-1/2", 5, 2) == QSeries.monomial(1, Fraction(-1, 2))


def test_multiline_position():
    with pytest.raises(DslError) as info:
        parse("1 +\n\n  )")
    assert info.value.diagnostic().startswith("3:3:")


@pytest.mark.parametrize("text", MALFORMED)
def test_malformed_corpus(text):
    with pytest.raises(DslError) as info:
        check_bindings(parse(text))
    assert POSITIONED.match(info.value.diagnostic())


def test_corpus_size():
    assert len(MALFORMED) == 50
    assert len(set(MALFORMED)) == 50


def test_depth_guard():
    deep = "(" * 500 + "q" + ")" * 500
    with pytest.raises(DslError, match="nested"):
        parse(deep)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="q0123456789+-*/^(),_ nsumpochtaubijfk", max_size=30))
def test_parser_total(text):
    try:
        check_bindings(parse(text))
    except DslError as exc:
        assert POSITIONED.match(exc.diagnostic())


# -- evaluator ---------------------------------------------------------------------


def test_eval_rr1_to_order_9():
    x = evaluate(RR1, 9)
    assert x == QSeries.from_coefficients([1, 1, 1, 1, 2, 2, 3, 3, 4, 5], order=9)


def test_eval_constant():
    assert evaluate("1/2", 7) == QSeries.constant(Fraction(1, 2))


def test_eval_euler_product():
    x = evaluate("poch(q,1,inf)", 7)
    assert_equal(x, QSeries.from_terms({0: 1, 1: -1, 2: -1, 5: 1, 7: 1}), 7)


def test_infinite_sums_are_heuristic():
    with recording() as recs:
        evaluate(RR1, 20)
    assert [r.termination for r in recs] == ["heuristic"]
    with recording() as recs:
        evaluate("sum(n, 0, 4, q^n)", 20)
    assert all(r.termination != "heuristic" for r in recs)


def test_off_lattice_rejected():
    with pytest.raises(LatticeError):
        evaluate("q^(1/2)", 5)
    assert evaluate("q^(1/2)", 5, 2).scale == 2


def test_division_errors():
    with pytest.raises(SeriesZeroDivisionError):
        evaluate("1/(q-q)", 5)
    with pytest.raises(SeriesZeroDivisionError):
        evaluate("1/(0)", 5)
    with pytest.raises(DslError, match="zero denominator"):
        evaluate("1/0", 5)


def test_index_cap():
    with pytest.raises(NonTerminationError):
        evaluate("sum(n, 0, inf, 1)", 5, index_cap=100)


def test_negative_powers_adapt_order():
    x = evaluate("q^-3 * poch(q,1,inf)", 10)
    assert x.precision == 10
    assert_equal(x, QSeries.monomial(1, -3) * euler(13), 10)
    y = evaluate("poch(q,1,inf) / (q^2 - q^3)", 10)
    assert y.precision == 10


def test_monomial_params():
    assert evaluate_monomial("-q") == Monomial(-1, 1)
    assert evaluate_monomial("q^(1/3)*2") == Monomial(2, Fraction(1, 3))
    assert evaluate_monomial("-q^2 / 3 + 0") == Monomial(Fraction(-1, 3), 2)
    with pytest.raises(DslError):
        evaluate_monomial("1+q")


def test_qbin_and_tau_calls():
    assert evaluate("qbin(2,1)", 10) == QSeries.from_coefficients([1, 1])
    assert evaluate("tau(3,-1)", 10) == QSeries.monomial(-1, 3)


def test_finite_and_empty_sums():
    assert evaluate("sum(n, 1, 3, n*q^n)", 10) == QSeries.from_terms({1: 1, 2: 2, 3: 3})
    assert evaluate("sum(n, 3, 1, q)", 10).is_zero()


# -- conformance with the native builders -----------------------------------------------


@pytest.mark.parametrize(
    "ident,params,lhs,rhs,scale",
    [
        ("rr1", {}, RR1, "1/(pochinf(q,5)*pochinf(q^4,5))", 1),
        ("rr2", {}, RR2, "1/(pochinf(q^2,5)*pochinf(q^3,5))", 1),
        ("jacobi-triple", {"x": Monomial(-1, 0), "base": 1}, "bsum(n, tau(1,n)*(-1)^n)", "jtp(-1,1)", 1),
        ("jacobi-triple", {"x": Monomial(-1, 1), "base": 2}, "bsum(n, tau(2,n)*(-q)^n)", "jtp(-q,2)", 1),
        ("jacobi-triple", {"x": Monomial(1, Fraction(1, 2)), "base": 1},
         "bsum(n, tau(1,n)*q^(n/2))", "jtp(q^(1/2),1)", 2),
        ("mod24", {}, MOD24_LHS, MOD24_RHS, 1),
    ],
)
def test_dsl_matches_native(ident, params, lhs, rhs, scale):
    order = 60
    native_l, native_r = sides(ident, params, order)
    assert_equal(evaluate(lhs, order, scale), native_l, order)
    assert_equal(evaluate(rhs, order, scale), native_r, order)


# -- formatting ---------------------------------------------------------------------------


def test_format_examples():
    assert format_series(QSeries.from_coefficients([1, -1])) == "1 - q"
    assert format_series(QSeries.monomial(Fraction(1, 2), -1)) == "1/2*q^-1"
    assert format_series(QSeries.zero()) == "0"
    x = QSeries.from_terms({Fraction(1, 2): 3, 2: -1}, order=4)
    assert format_series(x) == "3*q^1/2 - q^2 + O(q^9/2)"


def test_json_round_trip():
    x = QSeries.from_terms({Fraction(-1, 2): Fraction(2, 3), 3: -1}, order=5)
    payload = series_to_json(x)
    assert payload == {"scale": 2, "order": "5", "terms": [["-1/2", "2/3"], ["3", "-1"]]}
    back = series_from_json(payload)
    assert back.precision == x.precision
    assert back == x


terms = st.dictionaries(
    st.fractions(min_value=-4, max_value=8, max_denominator=2),
    st.fractions(min_value=-5, max_value=5, max_denominator=3).filter(lambda c: c != 0),
    max_size=6,
)


@settings(max_examples=100, deadline=None)
@given(terms)
def test_format_parse_round_trip(t):
    x = QSeries.from_terms(t, scale=2)
    text = format_series(x)
    assert evaluate(text, 20, 2) == x
