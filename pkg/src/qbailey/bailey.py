"""Bailey pairs: the defining relation and its inverse, the H(n) pair,
Slater's lemma with finite or infinite parameters, the three a=1
specializations, and the truncated (finite) Bailey transform.

Pair generators have the signature ``(n, order) -> QSeries`` and must return
a series known through ``q^order``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import PoleError, UsageError
from .factory import (
    INF,
    INFINITY,
    Factor,
    Infinity,
    inverse_factor,
    poch_factor,
    product_to,
    series_factor,
    tau,
)
from .report import ERROR, MISMATCH, PASS, Mismatch, VerificationReport
from .series import Monomial, QSeries, add, equal_up_to, substitute_base, truncate
from .summation import TermGenerator, recording, sum_bilateral, sum_unilateral

ParamValue = Union[Monomial, Infinity]
Generator = Callable[[int, Fraction], QSeries]

Q = Monomial(1, Fraction(1))
ONE = Monomial(1, Fraction(0))


def _binom(c, e) -> QSeries:
    """``1 - c*q^e`` as an exact series."""
    e = Fraction(e)
    if e == 0:
        return QSeries.constant(1 - c)
    return QSeries.from_terms({0: 1, e: -c})


def build_with(order, build_first: Callable, factors: list[Factor]) -> QSeries:
    """``build_first(...) * prod(factors)`` exact through ``q^order``.

    ``build_first`` is evaluated first so that its actual valuation (which
    may be unknown in advance) sizes the remaining factors.
    """
    order = Fraction(order)
    rest = sum((f.valuation for f in factors), Fraction(0))
    if rest == INF:
        return QSeries.zero()
    first = build_first(order - rest)
    return product_to(order, [series_factor(first)] + list(factors))


# -- H(n) --------------------------------------------------------------


def _h_exponent(n: int, k: int) -> Fraction:
    return Fraction(3 * k * (k - 1), 2) + (1 + n) * k + min(0, k)


def h_valuation_bound(n: int) -> Fraction:
    """Lower bound on the valuation of H(n), from its defining sum alone."""
    r = abs(n) + 3
    return min(_h_exponent(n, k) for k in range(-r, r + 1))


def h_generator(n: int) -> TermGenerator:
    def term(k, order):
        t = tau(3, k)
        return QSeries.from_terms({t.exp + (1 + n) * k: t.coeff}) - QSeries.from_terms(
            {t.exp + (2 + n) * k: t.coeff}
        )

    return TermGenerator(term, lambda k: _h_exponent(n, k))


def h_series(n: int, order) -> QSeries:
    """``H(n) = sum_k tau_3(k) (1 - q^k) q^((1+n)k)`` by bilateral summation."""
    return sum_bilateral(h_generator(n), order)


def h_closed_factor(n: int) -> QSeries:
    """The exact Laurent polynomial ``H(n) / (q;q)_inf`` by residue of n mod 3."""
    L, r = divmod(n, 3)
    sign = -1 if L % 2 else 1
    if r == 0:
        e = Fraction(-3 * L * L - L, 2)
        return QSeries.from_terms({e + L: sign}) - QSeries.from_terms({e: sign})
    if r == 1:
        return QSeries.monomial(sign, Fraction(-3 * L * L - L, 2))
    return QSeries.monomial(sign, Fraction(-(3 * L + 2) * (L + 1), 2))


def h_closed(n: int, order) -> QSeries:
    return product_to(order, [series_factor(h_closed_factor(n)), poch_factor(Q, 1, INFINITY)])


# -- pairs ---------------------------------------------------------------


@dataclass(frozen=True)
class BaileyPair:
    """A Bailey pair relative to ``a`` with lazy index -> series generators.

    ``alpha_valuation``/``beta_valuation`` are optional lower bounds on the
    valuation of each term; sums over the pair use them to stop exactly.
    ``base`` records that the pair has been rewritten with q -> q^base.
    """

    a: Monomial
    alpha: Generator
    beta: Generator
    label: str = ""
    alpha_valuation: Optional[Callable[[int], object]] = None
    beta_valuation: Optional[Callable[[int], object]] = None
    base: int = 1


def _new_alpha(n: int, order) -> QSeries:
    pre = tau(1, n).series() * _binom(1, n)
    return build_with(order, lambda o: h_series(n, o), [series_factor(pre)])


def _new_alpha_valuation(n: int):
    if n == 0:
        return INF
    return Fraction(n * (n - 1), 2) + min(0, n) + h_valuation_bound(n)


def _new_beta(n: int, order) -> QSeries:
    # tau(n)^2 (q^n - 1) = q^(n(n-1)) (q^n - 1)
    pre = QSeries.monomial(1, n * n) - QSeries.monomial(1, n * (n - 1))
    return product_to(
        order,
        [
            series_factor(pre),
            poch_factor(Q, 1, INFINITY),
            inverse_factor(poch_factor(Q, 1, 2 * n), "(q;q)_2n"),
        ],
    )


def _new_beta_valuation(n: int):
    return INF if n == 0 else Fraction(n * (n - 1))


def new_pair() -> BaileyPair:
    """The pair ``alpha_n = tau(n)(1-q^n)H(n)``,
    ``beta_n = (q;q)_inf (q^n-1) tau(n)^2 / (q;q)_2n`` relative to a = 1."""
    return BaileyPair(
        ONE,
        _new_alpha,
        _new_beta,
        "new-pair",
        _new_alpha_valuation,
        _new_beta_valuation,
    )


def substitute_pair(pair: BaileyPair, m: int) -> BaileyPair:
    """The same pair with q replaced by q^m throughout."""

    def lift(gen):
        def g(n, order):
            inner = math.ceil(Fraction(order) / m)
            return substitute_base(gen(n, inner), m)

        return g

    def lift_val(val):
        if val is None:
            return None
        return lambda n: val(n) * m

    return BaileyPair(
        Monomial(pair.a.coeff, pair.a.exp * m),
        lift(pair.alpha),
        lift(pair.beta),
        f"{pair.label}(q^{m})",
        lift_val(pair.alpha_valuation),
        lift_val(pair.beta_valuation),
        pair.base * m,
    )


def _check_modulus(a: Monomial) -> None:
    # (aq;q)_n vanishes for a = q^-j, j >= 1
    if a.coeff == 1 and a.exp.denominator == 1 and a.exp <= -1:
        raise PoleError(f"(aq;q)_n has a vanishing factor for a = q^{a.exp}")


def beta_from_alpha(alpha: Generator, a: Monomial, n: int, order) -> QSeries:
    """``sum_{k=0}^n alpha_k / ((q;q)_{n-k} (aq;q)_{n+k})``."""
    _check_modulus(a)
    order = Fraction(order)
    aq = a * Q
    acc = QSeries.zero()
    for k in range(n + 1):
        dens = [
            inverse_factor(poch_factor(Q, 1, n - k), f"(q;q)_{n - k}"),
            inverse_factor(poch_factor(aq, 1, n + k), f"(aq;q)_{n + k}"),
        ]
        acc = add(acc, build_with(order, lambda o, k=k: alpha(k, o), dens))
    return truncate(acc, order)


def alpha_from_beta(beta: Generator, a: Monomial, n: int, order) -> QSeries:
    """Inverse relation; at a = 1 the removable singularity is cancelled:
    ``(a;q)_{n+k} / (1-a) = (aq;q)_{n+k-1}``."""
    order = Fraction(order)
    if n == 0:
        return truncate(beta(0, order), order)
    if a.is_one():
        pre = [series_factor(_binom(1, 2 * n))]
    else:
        _check_modulus(a)
        pre = [
            series_factor(_binom(a.coeff, a.exp + 2 * n)),
            inverse_factor(series_factor(_binom(a.coeff, a.exp)), "1 - a"),
        ]
    acc = QSeries.zero()
    for k in range(n + 1):
        if a.is_one():
            num = poch_factor(Q, 1, n + k - 1)
        else:
            num = poch_factor(a, 1, n + k)
        factors = pre + [
            series_factor(tau(1, n - k)),
            num,
            inverse_factor(poch_factor(Q, 1, n - k), f"(q;q)_{n - k}"),
        ]
        acc = add(acc, build_with(order, lambda o, k=k: beta(k, o), factors))
    return truncate(acc, order)


def verify_pair(pair: BaileyPair, n_max: int, order) -> VerificationReport:
    """Check both the defining relation and its inverse for ``0 <= n <= n_max``."""
    order = Fraction(order)
    params = {"pair": pair.label, "n_max": n_max}
    ident = "bailey-pair"
    with recording() as records:
        try:
            for relation in ("defining", "inverse"):
                for n in range(n_max + 1):
                    if relation == "defining":
                        lhs = pair.beta(n, order)
                        rhs = beta_from_alpha(pair.alpha, pair.a, n, order)
                    else:
                        lhs = pair.alpha(n, order)
                        rhs = alpha_from_beta(pair.beta, pair.a, n, order)
                    cmp = equal_up_to(lhs, rhs, order)
                    if not cmp:
                        return VerificationReport(
                            ident,
                            params,
                            order,
                            1,
                            MISMATCH,
                            Mismatch(cmp.exponent, cmp.lhs, cmp.rhs),
                            tuple(records),
                            message=f"{relation} relation fails at n={n}",
                            detail={"n": n, "relation": relation},
                        )
        except Exception as exc:  # report content, not a crash
            return VerificationReport(ident, params, order, 1, ERROR, None, tuple(records), message=str(exc))
    return VerificationReport(ident, params, order, 1, PASS, None, tuple(records))


# -- Slater's lemma and specializations ----------------------------------


def check_admissible(z: ParamValue, name: str, base=1, length: str = "n") -> None:
    """Reject z = q^(base*j), j >= 1, for which (q^base/z; q^base)_n vanishes."""
    if z is INFINITY:
        return
    b = Fraction(base)
    j = z.exp / b
    if z.coeff == 1 and j.denominator == 1 and j >= 1:
        raise PoleError(
            f"factor (q/{name};q)_{length} vanishes: {name} = q^{z.exp} gives (1;q)_{length} in a denominator"
        )


def param_weight(z: ParamValue, n: int, base=1, with_denominator: bool = True) -> list[Factor]:
    """``(z;q^b)_n z^-n`` (over ``(q^b/z;q^b)_n``) with the limit ``tau_b(n)`` at infinity."""
    b = Fraction(base)
    if z is INFINITY:
        return [series_factor(tau(1, n) if b == 1 else Monomial(-1 if n % 2 else 1, b * Fraction(n * (n - 1), 2)))]
    out = [poch_factor(z, b, n), series_factor(z ** (-n))]
    if with_denominator:
        out.append(inverse_factor(poch_factor(Monomial(1, b) / z, b, n), f"(q/z;q)_{n}"))
    return out


def _valuation(factors: list[Factor], extra) -> object:
    if extra is None:
        return None
    return sum((f.valuation for f in factors), Fraction(0)) + extra


def _pair_sum(order, gen: Generator, valuation, weights: Callable[[int], list[Factor]], start: int = 0) -> QSeries:
    def term(n, o):
        return build_with(o, lambda oo: gen(n, oo), weights(n))

    bound = None
    if valuation is not None:

        def bound(n):
            if n < start:
                return INF
            return _valuation(weights(n), valuation(n))

    return sum_unilateral(TermGenerator(term, bound), order, start=start)


def _require_a1(pair: BaileyPair) -> None:
    if not pair.a.is_one():
        raise UsageError(f"this transform needs a pair relative to a = 1, got a = {pair.a}")


def _prefactor_times(order, inner: Callable, factors: list[Factor]) -> QSeries:
    return build_with(order, inner, factors)


def bailey_lemma_sides(pair: BaileyPair, x: ParamValue, y: ParamValue, order) -> tuple[QSeries, QSeries]:
    """Both sides of Slater's Bailey lemma at a = 1 (alpha side, beta side)."""
    _require_a1(pair)
    check_admissible(x, "x")
    check_admissible(y, "y")
    order = Fraction(order)
    finite = [z for z in (x, y) if z is not INFINITY]

    def lhs_weights(n):
        return param_weight(x, n) + param_weight(y, n) + [series_factor(Monomial(1, n))]

    def rhs_weights(n):
        return (
            param_weight(x, n, with_denominator=False)
            + param_weight(y, n, with_denominator=False)
            + [series_factor(Monomial(1, n))]
        )

    pref = [poch_factor(Q, 1, INFINITY)]
    if len(finite) == 2:
        pref.append(poch_factor(Q / (x * y), 1, INFINITY))
    for z in finite:
        pref.append(inverse_factor(poch_factor(Q / z, 1, INFINITY), "(q/z;q)_inf"))

    lhs = _pair_sum(order, pair.alpha, pair.alpha_valuation, lhs_weights)
    rhs = _prefactor_times(
        order, lambda o: _pair_sum(o, pair.beta, pair.beta_valuation, rhs_weights), pref
    )
    return lhs, rhs


def transform_a1(pair: BaileyPair, order) -> tuple[QSeries, QSeries]:
    """``sum q^(n^2) beta_n`` and ``(1/(q;q)_inf) sum q^(n^2) alpha_n``."""
    _require_a1(pair)

    def w(n):
        return [series_factor(Monomial(1, n * n))]

    lhs = _pair_sum(order, pair.beta, pair.beta_valuation, w)
    pref = [inverse_factor(poch_factor(Q, 1, INFINITY))]
    rhs = _prefactor_times(order, lambda o: _pair_sum(o, pair.alpha, pair.alpha_valuation, w), pref)
    return lhs, rhs


def transform_a2(pair: BaileyPair, order) -> tuple[QSeries, QSeries]:
    """``sum q^(n^2) (-q;q^2)_n beta_n(1,q^2)`` and ``(1/psi(-q)) sum q^(n^2) alpha_n(1,q^2)``.

    The pair must already be written in base q^2 (see :func:`substitute_pair`).
    """
    _require_a1(pair)
    if pair.base != 2:
        raise UsageError("transform_a2 needs the pair in base q^2")
    mq = Monomial(-1, 1)

    def wl(n):
        return [series_factor(Monomial(1, n * n)), poch_factor(mq, 2, n)]

    def wr(n):
        return [series_factor(Monomial(1, n * n))]

    lhs = _pair_sum(order, pair.beta, pair.beta_valuation, wl)
    pref = [poch_factor(mq, 2, INFINITY), inverse_factor(poch_factor(Monomial(1, 2), 2, INFINITY))]
    rhs = _prefactor_times(order, lambda o: _pair_sum(o, pair.alpha, pair.alpha_valuation, wr), pref)
    return lhs, rhs


def transform_a3(pair: BaileyPair, order) -> tuple[QSeries, QSeries]:
    """``sum q^(n(n+1)/2) (-1;q)_n beta_n`` and
    ``(2/phi(-q)) sum q^(n(n+1)/2) alpha_n / (1+q^n)``."""
    _require_a1(pair)

    def wl(n):
        return [series_factor(Monomial(1, Fraction(n * (n + 1), 2))), poch_factor(Monomial(-1), 1, n)]

    def wr(n):
        return [
            series_factor(Monomial(1, Fraction(n * (n + 1), 2))),
            inverse_factor(series_factor(_binom(-1, n)), "1 + q^n"),
        ]

    lhs = _pair_sum(order, pair.beta, pair.beta_valuation, wl)
    pref = [
        series_factor(QSeries.constant(2)),
        poch_factor(Monomial(-1, 1), 1, INFINITY),
        inverse_factor(poch_factor(Q, 1, INFINITY)),
    ]
    rhs = _prefactor_times(order, lambda o: _pair_sum(o, pair.alpha, pair.alpha_valuation, wr), pref)
    return lhs, rhs


def truncated_transform(pair: BaileyPair, m: int, order) -> tuple[QSeries, QSeries]:
    """The finite transform: the beta-side sum with its prefactor, and ``sum_{n<=m} alpha_n``."""
    if m < 0:
        raise UsageError("the truncated transform needs m >= 0")
    order = Fraction(order)
    a = pair.a
    _check_modulus(a)
    aq = a * Q
    pref = [
        poch_factor(aq, 1, m),
        series_factor(Monomial(-1 if m % 2 else 1, Fraction(m * (m + 1), 2))),
        inverse_factor(poch_factor(Q, 1, m), f"(q;q)_{m}"),
    ]

    def inner(o):
        acc = QSeries.zero()
        for n in range(m + 1):
            fs = [poch_factor(Monomial(1, -m), 1, n), poch_factor(a * Monomial(1, 1 + m), 1, n)]
            acc = add(acc, build_with(o, lambda oo, n=n: pair.beta(n, oo), fs))
        return truncate(acc, o)

    lhs = _prefactor_times(order, inner, pref)
    rhs = QSeries.zero()
    for n in range(m + 1):
        rhs = add(rhs, pair.alpha(n, order))
    return lhs, truncate(rhs, order)


def factor_sum(order, factors_of: Callable[[int], Optional[list[Factor]]], *, start: int = 0,
               stop: Optional[int] = None, bilateral: bool = False) -> QSeries:
    """Sum of ``prod(factors_of(n))``; ``None`` marks a vanishing term.

    The valuation bound is the sum of the factor valuations, so the sum
    stops exactly.
    """

    def bound(n):
        if not bilateral and (n < start or (stop is not None and n > stop)):
            return INF
        fs = factors_of(n)
        if fs is None:
            return INF
        return sum((f.valuation for f in fs), Fraction(0))

    def term(n, o):
        fs = factors_of(n)
        return QSeries.zero() if fs is None else product_to(o, fs)

    gen = TermGenerator(term, bound)
    if bilateral:
        return sum_bilateral(gen, order)
    return sum_unilateral(gen, order, start=start, stop=stop)


def slater_weight(x: ParamValue, y: ParamValue, n: int, base=1) -> list[Factor]:
    """``(x,y;q^b)_n / (q^b/x,q^b/y;q^b)_n (xy)^-n`` for any integer n, with limits at infinity."""
    return param_weight(x, n, base) + param_weight(y, n, base)
