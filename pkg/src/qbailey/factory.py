"""Builders for q-shifted factorials, q-binomials, tau monomials and theta products.

Every builder taking ``order`` returns a series known at least through
``q^order`` (or an exact Laurent polynomial).  Products whose factors have
negative valuation are truncated progressively so that no precision is lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

from .errors import DivergenceError, PoleError, PrecisionError
from .series import Monomial, QSeries, div, inverse, mul, one, truncate

INF = math.inf


class Infinity:
    """The symbolic point at infinity (a Pochhammer length or a parameter)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (Infinity, ())


INFINITY = Infinity()


@dataclass(frozen=True)
class PochSpec:
    """``(arg; q^base_exp)_length``; ``length`` may be negative or INFINITY."""

    arg: Monomial
    base_exp: Fraction = Fraction(1)
    length: Union[int, Infinity] = INFINITY

    def __post_init__(self):
        object.__setattr__(self, "base_exp", Fraction(self.base_exp))


def _factor_exps(arg: Monomial, base: Fraction, idx: Iterable[int]):
    return [arg.exp + base * i for i in idx]


def _is_unit_zero(arg: Monomial, exp: Fraction) -> bool:
    # the factor 1 - c*q^exp is identically zero
    return arg.coeff == 1 and exp == 0


def _describe(arg: Monomial, base: Fraction, length) -> str:
    b = "q" if base == 1 else f"q^{base}"
    n = "inf" if length is INFINITY else str(length)
    return f"({arg};{b})_{n}"


def poch_valuation(arg: Monomial, base_exp=1, length=INFINITY):
    """Exact valuation of ``(arg; q^base_exp)_length``; ``inf`` if it is zero."""
    base = Fraction(base_exp)
    if length is INFINITY:
        if base <= 0:
            raise DivergenceError("infinite product needs a positive base exponent")
        v = Fraction(0)
        i = 0
        while True:
            e = arg.exp + base * i
            if e > 0:
                return v
            if _is_unit_zero(arg, e):
                return INF
            v += e
            i += 1
    if length >= 0:
        v = Fraction(0)
        for e in _factor_exps(arg, base, range(length)):
            if _is_unit_zero(arg, e):
                return INF
            v += min(e, 0)
        return v
    m = -length
    shifted = Monomial(arg.coeff, arg.exp - base * m)
    v = Fraction(0)
    for e in _factor_exps(shifted, base, range(m)):
        if _is_unit_zero(shifted, e):
            raise PoleError(
                f"{_describe(arg, base, length)} has the vanishing denominator factor (1 - q^0)"
            )
        v += min(e, 0)
    return -v


def _binomials(arg: Monomial, exps: Sequence[Fraction], scale: int) -> list[QSeries]:
    out = []
    for e in exps:
        out.append(QSeries.from_terms({0: 1, e: -arg.coeff} if e != 0 else {0: 1 - arg.coeff}, scale=scale))
    return out


def _lattice(*fracs: Fraction) -> int:
    s = 1
    for f in fracs:
        s = math.lcm(s, Fraction(f).denominator)
    return s


def _progressive(factors: list[QSeries], vals: list[Fraction], order, scale: int) -> QSeries:
    # suffix sums of the remaining factors' valuations
    rem = [Fraction(0)] * (len(factors) + 1)
    for j in range(len(factors) - 1, -1, -1):
        rem[j] = rem[j + 1] + vals[j]
    acc = one(scale)
    for j, f in enumerate(factors):
        acc = mul(acc, f)
        if order is not None:
            acc = truncate(acc, Fraction(order) - rem[j + 1])
    return acc


@lru_cache(maxsize=8192)
def _poch_cached(spec: PochSpec, order) -> QSeries:
    arg, base, length = spec.arg, spec.base_exp, spec.length
    if length is INFINITY:
        if base <= 0:
            raise DivergenceError("infinite product needs a positive base exponent")
        if order is None:
            raise PrecisionError("an infinite product needs a truncation order")
        v = poch_valuation(arg, base, INFINITY)
        if v == INF:
            return QSeries.zero(None, _lattice(arg.exp, base))
        limit = Fraction(order) - v
        exps = []
        i = 0
        while arg.exp + base * i <= limit:
            exps.append(arg.exp + base * i)
            i += 1
        s = _lattice(arg.exp, base)
        vals = [min(e, Fraction(0)) for e in exps]
        acc = _progressive(_binomials(arg, exps, s), vals, order, s)
        return truncate(acc, order, keep_exact=False)
    if length >= 0:
        exps = _factor_exps(arg, base, range(length))
        s = _lattice(arg.exp, base)
        if any(_is_unit_zero(arg, e) for e in exps):
            return QSeries.zero(None, s)
        vals = [min(e, Fraction(0)) for e in exps]
        return _progressive(_binomials(arg, exps, s), vals, order, s)
    m = -length
    poch_valuation(arg, base, length)  # raises on a pole
    shifted = Monomial(arg.coeff, arg.exp - base * m)
    den_spec = PochSpec(shifted, base, m)
    if order is None:
        den = _poch_cached(den_spec, None)
        return inverse(den)
    v = poch_valuation(shifted, base, m)
    den = _poch_cached(den_spec, Fraction(order) + 2 * v)
    return inverse(den, order)


def pochhammer(spec: PochSpec, order=None) -> QSeries:
    """Expand ``(x; q^b)_n`` for ``n`` in Z or infinity.

    A vanishing numerator factor gives the exact zero series; a vanishing
    factor of the reciprocal product (negative ``n``) raises :class:`PoleError`.
    """
    return _poch_cached(spec, None if order is None else Fraction(order))


def poch(arg, base_exp=1, length=INFINITY, order=None) -> QSeries:
    """Shorthand for :func:`pochhammer` taking a Monomial (or int) argument."""
    if not isinstance(arg, Monomial):
        arg = Monomial(arg)
    return pochhammer(PochSpec(arg, Fraction(base_exp), length), order)


# -- deferred products -------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """A factor of known valuation (lower bound) built on demand at an order."""

    valuation: Union[Fraction, float]
    build: Callable[[Fraction], QSeries]


def series_factor(x) -> Factor:
    """Wrap an already-built series (or Monomial) as a factor."""
    if isinstance(x, Monomial):
        x = x.series()
    v = INF if x.is_zero() and x.is_exact else x.valuation
    if v is None:
        v = Fraction(x.order + 1, x.scale)
    return Factor(v, lambda order, x=x: x)


def poch_factor(arg, base_exp=1, length=INFINITY) -> Factor:
    if not isinstance(arg, Monomial):
        arg = Monomial(arg)
    spec = PochSpec(arg, Fraction(base_exp), length)
    v = poch_valuation(arg, base_exp, length)
    return Factor(v, lambda order, spec=spec: pochhammer(spec, order))


def inverse_factor(f: Factor, what: str = "denominator") -> Factor:
    if f.valuation == INF:
        raise PoleError(f"{what} vanishes identically")
    v = f.valuation

    def build(order, f=f, v=v):
        # the divisor must be known at least through its leading term
        return inverse(f.build(max(Fraction(order) + 2 * v, v)), order)

    return Factor(-v, build)


def product_to(order, factors: Sequence[Factor]) -> QSeries:
    """Multiply deferred factors so the result is exact through ``q^order``."""
    total = sum((f.valuation for f in factors), Fraction(0))
    if total == INF:
        return QSeries.zero()
    order = Fraction(order)
    acc = None
    for f in factors:
        # never below the factor's own valuation, or the empty window costs precision
        x = f.build(max(order - (total - f.valuation), f.valuation))
        acc = x if acc is None else mul(acc, x)
    if acc is None:
        return one()
    return truncate(acc, order)


def pochhammer_multi(args: Sequence, base_exp=1, length=INFINITY, order=None) -> QSeries:
    """``(a_1, ..., a_k; q^b)_n`` as a product of single Pochhammer symbols."""
    if not args:
        return one()
    if order is None:
        acc = one()
        for a in args:
            acc = mul(acc, poch(a, base_exp, length))
        return acc
    return product_to(order, [poch_factor(a, base_exp, length) for a in args])


@lru_cache(maxsize=8192)
def _qbinomial_cached(n: int, k: int, order) -> QSeries:
    k = min(k, n - k)
    acc = one()
    for i in range(1, k + 1):
        acc = mul(acc, QSeries.from_terms({0: 1, n - k + i: -1}))
        if order is not None:
            acc = truncate(acc, order)
        acc = div(acc, QSeries.from_terms({0: 1, i: -1}))
    return acc


def qbinomial(n: int, k: int, order=None) -> QSeries:
    """Gaussian binomial ``[n choose k]_q``; zero when ``k < 0`` or ``k > n``."""
    if n < 0:
        raise ValueError("qbinomial needs n >= 0")
    if k < 0 or k > n:
        return QSeries.zero()
    return _qbinomial_cached(n, k, None if order is None else Fraction(order))


def tau(r: int, n: int) -> Monomial:
    """``(-1)^n q^(r*n*(n-1)/2)``."""
    return Monomial(-1 if n % 2 else 1, Fraction(r * n * (n - 1), 2))


def euler(order, base_exp=1) -> QSeries:
    """``(q^b; q^b)_inf``."""
    b = Fraction(base_exp)
    return poch(Monomial(1, b), b, INFINITY, order)


def phi_neg_q(order) -> QSeries:
    """``phi(-q) = (q;q)_inf / (-q;q)_inf``."""
    return div(euler(order), poch(Monomial(-1, 1), 1, INFINITY, order))


def psi_neg_q(order) -> QSeries:
    """``psi(-q) = (q^2;q^2)_inf / (-q;q^2)_inf``."""
    return div(euler(order, 2), poch(Monomial(-1, 1), 2, INFINITY, order))


def triple_product_rhs(x: Monomial, base_exp, order) -> QSeries:
    """``(x, q^b/x, q^b; q^b)_inf``; zero when a factor vanishes."""
    b = Fraction(base_exp)
    if not isinstance(x, Monomial):
        x = Monomial(x)
    return pochhammer_multi([x, Monomial(1, b) / x, Monomial(1, b)], b, INFINITY, order)
