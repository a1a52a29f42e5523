"""Truncated Laurent series in q with exact rational coefficients.

A :class:`QSeries` lives on the exponent lattice ``(1/scale)·Z``.  Exponents
are stored in *scaled* units: the coefficient ``coeffs[i]`` belongs to
``q^((min_exp + i)/scale)``.  ``order`` is the scaled truncation bound: every
coefficient with scaled exponent ``<= order`` is exact.  ``order is None``
marks an exact Laurent polynomial (nothing is unknown).

Public helpers that take an ``order`` argument use q-units (an int or a
``Fraction``), never scaled units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .errors import (
    LatticeError,
    OutOfRangeError,
    PrecisionError,
    SeriesZeroDivisionError,
)

Coeff = Union[int, Fraction]
Number = Union[int, Fraction]


def as_rational(value) -> Coeff:
    """Coerce ``value`` to an exact rational; integral values become ``int``."""
    if type(value) is int:
        return value
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, (int, str)):
        return as_rational(Fraction(value))
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not allowed")
    raise TypeError(f"cannot use {type(value).__name__} as a rational")


def _norm(c: Coeff) -> Coeff:
    if type(c) is int:
        return c
    return c.numerator if c.denominator == 1 else c


def _qdiv(x: Coeff, y: Coeff) -> Coeff:
    if type(x) is int and type(y) is int:
        if y == 1:
            return x
        if y == -1:
            return -x
        d, r = divmod(x, y)
        if not r:
            return d
        return Fraction(x, y)
    return _norm(Fraction(x) / y)


def _scaled(order, scale: int) -> Optional[int]:
    """Convert a q-unit order to scaled units (rounding down)."""
    if order is None:
        return None
    return math.floor(Fraction(order) * scale)


def _omin(x: Optional[int], y: Optional[int]) -> Optional[int]:
    if x is None:
        return y
    if y is None:
        return x
    return min(x, y)


@dataclass(frozen=True)
class Monomial:
    """The exact value ``coeff * q^exp`` with nonzero rational ``coeff``."""

    coeff: Coeff
    exp: Fraction = Fraction(0)

    def __post_init__(self):
        c = as_rational(self.coeff)
        if c == 0:
            raise ValueError("a Monomial needs a nonzero coefficient")
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "exp", Fraction(self.exp))

    @classmethod
    def q(cls, exp: Number = 1, coeff: Number = 1) -> "Monomial":
        return cls(coeff, Fraction(exp))

    @property
    def exp_num(self) -> int:
        return self.exp.numerator

    @property
    def exp_scale(self) -> int:
        return self.exp.denominator

    def is_one(self) -> bool:
        return self.coeff == 1 and self.exp == 0

    def series(self, scale: Optional[int] = None) -> "QSeries":
        s = self.exp.denominator if scale is None else scale
        e = self.exp * s
        if e.denominator != 1:
            raise LatticeError(f"q^{self.exp} is not on lattice 1/{s}")
        return QSeries([self.coeff], int(e), None, s)

    def __mul__(self, other):
        if isinstance(other, Monomial):
            return Monomial(self.coeff * other.coeff, self.exp + other.exp)
        if isinstance(other, (int, Fraction)):
            return Monomial(self.coeff * other, self.exp)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Monomial):
            return Monomial(Fraction(self.coeff) / other.coeff, self.exp - other.exp)
        if isinstance(other, (int, Fraction)):
            return Monomial(Fraction(self.coeff) / other, self.exp)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Monomial(Fraction(other) / self.coeff, -self.exp)
        return NotImplemented

    def __neg__(self):
        return Monomial(-self.coeff, self.exp)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        return Monomial(Fraction(self.coeff) ** n, self.exp * n)

    def __str__(self):
        from .dsl.formatting import format_monomial

        return format_monomial(self)


class QSeries:
    """Immutable truncated Laurent series on the lattice ``(1/scale)·Z``."""

    __slots__ = ("scale", "min_exp", "order", "coeffs")

    def __init__(
        self,
        coeffs: Iterable = (),
        min_exp: int = 0,
        order: Optional[int] = None,
        scale: int = 1,
    ):
        if not isinstance(scale, int) or scale < 1:
            raise LatticeError(f"scale must be a positive integer, got {scale!r}")
        cs = [c if type(c) is int else as_rational(c) for c in coeffs]
        if order is not None:
            keep = order - min_exp + 1
            if keep < len(cs):
                cs = cs[: max(keep, 0)]
        lo, hi = 0, len(cs)
        while lo < hi and not cs[lo]:
            lo += 1
        while hi > lo and not cs[hi - 1]:
            hi -= 1
        if lo or hi < len(cs):
            cs = cs[lo:hi]
        if cs:
            min_exp += lo
        else:
            min_exp = 0 if order is None else order + 1
        setattr_ = object.__setattr__
        setattr_(self, "scale", scale)
        setattr_(self, "min_exp", min_exp)
        setattr_(self, "order", order)
        setattr_(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    def __reduce__(self):
        return (QSeries, (self.coeffs, self.min_exp, self.order, self.scale))

    # -- constructors (q-unit arguments) --------------------------------

    @classmethod
    def zero(cls, order=None, scale: int = 1) -> "QSeries":
        return cls((), 0, _scaled(order, scale), scale)

    @classmethod
    def constant(cls, c: Number, order=None, scale: int = 1) -> "QSeries":
        return cls([c], 0, _scaled(order, scale), scale)

    @classmethod
    def monomial(cls, coeff: Number, exp: Number, order=None, scale: Optional[int] = None) -> "QSeries":
        m = Monomial(coeff, Fraction(exp))
        x = m.series(scale)
        return x if order is None else truncate(x, order)

    @classmethod
    def from_terms(cls, terms: Mapping, order=None, scale: Optional[int] = None) -> "QSeries":
        """Build from ``{exponent: coefficient}`` (exponents in q-units)."""
        exps = {Fraction(e): as_rational(c) for e, c in terms.items()}
        if scale is None:
            scale = 1
            for e in exps:
                scale = math.lcm(scale, e.denominator)
        lattice = {}
        for e, c in exps.items():
            se = e * scale
            if se.denominator != 1:
                raise LatticeError(f"exponent {e} is not on lattice 1/{scale}")
            lattice[int(se)] = c
        if not lattice:
            return cls((), 0, _scaled(order, scale), scale)
        lo, hi = min(lattice), max(lattice)
        dense = [0] * (hi - lo + 1)
        for e, c in lattice.items():
            dense[e - lo] = c
        return cls(dense, lo, _scaled(order, scale), scale)

    @classmethod
    def from_coefficients(cls, coeffs: Iterable, order=None, start: Number = 0, scale: int = 1) -> "QSeries":
        """Dense coefficients for lattice points ``start, start + 1/scale, ...``."""
        s0 = Fraction(start) * scale
        if s0.denominator != 1:
            raise LatticeError(f"start {start} is not on lattice 1/{scale}")
        return cls(coeffs, int(s0), _scaled(order, scale), scale)

    # -- inspection -----------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.order is None

    @property
    def precision(self) -> Optional[Fraction]:
        """Truncation order in q-units, ``None`` for exact series."""
        return None if self.order is None else Fraction(self.order, self.scale)

    @property
    def max_exp(self) -> Optional[int]:
        """Scaled exponent of the highest stored nonzero coefficient."""
        return self.min_exp + len(self.coeffs) - 1 if self.coeffs else None

    @property
    def valuation(self) -> Optional[Fraction]:
        """Lowest exponent with a nonzero coefficient; ``None`` if zero so far."""
        return Fraction(self.min_exp, self.scale) if self.coeffs else None

    @property
    def degree(self) -> Optional[Fraction]:
        return None if not self.coeffs else Fraction(self.max_exp, self.scale)

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> list[tuple[Fraction, Coeff]]:
        s, m = self.scale, self.min_exp
        return [(Fraction(m + i, s), c) for i, c in enumerate(self.coeffs) if c]

    def coefficients(self) -> list[Coeff]:
        """Dense coefficients over the known window starting at ``min_exp``."""
        if self.order is None:
            return list(self.coeffs)
        n = self.order - self.min_exp + 1
        return list(self.coeffs) + [0] * (n - len(self.coeffs))

    def as_monomial(self) -> Optional[Monomial]:
        """The exact single-term value, or ``None`` if this is not one."""
        if self.order is not None or len(self.coeffs) != 1:
            return None
        return Monomial(self.coeffs[0], Fraction(self.min_exp, self.scale))

    def __getitem__(self, e) -> Coeff:
        return coefficient_at(self, e)

    # -- arithmetic -----------------------------------------------------

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.min_exp, self.order, self.scale)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else sub(self, other)

    def __rsub__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else sub(other, self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale_by(self, other)
        other = _coerce(other)
        return NotImplemented if other is None else mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise SeriesZeroDivisionError("division by the zero constant")
            return scale_by(self, Fraction(1) / Fraction(other))
        other = _coerce(other)
        return NotImplemented if other is None else div(self, other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else div(other, self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return div(QSeries([1]), self ** (-n))
        result = QSeries([1], 0, None, self.scale)
        base = self
        while n:
            if n & 1:
                result = mul(result, base)
            n >>= 1
            if n:
                base = mul(base, base)
        return result

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.order is None and other.order is None:
            return equal_up_to(self, other, None).equal
        n = _omin_frac(self.precision, other.precision)
        return equal_up_to(self, other, n).equal

    __hash__ = None

    def __repr__(self):
        return f"QSeries({str(self)!r})"

    def __str__(self):
        from .dsl.formatting import format_series

        return format_series(self)


def _omin_frac(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return min(x, y)


def _coerce(x) -> Optional[QSeries]:
    if isinstance(x, QSeries):
        return x
    if isinstance(x, Monomial):
        return x.series()
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return QSeries([x])
    return None


def one(scale: int = 1) -> QSeries:
    return QSeries([1], 0, None, scale)


def rescale(series: QSeries, new_scale: int) -> QSeries:
    """Re-embed ``series`` on the finer lattice ``(1/new_scale)·Z``."""
    s = series.scale
    if new_scale == s:
        return series
    if new_scale % s:
        raise LatticeError(f"scale {new_scale} is not a multiple of {s}")
    k = new_scale // s
    order = None if series.order is None else series.order * k
    if not series.coeffs:
        return QSeries((), 0, order, new_scale)
    dense = [0] * ((len(series.coeffs) - 1) * k + 1)
    dense[::k] = series.coeffs
    return QSeries(dense, series.min_exp * k, order, new_scale)


def _common(a: QSeries, b: QSeries):
    if a.scale == b.scale:
        return a, b, a.scale
    s = math.lcm(a.scale, b.scale)
    return rescale(a, s), rescale(b, s), s


def _eff_min(x: QSeries) -> Optional[int]:
    # lowest possibly-nonzero scaled exponent, None for the exact zero
    if x.coeffs:
        return x.min_exp
    return None if x.order is None else x.order + 1


def add(a: QSeries, b: QSeries) -> QSeries:
    a, b, s = _common(a, b)
    order = _omin(a.order, b.order)
    if not a.coeffs and not b.coeffs:
        return QSeries((), 0, order, s)
    parts = [x for x in (a, b) if x.coeffs]
    lo = min(x.min_exp for x in parts)
    hi = max(x.max_exp for x in parts)
    if order is not None:
        hi = min(hi, order)
    if hi < lo:
        return QSeries((), 0, order, s)
    out = [0] * (hi - lo + 1)
    for x in parts:
        off = x.min_exp - lo
        for i, c in enumerate(x.coeffs):
            j = off + i
            if j >= len(out):
                break
            out[j] += c
    return QSeries(out, lo, order, s)


def sub(a: QSeries, b: QSeries) -> QSeries:
    return add(a, -b)


def scale_by(a: QSeries, c: Number) -> QSeries:
    c = as_rational(c)
    return QSeries([x * c for x in a.coeffs], a.min_exp, a.order, a.scale)


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product with sound truncation order."""
    a, b, s = _common(a, b)
    ma, mb = _eff_min(a), _eff_min(b)
    if ma is None or mb is None:
        return QSeries((), 0, None, s)
    if a.order is None and b.order is None:
        order = None
    else:
        order = _omin(
            None if a.order is None else a.order + mb,
            None if b.order is None else b.order + ma,
        )
    if not a.coeffs or not b.coeffs:
        return QSeries((), 0, order, s)
    lo = a.min_exp + b.min_exp
    n = len(a.coeffs) + len(b.coeffs) - 1
    if order is not None:
        n = min(n, order - lo + 1)
    if n <= 0:
        return QSeries((), 0, order, s)
    ca, cb = a.coeffs, b.coeffs
    nza = [(i, c) for i, c in enumerate(ca) if c]
    nzb = [(j, c) for j, c in enumerate(cb) if c]
    if len(nza) < len(nzb):
        nza, nzb = nzb, nza
    out = [0] * n
    # the sparser operand drives the inner loop
    for i, x in nza:
        if i >= n:
            break
        for j, y in nzb:
            k = i + j
            if k >= n:
                break
            out[k] += x * y
    return QSeries(out, lo, order, s)


def _long_div(ca, cb, length: int) -> list:
    b0 = cb[0]
    tail = [(j, c) for j, c in enumerate(cb) if j and c and j < length]
    r = list(ca[:length])
    if len(r) < length:
        r.extend([0] * (length - len(r)))
    out = [0] * length
    for k in range(length):
        rk = r[k]
        if not rk:
            continue
        c = _qdiv(rk, b0)
        out[k] = c
        for j, bj in tail:
            t = k + j
            if t >= length:
                break
            r[t] -= c * bj
    return out


def div(a: QSeries, b: QSeries, order=None) -> QSeries:
    """Laurent-series quotient ``a / b``.

    When both operands are exact the quotient is returned exactly if ``b``
    divides ``a``; otherwise ``order`` (q-units) must say where to truncate.
    ``order`` also caps the result when the operands are truncated.
    """
    a, b, s = _common(a, b)
    if not b.coeffs:
        raise SeriesZeroDivisionError("divisor is zero up to its known order")
    mb = b.min_exp
    cap = _scaled(order, s)
    ma = _eff_min(a)
    if ma is None:
        return QSeries((), 0, None, s)
    if b.order is None:
        r_order = None if a.order is None else a.order - mb
    else:
        r_order = b.order + ma - 2 * mb
        if a.order is not None:
            r_order = min(r_order, a.order - mb)
    if not a.coeffs:
        return QSeries((), 0, _omin(r_order, cap), s)
    lo = a.min_exp - mb
    if r_order is None:
        n = len(a.coeffs)
        q = _long_div(a.coeffs, b.coeffs, n)
        dq = len(a.coeffs) - len(b.coeffs)
        if dq >= 0 and not any(q[dq + 1 :]):
            return QSeries(q[: dq + 1], lo, None, s)
        if cap is None:
            raise PrecisionError(
                "quotient of exact series is not a Laurent polynomial; an order is required"
            )
        r_order = cap
    else:
        r_order = _omin(r_order, cap)
    n = r_order - lo + 1
    if n <= 0:
        return QSeries((), 0, r_order, s)
    return QSeries(_long_div(a.coeffs, b.coeffs, n), lo, r_order, s)


def inverse(b: QSeries, order=None) -> QSeries:
    return div(one(b.scale), b, order)


def shift(a: QSeries, exp: Number) -> QSeries:
    """Multiply by ``q^exp`` (exact monomial)."""
    e = Fraction(exp)
    s = math.lcm(a.scale, e.denominator)
    a = rescale(a, s)
    k = int(e * s)
    order = None if a.order is None else a.order + k
    if not a.coeffs:
        return QSeries((), 0, order, s)
    return QSeries(a.coeffs, a.min_exp + k, order, s)


def substitute_base(a: QSeries, m: int) -> QSeries:
    """Replace q by q^m: every exponent and the order are multiplied by m."""
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"substitution exponent must be a positive integer, got {m!r}")
    order = None if a.order is None else a.order * m
    if m == 1 or not a.coeffs:
        return QSeries(a.coeffs, a.min_exp * m if a.coeffs else 0, order, a.scale)
    dense = [0] * ((len(a.coeffs) - 1) * m + 1)
    dense[::m] = a.coeffs
    return QSeries(dense, a.min_exp * m, order, a.scale)


def truncate(a: QSeries, order, keep_exact: bool = True) -> QSeries:
    """Cap the known order at ``order`` (q-units).

    An exact series whose support already ends at or below ``order`` stays
    exact unless ``keep_exact`` is false.
    """
    n = _scaled(order, a.scale)
    if a.order is None and keep_exact and (not a.coeffs or a.max_exp <= n):
        return a
    return QSeries(a.coeffs, a.min_exp, _omin(a.order, n), a.scale)


def coefficient_at(a: QSeries, e) -> Coeff:
    """Exact coefficient of ``q^e``; raises if ``e`` is above the order."""
    e = Fraction(e)
    se = e * a.scale
    if a.order is not None and se > a.order:
        raise OutOfRangeError(f"q^{e} is above the truncation order {a.precision}")
    if se.denominator != 1:
        return 0
    i = int(se) - a.min_exp
    if 0 <= i < len(a.coeffs):
        return a.coeffs[i]
    return 0


@dataclass(frozen=True)
class Comparison:
    """Outcome of :func:`equal_up_to`; falsy on mismatch."""

    equal: bool
    exponent: Optional[Fraction] = None
    lhs: Optional[Coeff] = None
    rhs: Optional[Coeff] = None

    def __bool__(self):
        return self.equal


def equal_up_to(a: QSeries, b: QSeries, n) -> Comparison:
    """Compare coefficients of all exponents ``<= n`` (q-units).

    ``n=None`` compares two exact series completely.  Raises
    :class:`PrecisionError` if either side is not known through ``n``.
    """
    a, b, s = _common(a, b)
    if n is None:
        if a.order is not None or b.order is not None:
            raise PrecisionError("full comparison needs two exact series")
        hi = max(x.max_exp for x in (a, b) if x.coeffs) if (a.coeffs or b.coeffs) else None
    else:
        hi = _scaled(n, s)
        for side, x in (("lhs", a), ("rhs", b)):
            if x.order is not None and x.order < hi:
                raise PrecisionError(
                    f"{side} known only to order {x.precision}, comparison needs {Fraction(n)}"
                )
    parts = [x for x in (a, b) if x.coeffs]
    if not parts or hi is None:
        return Comparison(True)
    lo = min(x.min_exp for x in parts)
    for e in range(lo, hi + 1):
        ca = _raw_coeff(a, e)
        cb = _raw_coeff(b, e)
        if ca != cb:
            return Comparison(False, Fraction(e, s), ca, cb)
    return Comparison(True)


def _raw_coeff(x: QSeries, e: int) -> Coeff:
    i = e - x.min_exp
    if 0 <= i < len(x.coeffs):
        return x.coeffs[i]
    return 0
