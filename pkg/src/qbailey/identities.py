"""Registry of the verified identities and the drivers that check them.

Each entry pairs two side builders ``(params, order) -> QSeries`` over a
declared parameter space.  Sides are built as printed; no simplification
happens before comparison.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .bailey import (
    Q,
    _binom,
    build_with,
    check_admissible,
    factor_sum,
    h_closed,
    h_closed_factor,
    h_series,
    new_pair,
    beta_from_alpha,
    slater_weight,
)
from .errors import PoleError, QSeriesError, UsageError
from .factory import (
    INF,
    INFINITY,
    Factor,
    Infinity,
    inverse_factor,
    poch,
    poch_factor,
    pochhammer_multi,
    product_to,
    qbinomial,
    series_factor,
    tau,
)
from .report import ERROR, MISMATCH, PASS, Mismatch, VerificationReport
from .series import Monomial, QSeries, add, div, equal_up_to, mul, truncate
from .summation import recording

Side = Callable[[dict, Fraction], QSeries]

DEFAULT_ORDER = 100
DEFAULT_CAPS = {"n": 30, "m": 30}


# -- parameter spaces ------------------------------------------------------


def param_str(v) -> str:
    if isinstance(v, Infinity):
        return "inf"
    return str(v)


@dataclass(frozen=True)
class NoParams:
    def values(self, caps: dict) -> list[dict]:
        return [{}]

    def check(self, params: dict) -> dict:
        if params:
            raise UsageError(f"this identity takes no parameters, got {sorted(params)}")
        return {}

    def describe(self) -> str:
        return "none"


@dataclass(frozen=True)
class IntRange:
    """An integer ``name`` in ``[lo, hi]``; ``None`` means unbounded (capped when iterating)."""

    name: str
    lo: Optional[int] = 0
    hi: Optional[int] = None

    def values(self, caps: dict) -> list[dict]:
        cap = caps.get(self.name, 30)
        lo = -cap if self.lo is None else max(self.lo, -cap)
        hi = cap if self.hi is None else min(self.hi, cap)
        return [{self.name: v} for v in range(lo, hi + 1)]

    def check(self, params: dict) -> dict:
        if set(params) != {self.name}:
            raise UsageError(f"expected exactly the parameter {self.name}, got {sorted(params)}")
        v = params[self.name]
        if isinstance(v, bool) or not isinstance(v, int):
            raise UsageError(f"{self.name} must be an integer, got {param_str(v)}")
        if (self.lo is not None and v < self.lo) or (self.hi is not None and v > self.hi):
            raise UsageError(f"{self.name}={v} is outside {self.describe()}")
        return {self.name: v}

    def describe(self) -> str:
        lo = "-inf" if self.lo is None else self.lo
        hi = "inf" if self.hi is None else self.hi
        return f"{self.name} in [{lo}, {hi}]"


@dataclass(frozen=True)
class Choice:
    """Named parameters drawn from a fixed test set; ``validate`` admits others."""

    names: tuple[str, ...]
    instances: tuple[tuple, ...]
    validate: Optional[Callable[[dict], None]] = None

    def values(self, caps: dict) -> list[dict]:
        return [dict(zip(self.names, inst)) for inst in self.instances]

    def check(self, params: dict) -> dict:
        if set(params) != set(self.names):
            raise UsageError(f"expected parameters {list(self.names)}, got {sorted(params)}")
        out = {k: params[k] for k in self.names}
        if self.validate is not None:
            self.validate(out)
        elif tuple(out[k] for k in self.names) not in self.instances:
            raise UsageError(f"{out} is not in the test set")
        return out

    def describe(self) -> str:
        shown = ", ".join("(" + ", ".join(param_str(v) for v in inst) + ")" for inst in self.instances)
        return f"({', '.join(self.names)}) in {{{shown}}}"


@dataclass(frozen=True)
class Identity:
    id: str
    label: str
    description: str
    space: object
    lhs: Side
    rhs: Side
    scale: int = 1
    min_order: int = 0
    order_floor: int = 0
    golden: dict = field(default_factory=dict)
    # degree bound for identities whose sides are Laurent polynomials
    degree_bound: Optional[Callable[[dict], Fraction]] = None


# -- helpers -------------------------------------------------------------


def _mono(c, e) -> Factor:
    return series_factor(Monomial(c, Fraction(e)))


def _one_plus(e) -> QSeries:
    return _binom(-1, e)


def _theta(args: Sequence[Monomial], base, order) -> QSeries:
    return pochhammer_multi(list(args), base, INFINITY, order)


def _m(c, e) -> Monomial:
    return Monomial(c, Fraction(e))


# -- Rogers-Ramanujan ----------------------------------------------------


def _rr_lhs(shift: int) -> Side:
    def side(params, order):
        return factor_sum(
            order,
            lambda n: [_mono(1, n * n + shift * n), inverse_factor(poch_factor(Q, 1, n))],
        )

    return side


def _rr_rhs(a: int, b: int) -> Side:
    def side(params, order):
        return product_to(
            order,
            [inverse_factor(poch_factor(_m(1, a), 5, INFINITY)), inverse_factor(poch_factor(_m(1, b), 5, INFINITY))],
        )

    return side


# -- Jacobi triple product ---------------------------------------------------


def _jtp_validate(params: dict) -> None:
    x, b = params["x"], params["base"]
    if not isinstance(x, Monomial):
        raise UsageError("x must be a monomial")
    if isinstance(b, bool) or not isinstance(b, int) or b < 1:
        raise UsageError("base must be a positive integer")


def _jtp_lhs(params, order):
    x, b = params["x"], params["base"]
    return factor_sum(
        order,
        lambda n: [_mono(-1 if n % 2 else 1, Fraction(b * n * (n - 1), 2)), series_factor(x ** n)],
        bilateral=True,
    )


def _jtp_rhs(params, order):
    x, b = params["x"], params["base"]
    return _theta([x, _m(1, b) / x, _m(1, b)], b, order)


# -- pentagonal generalization and H(n) ----------------------------------------


def _pent_lhs(params, order):
    n = params["n"]

    def factors(k):
        return [
            series_factor(tau(3, k) * _m(1, k)),
            poch_factor(_m(1, -k), 1, n),
            poch_factor(_m(1, k), 1, n),
        ]

    return factor_sum(order, factors, bilateral=True)


def _pent_rhs(params, order):
    n = params["n"]
    return product_to(order, [series_factor(tau(1, n) ** 2), poch_factor(Q, 1, INFINITY)])


def _h_closed_lhs(params, order):
    return h_series(params["n"], order)


def _h_closed_rhs(params, order):
    return h_closed(params["n"], order)


def _h_anti_lhs(params, order):
    return h_series(-params["n"], order)


def _h_anti_rhs(params, order):
    n = params["n"]
    if n == 0:
        return QSeries.zero(order)
    return -h_series(n, order)


# -- the key finite identity ---------------------------------------------------


def _key_lhs(params, order):
    n = params["n"]
    acc = QSeries.zero()
    for k in range(n + 1):
        pre = mul(qbinomial(2 * n, k + n), tau(1, k).series() * _binom(1, k))
        acc = add(acc, build_with(order, lambda o, k=k: h_series(k, o), [series_factor(pre)]))
    return truncate(acc, order)


def _key_rhs(params, order):
    n = params["n"]
    pre = tau(1, n).series() ** 2 * (QSeries.monomial(1, n) - 1)
    return product_to(order, [series_factor(pre), poch_factor(Q, 1, INFINITY)])


def key_finite_reduced_sides(n: int) -> tuple[QSeries, QSeries]:
    """Both sides of the key finite identity divided by ``(q;q)_inf``, as exact Laurent polynomials."""
    lhs = QSeries.zero()
    for k in range(n + 1):
        term = mul(qbinomial(2 * n, k + n), tau(1, k).series() * _binom(1, k))
        lhs = add(lhs, mul(term, h_closed_factor(k)))
    rhs = tau(1, n).series() ** 2 * (QSeries.monomial(1, n) - 1)
    return lhs, rhs


def key_finite_degree_bound(n: int) -> Fraction:
    """Upper bound on the degree of either reduced side of the key finite identity."""
    best = Fraction(n * n)
    for k in range(n + 1):
        f = h_closed_factor(k)
        if f.is_zero():
            continue
        best = max(best, (n - k) * (n + k) + Fraction(k * (k - 1), 2) + k + f.degree)
    return best


# -- the new pair ------------------------------------------------------------


_PAIR = None


def _pair():
    global _PAIR
    if _PAIR is None:
        _PAIR = new_pair()
    return _PAIR


def _pair_lhs(params, order):
    p = _pair()
    return beta_from_alpha(p.alpha, p.a, params["n"], order)


def _pair_rhs(params, order):
    return _pair().beta(params["n"], order)


# -- inverse formula for H(n) ------------------------------------------------------


def _hinv_rhs(params, order):
    n = params["n"]

    def factors(k):
        return [
            _mono(-1 if k % 2 == 0 else 1, Fraction(3 * k * k - k, 2) - n * k),
            poch_factor(_m(1, 2 * k), 1, n - k),
            inverse_factor(poch_factor(Q, 1, n - k), f"(q;q)_{n - k}"),
            series_factor(_one_plus(n)),
            inverse_factor(series_factor(_one_plus(k)), f"1 + q^{k}"),
            poch_factor(Q, 1, INFINITY),
        ]

    return factor_sum(order, factors, stop=n)


def _hinv_lhs(params, order):
    return h_series(params["n"], order)


# -- main theorem: S/T sums ------------------------------------------------------


MAIN_TEST_SET = (
    (_m(-1, 0), INFINITY),
    (_m(-1, 1), INFINITY),
    (_m(-1, 0), _m(-1, 0)),
    (INFINITY, INFINITY),
)


def _xy(x, y):
    if x is INFINITY or y is INFINITY:
        return INFINITY
    return x * y


def st_sums(x, y, order, base: int = 1) -> QSeries:
    """``S1 - S2 - T1 + T2`` for parameters x, y in base ``q^base``."""
    b = Fraction(base)

    def piece(offset, quad):
        def factors(n):
            a, c, d = quad
            return slater_weight(x, y, 3 * n + offset, b) + [_mono(1, b * (a * n * n + c * n + d))]

        return factor_sum(order, factors, bilateral=True)

    s1 = piece(0, (3, 2, 0))
    s2 = piece(0, (3, 1, 0))
    t1 = piece(1, (3, 4, 1))
    t2 = piece(2, (3, 5, 2))
    return truncate(s1 - s2 - t1 + t2, order, keep_exact=False)


def _main_validate(params: dict) -> None:
    x, y = params["x"], params["y"]
    for name, z in (("x", x), ("y", y)):
        if not isinstance(z, (Monomial, Infinity)):
            raise UsageError(f"{name} must be a monomial or inf")
    # an inadmissible pair lies outside the parameter space
    try:
        check_admissible(x, "x")
        check_admissible(y, "y")
        xy = _xy(x, y)
        if xy is not INFINITY:
            check_admissible(xy, "xy", length="inf")
    except PoleError as exc:
        raise UsageError(f"inadmissible (x, y): {exc}") from None


def _main_lhs(params, order):
    x, y = params["x"], params["y"]

    def factors(n):
        fs = []
        for z in (x, y):
            if z is INFINITY:
                fs.append(series_factor(tau(1, n)))
            else:
                fs += [poch_factor(z, 1, n), series_factor(z ** (-n))]
        return fs + [
            inverse_factor(poch_factor(Q, 1, 2 * n), f"(q;q)_{2 * n}"),
            series_factor(QSeries.monomial(1, n * n + n) - QSeries.monomial(1, n * n)),
        ]

    return factor_sum(order, factors)


def _main_rhs(params, order):
    x, y = params["x"], params["y"]
    pref = [inverse_factor(poch_factor(Q, 1, INFINITY))]
    for z in (x, y):
        if z is not INFINITY:
            pref.append(poch_factor(Q / z, 1, INFINITY))
    xy = _xy(x, y)
    if xy is not INFINITY:
        pref.append(inverse_factor(poch_factor(Q / xy, 1, INFINITY), "(q/xy;q)_inf"))
    return build_with(order, lambda o: st_sums(x, y, o), pref)


# -- modulus 30 ------------------------------------------------------------------


def _mod30_lhs(sign: int) -> Side:
    def side(params, order):
        def factors(n):
            return [
                _mono((-sign) ** n, 3 * n * n - 2 * n),
                poch_factor(_m(sign, 1), 2, n),
                inverse_factor(poch_factor(_m(1, 2), 2, 2 * n), f"(q^2;q^2)_{2 * n}"),
                series_factor(QSeries.monomial(1, 2 * n) - 1),
            ]

        return factor_sum(order, factors)

    return side


def _mod30_bracket(sign: int, order) -> QSeries:
    s = sign

    def th(a, b):
        return _theta([_m(s, a), _m(s, b), _m(1, 30)], 30, order)

    return truncate(
        th(13, 17) - th(11, 19) + QSeries.monomial(s, 1) * th(7, 23) - QSeries.monomial(s, 3) * th(1, 29),
        order,
        keep_exact=False,
    )


def product_side_mod30(sign: int, order) -> QSeries:
    """Right side of the modulus-30 pair for ``sign`` in {+1, -1}."""
    if sign not in (1, -1):
        raise UsageError("sign must be +1 or -1")
    return product_to(
        order,
        [
            poch_factor(_m(sign, 1), 2, INFINITY),
            inverse_factor(poch_factor(_m(1, 2), 2, INFINITY)),
            series_factor(_mod30_bracket(sign, order)),
        ],
    )


def _psi_lhs(params, order):
    return _mod30_lhs(-1)(params, order)


def _psi_rhs(params, order):
    def pair(a, b):
        return _theta([_m(-1, a), _m(-1, b)], 30, order)

    bracket = pair(17, 13) - pair(11, 19) - QSeries.monomial(1, 1) * pair(7, 23) + QSeries.monomial(1, 3) * pair(1, 29)
    bracket = truncate(bracket, order, keep_exact=False)
    # 1/psi(-q) = (-q;q^2)_inf / (q^2;q^2)_inf
    return product_to(
        order,
        [
            poch_factor(_m(1, 30), 30, INFINITY),
            poch_factor(_m(-1, 1), 2, INFINITY),
            inverse_factor(poch_factor(_m(1, 2), 2, INFINITY)),
            series_factor(bracket),
        ],
    )


# -- modulus 24 ------------------------------------------------------------------


def _mod24_lhs(params, order):
    def factors(n):
        return [
            _mono(1, 2 * n * n - n),
            inverse_factor(series_factor(_one_plus(n)), f"1 + q^{n}"),
            inverse_factor(poch_factor(Q, 1, 2 * n - 1), f"(q;q)_{2 * n - 1}"),
        ]

    return build_with(order, lambda o: factor_sum(o, factors, start=1), [poch_factor(Q, 1, INFINITY)])


def _mod24_rhs(params, order):
    def th(a, b):
        return _theta([_m(-1, a), _m(-1, b), _m(1, 24)], 24, order)

    return truncate(
        th(10, 14) - th(11, 13) + QSeries.monomial(1, 1) * th(5, 19) - QSeries.monomial(1, 2) * th(2, 22),
        order,
        keep_exact=False,
    )


# -- modulus 15 (half-integer exponents) -------------------------------------------


def _half(c, e) -> Factor:
    # exponents of this identity are written over 2
    return series_factor(Monomial(c, Fraction(e)).series(scale=2))


def _mod15_lhs(params, order):
    def factors(n):
        return [
            poch_factor(_m(-1, 1), 1, n - 1),
            inverse_factor(poch_factor(Q, 1, 2 * n - 1), f"(q;q)_{2 * n - 1}"),
            _half(1, Fraction(3 * n * n, 2) - Fraction(n, 2)),
            inverse_factor(series_factor(_one_plus(n)), f"1 + q^{n}"),
        ]

    return factor_sum(order, factors, start=1)


def _mod15_rhs(params, order):
    def weighted(shift, quad):
        def factors(n):
            a, c, d = quad
            e = 3 * n + shift
            return [
                series_factor(_binom(1, e)),
                inverse_factor(series_factor(_one_plus(e)), f"1 + q^{e}"),
                _half(1, Fraction(a * n * n + c * n, 2) + d),
            ]

        return factor_sum(order, factors, bilateral=True)

    bracket = -weighted(0, (15, 1, 0)) + weighted(1, (15, 11, 1))
    # 1/phi(-q) = (-q;q)_inf / (q;q)_inf
    return product_to(
        order,
        [
            poch_factor(_m(-1, 1), 1, INFINITY),
            inverse_factor(poch_factor(Q, 1, INFINITY)),
            series_factor(truncate(bracket, order, keep_exact=False)),
        ],
    )


# -- the finite summation formula -------------------------------------------------


def _ratio_poly(m: int, n: int) -> QSeries:
    """``(q^(m-n+1);q)_2n / (q;q)_2n`` by alternating exact multiply/divide steps."""
    acc = QSeries.constant(1)
    for i in range(2 * n):
        acc = mul(acc, _binom(1, m - n + 1 + i))
        acc = div(acc, _binom(1, i + 1))
    return acc


def _trunc_lhs(params, order):
    m = params["m"]
    acc = QSeries.zero()
    for n in range(m + 1):
        pre = (QSeries.monomial(1, n) - 1) * (tau(1, n) ** 2) * tau(1, n - m)
        acc = add(acc, mul(pre, _ratio_poly(m, n)))
    return acc


def _trunc_rhs(params, order):
    m = params["m"]
    L, r = divmod(m, 3)
    if r == 0:
        return (1 - QSeries.monomial(1, L)) * QSeries.monomial(1, 3 * L * L + L)
    if r == 1:
        return (QSeries.monomial(1, 2 * L + 1) - 1) * QSeries.monomial(1, 3 * L * L + 2 * L)
    return (1 - QSeries.monomial(1, L + 1)) * QSeries.monomial(1, 3 * L * L + 4 * L + 1)


def truncated_sum_degree_bound(m: int) -> Fraction:
    """Upper bound on the degree of both sides of the finite summation formula."""
    # deg (q^n - 1) + deg tau(n)^2 + deg tau(n-m) + deg [m+n choose 2n]
    return max(Fraction(n + n * (n - 1) + 2 * n * (m - n)) + Fraction((n - m) * (n - m - 1), 2)
               for n in range(m + 1))


# -- registry --------------------------------------------------------------------


def _build_registry() -> tuple[Identity, ...]:
    n_nonneg = IntRange("n", 0, None)
    n_all = IntRange("n", None, None)
    jtp_set = (
        (_m(-1, 0), 1),
        (_m(-1, 1), 2),
        (_m(1, 1), 3),
        (_m(1, Fraction(1, 2)), 1),
        (_m(2, 0), 1),
    )
    return (
        Identity("rr1", "first Rogers-Ramanujan identity",
                 "sum q^(n^2)/(q;q)_n = 1/(q,q^4;q^5)_inf",
                 NoParams(), _rr_lhs(0), _rr_rhs(1, 4), min_order=5),
        Identity("rr2", "second Rogers-Ramanujan identity",
                 "sum q^(n^2+n)/(q;q)_n = 1/(q^2,q^3;q^5)_inf",
                 NoParams(), _rr_lhs(1), _rr_rhs(2, 3), min_order=5),
        Identity("jacobi-triple", "Jacobi triple product",
                 "sum_n tau_b(n) x^n = (x, q^b/x, q^b; q^b)_inf",
                 Choice(("x", "base"), jtp_set, _jtp_validate), _jtp_lhs, _jtp_rhs,
                 min_order=3, golden={"x": _m(-1, 1), "base": 2}),
        Identity("pentagonal-gen", "generalized pentagonal number theorem",
                 "sum_k tau_3(k) (q^-k, q^k; q)_n q^k = (q;q)_inf tau(n)^2",
                 n_nonneg, _pent_lhs, _pent_rhs, min_order=10, golden={"n": 2}),
        Identity("h-closed", "closed form of H(n)",
                 "H(n) = (q;q)_inf times a signed monomial factor chosen by n mod 3",
                 n_all, _h_closed_lhs, _h_closed_rhs, min_order=10, golden={"n": 2}),
        Identity("h-antisym", "antisymmetry of H(n)",
                 "H(0) = 0 and H(-n) = -H(n)",
                 n_all, _h_anti_lhs, _h_anti_rhs, min_order=10, golden={"n": 4}),
        Identity("key-finite", "key finite identity for H(n)",
                 "sum_k [2n, k+n] tau(k)(1-q^k) H(k) = (q;q)_inf (q^n-1) tau(n)^2",
                 n_nonneg, _key_lhs, _key_rhs, min_order=10, golden={"n": 3}),
        Identity("bailey-pair-new", "the new Bailey pair relative to a = 1",
                 "sum_k alpha_k/((q;q)_(n-k)(q;q)_(n+k)) = beta_n for alpha_n = tau(n)(1-q^n)H(n)",
                 n_nonneg, _pair_lhs, _pair_rhs, min_order=10, golden={"n": 3}),
        Identity("h-inverse", "inverse expansion of H(n)",
                 "H(n) = (q;q)_inf sum_k (-1)^(k+1) (q^2k;q)_(n-k)/(q;q)_(n-k) (1+q^n)/(1+q^k) q^(3k^2/2-k/2-nk), n >= 1",
                 IntRange("n", 1, None), _hinv_lhs, _hinv_rhs, min_order=10, golden={"n": 4}),
        Identity("main-theorem", "Bailey lemma specialized to the new pair",
                 "sum (x,y;q)_n/(q;q)_2n (xy)^-n (q^n-1) q^(n^2) = (S1-S2-T1+T2)(q/x,q/y;q)_inf/(q,q/xy;q)_inf",
                 Choice(("x", "y"), MAIN_TEST_SET, _main_validate), _main_lhs, _main_rhs,
                 min_order=10, golden={"x": _m(-1, 0), "y": INFINITY}),
        Identity("mod30-plus", "modulus 30 identity, upper sign",
                 "sum (-1)^n (q;q^2)_n/(q^2;q^2)_2n (q^2n-1) q^(3n^2-2n) = theta quotient modulo 30",
                 NoParams(), _mod30_lhs(1), lambda p, o: product_side_mod30(1, o), min_order=30, order_floor=120),
        Identity("mod30-minus", "modulus 30 identity, lower sign",
                 "sum (-q;q^2)_n/(q^2;q^2)_2n (q^2n-1) q^(3n^2-2n) = theta quotient modulo 30",
                 NoParams(), _mod30_lhs(-1), lambda p, o: product_side_mod30(-1, o), min_order=30, order_floor=120),
        Identity("mod30-psi", "modulus 30 identity in psi form",
                 "sum (-q;q^2)_n/(q^2;q^2)_2n (q^2n-1) q^(3n^2-2n) = (q^30;q^30)_inf/psi(-q) times theta pairs",
                 NoParams(), _psi_lhs, _psi_rhs, min_order=30, order_floor=120),
        Identity("mod24", "modulus 24 identity",
                 "(q;q)_inf sum_{n>=1} q^(2n^2-n)/((1+q^n)(q;q)_(2n-1)) = four theta products modulo 24",
                 NoParams(), _mod24_lhs, _mod24_rhs, min_order=24),
        Identity("mod15", "modulus 15 identity",
                 "sum_{n>=1} (-q;q)_(n-1)/(q;q)_(2n-1) q^(3n^2/2-n/2)/(1+q^n) = bilateral sums over phi(-q)",
                 NoParams(), _mod15_lhs, _mod15_rhs, scale=2, min_order=15),
        Identity("truncated-sum", "finite summation formula",
                 "sum_n (q^n-1) tau(n)^2 tau(n-m) (q^(m-n+1);q)_2n/(q;q)_2n = closed form by m mod 3",
                 IntRange("m", 0, None), _trunc_lhs, _trunc_rhs, min_order=0, golden={"m": 7},
                 degree_bound=lambda p: truncated_sum_degree_bound(p["m"])),
    )


_REGISTRY: Optional[tuple[Identity, ...]] = None


def registry() -> tuple[Identity, ...]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _build_registry()
    return _REGISTRY


def lookup(identity_id: str) -> Optional[Identity]:
    for ident in registry():
        if ident.id == identity_id:
            return ident
    return None


# -- verification ------------------------------------------------------------------


def params_json(params: dict) -> dict:
    return {k: (v if isinstance(v, int) and not isinstance(v, bool) else param_str(v)) for k, v in params.items()}


def sides(identity_id: str, params: Optional[dict] = None, order=DEFAULT_ORDER) -> tuple[QSeries, QSeries]:
    ident = _get(identity_id)
    p = ident.space.check(dict(params or {}))
    order = Fraction(order)
    return ident.lhs(p, order), ident.rhs(p, order)


def _get(identity_id: str) -> Identity:
    ident = lookup(identity_id)
    if ident is None:
        raise UsageError(f"unknown identity {identity_id!r}")
    return ident


def verify(identity_id: str, params: Optional[dict] = None, order=DEFAULT_ORDER, *,
           allow_below_minimum: bool = False) -> VerificationReport:
    """Build both sides of one identity instance and compare them through ``q^order``."""
    ident = _get(identity_id)
    p = ident.space.check(dict(params or {}))
    order = Fraction(order)
    if order < 0:
        raise UsageError("order must be nonnegative")
    if order < ident.min_order and not allow_below_minimum:
        raise UsageError(f"{ident.id} needs order >= {ident.min_order} for a meaningful check")
    note = f"below the minimum order {ident.min_order}" if order < ident.min_order else ""
    shown = params_json(p)
    t0 = time.perf_counter()
    with recording() as records:
        try:
            lhs = ident.lhs(p, order)
            rhs = ident.rhs(p, order)
            cmp = equal_up_to(lhs, rhs, order)
        except QSeriesError as exc:
            ms = int((time.perf_counter() - t0) * 1000)
            return VerificationReport(ident.id, shown, order, ident.scale, ERROR, None, tuple(records), ms,
                                      message=f"{type(exc).__name__}: {exc}")
    ms = int((time.perf_counter() - t0) * 1000)
    if cmp:
        return VerificationReport(ident.id, shown, order, ident.scale, PASS, None, tuple(records), ms, message=note)
    return VerificationReport(ident.id, shown, order, ident.scale, MISMATCH,
                              Mismatch(cmp.exponent, cmp.lhs, cmp.rhs), tuple(records), ms, message=note)


def family(identity_id: str, caps: Optional[dict] = None) -> list[dict]:
    """The capped parameter list iterated by :func:`verify_all`."""
    return _get(identity_id).space.values({**DEFAULT_CAPS, **(caps or {})})


def effective_order(ident: Identity, order, overrides: Optional[dict] = None) -> Fraction:
    if overrides and ident.id in overrides:
        return Fraction(overrides[ident.id])
    return max(Fraction(order), Fraction(ident.order_floor))


def _task(args) -> VerificationReport:
    identity_id, params, order = args
    return verify(identity_id, params, order, allow_below_minimum=True)


def verify_all(order=DEFAULT_ORDER, caps: Optional[dict] = None, overrides: Optional[dict] = None,
               jobs: int = 1, only: Optional[Sequence[str]] = None) -> list[VerificationReport]:
    """Verify every registered identity over its capped parameter space.

    Each entry runs at ``max(order, order_floor)`` unless ``overrides`` names
    it.  Reports come back in registry order regardless of ``jobs``.
    """
    tasks = []
    for ident in registry():
        if only is not None and ident.id not in only:
            continue
        o = effective_order(ident, order, overrides)
        for p in family(ident.id, caps):
            tasks.append((ident.id, p, o))
    if jobs <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_task, tasks, chunksize=1))
