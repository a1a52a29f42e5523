"""Evaluate DSL expressions to truncated series on a declared lattice.

Products and quotients adapt the working order of their operands to the
operands' observed valuations, so the result is exact through the requested
order even when factors carry negative powers of q.  Infinite sums have no
syntactic valuation bound and always use the heuristic window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import DslError, LatticeError, PrecisionError, SeriesZeroDivisionError
from ..factory import INFINITY, PochSpec, pochhammer, qbinomial, tau, triple_product_rhs, euler, phi_neg_q, psi_neg_q
from ..series import Monomial, QSeries, add, div, mul, rescale, sub, truncate
from ..summation import DEFAULT_INDEX_CAP, DEFAULT_WINDOW, TermGenerator, sum_bilateral, sum_unilateral
from .parser import BinOp, Binder, Call, Inf, Name, Neg, Node, Num, Pow, QVar, check_bindings, parse

# how far past the order a divisor is probed for its leading term
_DIVISOR_PROBE = 256


def _err(node, message: str) -> DslError:
    return DslError(message, node.span.line, node.span.col)


def _lb(x: QSeries) -> Fraction:
    """Valuation lower bound of a series that is not the exact zero."""
    if x.coeffs:
        return x.valuation
    return Fraction(x.order + 1, x.scale)


def _exact_zero(x: QSeries) -> bool:
    return x.is_exact and x.is_zero()


@dataclass
class Evaluator:
    scale: Optional[int] = 1  # None admits any lattice
    window: int = DEFAULT_WINDOW
    index_cap: int = DEFAULT_INDEX_CAP
    keep_exact: bool = False  # never truncate exact intermediates
    _memo: dict = field(default_factory=dict)

    def cut(self, x: QSeries, order: Fraction) -> QSeries:
        if self.keep_exact and x.is_exact:
            return x
        return truncate(x, order)

    # -- lattice ---------------------------------------------------------

    def on_lattice(self, node, e: Fraction) -> Fraction:
        if self.scale is not None and (e * self.scale).denominator != 1:
            raise LatticeError(
                f"{node.span.line}:{node.span.col}: exponent {e} is off the lattice (1/{self.scale})Z;"
                f" declare a scale divisible by {e.denominator}"
            )
        return e

    # -- scalars -----------------------------------------------------------

    def scalar(self, node: Node, env: dict) -> Fraction:
        """Evaluate an integer/rational subexpression (no q allowed)."""
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Name):
            if node.name not in env:
                raise _err(node, f"unbound identifier {node.name!r}")
            return Fraction(env[node.name])
        if isinstance(node, Neg):
            return -self.scalar(node.operand, env)
        if isinstance(node, BinOp):
            a, b = self.scalar(node.left, env), self.scalar(node.right, env)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if b == 0:
                raise SeriesZeroDivisionError(f"{node.span.line}:{node.span.col}: division by zero")
            return a / b
        if isinstance(node, Pow):
            a, k = self.scalar(node.base, env), self.scalar(node.exponent, env)
            if k.denominator != 1:
                raise _err(node, "a rational power of a number is not allowed")
            if a == 0 and k < 0:
                raise SeriesZeroDivisionError(f"{node.span.line}:{node.span.col}: division by zero")
            return a ** int(k)
        if isinstance(node, QVar):
            raise _err(node, "q cannot appear in an integer or exponent expression")
        raise _err(node, "expected an integer or rational expression here")

    def integer(self, node: Node, env: dict, what: str) -> int:
        v = self.scalar(node, env)
        if v.denominator != 1:
            raise _err(node, f"{what} must be an integer, got {v}")
        return int(v)

    def monomial(self, node: Node, order, env: dict, what: str) -> Monomial:
        x = self.ev(node, order, env)
        m = x.as_monomial()
        if m is None:
            raise _err(node, f"{what} must be an exact monomial c*q^e")
        return m

    # -- series ------------------------------------------------------------

    def ev(self, node: Node, order, env: dict) -> QSeries:
        order = Fraction(order)
        key = (id(node), order, tuple(sorted(env.items())))
        hit = self._memo.get(key)
        if hit is not None and hit[0] is node:
            return hit[1]
        out = self._ev(node, order, env)
        self._memo[key] = (node, out)
        return out

    def _ev(self, node: Node, order: Fraction, env: dict) -> QSeries:
        if isinstance(node, Num):
            return QSeries.constant(node.value)
        if isinstance(node, QVar):
            return QSeries.monomial(1, 1)
        if isinstance(node, Name):
            return QSeries.constant(self.scalar(node, env))
        if isinstance(node, Inf):
            raise _err(node, "inf is not a value")
        if isinstance(node, Neg):
            return -self.ev(node.operand, order, env)
        if isinstance(node, BinOp):
            if node.op in "+-":
                a = self.ev(node.left, order, env)
                b = self.ev(node.right, order, env)
                r = add(a, b) if node.op == "+" else sub(a, b)
                return self.cut(r, order)
            if node.op == "*":
                return self._mul(node, order, env)
            return self._div(node, order, env)
        if isinstance(node, Pow):
            return self._pow(node, order, env)
        if isinstance(node, Call):
            return self._call(node, order, env)
        if isinstance(node, Binder):
            return self._sum(node, order, env)
        raise _err(node, "unsupported expression")

    def _mul(self, node: BinOp, order: Fraction, env: dict) -> QSeries:
        oa = ob = order
        for _ in range(6):
            a = self.ev(node.left, oa, env)
            if _exact_zero(a):
                return QSeries.zero()
            b = self.ev(node.right, ob, env)
            if _exact_zero(b):
                return QSeries.zero()
            na = oa if a.is_exact else max(oa, order - _lb(b))
            nb = ob if b.is_exact else max(ob, order - _lb(a))
            if na == oa and nb == ob:
                return self.cut(mul(a, b), order)
            oa, ob = na, nb
        raise PrecisionError(f"{node.span.line}:{node.span.col}: product did not reach order {order}")

    def _divisor(self, node: Node, order: Fraction, env: dict) -> QSeries:
        probe = order
        limit = order + _DIVISOR_PROBE
        while True:
            b = self.ev(node, probe, env)
            if b.coeffs:
                return b
            if b.is_exact:
                raise SeriesZeroDivisionError(f"{node.span.line}:{node.span.col}: division by the zero series")
            if probe >= limit:
                raise SeriesZeroDivisionError(
                    f"{node.span.line}:{node.span.col}: divisor vanishes through q^{b.precision}"
                )
            probe = min(limit, max(probe * 2, probe + 8))

    def _div(self, node: BinOp, order: Fraction, env: dict) -> QSeries:
        b = self._divisor(node.right, order, env)
        vb = b.valuation
        a = self.ev(node.left, order + vb, env)
        if _exact_zero(a):
            return QSeries.zero()
        mb = b.as_monomial()
        if mb is not None and a.is_exact:
            # exact quotient by a monomial
            return self.cut(mul(a, (1 / mb).series()), order)
        if not b.is_exact:
            need = order + 2 * vb - _lb(a)
            if b.precision < need:
                b = self.ev(node.right, need, env)
        return truncate(div(a, b, order), order)

    def _pow(self, node: Pow, order: Fraction, env: dict) -> QSeries:
        k = self.scalar(node.exponent, env)
        if isinstance(node.base, QVar):
            return QSeries.monomial(1, self.on_lattice(node, k))
        if k.denominator != 1:
            base = self.ev(node.base, order, env)
            m = base.as_monomial()
            if m is None or m.coeff != 1:
                raise _err(node, "a rational exponent needs a base of the form q^e")
            return QSeries.monomial(1, self.on_lattice(node, m.exp * k))
        k = int(k)
        if k == 0:
            return QSeries.constant(1)
        base = self.ev(node.base, order, env)
        m = base.as_monomial()
        if m is not None:
            if k < 0 and m.coeff == 0:
                raise SeriesZeroDivisionError("zero to a negative power")
            p = m ** k
            return QSeries.monomial(p.coeff, self.on_lattice(node, p.exp))
        if base.is_exact:
            r = base ** abs(k)
            if k > 0:
                return r
            if r.is_zero():
                raise SeriesZeroDivisionError(f"{node.span.line}:{node.span.col}: zero to a negative power")
            vr = r.valuation
            return truncate(div(QSeries.constant(1), r, order), order) if vr is not None else r
        # truncated base: repeated products at adapted order
        if k < 0:
            inv = BinOp("/", Num(Fraction(1), node.span), Pow(node.base, Num(Fraction(-k), node.span), node.span),
                        node.span)
            return self._div(inv, order, env)
        v = _lb(base)
        need = order - (k - 1) * min(v, 0)
        base = self.ev(node.base, need, env)
        acc = base
        for _ in range(k - 1):
            acc = mul(acc, base)
        return truncate(acc, order)

    def _call(self, node: Call, order: Fraction, env: dict) -> QSeries:
        name, args = node.name, node.args
        if name in ("poch", "pochinf"):
            x = self.monomial(args[0], order, env, "the Pochhammer argument")
            b = self.scalar(args[1], env) if len(args) > 1 else Fraction(1)
            self.on_lattice(node, x.exp)
            self.on_lattice(node, b)
            if name == "pochinf" or isinstance(args[2], Inf):
                if b <= 0:
                    raise _err(node, "an infinite product needs a positive base exponent")
                length = INFINITY
            else:
                length = self.integer(args[2], env, "the Pochhammer length")
            return pochhammer(PochSpec(x, b, length), order)
        if name == "qbin":
            n = self.integer(args[0], env, "n")
            k = self.integer(args[1], env, "k")
            if n < 0:
                raise _err(node, "qbin needs n >= 0")
            return qbinomial(n, k)
        if name == "tau":
            r = self.integer(args[0], env, "r")
            n = self.integer(args[1], env, "n")
            t = tau(r, n)
            return QSeries.monomial(t.coeff, t.exp)
        if name == "jtp":
            x = self.monomial(args[0], order, env, "the triple-product argument")
            b = self.scalar(args[1], env)
            if b <= 0:
                raise _err(node, "jtp needs a positive base exponent")
            self.on_lattice(node, x.exp)
            self.on_lattice(node, b)
            return triple_product_rhs(x, b, order)
        if name == "eulerq":
            return euler(order)
        if name == "phi":
            return phi_neg_q(order)
        if name == "psi":
            return psi_neg_q(order)
        raise _err(node, f"unknown function {name!r}")

    def _sum(self, node: Binder, order: Fraction, env: dict) -> QSeries:
        var = node.var

        def term(n, o):
            return self.ev(node.body, o, {**env, var: n})

        gen = TermGenerator(term)
        if node.name == "bsum":
            return sum_bilateral(gen, order, window=self.window, index_cap=self.index_cap)
        lo = self.integer(node.lo, env, "the lower limit")
        if isinstance(node.hi, Inf):
            return sum_unilateral(gen, order, start=lo, window=self.window, index_cap=self.index_cap)
        hi = self.integer(node.hi, env, "the upper limit")
        if hi < lo:
            return QSeries.zero()
        return sum_unilateral(gen, order, start=lo, stop=hi, window=self.window, index_cap=self.index_cap)


def evaluate(source, order, scale: int = 1, *, window: int = DEFAULT_WINDOW,
             index_cap: int = DEFAULT_INDEX_CAP) -> QSeries:
    """Parse (if needed) and evaluate an expression through ``q^order`` on lattice ``1/scale``."""
    if not isinstance(scale, int) or scale < 1:
        raise LatticeError(f"scale must be a positive integer, got {scale!r}")
    node = parse(source) if isinstance(source, str) else source
    check_bindings(node)
    ev = Evaluator(scale, window, index_cap)
    out = truncate(ev.ev(node, Fraction(order), {}), order)
    if scale % out.scale:
        raise LatticeError(f"result lives on lattice 1/{out.scale}, not 1/{scale}")
    return rescale(out, scale)


def evaluate_monomial(source) -> Monomial:
    """Evaluate an expression that must be an exact monomial, on any lattice."""
    node = parse(source) if isinstance(source, str) else source
    check_bindings(node)
    value = Evaluator(None, keep_exact=True).ev(node, Fraction(0), {})
    m = value.as_monomial()
    if m is None:
        raise DslError("expected an exact monomial c*q^e", 1, 1)
    return m
