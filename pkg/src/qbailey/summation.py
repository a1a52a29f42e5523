"""Truncated evaluation of unilateral and bilateral sums of series-valued terms.

A term generator may carry a valuation bound ``n -> lower bound on the lowest
exponent of term(n)``.  The bound must be discretely convex along each
direction of summation (true for the quadratic bounds used throughout); the
sum then stops as soon as the bound exceeds the order and is nondecreasing,
which proves every later term vanishes through that order.  Without a bound
the engine falls back to a window heuristic and flags it.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .errors import ContractError, NonTerminationError
from .series import QSeries, add, truncate

DEFAULT_WINDOW = 8
DEFAULT_INDEX_CAP = 10_000

TermFn = Callable[[int, Fraction], QSeries]
BoundFn = Callable[[int], object]


@dataclass(frozen=True)
class TermGenerator:
    """``term(n, order)`` must be known through ``q^order``."""

    term: TermFn
    valuation_bound: Optional[BoundFn] = None


@dataclass(frozen=True)
class SumRecord:
    kind: str  # "unilateral" | "bilateral"
    first: int
    last: int
    termination: str  # "bound" | "heuristic" | "finite"


_RECORDS: contextvars.ContextVar[Optional[list]] = contextvars.ContextVar(
    "qbailey_sum_records", default=None
)


@contextlib.contextmanager
def recording() -> Iterator[list[SumRecord]]:
    """Collect a :class:`SumRecord` for every sum evaluated in this context."""
    records: list[SumRecord] = []
    token = _RECORDS.set(records)
    try:
        yield records
    finally:
        _RECORDS.reset(token)


def _record(rec: SumRecord) -> None:
    sink = _RECORDS.get()
    if sink is not None:
        sink.append(rec)


def _check(term: QSeries, bound, n: int) -> None:
    v = term.valuation
    if v is not None and v < bound:
        raise ContractError(f"term {n} has valuation {v} below its declared bound {bound}")


def _walk(gen: TermGenerator, order: Fraction, indices, step: int, window: int, cap: int):
    """Accumulate terms along one direction; returns (sum, last index, mode)."""
    acc = QSeries.zero()
    bound = gen.valuation_bound
    quiet = 0
    last = None
    count = 0
    for n in indices:
        count += 1
        if count > cap:
            raise NonTerminationError(f"summation exceeded the index cap of {cap} terms")
        if bound is not None:
            b = bound(n)
            if b == math.inf:
                # declared identically zero
                quiet += 1
                continue
            if b > order and bound(n + step) >= b:
                return acc, last, "bound"
        t = gen.term(n, order)
        if bound is not None:
            _check(t, b, n)
        t = truncate(t, order)
        last = n
        if t.is_zero():
            quiet += 1
            if bound is None and quiet >= window:
                return acc, last, "heuristic"
        else:
            quiet = 0
            acc = add(acc, t)
    return acc, last, "finite"


def _count(start: int, step: int):
    n = start
    while True:
        yield n
        n += step


def _close(acc: QSeries, order: Fraction, infinite: bool) -> QSeries:
    if infinite:
        return truncate(acc, order, keep_exact=False)
    return truncate(acc, order)


def sum_unilateral(
    gen: TermGenerator,
    order,
    *,
    start: int = 0,
    stop: Optional[int] = None,
    window: int = DEFAULT_WINDOW,
    index_cap: int = DEFAULT_INDEX_CAP,
) -> QSeries:
    """``sum_{n >= start} term(n)`` (or up to ``stop`` inclusive) through ``q^order``."""
    order = Fraction(order)
    indices = range(start, stop + 1) if stop is not None else _count(start, 1)
    acc, last, mode = _walk(gen, order, indices, 1, window, index_cap)
    _record(SumRecord("unilateral", start, start - 1 if last is None else last, mode))
    return _close(acc, order, stop is None)


def sum_bilateral(
    gen: TermGenerator,
    order,
    *,
    window: int = DEFAULT_WINDOW,
    index_cap: int = DEFAULT_INDEX_CAP,
) -> QSeries:
    """``sum_{n in Z} term(n)`` evaluated as 0, then +1, +2, ... and -1, -2, ..."""
    order = Fraction(order)
    up, hi, mode_up = _walk(gen, order, _count(0, 1), 1, window, index_cap)
    down, lo, mode_down = _walk(gen, order, _count(-1, -1), -1, window, index_cap)
    mode = "heuristic" if "heuristic" in (mode_up, mode_down) else "bound"
    _record(SumRecord("bilateral", 0 if lo is None else lo, -1 if hi is None else hi, mode))
    return _close(add(up, down), order, True)
