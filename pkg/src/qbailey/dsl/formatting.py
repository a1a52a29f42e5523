"""Text and JSON renderings of series; the text form parses back in the DSL."""

from __future__ import annotations

import json
from fractions import Fraction

from ..series import Monomial, QSeries


def rational_str(c) -> str:
    """Exact decimal string: ``"7"``, ``"-3"`` or ``"p/r"``."""
    return str(Fraction(c))


def _power(e: Fraction) -> str:
    if e == 0:
        return ""
    if e == 1:
        return "q"
    return f"q^{e}"


def _term(c, e: Fraction, first: bool) -> str:
    neg = c < 0
    mag = -c if neg else c
    p = _power(e)
    if not p:
        body = rational_str(mag)
    elif mag == 1:
        body = p
    else:
        body = f"{rational_str(mag)}*{p}"
    if first:
        return f"-{body}" if neg else body
    return f" - {body}" if neg else f" + {body}"


def format_monomial(m: Monomial) -> str:
    return _term(m.coeff, m.exp, True)


def format_series(series: QSeries, style: str = "text") -> str:
    if style == "json":
        return json.dumps(series_to_json(series), sort_keys=True)
    if style != "text":
        raise ValueError(f"unknown format style {style!r}")
    parts = [_term(c, e, i == 0) for i, (e, c) in enumerate(series.terms())]
    if series.order is not None:
        tail = f"O({_power(Fraction(series.order + 1, series.scale)) or '1'})"
        parts.append(f" + {tail}" if parts else tail)
    return "".join(parts) if parts else "0"


def series_to_json(series: QSeries) -> dict:
    return {
        "scale": series.scale,
        "order": None if series.order is None else str(series.precision),
        "terms": [[str(e), rational_str(c)] for e, c in series.terms()],
    }


def series_from_json(payload: dict) -> QSeries:
    order = payload["order"]
    return QSeries.from_terms(
        {Fraction(e): Fraction(c) for e, c in payload["terms"]},
        order=None if order is None else Fraction(order),
        scale=payload["scale"],
    )
