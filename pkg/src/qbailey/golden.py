"""Golden coefficient records: the first 40 coefficients of each identity's common value.

Regenerate with ``python -m qbailey.golden DIR``; tests diff both sides
against the stored records.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

from .dsl.formatting import rational_str
from .identities import Identity, params_json, registry
from .series import QSeries, coefficient_at, rescale

COUNT = 40


def golden_params(ident: Identity) -> dict:
    return dict(ident.golden)


def leading_coefficients(series: QSeries, scale: int, count: int = COUNT) -> tuple:
    """``(start, [c_0, ..., c_{count-1}])`` from the valuation on lattice ``1/scale``."""
    v = series.valuation
    if v is None:
        return None, []
    step = Fraction(1, scale)
    return v, [coefficient_at(series, v + i * step) for i in range(count)]


def common_value(ident: Identity, side: str = "lhs", count: int = COUNT) -> QSeries:
    """One side of ``ident`` at its golden parameters, known through ``count`` lattice steps."""
    build = ident.lhs if side == "lhs" else ident.rhs
    p = golden_params(ident)
    order = Fraction(60)
    value = build(p, order)
    v = value.valuation
    if v is not None:
        need = v + Fraction(count - 1, ident.scale)
        if need > order:
            value = build(p, need)
    return rescale(value, max(ident.scale, value.scale))


def golden_record(ident: Identity) -> dict:
    start, coeffs = leading_coefficients(common_value(ident), ident.scale)
    return {
        "identity": ident.id,
        "params": params_json(golden_params(ident)),
        "scale": ident.scale,
        "start": None if start is None else str(start),
        "coefficients": [rational_str(c) for c in coeffs],
    }


def write_all(directory) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for ident in registry():
        path = out / f"{ident.id}.json"
        path.write_text(json.dumps(golden_record(ident), indent=2) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m qbailey.golden DIR", file=sys.stderr)
        return 2
    for p in write_all(argv[0]):
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
