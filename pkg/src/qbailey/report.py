"""Structured verification outcomes and their stable JSON form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .summation import SumRecord

PASS = "pass"
MISMATCH = "mismatch"
ERROR = "error"


@dataclass(frozen=True)
class Mismatch:
    exponent: Fraction
    lhs: Fraction
    rhs: Fraction

    def to_json(self) -> dict:
        return {"exponent": str(self.exponent), "lhs": str(Fraction(self.lhs)), "rhs": str(Fraction(self.rhs))}


@dataclass(frozen=True)
class VerificationReport:
    identity: str
    params: dict
    order: Fraction
    scale: int
    status: str
    first_mismatch: Optional[Mismatch] = None
    sums: tuple[SumRecord, ...] = ()
    elapsed_ms: int = 0
    message: str = ""
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.status == MISMATCH) != (self.first_mismatch is not None):
            raise ValueError("a mismatch report needs a witness, and only then")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def heuristic_sums(self) -> int:
        return sum(1 for r in self.sums if r.termination == "heuristic")

    def to_json(self, timing: bool = False) -> dict:
        order = Fraction(self.order)
        return {
            "identity": self.identity,
            "params": self.params,
            "order": int(order) if order.denominator == 1 else str(order),
            "scale": self.scale,
            "status": self.status,
            "first_mismatch": None if self.first_mismatch is None else self.first_mismatch.to_json(),
            "heuristic_sums": self.heuristic_sums,
            "elapsed_ms": self.elapsed_ms if timing else 0,
        }

    def summary_line(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.params.items())
        head = f"{self.status.upper():8} {self.identity}" + (f" [{params}]" if params else "")
        head += f" order={self.order} scale={self.scale}"
        if self.first_mismatch is not None:
            m = self.first_mismatch
            head += f" first mismatch at q^{m.exponent}: lhs={Fraction(m.lhs)} rhs={Fraction(m.rhs)}"
        if self.message:
            head += f" ({self.message})"
        return head
