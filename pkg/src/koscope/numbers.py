"""Exact percentages and half-up display rounding."""
from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Optional, Union

Number = Union[int, float, Fraction]


def round_half_up(value: Number, places: int = 2) -> float:
    if isinstance(value, Fraction):
        dec = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        dec = Decimal(str(value))
    return float(dec.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def percent(numerator: int, denominator: int) -> Optional[Fraction]:
    if not denominator:
        return None
    return Fraction(100 * numerator, denominator)


def share(numerator: int, denominator: int) -> dict:
    """``{count, total, pct}`` with pct at full float precision (None if total is 0)."""
    pct = percent(numerator, denominator)
    return {"count": numerator, "total": denominator, "pct": None if pct is None else float(pct)}


def fmt_pct(pct: Optional[float]) -> str:
    return "n/a" if pct is None else f"{round_half_up(pct):.2f}%"
