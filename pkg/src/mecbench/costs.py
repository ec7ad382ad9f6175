"""Exact cost arithmetic.

A cost is either a nonnegative ``fractions.Fraction`` or ``INFINITE``
(``math.inf``). Rationals keep priority-queue ordering and tie detection
exact; the only float ever allowed in cost arithmetic is infinity itself,
which is absorbing under addition and greater than every finite cost.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Cost = Union[Fraction, float]

INFINITE: Cost = math.inf

ZERO = Fraction(0)


def is_infinite(c: Cost) -> bool:
    return c == math.inf


def is_finite(c: Cost) -> bool:
    return c != math.inf


def as_cost(value: object) -> Cost:
    """Coerce ints, strings ("inf", "3/2", "0.8"), and Fractions to a Cost."""
    if isinstance(value, Fraction):
        cost = value
    elif isinstance(value, bool):
        raise ValueError(f"not a cost: {value!r}")
    elif isinstance(value, int):
        cost = Fraction(value)
    elif isinstance(value, float):
        if value == math.inf:
            return INFINITE
        raise ValueError(f"float costs are not exact: {value!r}; use a rational string")
    elif isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinite", "infinity"):
            return INFINITE
        cost = Fraction(text)
    else:
        raise ValueError(f"not a cost: {value!r}")
    if cost < 0:
        raise ValueError(f"costs must be nonnegative, got {cost}")
    return cost


def cost_to_json(c: Cost) -> object:
    """JSON-safe exact encoding: int, "p/q" string, or "inf"."""
    if is_infinite(c):
        return "inf"
    if c.denominator == 1:
        return int(c)
    return f"{c.numerator}/{c.denominator}"


def cost_to_float(c: Cost) -> float:
    return math.inf if is_infinite(c) else c.numerator / c.denominator


def format_cost(c: Cost) -> str:
    return "inf" if is_infinite(c) else str(c)
