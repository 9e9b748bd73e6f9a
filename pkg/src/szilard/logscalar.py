"""Signed real numbers stored as (sign, log|x|).

Partition functions at low temperature are far below the smallest double,
so every multi-particle quantity is carried in this form and only
converted back to an ordinary float at the very end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

__all__ = ["LogScalar", "signed_logsumexp"]


def signed_logsumexp(terms: Iterable[tuple[int, float]]) -> tuple[int, float]:
    """Sum of ``sign * exp(log_mag)`` terms, returned as ``(sign, log_mag)``.

    Positive and negative parts are accumulated separately around their own
    maxima, so no intermediate exponent exceeds zero.
    """
    pos: list[float] = []
    neg: list[float] = []
    for sign, log_mag in terms:
        if sign > 0:
            pos.append(log_mag)
        elif sign < 0:
            neg.append(log_mag)
    lp = _lse(pos)
    ln = _lse(neg)
    if lp == ln:
        return 0, -math.inf
    sign, hi, lo = (1, lp, ln) if lp > ln else (-1, ln, lp)
    ratio = math.exp(lo - hi)
    if ratio >= 1.0:
        return 0, -math.inf
    return sign, hi + math.log1p(-ratio)


def _lse(values: list[float]) -> float:
    if not values:
        return -math.inf
    top = max(values)
    if top == -math.inf:
        return top
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


@dataclass(frozen=True)
class LogScalar:
    """A real number ``sign * exp(log_mag)``; ``log_mag`` is ignored when sign is 0.

    Values built from an ordinary float remember it, so converting back is exact.
    """

    sign: int
    log_mag: float
    exact: float | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign != 0 and math.isnan(self.log_mag):
            raise ValueError("log_mag is NaN")
        if self.sign != 0 and self.log_mag == -math.inf:
            object.__setattr__(self, "sign", 0)

    @classmethod
    def zero(cls) -> LogScalar:
        return cls(0, -math.inf)

    @classmethod
    def one(cls) -> LogScalar:
        return cls(1, 0.0)

    @classmethod
    def from_float(cls, x: float) -> LogScalar:
        if x == 0.0:
            return cls.zero()
        if math.isnan(x):
            raise ValueError("cannot represent NaN")
        return cls(1 if x > 0 else -1, math.log(abs(x)), float(x))

    @classmethod
    def from_log(cls, log_mag: float, sign: int = 1) -> LogScalar:
        return cls(sign, log_mag)

    @classmethod
    def sum(cls, items: Iterable[LogScalar]) -> LogScalar:
        sign, log_mag = signed_logsumexp((it.sign, it.log_mag) for it in items)
        return cls(sign, log_mag)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.exact is not None:
            return self.exact
        return self.sign * math.exp(self.log_mag)

    __float__ = to_float

    def __mul__(self, other: LogScalar | float) -> LogScalar:
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_mag + other.log_mag)

    __rmul__ = __mul__

    def __truediv__(self, other: LogScalar | float) -> LogScalar:
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_mag - other.log_mag)

    def __add__(self, other: LogScalar | float) -> LogScalar:
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        return LogScalar.sum((self, other))

    __radd__ = __add__

    def __neg__(self) -> LogScalar:
        return LogScalar(-self.sign, self.log_mag, None if self.exact is None else -self.exact)

    def __sub__(self, other: LogScalar | float) -> LogScalar:
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        return self + (-other)

    def log(self) -> float:
        """Natural log of a positive value."""
        if self.sign <= 0:
            raise ValueError("log of a non-positive LogScalar")
        return self.log_mag

    def rel_diff(self, other: LogScalar) -> float:
        """``|self - other| / |other|`` evaluated without leaving log space."""
        if other.sign == 0:
            return 0.0 if self.sign == 0 else math.inf
        d = self - other
        if d.sign == 0:
            return 0.0
        return math.exp(d.log_mag - other.log_mag)
