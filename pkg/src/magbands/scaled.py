"""Sign / log-magnitude numbers for quantities far outside double range.

A :class:`ScaledValue` stores ``sign * exp(log_mag)``.  Products and
quotients are exact up to one rounding of ``log_mag``; sums rescale to the
larger operand before adding, so relative accuracy is that of ordinary
floating point addition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_NEG_INF = -math.inf


@dataclass(frozen=True, slots=True)
class ScaledValue:
    sign: int
    log_mag: float = _NEG_INF

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign != 0 and not math.isfinite(self.log_mag):
            raise ValueError("log_mag must be finite for a nonzero value")

    @classmethod
    def zero(cls) -> ScaledValue:
        return cls(0, _NEG_INF)

    @classmethod
    def from_float(cls, v: float) -> ScaledValue:
        if v == 0.0:
            return cls.zero()
        if not math.isfinite(v):
            raise ValueError(f"cannot scale non-finite value {v!r}")
        return cls(1 if v > 0 else -1, math.log(abs(v)))

    @classmethod
    def from_parts(cls, mantissa: float, log_scale: float) -> ScaledValue:
        """Value ``mantissa * exp(log_scale)``."""
        if mantissa == 0.0:
            return cls.zero()
        return cls(1 if mantissa > 0 else -1, math.log(abs(mantissa)) + log_scale)

    def is_zero(self) -> bool:
        return self.sign == 0

    def rescale(self, log_factor: float) -> ScaledValue:
        """Multiply by ``exp(log_factor)``."""
        if self.sign == 0:
            return self
        return ScaledValue(self.sign, self.log_mag + log_factor)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.log_mag > 709.78:
            return self.sign * math.inf
        return self.sign * math.exp(self.log_mag)

    def __neg__(self) -> ScaledValue:
        return ScaledValue(-self.sign, self.log_mag)

    def __abs__(self) -> ScaledValue:
        return ScaledValue(abs(self.sign), self.log_mag)

    def __mul__(self, other) -> ScaledValue:
        other = _coerce(other)
        s = self.sign * other.sign
        if s == 0:
            return ScaledValue.zero()
        return ScaledValue(s, self.log_mag + other.log_mag)

    __rmul__ = __mul__

    def __truediv__(self, other) -> ScaledValue:
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero ScaledValue")
        if self.sign == 0:
            return self
        return ScaledValue(self.sign * other.sign, self.log_mag - other.log_mag)

    def __rtruediv__(self, other) -> ScaledValue:
        return _coerce(other) / self

    def __add__(self, other) -> ScaledValue:
        other = _coerce(other)
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        ref = max(self.log_mag, other.log_mag)
        m = self.sign * math.exp(self.log_mag - ref) + other.sign * math.exp(other.log_mag - ref)
        return ScaledValue.from_parts(m, ref)

    __radd__ = __add__

    def __sub__(self, other) -> ScaledValue:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> ScaledValue:
        return _coerce(other) - self

    def mantissa(self, log_ref: float) -> float:
        """The value divided by ``exp(log_ref)`` as a float."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_mag - log_ref)

    def log10_abs(self) -> float:
        return self.log_mag / math.log(10.0)


def _coerce(v) -> ScaledValue:
    if isinstance(v, ScaledValue):
        return v
    return ScaledValue.from_float(float(v))


def scaled_sum(values) -> ScaledValue:
    """Sum a sequence of ScaledValues with a single common rescaling."""
    vals = [v for v in values if v.sign != 0]
    if not vals:
        return ScaledValue.zero()
    ref = max(v.log_mag for v in vals)
    return ScaledValue.from_parts(math.fsum(v.sign * math.exp(v.log_mag - ref) for v in vals), ref)


def rel_diff(x: ScaledValue, y: ScaledValue) -> float:
    """|x - y| / max(|x|, |y|), computed without leaving log space."""
    if x.sign == 0 and y.sign == 0:
        return 0.0
    d = x - y
    if d.sign == 0:
        return 0.0
    return math.exp(d.log_mag - max(x.log_mag, y.log_mag))
