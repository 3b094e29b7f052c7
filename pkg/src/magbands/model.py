"""Magnetic step configurations, the effective fiber potential and thresholds.

A step is the field b(x) = b1 for x < 0, b2 for x > 0.  Four symmetries
reduce any pair to a canonical one with b2 = 1 and -1 <= b1 <= 1:

* conjugation: b -> -b, fibre k -> -k;
* reflection x -> -x: (b1, b2) -> (-b2, -b1), fibre k unchanged;
* scaling by B > 0: spectrum of h_{Bb}(sqrt(B) k) = B * spectrum of h_b(k).

Field values are held as exact fractions.  A float ratio b that lies within
1e-12 of p/q with p, q odd and q <= 999 is snapped to p/q, since whether two
thresholds coincide depends on b being exactly such a ratio.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import DomainError, ZeroField

RATIO_TOL = 1e-12
RATIO_MAX_DEN = 999

Number = Union[int, float, Fraction]


class CaseTag(enum.Enum):
    WALL = "Wall"
    TRAPPING = "TrappingStep"
    SYMMETRIC = "SymmetricStep"
    NONTRAPPING = "NonTrappingStep"
    LANDAU = "Landau"
    ZERO_FIELD = "ZeroField"


def exact_ratio(b: Number) -> Fraction:
    """Exact value of a field ratio, snapping floats to nearby odd ratios."""
    if isinstance(b, (Fraction, int)):
        return Fraction(b)
    bf = float(b)
    if not math.isfinite(bf):
        raise DomainError(f"non-finite field value {b!r}")
    guess = Fraction(bf).limit_denominator(RATIO_MAX_DEN)
    if (guess.numerator % 2 and guess.denominator % 2
            and abs(float(guess) - bf) <= RATIO_TOL * max(1.0, abs(bf))):
        return guess
    return Fraction(bf)


def classify(b1: Fraction, b2: Fraction) -> CaseTag:
    if b1 == 0 and b2 == 0:
        return CaseTag.ZERO_FIELD
    if b2 != 1 or not (-1 <= b1 <= 1):
        raise DomainError(f"({b1}, {b2}) is not a normalized step")
    if b1 == 0:
        return CaseTag.WALL
    if b1 == 1:
        return CaseTag.LANDAU
    if b1 == -1:
        return CaseTag.SYMMETRIC
    return CaseTag.TRAPPING if b1 < 0 else CaseTag.NONTRAPPING


@dataclass(frozen=True)
class MagneticStep:
    """Normalized step: b2 = 1, -1 <= b1 <= 1 (or the zero field)."""

    b1: Fraction
    b2: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "b1", Fraction(self.b1))
        object.__setattr__(self, "b2", Fraction(self.b2))
        classify(self.b1, self.b2)

    @property
    def case_tag(self) -> CaseTag:
        return classify(self.b1, self.b2)

    @property
    def b(self) -> Fraction:
        """|b1|, the ratio entering the threshold set and the determinant."""
        return abs(self.b1)

    def __str__(self) -> str:
        return f"({self.b1}, {self.b2}) [{self.case_tag.value}]"


@dataclass(frozen=True)
class NormalizationRecord:
    scale: Fraction
    conjugated: bool = False
    reflected: bool = False

    @property
    def spectral_scale(self) -> Fraction:
        return self.scale

    def fibre(self, k: float) -> float:
        """Frequency of the normalized operator that carries fibre k of the original."""
        k = -k if self.conjugated else k
        return k / math.sqrt(self.scale)

    def original_fibre(self, k_norm: float) -> float:
        k = k_norm * math.sqrt(self.scale)
        return -k if self.conjugated else k

    @property
    def is_identity(self) -> bool:
        return self.scale == 1 and not (self.conjugated or self.reflected)


def normalize(b1: Number, b2: Number) -> tuple[MagneticStep, NormalizationRecord]:
    b1 = exact_ratio(b1)
    b2 = exact_ratio(b2)
    if b1 == 0 and b2 == 0:
        raise ZeroField("b1 = b2 = 0 has no Landau structure")
    reflected = conjugated = False
    if abs(b1) > abs(b2):
        b1, b2 = -b2, -b1
        reflected = True
    if b2 < 0:
        b1, b2 = -b1, -b2
        conjugated = True
    scale = b2
    r = b1 / scale
    if r.denominator > RATIO_MAX_DEN:
        # float inputs such as (0.1, 0.3): snap the ratio, not the entries
        r = exact_ratio(float(r))
    return MagneticStep(r, Fraction(1)), NormalizationRecord(scale, conjugated, reflected)


def parse_field(text: str) -> tuple[Fraction, Fraction]:
    """Parse "b1,b2" where each entry is an integer, p/q, or a decimal."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise DomainError(f"field must look like 'b1,b2', got {text!r}")
    out = []
    for p in parts:
        try:
            if "/" in p:
                num, den = p.split("/")
                out.append(Fraction(int(num), int(den)))
            else:
                out.append(exact_ratio(float(p)) if any(c in p for c in ".eE") else Fraction(int(p)))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse field entry {p!r}") from exc
    return out[0], out[1]


def effective_potential(step: MagneticStep, x, k: float):
    """(k - b1 x)^2 for x < 0 and (k - b2 x)^2 for x >= 0."""
    b1 = float(step.b1)
    b2 = float(step.b2)
    x = np.asarray(x, dtype=float)
    v = np.where(x < 0.0, (k - b1 * x) ** 2, (k - b2 * x) ** 2)
    return float(v) if v.ndim == 0 else v


# ------------------------------------------------------------ thresholds


@dataclass(frozen=True)
class RightLandau:
    n: int


@dataclass(frozen=True)
class LeftScaled:
    n: int


@dataclass(frozen=True)
class Split:
    n: int
    m: int


Origin = Union[RightLandau, LeftScaled, Split]


@dataclass(frozen=True)
class Threshold:
    value: Fraction
    origin: Origin

    @property
    def multiplicity(self) -> int:
        return 2 if isinstance(self.origin, Split) else 1

    def __float__(self) -> float:
        return float(self.value)

    def label(self) -> str:
        o = self.origin
        if isinstance(o, Split):
            return f"Split({o.n},{o.m})"
        return f"{type(o).__name__}({o.n})"


def is_splitting(b: Number) -> Optional[tuple[int, int]]:
    """(n, m) with b = (2n-1)/(2m-1) when b is a ratio of odd integers."""
    r = exact_ratio(b)
    if r <= 0:
        return None
    p, q = r.numerator, r.denominator
    if p % 2 and q % 2:
        return (p + 1) // 2, (q + 1) // 2
    return None


def thresholds(b: Number, lambda_max: float) -> list[Threshold]:
    """Elements of {2n-1} U {b(2n-1)} up to lambda_max, merged where they coincide."""
    r = exact_ratio(b)
    if not (0 < r <= 1):
        raise DomainError(f"threshold ratio must lie in (0, 1], got {b}")
    lam = Fraction(lambda_max) if not isinstance(lambda_max, Fraction) else lambda_max
    right = {}
    n = 1
    while 2 * n - 1 <= lam:
        right[Fraction(2 * n - 1)] = n
        n += 1
    out = []
    m = 1
    while r * (2 * m - 1) <= lam:
        v = r * (2 * m - 1)
        if v in right:
            out.append(Threshold(v, Split(right.pop(v), m)))
        else:
            out.append(Threshold(v, LeftScaled(m)))
        m += 1
    out.extend(Threshold(v, RightLandau(n)) for v, n in right.items())
    out.sort(key=lambda t: t.value)
    return out
