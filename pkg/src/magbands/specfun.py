"""Weber parabolic cylinder functions U(a, x), V(a, x) and reciprocal Gamma.

U(a, .) is the solution of  -y'' + (x^2/4) y = -a y  that decays as
x -> +inf; V(a, .) is the companion solution with Wronskian sqrt(2/pi).

Evaluation strategy, for x >= 0:

* x >= x_c(a): the large-x expansions
  U ~ e^{-x^2/4} x^{-a-1/2} sum_j (-1)^j (a+1/2)_{2j} / (j! (2x^2)^j),
  V ~ sqrt(2/pi) e^{x^2/4} x^{a-1/2} sum_j (1/2-a)_{2j} / (j! (2x^2)^j),
  truncated before their smallest term.  The Pochhammer symbol here is the
  *rising* factorial (c)_j = c (c+1) ... (c+j-1).  With the falling
  factorial the sums disagree with direct integration of the ODE already in
  the second term (tests/test_specfun.py::test_pochhammer_convention); the
  rising form is also the one that terminates into Hermite functions when
  a + 1/2 is a nonpositive integer.
* x < x_c(a): U is carried backwards from x_c + 1 by local Taylor steps
  (the direction in which U dominates, so the walk is stable); V is carried
  forwards from its closed-form origin data.

For x < 0 the decaying solution is reassembled from the connection formula

    U(a, -x) = pi / Gamma(a + 1/2) * V(a, x) - sin(pi a) U(a, x),

which keeps the exponentially small and exponentially large parts separate.
This is what makes the secular determinant usable at large k: both
1/Gamma(a + 1/2) and sin(pi a) are evaluated from an exact rational anchor
plus a float offset (:class:`AnchoredReal`), so parameters lying 1e-40 away
from a Gamma pole keep their full relative accuracy.

All results are :class:`~magbands.scaled.ScaledValue`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import _kernels as K
from .errors import LossOfAccuracy, OutOfRange, PoleEncountered
from .scaled import ScaledValue, rel_diff

MAX_ABS = 1.0e4
OVERLAP_TOL = 1e-9

_LOG_PI = math.log(math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class AnchoredReal:
    """The real number ``anchor + offset`` with an exact rational anchor.

    Offsets may be far below the spacing of doubles near ``anchor``; they are
    never added to it in floating point except when a plain float is asked
    for.
    """

    anchor: Fraction
    offset: float = 0.0

    @classmethod
    def coerce(cls, v) -> AnchoredReal:
        if isinstance(v, AnchoredReal):
            return v
        if isinstance(v, (Fraction, int)):
            return cls(Fraction(v), 0.0)
        v = float(v)
        if not math.isfinite(v):
            raise OutOfRange(f"non-finite parameter {v!r}")
        return cls(Fraction(v), 0.0)

    def __float__(self) -> float:
        return float(self.anchor) + self.offset

    def scaled(self, factor) -> AnchoredReal:
        factor = Fraction(factor)
        return AnchoredReal(self.anchor * factor, self.offset * float(factor))

    def shifted(self, c) -> AnchoredReal:
        return AnchoredReal(self.anchor + Fraction(c), self.offset)

    def __neg__(self) -> AnchoredReal:
        return AnchoredReal(-self.anchor, -self.offset)

    def __repr__(self) -> str:
        return f"AnchoredReal({self.anchor}, {self.offset:+.17g})"


Real = Union[float, int, Fraction, AnchoredReal]


@dataclass(frozen=True)
class WeberParams:
    a: float
    x: float

    def __post_init__(self):
        for name in ("a", "x"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise OutOfRange(f"{name}={v!r} is not finite")
            if abs(v) > MAX_ABS:
                raise OutOfRange(f"|{name}|={abs(v):g} exceeds the supported range {MAX_ABS:g}")


# ------------------------------------------------------------ trigonometry


def _sinpi_fraction(r: Fraction) -> float:
    r = r % 2
    sign = 1.0
    if r >= 1:
        r -= 1
        sign = -1.0
    if r > Fraction(1, 2):
        r = 1 - r
    if r == 0:
        return 0.0
    if r == Fraction(1, 2):
        return sign
    if r == Fraction(1, 6):
        return 0.5 * sign
    return sign * math.sin(math.pi * float(r))


def sinpi(v: Real) -> float:
    """sin(pi v), exact at integers and half-integers of the anchor."""
    v = AnchoredReal.coerce(v)
    s0 = _sinpi_fraction(v.anchor)
    if v.offset == 0.0:
        return s0
    c0 = _sinpi_fraction(v.anchor + Fraction(1, 2))
    return s0 * math.cos(math.pi * v.offset) + c0 * math.sin(math.pi * v.offset)


def cospi(v: Real) -> float:
    v = AnchoredReal.coerce(v)
    return sinpi(v.shifted(Fraction(1, 2)))


# ------------------------------------------------------------ Gamma


def recip_gamma_scaled(z: Real) -> ScaledValue:
    """1/Gamma(z) in sign/log form; exact zeros at 0, -1, -2, ..."""
    z = AnchoredReal.coerce(z)
    a = z.anchor
    if a.denominator == 1 and a <= 0 and abs(z.offset) < 0.5:
        if z.offset == 0.0:
            return ScaledValue.zero()
        # 1/Gamma(-N + d) = (-1)^N sin(pi d) Gamma(1 + N - d) / pi
        n = -int(a)
        s = math.sin(math.pi * z.offset)
        sign = (1 if s > 0 else -1) * (-1 if n % 2 else 1)
        return ScaledValue(sign, math.log(abs(s)) + math.lgamma(1 + n - z.offset) - _LOG_PI)
    zf = float(z)
    if zf <= 0.0 and zf == math.floor(zf):
        return ScaledValue.zero()
    if abs(zf) < 170.0:
        return ScaledValue.from_float(1.0 / math.gamma(zf))
    s, lg = K.log_rgamma(zf)
    return ScaledValue(int(s), lg)


def recip_gamma(z: Real) -> float:
    """1/Gamma(z) as a float (entire; zero at the nonpositive integers)."""
    return float(recip_gamma_scaled(z))


def recip_gamma_deriv_at_nonpos_int(n: int):
    """(1/Gamma)'(1 - n) = (-1)^(n-1) (n-1)!, an int for n <= 20."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    v = (-1) ** (n - 1) * math.factorial(n - 1)
    return v if n <= 20 else float(v)


# ------------------------------------------------------------ core pairs


def _pair(y: float, dy: float, logs: float) -> tuple[ScaledValue, ScaledValue]:
    if not math.isfinite(logs):
        return ScaledValue.zero(), ScaledValue.zero()
    return ScaledValue.from_parts(y, logs), ScaledValue.from_parts(dy, logs)


def _check_overlap(a: float, x: float) -> None:
    """Compare the stepped and asymptotic branches inside the overlap band."""
    xc = K.crossover(a)
    if not (xc - 1.0 <= x <= xc + 1.0):
        return
    d = overlap_discrepancy(a, x)
    if d > OVERLAP_TOL:
        raise LossOfAccuracy(
            f"series/asymptotic branches disagree by {d:.2e} at a={a:g}, x={x:g}"
        )


def overlap_discrepancy(a: float, x: float) -> float:
    """Max relative disagreement of the two evaluation branches at x > 0.

    Compares the stepped U (backward walk) and stepped V (forward walk from
    the origin) with the large-x expansions.
    """
    xc = K.crossover(a)
    us = _pair(*K.u_stepped(a, x, xc))
    ua = _pair(*K.asym_u(a, x)[:3])
    vs = _pair(*K.v_stepped(a, x))
    va = _pair(*K.asym_v(a, x)[:3])
    return max(rel_diff(us[0], ua[0]), rel_diff(us[1], ua[1]),
               rel_diff(vs[0], va[0]), rel_diff(vs[1], va[1]))


def _u_pos(a: float, x: float, check: bool):
    if check:
        _check_overlap(a, x)
    return _pair(*K.u_pos(a, x))


def _v_pos(a: float, x: float, check: bool):
    return _pair(*K.v_pos(a, x))


def weber_u_pair(a: Real, x: float, *, check: bool = True) -> tuple[ScaledValue, ScaledValue]:
    """(U(a, x), dU/dx(a, x)) as ScaledValues."""
    a = AnchoredReal.coerce(a)
    af = float(a)
    WeberParams(af, float(x))
    x = float(x)
    if x >= 0.0:
        return _u_pos(af, x, check)
    y = -x
    u, up = _u_pos(af, y, check)
    v, vp = _v_pos(af, y, check)
    g = recip_gamma_scaled(a.shifted(Fraction(1, 2))).rescale(_LOG_PI)
    s = sinpi(a)
    # U(a,-y) = pi/Gamma(a+1/2) V(a,y) - sin(pi a) U(a,y); d/dx flips the sign of d/dy
    val = g * v - s * u
    der = s * up - g * vp
    return val, der


def weber_u(a: Real, x: float) -> ScaledValue:
    return weber_u_pair(a, x)[0]


def weber_u_prime(a: Real, x: float) -> ScaledValue:
    return weber_u_pair(a, x)[1]


def weber_u_prime_recurrence(a: Real, x: float) -> ScaledValue:
    """dU/dx through U'(a,x) = (x/2) U(a,x) - U(a-1,x)."""
    a = AnchoredReal.coerce(a)
    return weber_u(a, x) * (0.5 * x) - weber_u(a.shifted(-1), x)


def weber_v_pair(a: Real, x: float) -> tuple[ScaledValue, ScaledValue]:
    """(V(a, x), dV/dx(a, x)).

    Negative arguments use V(a,-y) = sin(pi a) V(a,y) + cos(pi a) U(a,y) / Gamma(1/2 - a),
    which stays finite where Gamma(a + 1/2) has poles.
    """
    a = AnchoredReal.coerce(a)
    af = float(a)
    WeberParams(af, float(x))
    x = float(x)
    if x >= 0.0:
        return _v_pos(af, x, True)
    y = -x
    u, up = _u_pos(af, y, True)
    v, vp = _v_pos(af, y, True)
    s = sinpi(a)
    c = recip_gamma_scaled((-a).shifted(Fraction(1, 2))) * cospi(a)
    return s * v + c * u, -(s * vp + c * up)


def weber_v(a: Real, x: float) -> ScaledValue:
    return weber_v_pair(a, x)[0]


def weber_v_prime(a: Real, x: float) -> ScaledValue:
    return weber_v_pair(a, x)[1]


def weber_v_connection(a: Real, x: float) -> ScaledValue:
    """V from  pi V(a,x) = Gamma(a+1/2) {sin(pi a) U(a,x) + U(a,-x)}.

    Independent of :func:`weber_v` only for x > 0 (where U(a,-x) is built
    from V); kept as the literal connection identity and for its pole
    behaviour.
    """
    a = AnchoredReal.coerce(a)
    rg = recip_gamma_scaled(a.shifted(Fraction(1, 2)))
    if rg.is_zero():
        raise PoleEncountered(f"Gamma(a + 1/2) is singular at a = {float(a):g}")
    bracket = weber_u(a, x) * sinpi(a) + weber_u(a, -x)
    return (bracket / rg).rescale(-_LOG_PI)


# ------------------------------------------------------------ literal expansions


def _rising_sum(c0: float, sgn: float, x: float, terms: int) -> float:
    z = 2.0 * x * x
    t = 1.0
    s = 1.0
    for j in range(1, terms):
        c = c0 + 2 * j - 2
        t = sgn * t * c * (c + 1.0) / (j * z)
        s += t
    return s


def weber_u_asymptotic(a: Real, x: float, terms: int = 12) -> ScaledValue:
    """Fixed-order large-|x| expansions of U for either sign of x.

    Positive x: the decaying expansion; negative x: the two-exponential
    expansion (dominant part carries 1/Gamma(a + 1/2)).
    """
    a = AnchoredReal.coerce(a)
    af = float(a)
    y = abs(x)
    rec = ScaledValue.from_float(_rising_sum(af + 0.5, -1.0, y, terms)).rescale(
        -0.25 * y * y - (af + 0.5) * math.log(y))
    if x > 0:
        return rec
    dom = ScaledValue.from_float(_rising_sum(0.5 - af, 1.0, y, terms)).rescale(
        0.25 * y * y + (af - 0.5) * math.log(y) + _LOG_SQRT_2PI)
    dom = dom * recip_gamma_scaled(a.shifted(Fraction(1, 2)))
    return dom - rec * sinpi(a)


def weber_u_prime_asymptotic(a: Real, x: float, terms: int = 12) -> ScaledValue:
    """Expansion of dU/dx at x = -y, y -> +inf (dominant and recessive brackets)."""
    if x >= 0:
        raise ValueError("the derivative expansion is provided for negative arguments")
    a = AnchoredReal.coerce(a)
    af = float(a)
    y = -x
    dom = (0.5 * _rising_sum(0.5 - af, 1.0, y, terms)
           + (af - 0.5) / (y * y) * _rising_sum(1.5 - af, 1.0, y, terms))
    dom = ScaledValue.from_float(dom).rescale(0.25 * y * y + (af + 0.5) * math.log(y) + _LOG_SQRT_2PI)
    dom = -(dom * recip_gamma_scaled(a.shifted(Fraction(1, 2))))
    rec = (0.5 * _rising_sum(af + 0.5, -1.0, y, terms) - _rising_sum(af - 0.5, -1.0, y, terms))
    rec = ScaledValue.from_float(rec).rescale(-0.25 * y * y + (0.5 - af) * math.log(y))
    return dom + rec * sinpi(a)


def u_origin(a: Real) -> tuple[float, float]:
    """Closed forms U(a,0) = sqrt(pi) / (2^(a/2+1/4) Gamma(3/4 + a/2)) and
    U'(a,0) = -sqrt(pi) / (2^(a/2-1/4) Gamma(1/4 + a/2))."""
    a = AnchoredReal.coerce(a)
    af = float(a)
    u0 = math.sqrt(math.pi) * recip_gamma(a.scaled(Fraction(1, 2)).shifted(Fraction(3, 4))) / 2.0 ** (af / 2 + 0.25)
    d0 = -math.sqrt(math.pi) * recip_gamma(a.scaled(Fraction(1, 2)).shifted(Fraction(1, 4))) / 2.0 ** (af / 2 - 0.25)
    return u0, d0


def crossover(a: float) -> float:
    """Argument beyond which the large-x expansion is used directly."""
    return float(K.crossover(float(a)))
