"""Eigenvalues of the fiber operators as roots of Weber-function equations.

Four equations are handled:

* the trapping determinant (field -b on the left, 1 on the right, 0 < b < 1;
  b = 1 is accepted for the symmetric check)
      D_b(lam, k) = U(-lam/2b, -sqrt(2/b) k) U'(-lam/2, -sqrt2 k)
                    + sqrt(b) U'(-lam/2b, -sqrt(2/b) k) U(-lam/2, -sqrt2 k);
* the wall transmission condition
      F(lam, k) = sqrt(k^2 - lam) U(-lam/2, -sqrt2 k) - sqrt2 U'(-lam/2, -sqrt2 k);
* the Neumann and Dirichlet de Gennes characteristic functions
      U'(-lam/2, -sqrt2 k),   U(-lam/2, -sqrt2 k).

For k > 0 the functions are multiplied by the positive factor
exp(-(1 + 1/b) k^2 / 2) (resp. exp(-k^2/2)), which leaves their zeros and
signs unchanged and keeps magnitudes moderate.

At large k the roots sit exponentially close to the thresholds 2n-1 and
b(2n-1), far below double resolution.  Roots are therefore carried as an
exact rational anchor (a threshold) plus a float offset, and thresholds are
always grid points of the scan, so that the two roots of a split pair are
bracketed on either side of their common limit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import oracle
from .errors import BracketMiss, ConvergenceFailure, DomainError
from .model import MagneticStep, exact_ratio, thresholds
from .scaled import ScaledValue
from .specfun import AnchoredReal, weber_u_pair

SQRT2 = math.sqrt(2.0)
MAX_STEP = Fraction(1, 20)
WALL_MARGIN = 1e-9
ROOT_RTOL = 1e-12


class Kind(enum.Enum):
    TRAPPING = "TrappingDeterminant"
    WALL = "WallTransmission"
    NEUMANN = "DeGennesNeumann"
    DIRICHLET = "DeGennesDirichlet"


# ------------------------------------------------------------ the equations


def _anchored(lam) -> AnchoredReal:
    return AnchoredReal.coerce(lam)


def determinant(b, lam, k: float, rescaled: bool = True) -> ScaledValue:
    """D_b(lam, k) for the step (-b, 1); rescaled by exp(-(1+1/b)k^2/2) when k > 0."""
    b = exact_ratio(b)
    if not (0 < b <= 1):
        raise DomainError(f"trapping determinant needs 0 < b <= 1, got {b}")
    lam = _anchored(lam)
    sb = math.sqrt(float(b))
    u1, u1p = weber_u_pair(lam.scaled(-1 / (2 * b)), -SQRT2 * k / sb)
    u2, u2p = weber_u_pair(lam.scaled(Fraction(-1, 2)), -SQRT2 * k)
    d = u1 * u2p + (u1p * u2) * sb
    if rescaled and k > 0:
        d = d.rescale(-(1.0 + 1.0 / float(b)) * k * k / 2.0)
    return d


def wall_dispersion(lam, k: float, rescaled: bool = False) -> ScaledValue:
    """F(lam, k); its zeros in (0, k^2) are the wall eigenvalues."""
    lam = _anchored(lam)
    if k <= 0:
        raise DomainError("the wall transmission condition needs k > 0")
    gap = float(Fraction(k) ** 2 - lam.anchor) - lam.offset
    if gap <= 0:
        raise DomainError(f"lambda = {float(lam):g} is not below k^2 = {k * k:g}")
    u, up = weber_u_pair(lam.scaled(Fraction(-1, 2)), -SQRT2 * k)
    f = u * math.sqrt(gap) - up * SQRT2
    return f.rescale(-k * k / 2.0) if rescaled else f


def degennes_char(bc: str, lam, k: float, rescaled: bool = False) -> ScaledValue:
    """U'(-lam/2, -sqrt2 k) (Neumann) or U(-lam/2, -sqrt2 k) (Dirichlet)."""
    lam = _anchored(lam)
    u, up = weber_u_pair(lam.scaled(Fraction(-1, 2)), -SQRT2 * k)
    if bc == oracle.NEUMANN:
        v = up
    elif bc == oracle.DIRICHLET:
        v = u
    else:
        raise DomainError(f"unknown boundary condition {bc!r}")
    return v.rescale(-k * k / 2.0) if rescaled and k > 0 else v


# ------------------------------------------------------------ data types


@dataclass(frozen=True)
class SecularEquation:
    kind: Kind
    k: float
    b: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind is Kind.TRAPPING:
            if self.b is None:
                raise DomainError("trapping determinant needs b")
            b = exact_ratio(self.b)
            if not (0 < b <= 1):
                raise DomainError(f"trapping determinant needs 0 < b < 1, got {b}")
            object.__setattr__(self, "b", b)
        if self.kind is Kind.WALL and not self.k > 0:
            raise DomainError("wall transmission needs k > 0")

    def __call__(self, lam) -> ScaledValue:
        if self.kind is Kind.TRAPPING:
            return determinant(self.b, lam, self.k)
        if self.kind is Kind.WALL:
            return wall_dispersion(lam, self.k, rescaled=True)
        bc = oracle.NEUMANN if self.kind is Kind.NEUMANN else oracle.DIRICHLET
        return degennes_char(bc, lam, self.k, rescaled=True)

    def anchors(self, lambda_max) -> list[Fraction]:
        """Exact limit points of the roots up to lambda_max."""
        b = self.b if self.kind is Kind.TRAPPING else 1
        return sorted({t.value for t in thresholds(b, lambda_max)})

    def upper_limit(self, lambda_max: float) -> Fraction:
        if self.kind is Kind.WALL:
            return min(Fraction(lambda_max), Fraction(self.k) ** 2 - Fraction(WALL_MARGIN))
        return Fraction(lambda_max)

    def oracle_count(self, level: float) -> int:
        """Number of eigenvalues below ``level`` from the finite-difference solver."""
        if self.kind is Kind.TRAPPING:
            disc = oracle.full_line(MagneticStep(-self.b), self.k, level)
            return oracle.count_below(disc, level)
        if self.kind is Kind.WALL:
            res = oracle.wall_discrete_spectrum(self.k, 10**6, extrapolate=False)
            return int(np.sum(res.eigenvalues < level))
        bc = oracle.NEUMANN if self.kind is Kind.NEUMANN else oracle.DIRICHLET
        return oracle.count_below(oracle.half_line(bc, self.k, level), level)


@dataclass(frozen=True)
class Root:
    """One root lam = anchor + offset, with its bracket (as offsets) and residual."""

    index: int
    anchor: Fraction
    offset: float
    bracket: tuple[float, float]
    residual: float

    @property
    def value(self) -> float:
        return float(self.anchor) + self.offset

    @property
    def exact(self) -> Fraction:
        return self.anchor + Fraction(self.offset)

    def gap_to(self, level) -> float:
        """lam - level, without losing the offset when level is the anchor."""
        level = Fraction(level)
        return float(self.anchor - level) + self.offset

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RootList:
    k: float
    roots: tuple[Root, ...] = field(default_factory=tuple)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.roots])

    def __len__(self):
        return len(self.roots)

    def __getitem__(self, i) -> Root:
        return self.roots[i]

    def __iter__(self):
        return iter(self.roots)


# ------------------------------------------------------------ scanning


def _grid(lo: Fraction, hi: Fraction, anchors: list[Fraction], step: Fraction) -> list[Fraction]:
    marks = sorted({lo, hi, *[a for a in anchors if lo < a < hi]})
    pts = [marks[0]]
    for a, b in zip(marks, marks[1:]):
        n = max(1, math.ceil((b - a) / step))
        pts.extend(a + (b - a) * Fraction(j, n) for j in range(1, n + 1))
    return pts


def _scan_step(anchors: list[Fraction]) -> Fraction:
    if len(anchors) < 2:
        return MAX_STEP
    gap = min(b - a for a, b in zip(anchors, anchors[1:]))
    return min(MAX_STEP, gap / 8)


class _Evaluator:
    def __init__(self, eq: SecularEquation):
        self.eq = eq
        self.calls = 0

    def __call__(self, anchor: Fraction, offset: float) -> ScaledValue:
        self.calls += 1
        return self.eq(AnchoredReal(anchor, offset))


def _refine(ev: _Evaluator, anchor: Fraction, o_lo: float, o_hi: float,
            f_lo: ScaledValue, f_hi: ScaledValue, at_threshold: bool) -> tuple[float, float]:
    """Root in the offset interval [o_lo, o_hi] around an exact anchor.

    Brent's method on the mantissa of the equation relative to the larger
    end value; tolerance is relative in the offset so that roots lying
    exponentially close to the anchor keep their digits.
    """
    ref = max(f_lo.log_mag, f_hi.log_mag)

    def g(o):
        if o == o_lo:
            return f_lo.mantissa(ref)
        if o == o_hi:
            return f_hi.mantissa(ref)
        return ev(anchor, o).mantissa(ref)

    if at_threshold and (o_lo == 0.0 or o_hi == 0.0):
        # locate the magnitude first: bisect log|offset| down from the far end
        far = o_hi if o_lo == 0.0 else o_lo
        s_far = f_hi.sign if o_lo == 0.0 else f_lo.sign
        near = 0.0
        tiny = math.copysign(1e-300, far)
        if ev(anchor, tiny).sign == s_far:
            return tiny, 0.0
        lo_log, hi_log = math.log(1e-300), math.log(abs(far))
        while hi_log - lo_log > math.log(2.0):
            mid = 0.5 * (lo_log + hi_log)
            o = math.copysign(math.exp(mid), far)
            if ev(anchor, o).sign == s_far:
                hi_log = mid
            else:
                lo_log = mid
        near = math.copysign(math.exp(lo_log), far)
        far = math.copysign(math.exp(hi_log), far)
        o_lo, o_hi = (near, far) if far > 0 else (far, near)
        f_lo, f_hi = ev(anchor, o_lo), ev(anchor, o_hi)
        if f_lo.sign == 0:
            return o_lo, 0.0
        if f_hi.sign == 0:
            return o_hi, 0.0
        ref = max(f_lo.log_mag, f_hi.log_mag)

    root, info = brentq(g, o_lo, o_hi, xtol=1e-300, rtol=ROOT_RTOL, maxiter=400,
                        full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceFailure(f"root refinement failed near {float(anchor) + root:g}")
    return root, abs(g(root))


def _dip_split(ev, pts, vals, i):
    """Search for a hidden sign change around a local minimum of |f| at pts[i]."""
    anchor = pts[i]
    a, c = float(pts[i - 1] - anchor), float(pts[i + 1] - anchor)
    s0 = vals[i].sign
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = c - phi * (c - a), a + phi * (c - a)
    f1, f2 = ev(anchor, x1), ev(anchor, x2)
    for _ in range(60):
        for x, f in ((x1, f1), (x2, f2)):
            if f.sign != s0:
                return anchor, x, f
        if f1.log_mag < f2.log_mag:
            c, x2, f2 = x2, x1, f1
            x1 = c - phi * (c - a)
            f1 = ev(anchor, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (c - a)
            f2 = ev(anchor, x2)
        if c - a < 1e-13 * max(1.0, abs(float(anchor))):
            break
    return None


def _scan(eq: SecularEquation, lam_hi: Fraction) -> list[tuple[Fraction, float, tuple, float]]:
    ev = _Evaluator(eq)
    anchors = eq.anchors(lam_hi)
    pts = _grid(Fraction(0), lam_hi, anchors, _scan_step(anchors))
    vals = [ev(p, 0.0) for p in pts]

    # points of sign change, possibly inserted between grid nodes by dip search
    nodes = [(p, 0.0, v) for p, v in zip(pts, vals)]
    extra = []
    for i in range(1, len(pts) - 1):
        v0, v1, v2 = vals[i - 1], vals[i], vals[i + 1]
        if v1.sign != 0 and v0.sign == v1.sign == v2.sign and v1.log_mag < min(v0.log_mag, v2.log_mag):
            hit = _dip_split(ev, pts, vals, i)
            if hit is not None:
                extra.append(hit)
    nodes.extend(extra)
    nodes.sort(key=lambda n: n[0] + Fraction(n[1]))

    anchor_set = set(anchors)
    found = []
    for (p0, o0, v0), (p1, o1, v1) in zip(nodes, nodes[1:]):
        if v0.sign == 0:
            found.append((p0, o0, (o0, o0), 0.0))
            continue
        if v0.sign == v1.sign or v1.sign == 0:
            continue
        # pick an exact anchor for the bracket; prefer a threshold end
        at_threshold = True
        if p1 in anchor_set and o1 == 0.0:
            anchor = p1
        else:
            anchor = p0
            at_threshold = p0 in anchor_set and o0 == 0.0
        lo = float(p0 - anchor) + o0
        hi = float(p1 - anchor) + o1
        root, res = _refine(ev, anchor, lo, hi, v0, v1, at_threshold)
        found.append((anchor, root, (lo, hi), res))
    if nodes and nodes[-1][2].sign == 0 and nodes[-1][0] + Fraction(nodes[-1][1]) <= lam_hi:
        p, o, _ = nodes[-1]
        found.append((p, o, (o, o), 0.0))
    return found


def eigenvalues_at(eq: SecularEquation, lambda_max: Optional[float] = None,
                   count: Optional[int] = None, verify: bool = False) -> RootList:
    """All roots of ``eq`` below lambda_max, or the lowest ``count`` roots.

    With ``verify`` the number of roots is compared with the finite-difference
    eigenvalue count and BracketMiss is raised on disagreement.
    """
    if lambda_max is None and count is None:
        raise DomainError("give lambda_max or count")
    if lambda_max is not None:
        lam_hi = eq.upper_limit(lambda_max)
        raw = _scan(eq, lam_hi)
    else:
        level = Fraction(2 * count + 1)
        while True:
            lam_hi = eq.upper_limit(level)
            raw = _scan(eq, lam_hi)
            if len(raw) >= count or eq.kind is Kind.WALL and lam_hi < level:
                break
            level *= 2
            if level > 1e5:
                raise ConvergenceFailure(f"fewer than {count} roots below {float(level):g}")
    roots = tuple(Root(i + 1, a, o, br, res) for i, (a, o, br, res) in enumerate(raw))
    for r0, r1 in zip(roots, roots[1:]):
        if not r0.exact < r1.exact:
            raise ConvergenceFailure(f"roots not strictly increasing at k={eq.k:g}")
    if verify:
        _verify(eq, np.array([r.value for r in roots]), float(lam_hi))
    if count is not None:
        roots = roots[:count]
    return RootList(eq.k, roots)


def _verify(eq: SecularEquation, vals: np.ndarray, level: float) -> None:
    """Compare the number of roots below ``level`` with the oracle count."""
    if eq.kind is Kind.WALL:
        level = min(level, eq.k ** 2 - oracle.DELTA_ESS)
    # a root exactly at the scan ceiling is not scanned but may be counted by the oracle
    level -= 2e-4
    # keep the comparison level away from every root (single-grid FD error is ~1e-6)
    close = np.abs(vals - level) < 1e-4
    if close.any():
        below = vals[vals < level - 1e-4]
        level = 0.5 * (vals[close].min() + (below[-1] if below.size else 0.0))
    n_sec = int(np.sum(vals < level))
    n_fd = eq.oracle_count(level)
    if n_fd != n_sec:
        raise BracketMiss(
            f"{eq.kind.value} at k={eq.k:g}: {n_sec} roots below {level:.6g}, oracle finds {n_fd}",
            k=eq.k)


# ------------------------------------------------------------ de Gennes constants


def de_gennes_constants(l: int) -> tuple[float, float]:
    """(xi_{l-1}, Theta_{l-1}): the frequency where mu^N_l(k) = k^2, and k^2 there."""
    if l < 1 or int(l) != l:
        raise DomainError("l must be a positive integer")

    def g(k):
        mu = eigenvalues_at(SecularEquation(Kind.NEUMANN, k), count=l)[l - 1].value
        return mu - k * k

    hi = math.sqrt(2 * l - 1) + 1.0
    try:
        xi = brentq(g, 1e-6, hi, xtol=1e-14, rtol=1e-14)
    except ValueError as exc:
        raise ConvergenceFailure(f"no sign change of mu^N_{l}(k) - k^2 on (0, {hi:g})") from exc
    theta = xi * xi
    if not (max(0, 2 * l - 3) < theta < 2 * l - 1):
        raise ConvergenceFailure(f"Theta_{l - 1} = {theta:g} outside ({2 * l - 3}, {2 * l - 1})")
    return xi, theta
