"""Band curves over k-grids: sampling, minima, and assignment of limits.

Eigenvalues of every fiber operator treated here are simple, so the n-th
band at each k is simply the n-th root in ascending order; no eigenvector
continuation is needed.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import oracle
from .asymptotics import predicted_limits
from .errors import BracketMiss, ConvergenceFailure, DomainError, Unresolved
from .model import CaseTag, MagneticStep, RightLandau, Threshold
from .secular import Kind, Root, SecularEquation, eigenvalues_at

MAX_BANDS = 12
MINIMUM_KTOL = 1e-6
PLATEAU_TOL = 1e-12
DENSIFY = 4

SECULAR = "secular"
ORACLE = "oracle"
EXACT = "exact"


@dataclass
class Minimum:
    k: float
    lam: float
    is_global: bool = False


@dataclass
class BandCurve:
    band_index: int
    k: np.ndarray
    lam: np.ndarray
    engine: str
    roots: list = field(default_factory=list, repr=False)
    assigned_threshold: Optional[Threshold] = None
    minima: list = field(default_factory=list)
    band_fn: Optional[Callable[[float], float]] = field(default=None, repr=False, compare=False)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return [(float(k), float(l)) for k, l in zip(self.k, self.lam)]

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.lam)

    def gap(self, i: int, level) -> float:
        """lambda(k_i) - level, exact to the last digit of the offset when available."""
        r = self.roots[i] if self.roots else None
        if isinstance(r, Root):
            return r.gap_to(level)
        return float(self.lam[i] - float(level))


# ------------------------------------------------------------ per-k solvers


def engine_for(step: MagneticStep, engine: str) -> str:
    tag = step.case_tag
    if tag is CaseTag.ZERO_FIELD:
        raise DomainError("zero field has no band functions")
    if engine not in (SECULAR, ORACLE):
        raise DomainError(f"unknown engine {engine!r}")
    if engine == SECULAR:
        if tag is CaseTag.LANDAU:
            return EXACT
        if tag is CaseTag.NONTRAPPING:
            # the determinant theory covers opposite-sign fields only
            return ORACLE
    return engine


def roots_at(step: MagneticStep, k: float, n_bands: int, engine: str,
             verify: bool = False) -> list:
    """The lowest n_bands eigenvalues at k (Root objects or floats); wall bands above k^2 are absent."""
    tag = step.case_tag
    if engine == EXACT:
        return [float(2 * n - 1) for n in range(1, n_bands + 1)]
    if engine == SECULAR:
        if tag is CaseTag.WALL:
            if k <= 0:
                return []
            eq = SecularEquation(Kind.WALL, k)
            return list(eigenvalues_at(eq, lambda_max=k * k, verify=verify))[:n_bands]
        eq = SecularEquation(Kind.TRAPPING, k, step.b)
        return list(eigenvalues_at(eq, count=n_bands, verify=verify))
    if tag is CaseTag.WALL:
        if k <= 0:
            return []
        return list(oracle.wall_discrete_spectrum(k, n_bands).eigenvalues)
    return list(oracle.fd_eigenvalues(step, k, n_bands).eigenvalues)


def _one(args):
    step, k, n_bands, engine, verify = args
    try:
        return roots_at(step, k, n_bands, engine, verify)
    except BracketMiss as exc:
        raise BracketMiss(str(exc), k=k) from None
    except Exception as exc:
        raise type(exc)(f"at k={k:g}: {exc}") from exc


def _solve_grid(step, ks, n_bands, engine, verify, workers):
    jobs = [(step, float(k), n_bands, engine, verify) for k in ks]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_one(j) for j in jobs]


def _lipschitz_ok(k0, k1, l0, l1) -> bool:
    # |d lambda/dk| = |<2(k - a(x))>| <= 2 sqrt(lambda) (Feynman-Hellmann)
    bound = 2.0 * math.sqrt(max(l0, l1, 0.0)) * abs(k1 - k0)
    return abs(l1 - l0) <= bound * (1 + 1e-6) + 1e-9


def sample_bands(step: MagneticStep, k_grid: Sequence[float], n_bands: int,
                 engine: str = SECULAR, densify: bool = False, workers: int = 1,
                 verify: bool = False) -> list[BandCurve]:
    """Sample the lowest n_bands band functions on an ascending k-grid.

    With ``densify`` every interval on which some band moves by more than four
    times its median step is subdivided into DENSIFY parts.
    """
    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size == 0 or np.any(np.diff(ks) <= 0):
        raise DomainError("k-grid must be a nonempty ascending sequence")
    if not 1 <= n_bands <= MAX_BANDS:
        raise DomainError(f"n_bands must be in 1..{MAX_BANDS}")
    eng = engine_for(step, engine)
    per_k = _solve_grid(step, ks, n_bands, eng, verify, workers)

    if densify and ks.size > 2:
        lam = _matrix(per_k, n_bands)
        steps = np.abs(np.diff(lam, axis=0))
        med = np.nanmedian(steps, axis=0)
        with np.errstate(invalid="ignore"):
            steep = np.any(steps > 4.0 * med + 1e-12, axis=1)
        extra = [ks[i] + (ks[i + 1] - ks[i]) * j / DENSIFY
                 for i in np.flatnonzero(steep) for j in range(1, DENSIFY)]
        if extra:
            new = _solve_grid(step, extra, n_bands, eng, verify, workers)
            merged = sorted(zip(list(ks) + extra, per_k + new), key=lambda t: t[0])
            ks = np.array([m[0] for m in merged])
            per_k = [m[1] for m in merged]

    lam = _matrix(per_k, n_bands)
    for i in range(ks.size - 1):
        for n in range(n_bands):
            l0, l1 = lam[i, n], lam[i + 1, n]
            if not (np.isnan(l0) or np.isnan(l1)) and not _lipschitz_ok(ks[i], ks[i + 1], l0, l1):
                raise ConvergenceFailure(
                    f"band {n + 1} jumps by {l1 - l0:.3g} between k={ks[i]:g} and {ks[i + 1]:g}")

    curves = []
    for n in range(n_bands):
        roots = [r[n] if n < len(r) else None for r in per_k]
        fn = _band_fn(step, n + 1, eng)
        curves.append(BandCurve(n + 1, ks.copy(), lam[:, n].copy(), eng, roots, band_fn=fn))
    return curves


def _matrix(per_k, n_bands) -> np.ndarray:
    out = np.full((len(per_k), n_bands), np.nan)
    for i, r in enumerate(per_k):
        for n, v in enumerate(r[:n_bands]):
            out[i, n] = float(v)
    return out


def _band_fn(step, n, eng):
    def fn(k):
        r = roots_at(step, k, n, eng)
        return float(r[n - 1]) if len(r) >= n else math.nan
    return fn


# ------------------------------------------------------------ minima


def _runs(lam: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs [i, j] of samples equal to PLATEAU_TOL."""
    runs = []
    i = 0
    while i < lam.size:
        j = i
        while j + 1 < lam.size and abs(lam[j + 1] - lam[i]) <= PLATEAU_TOL:
            j += 1
        runs.append((i, j))
        i = j + 1
    return runs


def _golden(fn, a, c, tol):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = c - phi * (c - a), a + phi * (c - a)
    f1, f2 = fn(x1), fn(x2)
    while c - a > tol:
        if f1 <= f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - phi * (c - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (c - a)
            f2 = fn(x2)
    x = 0.5 * (a + c)
    return x, fn(x)


def find_minima(curve: BandCurve, refine: bool = True) -> list[Minimum]:
    """Interior local minima, refined by a parabola through three samples and
    then golden-section search on the band function."""
    mask = curve.defined
    ks, lam = curve.k[mask], curve.lam[mask]
    if ks.size < 3:
        return []
    out = []
    for i, j in _runs(lam):
        if i == 0 or j == lam.size - 1:
            continue
        if not (lam[i - 1] > lam[i] and lam[j + 1] > lam[j]):
            continue
        if j > i:
            # flat stretch: report its middle
            mid = (i + j) // 2
            out.append(Minimum(float(ks[mid]), float(lam[mid])))
            continue
        k0, k1, k2 = ks[i - 1], ks[i], ks[i + 1]
        l0, l1, l2 = lam[i - 1], lam[i], lam[i + 1]
        den = (k0 - k1) * (k0 - k2) * (k1 - k2)
        a = (k2 * (l1 - l0) + k1 * (l0 - l2) + k0 * (l2 - l1)) / den
        bq = (k2 * k2 * (l0 - l1) + k1 * k1 * (l2 - l0) + k0 * k0 * (l1 - l2)) / den
        if a > 0:
            kv = min(max(-bq / (2 * a), k0), k2)
            lv = l1 + a * (kv * kv - k1 * k1) + bq * (kv - k1)
        else:
            kv, lv = k1, l1
        if refine and curve.band_fn is not None:
            kv, lv = _golden(curve.band_fn, k0, k2, MINIMUM_KTOL)
        out.append(Minimum(float(kv), float(lv)))
    if out:
        g = min(range(len(out)), key=lambda t: out[t].lam)
        out[g].is_global = True
    curve.minima = out
    return out


# ------------------------------------------------------------ limits


def limit_predictions(step: MagneticStep, lambda_max: float) -> list[tuple[Threshold, int]]:
    """Expected large-k limits with the number of bands converging to each."""
    tag = step.case_tag
    if tag in (CaseTag.LANDAU, CaseTag.WALL):
        return [(Threshold(Fraction(2 * n - 1), RightLandau(n)), 1)
                for n in range(1, int((lambda_max + 1) // 2) + 1)]
    if tag in (CaseTag.TRAPPING, CaseTag.SYMMETRIC):
        return predicted_limits(step.b, lambda_max)
    raise DomainError(f"no limit structure implemented for {tag.value}")


def classify_limit(curve: BandCurve, predictions: Sequence[tuple[Threshold, int]]) -> Threshold:
    """Nearest predicted threshold to the last sample, if closer than half the gap to its neighbours."""
    mask = curve.defined
    if not mask.any():
        raise Unresolved(f"band {curve.band_index} has no samples")
    k_max = float(curve.k[mask][-1])
    if k_max < 6.0:
        raise Unresolved(f"band {curve.band_index} is sampled only up to k={k_max:g} (< 6)")
    lam = float(curve.lam[mask][-1])
    vals = np.array([float(t.value) for t, _ in predictions])
    if vals.size == 0:
        raise Unresolved("no thresholds to assign")
    i = int(np.argmin(np.abs(vals - lam)))
    gaps = np.abs(np.diff(vals))
    half = 0.5 * min([g for g in (gaps[i - 1] if i > 0 else np.inf,
                                  gaps[i] if i < gaps.size else np.inf)])
    if not abs(lam - vals[i]) < half:
        raise Unresolved(f"band {curve.band_index}: lambda={lam:.6g} is not resolved at k={k_max:g}")
    curve.assigned_threshold = predictions[i][0]
    return predictions[i][0]


def classify_bands(curves: Sequence[BandCurve],
                   predictions: Sequence[tuple[Threshold, int]]) -> dict[int, Threshold]:
    """Assign every curve and check that no threshold receives more bands than its rank."""
    out = {c.band_index: classify_limit(c, predictions) for c in curves}
    rank = {t.value: r for t, r in predictions}
    used: dict = {}
    for t in out.values():
        used[t.value] = used.get(t.value, 0) + 1
        if used[t.value] > rank[t.value]:
            raise Unresolved(f"threshold {t.value} receives more than {rank[t.value]} bands")
    return out
