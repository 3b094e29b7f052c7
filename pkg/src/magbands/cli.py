"""Command-line front end.

    python3 -m magbands bands --field -1/3,1 --k -2:8:401 --n 6 --plot
    python3 -m magbands compare --field -1/3,1 --k 0,1,2,4 --n 6 --strict
    python3 -m magbands asym --field -1/3,1 --k 2:8:61 --lambda-max 3
    python3 -m magbands thresholds --field -1/3,1 --lambda-max 7

All computations run on the normalized step (-b, 1) and are mapped back:
fibre k of the input field is fibre record.fibre(k) of the normalized one,
and eigenvalues scale by record.scale.  Exit codes: 0 ok, 2 configuration
error, 3 solver failure, 4 failed validation under --strict.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, asymptotics, export, oracle, tracker
from .errors import (BracketMiss, DomainError, MagbandsError, NotSplitting, OutOfRange,
                     SplitThreshold, Unresolved, ZeroField)
from .model import CaseTag, MagneticStep, NormalizationRecord, normalize, parse_field
from .scaled import ScaledValue
from .secular import de_gennes_constants

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_STRICT = 4

COMPARE_TOL = 1e-5
BOTH = "both"

_CONFIG_ERRORS = (DomainError, ZeroField, OutOfRange, SplitThreshold, NotSplitting)


class ConfigError(Exception):
    pass


class StrictFailure(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    field: tuple[Fraction, Fraction]
    k: tuple[float, ...]
    n_bands: int
    lambda_max: Optional[float]
    engine: str
    out: Path
    plot: bool
    strict: bool
    workers: int
    tol: float
    convention: str
    threshold: Optional[Fraction]

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "field": [str(self.field[0]), str(self.field[1])],
            "k": list(self.k),
            "n_bands": self.n_bands,
            "lambda_max": self.lambda_max,
            "engine": self.engine,
            "workers": self.workers,
            "strict": self.strict,
            "tolerance": self.tol,
            "convention": self.convention,
            "threshold": None if self.threshold is None else str(self.threshold),
        }


# ------------------------------------------------------------ parsing


def parse_k(text: str) -> tuple[float, ...]:
    """``lo:hi:count`` (inclusive, evenly spaced) or a comma list."""
    try:
        if ":" in text:
            lo, hi, cnt = text.split(":")
            lo, hi, cnt = float(lo), float(hi), int(cnt)
            if cnt < 1 or (cnt > 1 and not hi > lo):
                raise ConfigError(f"empty k range {text!r}")
            ks = np.linspace(lo, hi, cnt) if cnt > 1 else np.array([lo])
        else:
            ks = np.array(sorted({float(t) for t in text.split(",") if t.strip()}))
    except ValueError as exc:
        raise ConfigError(f"cannot parse --k {text!r}") from exc
    if ks.size == 0 or not np.all(np.isfinite(ks)):
        raise ConfigError(f"empty or non-finite k range {text!r}")
    return tuple(float(v) for v in ks)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse {text!r} as a rational") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magbands",
                                description="Band functions of magnetic step Hamiltonians.")
    p.add_argument("--version", action="version", version=f"magbands {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, k_required=True):
        sp.add_argument("--field", required=True,
                        help="b1,b2 as integers, p/q or decimals, e.g. -1/3,1")
        if k_required:
            sp.add_argument("--k", required=True, help="lo:hi:count or a comma list")
        sp.add_argument("--lambda-max", type=float, default=None)
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("bands", help="sample band functions to bands.csv")
    common(sp)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--engine", choices=[tracker.SECULAR, tracker.ORACLE, BOTH],
                    default=tracker.SECULAR)
    sp.add_argument("--plot", action="store_true")
    sp.add_argument("--strict", action="store_true",
                    help="check every root count against the finite-difference oracle")
    sp.add_argument("--convention", choices=[asymptotics.PRINTED, asymptotics.REDERIVED],
                    default=asymptotics.PRINTED)

    sp = sub.add_parser("compare", help="secular versus oracle report (compare.json)")
    common(sp)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--engine", choices=[BOTH], default=BOTH)
    sp.add_argument("--tol", type=float, default=COMPARE_TOL)
    sp.add_argument("--strict", action="store_true")

    sp = sub.add_parser("asym", help="measured versus predicted gaps (asym.csv)")
    common(sp)
    sp.add_argument("--threshold", default=None, help="keep only rows for this limit, e.g. 5/3")
    sp.add_argument("--convention", choices=[asymptotics.PRINTED, asymptotics.REDERIVED],
                    default=asymptotics.PRINTED)
    sp.add_argument("--plot", action="store_true")

    sp = sub.add_parser("thresholds", help="limit set and splitting data (thresholds.json)")
    common(sp, k_required=False)
    return p


def make_config(ns: argparse.Namespace) -> RunConfig:
    try:
        field = parse_field(ns.field)
    except _CONFIG_ERRORS as exc:
        raise ConfigError(str(exc)) from exc
    k = parse_k(ns.k) if getattr(ns, "k", None) else ()
    n = getattr(ns, "n", 6)
    if not 1 <= n <= tracker.MAX_BANDS:
        raise ConfigError(f"--n must be in 1..{tracker.MAX_BANDS}")
    if ns.lambda_max is not None and not ns.lambda_max > 0:
        raise ConfigError("--lambda-max must be positive")
    if ns.workers < 1:
        raise ConfigError("--workers must be >= 1")
    tol = getattr(ns, "tol", COMPARE_TOL)
    if not tol > 0:
        raise ConfigError("--tol must be positive")
    thr = getattr(ns, "threshold", None)
    return RunConfig(
        command=ns.command, field=field, k=k, n_bands=n, lambda_max=ns.lambda_max,
        engine=getattr(ns, "engine", tracker.SECULAR), out=Path(ns.out),
        plot=getattr(ns, "plot", False), strict=getattr(ns, "strict", False),
        workers=ns.workers, tol=tol,
        convention=getattr(ns, "convention", asymptotics.PRINTED),
        threshold=None if thr is None else _fraction(thr))


# ------------------------------------------------------------ helpers


def _normalized(cfg: RunConfig) -> tuple[MagneticStep, NormalizationRecord]:
    try:
        return normalize(*cfg.field)
    except _CONFIG_ERRORS as exc:
        raise ConfigError(str(exc)) from exc


def _field_meta(step: MagneticStep, rec: NormalizationRecord) -> dict:
    return {
        "normalized": [str(step.b1), str(step.b2)],
        "case": step.case_tag.value,
        "scale": str(rec.scale),
        "conjugated": rec.conjugated,
        "reflected": rec.reflected,
    }


def _both_applicable(step: MagneticStep) -> None:
    ok = (CaseTag.TRAPPING, CaseTag.SYMMETRIC, CaseTag.LANDAU, CaseTag.WALL)
    if step.case_tag not in ok:
        raise ConfigError(f"engine 'both' needs a trapping, symmetric, Landau or wall field, "
                          f"got {step.case_tag.value}")


def _norm_grid(cfg: RunConfig, rec: NormalizationRecord) -> tuple[np.ndarray, np.ndarray]:
    """Ascending normalized grid and, for each of its points, the index into cfg.k."""
    kn = np.array([rec.fibre(k) for k in cfg.k])
    order = np.argsort(kn, kind="stable")
    return kn[order], order


def _sample(cfg, step, engine, ks_norm, verify):
    try:
        return tracker.sample_bands(step, ks_norm, cfg.n_bands, engine=engine,
                                    workers=cfg.workers, verify=verify)
    except _CONFIG_ERRORS as exc:
        raise ConfigError(str(exc)) from exc


def _frac_or_none(v):
    return None if v is None else str(v)


# ------------------------------------------------------------ bands


def cmd_bands(cfg: RunConfig) -> int:
    step, rec = _normalized(cfg)
    if cfg.engine == BOTH:
        _both_applicable(step)
    if step.case_tag is CaseTag.ZERO_FIELD:
        raise ConfigError("zero field has no band functions")
    ks_norm, order = _norm_grid(cfg, rec)
    scale = float(rec.scale)
    n = cfg.n_bands
    engines = [tracker.SECULAR, tracker.ORACLE] if cfg.engine == BOTH else [cfg.engine]

    try:
        curves_by_engine = {e: _sample(cfg, step, e, ks_norm, cfg.strict) for e in engines}
    except BracketMiss as exc:
        if cfg.strict:
            raise StrictFailure(f"root count check failed at k={exc.k}: {exc}") from exc
        raise

    nk = len(cfg.k)
    table = {}
    for e, curves in curves_by_engine.items():
        lam = np.full((nk, n), np.nan)
        for c in curves:
            lam[order, c.band_index - 1] = scale * c.lam
        table[e] = lam
    primary = engines[0]
    header = ["k"] + [f"lambda_{i}" for i in range(1, n + 1)]
    cols = [table[primary]]
    if cfg.engine == BOTH:
        header += [f"oracle_{i}" for i in range(1, n + 1)]
        cols.append(table[tracker.ORACLE])
    data = np.column_stack([np.array(cfg.k)] + cols)
    cfg.out.mkdir(parents=True, exist_ok=True)
    export.write_csv(cfg.out / "bands.csv", header, data.tolist())

    # sidecar: minima, limits, birth frequencies
    curves = curves_by_engine[primary]
    bands_meta = []
    try:
        preds = tracker.limit_predictions(step, max(float(np.nanmax(c.lam)) for c in curves) + 1.0
                                          if any(c.defined.any() for c in curves) else 1.0)
    except DomainError:
        preds = []
    for c in curves:
        minima = tracker.find_minima(c, refine=True)
        assigned = None
        if preds:
            try:
                assigned = tracker.classify_limit(c, preds)
            except Unresolved:
                assigned = None
        bands_meta.append({
            "band": c.band_index,
            "engine": c.engine,
            "minima": [{"k": rec.original_fibre(m.k), "lambda": scale * m.lam,
                        "global": m.is_global} for m in minima],
            "limit": None if assigned is None else {
                "value": str(assigned.value * rec.scale), "origin": assigned.label()},
        })
    results = {"bands": bands_meta}
    if step.case_tag is CaseTag.WALL:
        # band i is born at xi_{i-1}, where lambda_i = xi_{i-1}^2 = Theta_{i-1}
        births = []
        for i in range(1, n + 1):
            xi, theta = de_gennes_constants(i)
            births.append({"band": i, "xi": rec.original_fibre(xi), "theta": scale * theta})
        results["birth_frequencies"] = births
    export.write_json(cfg.out / "bands.meta.json", cfg.as_dict(), results,
                      extra_meta={"field": _field_meta(step, rec), "files": ["bands.csv"]})

    if cfg.plot:
        _plot_bands(cfg, step, rec, data, header)
    return EXIT_OK


def _asym_overlay(cfg, step, rec, data) -> Optional[np.ndarray]:
    """threshold + predicted gap per band, NaN where the expansion is not used."""
    if step.case_tag is not CaseTag.TRAPPING:
        return None
    scale = float(rec.scale)
    lam_top = np.nanmax(data[:, cfg.n_bands]) / scale if np.isfinite(data[:, 1:cfg.n_bands + 1]).any() else 0
    preds = asymptotics.gap_predictions(step.b, max(lam_top, 1.0) + 2.0, cfg.convention)
    out = np.full((data.shape[0], cfg.n_bands), np.nan)
    for i, k in enumerate(cfg.k):
        kn = rec.fibre(k)
        if kn < asymptotics.K_FLOOR:
            continue
        for j, p in enumerate(preds[:cfg.n_bands]):
            out[i, j] = scale * (float(p.threshold.value) + float(p(kn)))
    return out


def _plot_bands(cfg, step, rec, data, header):
    n = cfg.n_bands
    cols = [(1, j + 2, f"band {j + 1}", False) for j in range(n)]
    series = [(data[:, 0], data[:, j + 1], f"band {j + 1}", False) for j in range(n)]
    overlay = _asym_overlay(cfg, step, rec, data)
    csvs = ["bands.csv"]
    if overlay is not None:
        oh = ["k"] + [f"asym_{j}" for j in range(1, n + 1)]
        od = np.column_stack([data[:, 0], overlay])
        export.write_csv(cfg.out / "bands_asym.csv", oh, od.tolist())
        csvs.append("bands_asym.csv")
        series += [(od[:, 0], od[:, j + 1], f"asym {j + 1}", True) for j in range(n)]
    lines_gp = export.gnuplot_script(cfg.out / "bands.gp", "bands.csv", cols, "k", "lambda",
                                     image="bands.png")
    if overlay is not None:
        extra = ", \\\n     ".join(
            f"'bands_asym.csv' using 1:{j + 2} with lines dt 2 lw 1.5 title 'asym {j + 1}'"
            for j in range(n))
        txt = lines_gp.read_text(encoding="utf-8").rstrip("\n")
        lines_gp.write_text(txt + ", \\\n     " + extra + "\n", encoding="utf-8")
    export.svg_plot(cfg.out / "bands.svg", series, "k", "lambda")


# ------------------------------------------------------------ compare


def cmd_compare(cfg: RunConfig) -> int:
    step, rec = _normalized(cfg)
    _both_applicable(step)
    scale = float(rec.scale)
    sec_engine = tracker.engine_for(step, tracker.SECULAR)
    entries = []
    count_issues = []
    for k in cfg.k:
        kn = rec.fibre(k)
        try:
            sec = [float(r) for r in tracker.roots_at(step, kn, cfg.n_bands, sec_engine)]
            orc = [float(r) for r in tracker.roots_at(step, kn, cfg.n_bands, tracker.ORACLE)]
        except _CONFIG_ERRORS as exc:
            raise ConfigError(str(exc)) from exc
        except MagbandsError as exc:
            raise type(exc)(f"at k={k:g}: {exc}") from exc
        if step.case_tag is CaseTag.WALL:
            # the oracle drops eigenvalues within DELTA_ESS of k^2; so does the comparison
            sec = [v for v in sec if v < kn * kn - oracle.DELTA_ESS]
        if len(sec) != len(orc):
            count_issues.append({"k": k, "secular": len(sec), "oracle": len(orc)})
        for i in range(max(len(sec), len(orc))):
            s = scale * sec[i] if i < len(sec) else None
            o = scale * orc[i] if i < len(orc) else None
            d = abs(s - o) if s is not None and o is not None else None
            entries.append({"k": k, "n": i + 1, "secular": s, "oracle": o, "abs_diff": d,
                            "pass": d is not None and d <= cfg.tol})
    diffs = [e["abs_diff"] for e in entries if e["abs_diff"] is not None]
    max_diff = max(diffs) if diffs else 0.0
    ok = all(e["pass"] for e in entries) and not count_issues
    results = {"entries": entries, "max_abs_diff": max_diff, "count_mismatches": count_issues,
               "pass": ok}
    cfg.out.mkdir(parents=True, exist_ok=True)
    export.write_json(cfg.out / "compare.json", cfg.as_dict(), results,
                      tolerances={"abs_diff": cfg.tol},
                      extra_meta={"field": _field_meta(step, rec), "secular_engine": sec_engine})
    if cfg.strict and not ok:
        raise StrictFailure(f"secular and oracle disagree: max |diff| = {max_diff:.3g} "
                            f"(tolerance {cfg.tol:g}), {len(count_issues)} count mismatches")
    return EXIT_OK


# ------------------------------------------------------------ asym


ASYM_HEADER = ["k", "band", "lambda", "threshold", "gap_measured", "gap_predicted", "ratio"]


def asym_rows(step: MagneticStep, rec: NormalizationRecord, ks: Sequence[float],
              lambda_max: float, convention: str = asymptotics.PRINTED,
              only: Optional[Fraction] = None) -> list[list]:
    """Rows of asym.csv; the ratio is formed in scaled arithmetic so it survives underflow."""
    from .secular import Kind, SecularEquation, eigenvalues_at

    preds = asymptotics.gap_predictions(step.b, lambda_max, convention)
    scale = rec.scale
    rows = []
    for k in ks:
        kn = rec.fibre(k)
        try:
            roots = eigenvalues_at(SecularEquation(Kind.TRAPPING, kn, step.b), count=len(preds))
        except MagbandsError as exc:
            raise type(exc)(f"at k={k:g}: {exc}") from exc
        for i, (p, r) in enumerate(zip(preds, roots)):
            level = p.threshold.value
            if only is not None and level * scale != only:
                continue
            gap = r.gap_to(level)
            pred = p(kn)
            ratio = ScaledValue.from_float(gap) / pred if gap != 0.0 else ScaledValue.zero()
            rows.append([k, str(i + 1), float(scale) * r.value, float(level * scale),
                         float(scale) * gap, float(scale) * float(pred), float(ratio)])
    return rows


def cmd_asym(cfg: RunConfig) -> int:
    step, rec = _normalized(cfg)
    if step.case_tag is not CaseTag.TRAPPING:
        raise ConfigError(f"asym needs a trapping field (opposite signs, unequal strengths), "
                          f"got {step.case_tag.value}")
    kn = [rec.fibre(k) for k in cfg.k]
    if min(kn) < asymptotics.K_FLOOR:
        raise ConfigError(f"the expansions are used only for normalized k >= "
                          f"{asymptotics.K_FLOOR:g}; got {min(kn):g}")
    lam_max = cfg.lambda_max / float(rec.scale) if cfg.lambda_max else 3.0
    rows = asym_rows(step, rec, cfg.k, lam_max, cfg.convention, cfg.threshold)
    if not rows:
        raise ConfigError("no thresholds selected; check --threshold and --lambda-max")
    cfg.out.mkdir(parents=True, exist_ok=True)
    export.write_csv(cfg.out / "asym.csv", ASYM_HEADER, rows)
    export.write_json(cfg.out / "asym.meta.json", cfg.as_dict(),
                      {"rows": len(rows)},
                      extra_meta={"field": _field_meta(step, rec), "files": ["asym.csv"]})
    if cfg.plot:
        bands = sorted({int(r[1]) for r in rows})
        cols = []
        series = []
        arr = np.array([[float(c) for c in r] for r in rows])
        for b in bands:
            cols.append((1, f"($2=={b} ? abs($5) : 1/0)", f"band {b} measured", False))
            cols.append((1, f"($2=={b} ? abs($6) : 1/0)", f"band {b} predicted", True))
            sel = arr[arr[:, 1] == b]
            series.append((sel[:, 0], sel[:, 4], f"band {b}", False))
            series.append((sel[:, 0], sel[:, 5], f"band {b} pred.", True))
        export.gnuplot_script(cfg.out / "asym.gp", "asym.csv", cols, "k", "|gap|",
                              logy=True, image="asym.png")
        export.svg_plot(cfg.out / "asym.svg", series, "k", "|gap|", logy=True)
    return EXIT_OK


# ------------------------------------------------------------ thresholds


def thresholds_report(step: MagneticStep, rec: NormalizationRecord, lambda_max: float) -> dict:
    lam_norm = lambda_max / float(rec.scale)
    try:
        limits = tracker.limit_predictions(step, lam_norm)
    except DomainError:
        limits = []
    items = [{"value": str(t.value * rec.scale), "float": float(t.value * rec.scale),
              "origin": t.label(), "multiplicity": r} for t, r in limits]
    split = [t for t, r in limits if t.multiplicity == 2 and r == 2]
    return {
        "b": str(step.b),
        "thresholds": items,
        "splitting_set": [str(t.value * rec.scale) for t in split],
        "splitting_pairs": [[t.origin.n, t.origin.m] for t in split],
        "band_count": sum(r for _, r in limits),
    }


def cmd_thresholds(cfg: RunConfig) -> int:
    step, rec = _normalized(cfg)
    lam = cfg.lambda_max if cfg.lambda_max is not None else 7.0
    results = thresholds_report(step, rec, lam)
    cfg.out.mkdir(parents=True, exist_ok=True)
    export.write_json(cfg.out / "thresholds.json", cfg.as_dict(), results,
                      extra_meta={"field": _field_meta(step, rec)})
    return EXIT_OK


COMMANDS = {"bands": cmd_bands, "compare": cmd_compare, "asym": cmd_asym,
            "thresholds": cmd_thresholds}


_VALUE_OPTS = ("--field", "--k", "--threshold")


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--field -1/3,1`` into ``--field=-1/3,1`` so argparse accepts a leading minus."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = build_parser().parse_args(_glue_negative_values(argv))
    try:
        cfg = make_config(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, *_CONFIG_ERRORS) as exc:
        print(f"magbands: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StrictFailure as exc:
        print(f"magbands: validation failed: {exc}", file=sys.stderr)
        return EXIT_STRICT
    except MagbandsError as exc:
        print(f"magbands: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
