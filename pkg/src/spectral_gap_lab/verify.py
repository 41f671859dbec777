"""Check spectra against the bound catalog, extrapolate grid sequences, write reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .bounds import (CONVENTIONS, BoundInputs, ProblemContext, build_catalog, cdk,
                     weyl_bound)
from .errors import InsufficientEigenvalues, Infeasible

SCHEMA_VERSION = 1
VERDICTS = ("holds", "fails", "inconclusive", "not-applicable")
ASSERTION_GRADES = ("theorem", "stated")
RESIDUAL_WEIGHT = 10.0
_EPS = np.finfo(float).eps


# -- Richardson extrapolation ------------------------------------------------

@dataclass(frozen=True)
class Extrapolation:
    limit: float
    order: float | None
    alternating: bool = False


def richardson(values: Sequence[float], spacings: Sequence[float] | None = None) -> Extrapolation:
    """Limit and observed order from three levels (coarse to fine).

    With ``spacings`` omitted the levels are h, h/2, h/4. Otherwise the
    order p solves (v1 - v2)/(v2 - v3) = (h1^p - h2^p)/(h2^p - h3^p), which
    handles vertex grids where h = L/(n+1) halves only approximately.
    Alternating differences are extrapolated geometrically.
    """
    if len(values) != 3:
        raise ValueError("richardson needs exactly three levels")
    v1, v2, v3 = (float(v) for v in values)
    h = [1.0, 0.5, 0.25] if spacings is None else [float(s) for s in spacings]
    if not (h[0] > h[1] > h[2] > 0):
        raise ValueError("spacings must be strictly decreasing and positive")
    d12, d23 = v1 - v2, v2 - v3
    scale = max(abs(v1), abs(v2), abs(v3), 1e-300)
    if abs(d12) <= 4 * _EPS * scale or abs(d23) <= 4 * _EPS * scale:
        return Extrapolation(v3, None)
    rho = d12 / d23
    r23 = h[1] / h[2]
    if rho > 1:
        def g(p):
            return (h[0] ** p - h[1] ** p) - rho * (h[1] ** p - h[2] ** p)
        p = _solve_order(g, rho, h)
        if p is not None:
            return Extrapolation(v3 - d23 / (r23**p - 1), p)
    if rho == 1:
        return Extrapolation(v3, None)
    p = math.log(abs(rho)) / math.log(r23)
    return Extrapolation(v3 - d23 / (rho - 1), p, alternating=rho < 0)


def _solve_order(g, rho, h):
    ratio = math.log(h[0] / h[2]) / 2
    guess = math.log(rho) / ratio
    lo, hi = max(1e-3, guess / 4), max(guess * 4, 1.0)
    try:
        if g(lo) * g(hi) > 0:
            return None
        return brentq(g, lo, hi, xtol=1e-14, rtol=1e-14)
    except (ValueError, OverflowError):
        return None


@dataclass
class ConvergenceStudy:
    grid_sizes: list[int]
    spacings: list[float]
    values: np.ndarray  # levels x eigenvalues
    limits: np.ndarray
    orders: np.ndarray  # nan where undefined
    uncertainty: np.ndarray
    residuals: np.ndarray  # finest level

    @property
    def finest(self) -> np.ndarray:
        return self.values[-1]

    def rows(self) -> list[dict]:
        out = []
        for j in range(self.values.shape[1]):
            row = {"index": j + 1}
            for n, v in zip(self.grid_sizes, self.values[:, j]):
                row[f"n{n}"] = float(v)
            row.update(limit=float(self.limits[j]), order=_none_if_nan(self.orders[j]),
                       uncertainty=float(self.uncertainty[j]),
                       residual=float(self.residuals[j]))
            out.append(row)
        return out


def convergence_study(grid_sizes: Sequence[int], spacings: Sequence[float],
                      spectra: Sequence) -> ConvergenceStudy:
    """Extrapolate each eigenvalue from the three finest levels."""
    if len(spectra) < 3 or len(grid_sizes) != len(spectra) or len(spacings) != len(spectra):
        raise ValueError("a convergence study needs at least three matching levels")
    if any(b <= a for a, b in zip(grid_sizes, grid_sizes[1:])):
        raise ValueError("grid sizes must be strictly increasing")
    m = min(len(s.eigenvalues) for s in spectra)
    values = np.array([np.asarray(s.eigenvalues[:m], dtype=float) for s in spectra])
    limits = np.empty(m)
    orders = np.full(m, np.nan)
    for j in range(m):
        ex = richardson(values[-3:, j], spacings[-3:])
        limits[j] = ex.limit
        if ex.order is not None:
            orders[j] = ex.order
    residuals = np.asarray(spectra[-1].residual_norms[:m], dtype=float)
    return ConvergenceStudy(list(grid_sizes), [float(h) for h in spacings], values, limits,
                            orders, np.abs(limits - values[-1]), residuals)


# -- checks ------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    identifier: str
    k: int
    bound: float
    value: float
    margin: float
    uncertainty: float
    verdict: str
    convention: str
    side: str
    grade: str
    discretization: str = "oracle"
    informational: bool = False

    @property
    def assertion_grade(self) -> bool:
        return (self.convention == "ball" and self.grade in ASSERTION_GRADES
                and not self.informational)


def signed_margin(side: str, bound: float, value: float) -> float:
    """Positive when the inequality holds."""
    if side.startswith("upper"):
        return bound - value
    return value - bound


def classify(margin: float, uncertainty: float) -> str:
    if not math.isfinite(margin):
        return "inconclusive"
    if abs(margin) < uncertainty:
        return "inconclusive"
    return "holds" if margin >= 0 else "fails"


@dataclass
class VerificationReport:
    problem: dict
    raw_spectrum: list[float]
    extrapolated_spectrum: list[float] | None
    uncertainties: list[float]
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        counts = {v: 0 for v in VERDICTS}
        first_failures: dict[str, int] = {}
        for c in self.checks:
            counts[c.verdict] += 1
            key = f"{c.identifier}|{c.convention}"
            if c.verdict == "fails" and key not in first_failures:
                first_failures[key] = c.k
        strict = sum(1 for c in self.checks if c.verdict == "fails" and c.assertion_grade)
        return {"counts": counts, "total": len(self.checks),
                "first_failing_k": dict(sorted(first_failures.items())),
                "assertion_grade_failures": strict}

    def select(self, identifier: str, convention: str | None = None) -> list[CheckResult]:
        return [c for c in self.checks if c.identifier == identifier
                and (convention is None or c.convention == convention)]

    def first_failure(self, identifier: str, convention: str) -> int | None:
        for c in self.select(identifier, convention):
            if c.verdict == "fails":
                return c.k
        return None


def _spectrum_arrays(spectrum, study: ConvergenceStudy | None):
    if study is not None:
        lam = np.asarray(study.limits, dtype=float)
        unc = study.uncertainty + RESIDUAL_WEIGHT * study.residuals
        return np.asarray(study.finest, dtype=float), lam, unc, "extrapolated"
    if hasattr(spectrum, "eigenvalues"):
        lam = np.asarray(spectrum.eigenvalues, dtype=float)
        res = np.asarray(getattr(spectrum, "residual_norms", np.zeros(len(lam))), dtype=float)
        kind = "oracle" if not np.any(res) and not hasattr(spectrum, "converged") else "discrete"
    else:
        lam = np.asarray(spectrum, dtype=float)
        res = np.zeros(len(lam))
        kind = "values"
    return lam, lam, RESIDUAL_WEIGHT * res, kind


def run_checks(spectrum, inputs: BoundInputs, k_max: int, context: ProblemContext, *,
               study: ConvergenceStudy | None = None,
               conventions: Sequence[str] = CONVENTIONS,
               force: bool = False, tolerance: float = 1e-10,
               problem: dict | None = None) -> VerificationReport:
    """Evaluate every applicable catalog bound for k = 1..k_max per convention.

    With ``study`` the extrapolated limits are checked and their uncertainty
    (plus 10x the finest solver residual) sets the inconclusive band. A
    ground state within 10*tolerance of zero is set to 0 and excludes the
    quotient bound. ``force`` also evaluates inapplicable bounds; those rows
    carry verdict not-applicable and ``informational=True``.
    """
    raw, lam, unc, kind = _spectrum_arrays(spectrum, study)
    if len(lam) < k_max + 1:
        raise InsufficientEigenvalues(
            f"need {k_max + 1} eigenvalues for k_max={k_max}, have {len(lam)}")
    lam = lam.copy()
    zero_ground = abs(lam[0]) <= 10 * tolerance
    if zero_ground:
        lam[0] = 0.0
    ctx = replace(context, positive_spectrum=bool(lam[0] > 10 * tolerance))
    scale = float(np.max(np.abs(lam[:k_max + 1]))) if k_max else 1.0
    floor = float(4 * _EPS * max(scale, 1.0) * (k_max + 1))
    entries = build_catalog(inputs.d)
    checks: list[CheckResult] = []
    for convention in conventions:
        for entry in entries:
            applicable = entry.applies(ctx)
            if applicable and entry.needs_positive_ground_state and not lam[0] > 10 * tolerance:
                applicable = False
            if not applicable and not force:
                continue
            if not applicable and any(
                    e.identifier == entry.identifier and e.applies(ctx) for e in entries):
                continue  # a sibling entry with the same id covers this context
            for k in range(1, k_max + 1):
                inp = inputs.at(k=k, convention=convention)
                try:
                    ev = entry.evaluate(inp, lam, unc, ctx)
                    bound, value, u = float(ev.bound), float(ev.observed), float(ev.uncertainty)
                except (ZeroDivisionError, FloatingPointError, Infeasible):
                    bound = value = u = float("nan")
                margin = signed_margin(entry.side, bound, value)
                verdict = classify(margin, u + floor) if applicable else "not-applicable"
                checks.append(CheckResult(entry.identifier, k, bound, value, margin, u + floor,
                                          verdict, convention, entry.side, entry.grade,
                                          kind, informational=not applicable))
    checks.sort(key=lambda c: (c.identifier, CONVENTIONS.index(c.convention), c.k))
    extrap = None if study is None else [float(x) for x in study.limits]
    return VerificationReport(problem or {}, [float(x) for x in raw], extrap,
                              [float(x) for x in unc], checks)


def sandwich_checks(neumann, dirichlet, inputs: BoundInputs, k_max: int, *,
                    conventions: Sequence[str] = CONVENTIONS) -> list[CheckResult]:
    """sum nu_j <= C_{d,k} <= sum mu_j from a Neumann and a Dirichlet spectrum.

    ``value`` holds sum nu_j and the margin is the smaller of the two slacks.
    """
    nu = np.asarray(getattr(neumann, "eigenvalues", neumann), dtype=float)
    mu = np.asarray(getattr(dirichlet, "eigenvalues", dirichlet), dtype=float)
    if min(len(nu), len(mu)) < k_max:
        raise InsufficientEigenvalues(f"sandwich check needs {k_max} eigenvalues of each")
    out = []
    for convention in conventions:
        for k in range(1, k_max + 1):
            c = cdk(inputs.at(k=k, convention=convention))
            sn, sm = float(nu[:k].sum()), float(mu[:k].sum())
            margin = min(c - sn, sm - c)
            unc = 4 * _EPS * max(sm, 1.0) * k
            out.append(CheckResult("eq:nCdkm", k, c, sn, margin, unc, classify(margin, unc),
                                   convention, "sandwich", "theorem"))
    return out


def weyl_ratio_table(spectrum, inputs: BoundInputs, k_max: int) -> list[dict]:
    """Rows k, lambda_k / W_{d,k} and sum_{j<=k} lambda_j / C_{d,k}."""
    lam = np.asarray(getattr(spectrum, "eigenvalues", spectrum), dtype=float)
    if len(lam) < k_max:
        raise InsufficientEigenvalues(f"need {k_max} eigenvalues, have {len(lam)}")
    sums = np.cumsum(lam[:k_max])
    rows = []
    for k in range(1, k_max + 1):
        inp = inputs.at(k=k)
        w, c = weyl_bound(inp), cdk(inp)
        rows.append({"k": k, "convention": inp.convention, "lambda_k": float(lam[k - 1]),
                     "W": w, "ratio": float(lam[k - 1]) / w,
                     "partial_sum": float(sums[k - 1]), "C": c,
                     "sum_ratio": float(sums[k - 1]) / c})
    return rows


# -- serialization -----------------------------------------------------------

CHECK_COLUMNS = ("identifier", "convention", "k", "side", "grade", "bound", "value",
                 "margin", "uncertainty", "verdict", "discretization", "informational")


def _none_if_nan(x):
    x = float(x)
    return None if not math.isfinite(x) else x


def _clean(obj):
    if isinstance(obj, float):
        return _none_if_nan(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    if isinstance(obj, np.ndarray):
        return [_clean(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(x) for x in obj]
    return obj


def report_to_dict(report: VerificationReport) -> dict:
    return _clean({
        "schema_version": SCHEMA_VERSION,
        "problem": report.problem,
        "spectra": {"raw": report.raw_spectrum, "extrapolated": report.extrapolated_spectrum,
                    "uncertainty": report.uncertainties},
        "checks": [asdict(c) for c in report.checks],
        "summary": report.summary,
    })


def atomic_write_text(path, text: str) -> Path:
    """Write via a temporary file in the target directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    columns = list(columns or (rows[0].keys() if rows else []))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else _fmt(v)) for k, v in row.items()})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path, rows: Sequence[dict], columns: Sequence[str] | None = None) -> Path:
    return atomic_write_text(path, csv_text(rows, columns))


def write_report(report: VerificationReport, out_dir, stem: str = "verify_report") -> tuple[Path, Path]:
    """Write ``<stem>.v<schema>.json`` and the matching CSV (one check per row)."""
    out_dir = Path(out_dir)
    base = f"{stem}.v{SCHEMA_VERSION}"
    js = atomic_write_text(out_dir / f"{base}.json",
                           json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")
    rows = [asdict(c) for c in report.checks]
    cs = write_csv(out_dir / f"{base}.csv", rows, CHECK_COLUMNS)
    return js, cs


def load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
    return data
