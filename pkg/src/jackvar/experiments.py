"""Monte Carlo studies of the jackknife, infinitesimal jackknife and bootstrap.

Rate studies measure how fast ``|v_jack - v_ijack|`` (or ``|v_jack - v_boot|``)
shrinks with ``n`` by fitting a line to ``log(summary)`` against ``log(n)``.
Normality studies summarise the replicate distribution of each estimator.

Every replicate draws its sample from ``derive_seed(master_seed, n, r)``, so
results do not depend on the order in which replicates are evaluated.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import InvalidParams, TooFewPoints
from .estimators import bootstrap_variance, infinitesimal_jackknife_variance, jackknife_variance
from .functionals import FunctionalSpec
from .sampling import PopulationModel, derive_seed, draw

__all__ = [
    "RateStudyConfig",
    "RateRow",
    "RateFit",
    "EstimatorSummary",
    "NormalityReport",
    "loglog_fit",
    "rate_study",
    "compare_boot",
    "normality_study",
    "replicate_differences",
    "ks_critical_value",
    "rate_csv_text",
    "normality_csv_text",
    "write_rate_csv",
    "write_normality_csv",
    "format_fit_record",
]

log = logging.getLogger(__name__)

SUMMARIES = ("median", "mean", "q90")
CONTRASTS = ("jack_vs_ijack", "jack_vs_boot")

# asymptotic 1% critical value of the Kolmogorov-Smirnov statistic, times sqrt(R)
KS_CRIT_1PCT = 1.63

_BOOT_STREAM = 1


@dataclass(frozen=True)
class RateStudyConfig:
    spec: FunctionalSpec
    model: PopulationModel
    n_grid: tuple
    replicates: int = 200
    master_seed: int = 0
    summary: str = "median"
    contrast: str = "jack_vs_ijack"
    bootstrap_B: int = 500

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if len(grid) < 2:
            raise InvalidParams("n_grid needs at least two sample sizes")
        if any(n < 4 for n in grid):
            raise InvalidParams("every n in n_grid must be at least 4")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidParams("n_grid must be strictly increasing")
        if self.replicates < 20:
            raise InvalidParams(f"rate studies need at least 20 replicates, got {self.replicates}")
        if self.summary not in SUMMARIES:
            raise InvalidParams(f"summary must be one of {SUMMARIES}, got {self.summary!r}")
        if self.contrast not in CONTRASTS:
            raise InvalidParams(f"contrast must be one of {CONTRASTS}, got {self.contrast!r}")
        if self.contrast == "jack_vs_boot" and self.bootstrap_B < 2:
            raise InvalidParams("jack_vs_boot needs bootstrap_B >= 2")


@dataclass(frozen=True)
class RateRow:
    n: int
    summary_abs_diff: float
    replicates_used: int
    excluded: int = 0


@dataclass(frozen=True)
class RateFit:
    """Least-squares line through ``(log n, log summary)`` points."""

    points: tuple
    slope: float
    intercept: float
    slope_stderr: float
    rows: tuple = ()
    contrast: str = ""

    @property
    def excluded(self) -> int:
        return sum(r.excluded for r in self.rows)


@dataclass(frozen=True)
class EstimatorSummary:
    estimator: str
    mean: float
    var: float
    skew: float
    exkurt: float
    ks_distance: float
    degenerate: bool


@dataclass(frozen=True)
class NormalityReport:
    n: int
    replicates: int
    summaries: dict = field(default_factory=dict)

    def __getitem__(self, estimator: str) -> EstimatorSummary:
        return self.summaries[estimator]


def loglog_fit(points: Sequence) -> RateFit:
    """Ordinary least squares of ``y`` on ``x``.

    The caller supplies points already on the log scale. The slope standard
    error uses the residual variance with ``m - 2`` degrees of freedom and is
    0 for two points or an exact fit.
    """
    pts = tuple((float(x), float(y)) for x, y in points)
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if len(np.unique(x)) < 2:
        raise TooFewPoints(f"need at least two distinct x values, got {len(np.unique(x))}")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    m = len(pts)
    if m <= 2:
        stderr = 0.0
    else:
        stderr = math.sqrt(float(np.sum(resid ** 2)) / (m - 2) / sxx)
    return RateFit(pts, slope, intercept, stderr)


def replicate_differences(cfg: RateStudyConfig, n: int, r: int, contrasts=None) -> dict:
    """``|v_jack - v_other|`` for one replicate, keyed by contrast name."""
    contrasts = contrasts or (cfg.contrast,)
    sample = draw(cfg.model, n, derive_seed(cfg.master_seed, n, r))
    v_jack = jackknife_variance(cfg.spec, sample).value
    out = {}
    for c in contrasts:
        if c == "jack_vs_ijack":
            other = infinitesimal_jackknife_variance(cfg.spec, sample).value
        else:
            seed = derive_seed(cfg.master_seed, n, r, _BOOT_STREAM)
            other = bootstrap_variance(cfg.spec, sample, cfg.bootstrap_B, seed).value
        out[c] = abs(v_jack - other)
    return out


def _summarise(values: np.ndarray, how: str) -> float:
    if how == "median":
        return float(np.median(values))
    if how == "mean":
        return float(np.mean(values))
    return float(np.quantile(values, 0.9))


def _run_rates(cfg: RateStudyConfig, contrasts) -> dict:
    diffs = {c: {n: [] for n in cfg.n_grid} for c in contrasts}
    excluded = {c: {n: 0 for n in cfg.n_grid} for c in contrasts}
    for n in cfg.n_grid:
        for r in range(cfg.replicates):
            try:
                d = replicate_differences(cfg, n, r, contrasts)
            except ArithmeticError as exc:
                log.warning("replicate n=%d r=%d failed: %s", n, r, exc)
                d = {c: math.nan for c in contrasts}
            for c, v in d.items():
                if math.isfinite(v):
                    diffs[c][n].append(v)
                else:
                    excluded[c][n] += 1

    fits = {}
    for c in contrasts:
        rows, points = [], []
        for n in cfg.n_grid:
            vals = np.asarray(diffs[c][n])
            summary = _summarise(vals, cfg.summary) if vals.size else math.nan
            rows.append(RateRow(n, summary, int(vals.size), excluded[c][n]))
            if summary > 0 and math.isfinite(summary):
                points.append((math.log(n), math.log(summary)))
        fit = loglog_fit(points)
        fits[c] = RateFit(fit.points, fit.slope, fit.intercept, fit.slope_stderr, tuple(rows), c)
    return fits


def rate_study(cfg: RateStudyConfig) -> RateFit:
    """Fit the decay exponent of ``summary(|v_jack - v_other|)`` over ``cfg.n_grid``."""
    return _run_rates(cfg, (cfg.contrast,))[cfg.contrast]


def compare_boot(cfg: RateStudyConfig):
    """Paired rate studies: ``(jack_vs_ijack fit, jack_vs_boot fit)`` on identical samples."""
    if cfg.bootstrap_B < 2:
        raise InvalidParams("compare_boot needs bootstrap_B >= 2")
    fits = _run_rates(cfg, CONTRASTS)
    return fits["jack_vs_ijack"], fits["jack_vs_boot"]


def ks_critical_value(replicates: int) -> float:
    return KS_CRIT_1PCT / math.sqrt(replicates)


def _summary_of(name: str, values: np.ndarray) -> EstimatorSummary:
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1))
    if not var > 0 or not math.isfinite(var):
        return EstimatorSummary(name, mean, 0.0 if not var > 0 else var,
                                math.nan, math.nan, math.nan, True)
    z = (values - mean) / math.sqrt(var)
    return EstimatorSummary(
        name,
        mean,
        var,
        float(stats.skew(z)),
        float(stats.kurtosis(z)),
        float(stats.kstest(z, "norm").statistic),
        False,
    )


def normality_study(spec: FunctionalSpec, model: PopulationModel, n: int, R: int,
                    master_seed: int) -> NormalityReport:
    """Replicate distribution of ``v_jack`` and ``v_ijack`` at a fixed ``n``.

    Each estimator is standardised by its own replicate mean and standard
    deviation before skewness, excess kurtosis and the KS distance to the
    standard normal are computed.
    """
    if R < 100:
        raise InvalidParams(f"normality studies need at least 100 replicates, got {R}")
    if n < 2:
        raise InvalidParams(f"normality studies need n >= 2, got {n}")
    jack = np.empty(R)
    ijack = np.empty(R)
    for r in range(R):
        sample = draw(model, n, derive_seed(master_seed, n, r))
        jack[r] = jackknife_variance(spec, sample).value
        ijack[r] = infinitesimal_jackknife_variance(spec, sample).value
    return NormalityReport(n, R, {"v_jack": _summary_of("v_jack", jack),
                                  "v_ijack": _summary_of("v_ijack", ijack)})


# --------------------------------------------------------------------------
# output

def fmt(x) -> str:
    """17 significant digits; integers verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv_text(columns, rows, header_lines) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def rate_csv_text(fit: RateFit, header_lines=()) -> str:
    rows = [[r.n, fmt(r.summary_abs_diff), r.replicates_used] for r in fit.rows]
    return _csv_text(["n", "summary_abs_diff", "replicates_used"], rows, header_lines)


def normality_csv_text(report: NormalityReport, header_lines=()) -> str:
    rows = [
        [s.estimator, fmt(s.mean), fmt(s.var), fmt(s.skew), fmt(s.exkurt), fmt(s.ks_distance), fmt(s.degenerate)]
        for s in report.summaries.values()
    ]
    return _csv_text(["estimator", "mean", "var", "skew", "exkurt", "ks_distance", "degenerate"], rows,
                     header_lines)


def write_rate_csv(path, fit: RateFit, header_lines=()):
    Path(path).write_text(rate_csv_text(fit, header_lines))


def write_normality_csv(path, report: NormalityReport, header_lines=()):
    Path(path).write_text(normality_csv_text(report, header_lines))


def format_fit_record(fits, header_lines=()) -> str:
    """``key = value`` record for one or more fits; keys are prefixed by contrast."""
    lines = [f"# {h}" for h in header_lines]
    for fit in fits:
        prefix = f"{fit.contrast}." if fit.contrast else ""
        lines.append(f"{prefix}slope = {fmt(fit.slope)}")
        lines.append(f"{prefix}slope_stderr = {fmt(fit.slope_stderr)}")
        lines.append(f"{prefix}intercept = {fmt(fit.intercept)}")
        lines.append(f"{prefix}excluded = {fit.excluded}")
    return "\n".join(lines) + "\n"
