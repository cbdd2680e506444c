"""Post-run numerics: improvement metrics, delta series, correlations.

Relative percentage improvement (RPI) measures how much of the available
headroom an optimization run consumed::

    RPI = 100 * (final - initial) / (5 - initial)

A run starting at the score ceiling (initial == 5) has no headroom; its RPI
is reported as 0 with an explicit flag rather than a division blow-up.

Delta series track per-iteration score changes of one example under one
scoring method.  Differences are taken in exact rational arithmetic, so the
telescoping identity ``sum(deltas) == last - first`` holds exactly no
matter what floats go in; the float ``deltas`` view is correctly rounded
per element.

Correlations are computed from their definitions (Pearson on values,
Spearman as Pearson on average-ranked data) with two-sided p-values from
the exact Student-t identity p = I_x(nu/2, 1/2), x = nu / (nu + t^2).
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from scipy.special import betainc

from .models import IterationStatus, OptimizationRun

SCORE_CEILING = 5.0

#: Canonical scoring-method labels used in delta CSVs.
METHOD_CODEQUEST = "codequest"
METHOD_BASELINE = "baseline"
METHOD_PROXY = "proxy"


@dataclass(frozen=True, slots=True)
class RpiResult:
    value: float
    no_headroom: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "no_headroom": self.no_headroom}


def rpi(initial: float, final: float) -> RpiResult:
    """Relative percentage improvement of ``final`` over ``initial``."""
    for name, score in (("initial", initial), ("final", final)):
        if not -5.0 <= score <= 5.0:
            raise ValueError(f"{name} score {score} outside [-5, 5]")
    if initial == SCORE_CEILING:
        return RpiResult(value=0.0, no_headroom=True)
    return RpiResult(value=100.0 * (final - initial) / (SCORE_CEILING - initial))


@dataclass(frozen=True, slots=True)
class DeltaSeries:
    """Score trajectory of one example under one scoring method."""

    example_id: str
    method: str
    scores: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.scores:
            raise ValueError(f"delta series {self.example_id!r}/{self.method!r} has no scores")
        if self.method != self.method.lower():
            raise ValueError(f"method label must be lowercase, got {self.method!r}")

    @property
    def exact_deltas(self) -> tuple[Fraction, ...]:
        pairs = zip(self.scores, self.scores[1:])
        return tuple(Fraction(b) - Fraction(a) for a, b in pairs)

    @property
    def deltas(self) -> tuple[float, ...]:
        return tuple(float(d) for d in self.exact_deltas)


def delta_series(example_id: str, method: str, scores: Sequence[float]) -> DeltaSeries:
    """Build a series; the method label is normalized to lowercase."""
    return DeltaSeries(example_id=example_id, method=method.lower(), scores=tuple(float(s) for s in scores))


# -- correlation --------------------------------------------------------


def _demean(values: Sequence[float]) -> list[float]:
    mean = math.fsum(values) / len(values)
    return [v - mean for v in values]


def _t_pvalue(r: float, n: int) -> float:
    """Two-sided p-value of a correlation of ``r`` over ``n`` pairs."""
    if n < 3:
        return float("nan")
    if 1.0 - r * r <= 0.0:
        return 0.0
    nu = n - 2
    t_sq = r * r * nu / (1.0 - r * r)
    return float(betainc(nu / 2.0, 0.5, nu / (nu + t_sq)))


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Pearson r and two-sided p-value.

    Raises ValueError for mismatched lengths, fewer than 2 pairs, or a
    zero-variance side (r undefined).
    """
    if len(x) != len(y):
        raise ValueError(f"paired data required, got lengths {len(x)} and {len(y)}")
    n = len(x)
    if n < 2:
        raise ValueError("correlation needs at least 2 pairs")
    dx, dy = _demean(x), _demean(y)
    var_x = math.fsum(v * v for v in dx)
    var_y = math.fsum(v * v for v in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("correlation undefined: a variable has zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
    r = max(-1.0, min(1.0, r))
    return r, _t_pvalue(r, n)


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their rank positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Spearman rho (Pearson over average ranks) and two-sided p-value."""
    return pearson(average_ranks(x), average_ranks(y))


@dataclass(frozen=True, slots=True)
class CorrelationResult:
    n: int
    pearson_r: float
    pearson_p: float
    spearman_r: float
    spearman_p: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "pearson_r": self.pearson_r,
            "pearson_p": self.pearson_p,
            "spearman_r": self.spearman_r,
            "spearman_p": self.spearman_p,
        }


def correlation_report(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Pearson and Spearman over the same paired data."""
    pr, pp = pearson(x, y)
    sr, sp = spearman(x, y)
    return CorrelationResult(n=len(x), pearson_r=pr, pearson_p=pp, spearman_r=sr, spearman_p=sp)


# -- run-level summaries ------------------------------------------------


@dataclass(frozen=True, slots=True)
class TrajectoryPoint:
    """Best-so-far state after one iteration (or the starting point)."""

    label: str
    score: float
    source: str


def trajectory(run: OptimizationRun) -> list[TrajectoryPoint]:
    """Best-so-far score/code per iteration, labels ``initial``, ``attempt-N``.

    Rejected iterations repeat the previous point: the published evolution
    of a run never moves on a rejection.
    """
    points = [TrajectoryPoint("initial", run.initial_assessment.overall, run.initial_code.source)]
    score = run.initial_assessment.overall
    source = run.initial_code.source
    for attempt in run.attempts:
        if attempt.status is IterationStatus.ACCEPTED:
            assert attempt.assessment is not None and attempt.candidate_code is not None
            score = attempt.assessment.overall
            source = attempt.candidate_code
        points.append(TrajectoryPoint(f"attempt-{attempt.index}", score, source))
    return points


@dataclass(frozen=True, slots=True)
class RunSummary:
    """Aggregate improvement statistics over a batch of runs."""

    runs: int
    improved_runs: int
    no_headroom_runs: int
    rpi_mean: float
    rpi_std: float
    rpi_stderr: float
    rpi_median: float
    absolute_improvement_mean: float
    mean_gain_by_iteration: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "runs": self.runs,
            "improved_runs": self.improved_runs,
            "no_headroom_runs": self.no_headroom_runs,
            "rpi_mean": self.rpi_mean,
            "rpi_std": self.rpi_std,
            "rpi_stderr": self.rpi_stderr,
            "rpi_median": self.rpi_median,
            "absolute_improvement_mean": self.absolute_improvement_mean,
            "mean_gain_by_iteration": list(self.mean_gain_by_iteration),
        }


def summarize_runs(runs: Sequence[OptimizationRun]) -> RunSummary:
    """Mean/spread/median RPI, absolute improvement, per-iteration gains.

    The spread is reported both as sample standard deviation and as standard
    error of the mean, since quoted "+/-" figures are ambiguous between the
    two.
    """
    if not runs:
        raise ValueError("no runs to summarize")
    rpis = []
    improvements = []
    no_headroom = 0
    for run in runs:
        result = rpi(run.initial_assessment.overall, run.final_assessment.overall)
        rpis.append(result.value)
        no_headroom += result.no_headroom
        improvements.append(run.final_assessment.overall - run.initial_assessment.overall)

    gains_by_iteration: list[list[float]] = []
    for run in runs:
        points = trajectory(run)
        for i, (prev, cur) in enumerate(zip(points, points[1:])):
            if i >= len(gains_by_iteration):
                gains_by_iteration.append([])
            gains_by_iteration[i].append(cur.score - prev.score)

    std = statistics.stdev(rpis) if len(rpis) > 1 else 0.0
    return RunSummary(
        runs=len(runs),
        improved_runs=sum(1 for d in improvements if d > 0),
        no_headroom_runs=no_headroom,
        rpi_mean=math.fsum(rpis) / len(rpis),
        rpi_std=std,
        rpi_stderr=std / math.sqrt(len(rpis)),
        rpi_median=statistics.median(rpis),
        absolute_improvement_mean=math.fsum(improvements) / len(improvements),
        mean_gain_by_iteration=tuple(
            math.fsum(g) / len(g) for g in gains_by_iteration
        ),
    )


# -- CSV emission -------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DeltaRow:
    """One (example, iteration) line of the delta CSV; absent methods stay blank."""

    example_id: str
    iteration: int
    codequest: float | None = None
    baseline: float | None = None
    proxy: float | None = None


DELTA_CSV_COLUMNS = ("example_id", "iteration", "delta_codequest", "delta_baseline", "delta_proxy")


def write_delta_csv(rows: Sequence[DeltaRow], path: str | Path) -> None:
    """Write per-iteration deltas, one row per (example, iteration)."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DELTA_CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.example_id,
                    row.iteration,
                    "" if row.codequest is None else repr(row.codequest),
                    "" if row.baseline is None else repr(row.baseline),
                    "" if row.proxy is None else repr(row.proxy),
                ]
            )
