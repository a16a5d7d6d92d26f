"""Correlation, regression, and variance analytics over gap reports.

Everything is computed in double precision with compensated summation
(``math.fsum``) so results are deterministic across platforms. Variances
are population variances throughout; output headers say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .metrics import FileGapReport
from .sampling import BUCKETS, bucket_for


class StatsError(Exception):
    pass


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r: float
    r_squared: float
    residuals: tuple[float, ...]


def _check_pair(xs: Sequence[float], ys: Sequence[float]) -> None:
    if len(xs) != len(ys):
        raise StatsError("series lengths differ")
    if len(xs) < 2:
        raise StatsError("need at least two points")


def mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def population_variance(values: Sequence[float]) -> float:
    m = mean(values)
    return math.fsum((v - m) ** 2 for v in values) / len(values)


def linear_regression(xs: Sequence[float], ys: Sequence[float]) -> RegressionFit:
    """Ordinary least squares of y on x."""
    _check_pair(xs, ys)
    mx, my = mean(xs), mean(ys)
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0:
        raise StatsError("degenerate input: xs are all equal")
    slope = sxy / sxx
    intercept = my - slope * mx
    if syy == 0:
        # Horizontal data: the fit is exact but correlation is undefined;
        # report r = 0 rather than erroring so residual output still works.
        r = 0.0
    else:
        r = sxy / math.sqrt(sxx * syy)
    residuals = tuple(y - (intercept + slope * x) for x, y in zip(xs, ys))
    return RegressionFit(slope, intercept, r, r * r, residuals)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    _check_pair(xs, ys)
    mx, my = mean(xs), mean(ys)
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        raise StatsError("zero variance in a series; correlation undefined")
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def fractional_ranks(values: Sequence[float]) -> list[float]:
    """Mid-ranks, 1-based; ties share the mean of their rank range."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    return pearson(fractional_ranks(xs), fractional_ranks(ys))


def _gap_value(report: FileGapReport, scope: str) -> float | None:
    gap = report.raw_gap if scope == "raw" else report.covered_gap
    return None if gap is None else float(gap)


def bucket_variance(reports: Sequence[FileGapReport],
                    scope: str = "raw") -> dict:
    """Population variance of gap values per coverage bucket plus overall.

    Buckets with fewer than two gap values are reported as absent (None).
    """
    per_bucket: dict[tuple[int, int], list[float]] = {b: [] for b in BUCKETS}
    overall: list[float] = []
    for r in reports:
        gap = _gap_value(r, scope)
        if gap is None or r.coverage is None:
            continue
        per_bucket[bucket_for(r.coverage)].append(gap)
        overall.append(gap)
    return {
        "scope": scope,
        "variance_kind": "population",
        "buckets": {
            f"{lo}-{hi}": (population_variance(vals) if len(vals) >= 2 else None)
            for (lo, hi), vals in per_bucket.items()
        },
        "overall": population_variance(overall) if len(overall) >= 2 else None,
    }


def grouped_variance(groups: Mapping[str, Sequence[float]]) -> tuple[float, float]:
    """(mean of per-group population variances, overall population variance).

    Singleton or empty groups are skipped for the within-group mean; if
    every group is a singleton there is nothing to average and we error.
    """
    if len(groups) < 2:
        raise StatsError("need at least two groups")
    within = [population_variance(vals) for vals in groups.values() if len(vals) >= 2]
    if not within:
        raise StatsError("all groups are singletons; within-group variance undefined")
    pooled = [v for vals in groups.values() for v in vals]
    return mean(within), population_variance(pooled)


def stats_document(reports: Sequence[FileGapReport]) -> dict:
    """Regression/correlation/variance bundle over (coverage, score, gap).

    Degenerate series produce absent (None) entries per statistic rather
    than failing the whole document.
    """
    if len(reports) < 2:
        raise StatsError("need at least two file reports")

    def series(scope: str):
        xs, ys = [], []
        for r in reports:
            if r.coverage is None:
                continue
            score = r.mutation_score if scope == "raw" else r.covered_mutation_score
            if score is None:
                continue
            xs.append(float(r.coverage) * 100)
            ys.append(float(score) * 100)
        return xs, ys

    def safe(fn, *args):
        try:
            return fn(*args)
        except StatsError:
            return None

    doc: dict = {"variance_kind": "population", "n_files": len(reports)}
    for scope in ("raw", "covered"):
        xs, ys = series(scope)
        fit = safe(linear_regression, xs, ys) if len(xs) >= 2 else None
        gaps = [x - y for x, y in zip(xs, ys)]
        doc[scope] = {
            "n": len(xs),
            "regression": None if fit is None else {
                "slope": fit.slope, "intercept": fit.intercept,
                "r": fit.r, "r_squared": fit.r_squared,
            },
            "pearson_coverage_vs_score": safe(pearson, xs, ys) if len(xs) >= 2 else None,
            "pearson_coverage_vs_gap": safe(pearson, xs, gaps) if len(xs) >= 2 else None,
            "spearman_coverage_vs_score": safe(spearman, xs, ys) if len(xs) >= 2 else None,
            "bucket_variance": bucket_variance(reports, scope),
        }
    return doc


def stats_points_csv(reports: Sequence[FileGapReport], scope: str = "raw") -> str:
    """(coverage, score, gap, residual) points for external plotting."""
    rows = ["coverage,score,gap,residual"]
    pts = [(float(r.coverage) * 100,
            float(r.mutation_score if scope == "raw" else r.covered_mutation_score) * 100,
            r.path)
           for r in reports
           if r.coverage is not None
           and (r.mutation_score if scope == "raw" else r.covered_mutation_score) is not None]
    if len(pts) >= 2:
        try:
            fit = linear_regression([p[0] for p in pts], [p[1] for p in pts])
            residuals = fit.residuals
        except StatsError:
            residuals = tuple(float("nan") for _ in pts)
    else:
        residuals = tuple(float("nan") for _ in pts)
    for (x, y, _path), resid in zip(pts, residuals):
        rows.append(f"{x!r},{y!r},{x - y!r},{resid!r}")
    return "\n".join(rows) + "\n"
