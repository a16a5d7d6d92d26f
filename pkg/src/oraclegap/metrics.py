"""Mutation scores and oracle-gap metrics, per file and per project.

Scores are kept as exact rationals built from raw tallies; conversion to
decimals happens at render time only. This keeps identities like
``raw_gap == 100 * (coverage - mutation_score)`` exact instead of
rounding-dependent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .coverage import CoverageMap, NoCoverageData, covered_lines, file_line_coverage
from .executor import INVALID, KILLED, TIMEOUT, MutantOutcome
from .operators import Mutant

Ratio = Fraction | float


class MetricsError(Exception):
    pass


class UndefinedScore(MetricsError):
    """No valid (non-INVALID) outcome to build a score from."""


@dataclass(frozen=True)
class FileGapReport:
    path: str
    coverage: Fraction | None
    lines_instrumented: int
    lines_covered: int
    mutants_total: int
    mutants_valid: int
    mutants_on_covered_lines: int
    killed: int
    killed_on_covered_lines: int
    mutation_score: Fraction | None
    covered_mutation_score: Fraction | None
    raw_gap: Fraction | None
    covered_gap: Fraction | None


@dataclass(frozen=True)
class ProjectGapSummary:
    files: tuple[FileGapReport, ...]
    coverage: Fraction | None
    lines_instrumented: int
    lines_covered: int
    mutants_total: int
    mutants_valid: int
    mutants_on_covered_lines: int
    killed: int
    killed_on_covered_lines: int
    mutation_score: Fraction | None
    covered_mutation_score: Fraction | None
    raw_gap: Fraction | None
    covered_gap: Fraction | None


def mutation_score(outcomes: Iterable[MutantOutcome],
                   timeout_as_kill: bool = True) -> Fraction:
    """killed / valid; TIMEOUT counts as a kill unless disabled."""
    killed = valid = 0
    for o in outcomes:
        if o.verdict == INVALID:
            continue
        valid += 1
        if o.verdict == KILLED or (timeout_as_kill and o.verdict == TIMEOUT):
            killed += 1
    if valid == 0:
        raise UndefinedScore("no valid outcomes; mutation score is undefined")
    return Fraction(killed, valid)


def covered_mutation_score(outcomes: Iterable[MutantOutcome],
                           mutants: Iterable[Mutant],
                           covered: set[int],
                           timeout_as_kill: bool = True) -> Fraction | None:
    """Mutation score restricted to mutants on covered lines; None if empty."""
    line_of = {m.id: m.line for m in mutants}
    restricted = [o for o in outcomes
                  if o.mutant_id in line_of and line_of[o.mutant_id] in covered]
    try:
        return mutation_score(restricted, timeout_as_kill)
    except UndefinedScore:
        return None


def oracle_gap(coverage: Ratio, score: Ratio) -> Ratio:
    """100 * (coverage - mutation score), in percentage points."""
    if not (0 <= coverage <= 1 and 0 <= score <= 1):
        raise MetricsError("coverage and mutation score must be in [0, 1]")
    return 100 * (coverage - score)


def covered_oracle_gap(coverage: Ratio, covered_score: Ratio | None) -> Ratio | None:
    if covered_score is None:
        return None
    return oracle_gap(coverage, covered_score)


def build_file_report(path: str, coverage_map: CoverageMap,
                      mutants: Sequence[Mutant],
                      outcomes: Sequence[MutantOutcome],
                      timeout_as_kill: bool = True) -> FileGapReport:
    """Join one file's mutants, outcomes, and coverage into a report.

    With no coverage entry for the path, counts are still tallied but
    coverage-dependent fields stay absent (never zero).
    """
    by_id = {m.id: m for m in mutants}
    for o in outcomes:
        if o.mutant_id not in by_id:
            raise MetricsError(f"outcome {o.mutant_id} has no matching mutant for {path}")

    try:
        cov = file_line_coverage(coverage_map, path)
        covered = covered_lines(coverage_map, path)
        instrumented = len(coverage_map.entries[path].instrumented) \
            if path in coverage_map.entries else 0
        n_covered = len(covered)
    except NoCoverageData:
        cov, covered, instrumented, n_covered = None, set(), 0, 0

    valid = killed = on_covered = killed_on_covered = 0
    for o in outcomes:
        if o.verdict == INVALID:
            continue
        valid += 1
        is_kill = o.verdict == KILLED or (timeout_as_kill and o.verdict == TIMEOUT)
        is_covered = by_id[o.mutant_id].line in covered
        killed += is_kill
        on_covered += is_covered
        killed_on_covered += is_kill and is_covered

    score = Fraction(killed, valid) if valid else None
    cov_score = Fraction(killed_on_covered, on_covered) if on_covered else None
    raw_gap = oracle_gap(cov, score) if cov is not None and score is not None else None
    cov_gap = covered_oracle_gap(cov, cov_score) if cov is not None else None

    return FileGapReport(
        path=path, coverage=cov,
        lines_instrumented=instrumented, lines_covered=n_covered,
        mutants_total=len(mutants), mutants_valid=valid,
        mutants_on_covered_lines=on_covered,
        killed=killed, killed_on_covered_lines=killed_on_covered,
        mutation_score=score, covered_mutation_score=cov_score,
        raw_gap=raw_gap, covered_gap=cov_gap)


def summarize_project(reports: Sequence[FileGapReport]) -> ProjectGapSummary:
    """Aggregate from raw counts, never from per-file ratios."""
    if not reports:
        raise MetricsError("cannot summarize an empty report list")
    instrumented = sum(r.lines_instrumented for r in reports)
    covered = sum(r.lines_covered for r in reports)
    total = sum(r.mutants_total for r in reports)
    valid = sum(r.mutants_valid for r in reports)
    on_covered = sum(r.mutants_on_covered_lines for r in reports)
    killed = sum(r.killed for r in reports)
    killed_on_covered = sum(r.killed_on_covered_lines for r in reports)

    cov = Fraction(covered, instrumented) if instrumented else None
    score = Fraction(killed, valid) if valid else None
    cov_score = Fraction(killed_on_covered, on_covered) if on_covered else None
    raw_gap = oracle_gap(cov, score) if cov is not None and score is not None else None
    cov_gap = covered_oracle_gap(cov, cov_score) if cov is not None else None

    return ProjectGapSummary(
        files=tuple(reports), coverage=cov,
        lines_instrumented=instrumented, lines_covered=covered,
        mutants_total=total, mutants_valid=valid,
        mutants_on_covered_lines=on_covered,
        killed=killed, killed_on_covered_lines=killed_on_covered,
        mutation_score=score, covered_mutation_score=cov_score,
        raw_gap=raw_gap, covered_gap=cov_gap)


def _num(value: Fraction | None) -> float | None:
    return None if value is None else float(value)


def report_to_dict(r: FileGapReport) -> dict:
    return {
        "path": r.path,
        "coverage": _num(r.coverage),
        "lines_instrumented": r.lines_instrumented,
        "lines_covered": r.lines_covered,
        "mutants_total": r.mutants_total,
        "mutants_valid": r.mutants_valid,
        "mutants_on_covered_lines": r.mutants_on_covered_lines,
        "killed": r.killed,
        "killed_on_covered_lines": r.killed_on_covered_lines,
        "mutation_score": _num(r.mutation_score),
        "covered_mutation_score": _num(r.covered_mutation_score),
        "raw_gap": _num(r.raw_gap),
        "covered_gap": _num(r.covered_gap),
    }


def report_from_dict(d: Mapping) -> FileGapReport:
    # Ratios are rebuilt from the raw counts, not parsed back from the
    # serialized floats, so a JSON round trip stays exact.
    instrumented = d["lines_instrumented"]
    covered = d["lines_covered"]
    valid = d["mutants_valid"]
    on_covered = d["mutants_on_covered_lines"]
    killed = d["killed"]
    killed_on_covered = d["killed_on_covered_lines"]
    had_coverage = d["coverage"] is not None
    cov = Fraction(covered, instrumented) if had_coverage and instrumented else None
    score = Fraction(killed, valid) if valid else None
    cov_score = Fraction(killed_on_covered, on_covered) if on_covered else None
    raw_gap = oracle_gap(cov, score) if cov is not None and score is not None else None
    cov_gap = covered_oracle_gap(cov, cov_score) if cov is not None else None
    return FileGapReport(
        path=d["path"], coverage=cov,
        lines_instrumented=instrumented, lines_covered=covered,
        mutants_total=d["mutants_total"], mutants_valid=valid,
        mutants_on_covered_lines=on_covered,
        killed=killed, killed_on_covered_lines=killed_on_covered,
        mutation_score=score, covered_mutation_score=cov_score,
        raw_gap=raw_gap, covered_gap=cov_gap)


def summary_to_dict(s: ProjectGapSummary) -> dict:
    return {
        "project": {
            "coverage": _num(s.coverage),
            "lines_instrumented": s.lines_instrumented,
            "lines_covered": s.lines_covered,
            "mutants_total": s.mutants_total,
            "mutants_valid": s.mutants_valid,
            "mutants_on_covered_lines": s.mutants_on_covered_lines,
            "killed": s.killed,
            "killed_on_covered_lines": s.killed_on_covered_lines,
            "mutation_score": _num(s.mutation_score),
            "covered_mutation_score": _num(s.covered_mutation_score),
            "raw_gap": _num(s.raw_gap),
            "covered_gap": _num(s.covered_gap),
        },
        "files": [report_to_dict(r) for r in s.files],
    }


def summary_from_dict(d: Mapping) -> ProjectGapSummary:
    return summarize_project([report_from_dict(f) for f in d["files"]])


def write_summary_json(s: ProjectGapSummary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary_to_dict(s), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_summary_json(path) -> ProjectGapSummary:
    with open(path, encoding="utf-8") as fh:
        return summary_from_dict(json.load(fh))
