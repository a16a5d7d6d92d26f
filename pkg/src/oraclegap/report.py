"""Ranking, suspect flagging, and report rendering."""

from __future__ import annotations

import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Sequence

from .metrics import (FileGapReport, ProjectGapSummary, report_to_dict,
                      summary_to_dict)


class ReportError(Exception):
    pass


@dataclass(frozen=True)
class SuspectRule:
    min_coverage: Fraction = Fraction(4, 5)
    max_mutation_score: Fraction = Fraction(1, 5)
    scope: str = "raw"  # "raw" or "covered"

    def __post_init__(self):
        if self.min_coverage <= self.max_mutation_score:
            raise ReportError("min_coverage must exceed max_mutation_score")
        if self.scope not in ("raw", "covered"):
            raise ReportError(f"unknown suspect scope {self.scope!r}")


@dataclass(frozen=True)
class Suspect:
    report: FileGapReport
    coverage: Fraction
    score: Fraction
    reason: str


def rank_by_covered_gap(reports: Sequence[FileGapReport]
                        ) -> tuple[list[FileGapReport], list[FileGapReport]]:
    """(ranked files, files without a covered gap).

    Ranked section is descending by covered gap, ties broken by path.
    """
    with_gap = [r for r in reports if r.covered_gap is not None]
    without = sorted((r for r in reports if r.covered_gap is None),
                     key=lambda r: r.path)
    ranked = sorted(with_gap, key=lambda r: (-r.covered_gap, r.path))
    return ranked, without


def flag_suspects(reports: Sequence[FileGapReport],
                  rule: SuspectRule = SuspectRule()) -> list[Suspect]:
    """Files with coverage above and mutation score below the thresholds."""
    flagged = []
    for r in reports:
        score = r.mutation_score if rule.scope == "raw" else r.covered_mutation_score
        if r.coverage is None or score is None:
            continue
        if r.coverage > rule.min_coverage and score < rule.max_mutation_score:
            flagged.append(Suspect(
                report=r, coverage=r.coverage, score=score,
                reason=(f"coverage {fmt_pct(r.coverage)}% > "
                        f"{fmt_pct(rule.min_coverage)}% and {rule.scope} "
                        f"mutation score {fmt_pct(score)}% < "
                        f"{fmt_pct(rule.max_mutation_score)}%")))
    return flagged


def fmt_pct(value: Fraction | float | None) -> str:
    """Percentage with one decimal, rounding half away from zero."""
    if value is None:
        return "—"
    if isinstance(value, Fraction):
        dec = Decimal(value.numerator * 100) / Decimal(value.denominator)
    else:
        dec = Decimal(repr(float(value) * 100))
    return str(dec.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def fmt_points(value: Fraction | float | None) -> str:
    """Gap value (already in percentage points), one decimal."""
    if value is None:
        return "—"
    if isinstance(value, Fraction):
        dec = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        dec = Decimal(repr(float(value)))
    return str(dec.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


_COLUMNS = ("path", "coverage%", "mut%", "covered-mut%", "raw gap", "covered gap")


def _row(r: FileGapReport) -> tuple[str, ...]:
    return (r.path, fmt_pct(r.coverage), fmt_pct(r.mutation_score),
            fmt_pct(r.covered_mutation_score), fmt_points(r.raw_gap),
            fmt_points(r.covered_gap))


def render_text(summary: ProjectGapSummary,
                rule: SuspectRule = SuspectRule()) -> str:
    out = io.StringIO()
    out.write("project: coverage {cov}%  mutation {mut}%  covered-mutation {cmut}%  "
              "raw gap {rg}  covered gap {cg}\n".format(
                  cov=fmt_pct(summary.coverage),
                  mut=fmt_pct(summary.mutation_score),
                  cmut=fmt_pct(summary.covered_mutation_score),
                  rg=fmt_points(summary.raw_gap),
                  cg=fmt_points(summary.covered_gap)))
    ranked, without = rank_by_covered_gap(summary.files)
    rows = [_row(r) for r in ranked + without]
    if not rows:
        out.write("no analyzable files\n")
        return out.getvalue()
    widths = [max(len(c), *(len(row[i]) for row in rows))
              for i, c in enumerate(_COLUMNS)]
    def emit(cells):
        out.write("  ".join(
            c.ljust(widths[i]) if i == 0 else c.rjust(widths[i])
            for i, c in enumerate(cells)).rstrip() + "\n")
    emit(_COLUMNS)
    for row in rows:
        emit(row)
    suspects = flag_suspects(summary.files, rule)
    if suspects:
        out.write("suspects:\n")
        for s in suspects:
            out.write(f"  {s.report.path}: {s.reason}\n")
    else:
        out.write("suspects: none\n")
    return out.getvalue()


def render_csv(summary: ProjectGapSummary) -> str:
    fields = ("path", "coverage", "lines_instrumented", "lines_covered",
              "mutants_total", "mutants_valid", "mutants_on_covered_lines",
              "killed", "killed_on_covered_lines", "mutation_score",
              "covered_mutation_score", "raw_gap", "covered_gap")
    rows = [",".join(fields)]
    for r in summary.files:
        d = report_to_dict(r)
        rows.append(",".join(
            "" if d[f] is None else (d[f] if isinstance(d[f], str) else repr(d[f]))
            for f in fields))
    return "\n".join(rows) + "\n"


def render(summary: ProjectGapSummary, format: str = "text",
           rule: SuspectRule = SuspectRule()) -> str:
    if format == "text":
        return render_text(summary, rule)
    if format == "json":
        import json
        return json.dumps(summary_to_dict(summary), indent=2, sort_keys=True) + "\n"
    if format == "csv":
        return render_csv(summary)
    raise ReportError(f"unknown format {format!r}; expected text, json, or csv")
