"""Suite-ablation experiment: knock out assertions/tests and re-measure gaps.

Test suites are weakened by commenting out sampled assertion lines and
whole test cases (never deleting, so line numbers survive), then the
full coverage + mutation pipeline runs per configuration. The grid
covers 0/50/100% of tests crossed with 0/50/100% of assertions, minus
the meaningless cells (asserts without their tests).
"""

from __future__ import annotations

import json
import re
import shutil
import statistics
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from . import coverage as cov_mod
from .executor import CampaignConfig, RedBaselineError, baseline_check, run_campaign
from .metrics import FileGapReport, build_file_report
from .operators import Mutant
from .sampling import _derive_rng

# Traversal order: rows by test level, left to right by assert level.
# "Previous" for a cell is the cell to its left, wrapping to the end of
# the row above for the leftmost cell in a row.
GRID_SHAPES: tuple[tuple[int, int], ...] = (
    (0, 0), (50, 0), (50, 50), (50, 100), (100, 0), (100, 50), (100, 100),
)

DEFAULT_TEST_PATTERNS = (r"^\s*def test_\w+", r"^\s*public\s+void\s+test\w+",
                         r"^\s*func Test\w+")
DEFAULT_ASSERT_PATTERNS = (r"^\s*assert\b", r"^\s*self\.assert\w+\(",
                           r"^\s*[Aa]ssert\w*\.\w+\(", r"^\s*EXPECT_\w+\(",
                           r"^\s*ASSERT_\w+\(")

_COMMENT_BY_EXT = {
    ".py": "#", ".java": "//", ".c": "//", ".h": "//", ".cc": "//",
    ".cpp": "//", ".hpp": "//", ".go": "//", ".js": "//", ".ts": "//",
    ".rs": "//", ".lua": "--", ".sql": "--",
}


class AblationError(Exception):
    pass


@dataclass(frozen=True)
class KnockoutSite:
    path: str
    line: int
    kind: str  # "assert" or "test_case"
    group_id: str  # id of the enclosing test-case site

    @property
    def id(self) -> str:
        return f"{self.path}:{self.line}:{self.kind}"


@dataclass(frozen=True)
class SuiteConfiguration:
    test_pct: int
    assert_pct: int
    sample_index: int
    retained: frozenset[str]  # retained KnockoutSite ids

    @property
    def label(self) -> str:
        return f"t{self.test_pct}-a{self.assert_pct}-s{self.sample_index}"


def enumerate_knockout_sites(test_files: Mapping[str, str],
                             assert_patterns: Sequence[str] = DEFAULT_ASSERT_PATTERNS,
                             test_patterns: Sequence[str] = DEFAULT_TEST_PATTERNS,
                             warn=None) -> list[KnockoutSite]:
    """Scan test files for test-case anchors and assert lines.

    ``test_files`` maps a repository-relative path to its text. Asserts
    attach to the nearest preceding test-case anchor in the same file;
    an assert before any anchor is skipped with a warning.
    """
    apats = [re.compile(p) for p in assert_patterns]
    tpats = [re.compile(p) for p in test_patterns]
    sites: list[KnockoutSite] = []
    for path in sorted(test_files):
        anchor: KnockoutSite | None = None
        for lineno, line in enumerate(test_files[path].splitlines(), start=1):
            if any(p.search(line) for p in tpats):
                anchor = KnockoutSite(path, lineno, "test_case", f"{path}:{lineno}:test_case")
                sites.append(anchor)
            elif any(p.search(line) for p in apats):
                if anchor is None:
                    if warn:
                        warn(f"{path}:{lineno}: assert outside any test case, skipped")
                    continue
                sites.append(KnockoutSite(path, lineno, "assert", anchor.id))
    return sites


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def _retained_sites(sites: Sequence[KnockoutSite], test_pct: int,
                    assert_pct: int, seed: int, sample_index: int) -> frozenset[str]:
    tests = [s for s in sites if s.kind == "test_case"]
    n_tests = _round_half_up(len(tests) * test_pct / 100)
    if n_tests >= len(tests):
        kept_tests = list(tests)
    elif n_tests == 0:
        kept_tests = []
    else:
        rng = _derive_rng(seed, f"tests:{test_pct}:{assert_pct}:{sample_index}")
        kept_tests = [tests[i] for i in sorted(rng.sample(range(len(tests)), n_tests))]
    kept_test_ids = {t.id for t in kept_tests}

    asserts = [s for s in sites if s.kind == "assert" and s.group_id in kept_test_ids]
    n_asserts = _round_half_up(len(asserts) * assert_pct / 100)
    if n_asserts >= len(asserts):
        kept_asserts = list(asserts)
    elif n_asserts == 0:
        kept_asserts = []
    else:
        rng = _derive_rng(seed, f"asserts:{test_pct}:{assert_pct}:{sample_index}")
        kept_asserts = [asserts[i] for i in sorted(rng.sample(range(len(asserts)), n_asserts))]
    return frozenset(kept_test_ids | {a.id for a in kept_asserts})


def generate_grid(sites: Sequence[KnockoutSite],
                  samples_per_stochastic_config: int = 5,
                  seed: int = 0) -> list[SuiteConfiguration]:
    """All seven grid shapes, 50% shapes expanded into seeded samples.

    Sampling is skipped (one variant per shape) when the suite averages
    fewer than 1.5 assertions per test case.
    """
    tests = [s for s in sites if s.kind == "test_case"]
    if not tests:
        raise AblationError("no test-case sites; nothing to ablate")
    asserts = [s for s in sites if s.kind == "assert"]
    sample_worthwhile = len(asserts) / len(tests) >= 1.5

    configs: list[SuiteConfiguration] = []
    for test_pct, assert_pct in GRID_SHAPES:
        stochastic = 50 in (test_pct, assert_pct)
        n = samples_per_stochastic_config if stochastic and sample_worthwhile else 1
        for sample_index in range(n):
            configs.append(SuiteConfiguration(
                test_pct, assert_pct, sample_index,
                _retained_sites(sites, test_pct, assert_pct, seed, sample_index)))
    return configs


def _comment_prefix_for(path: str) -> str:
    ext = Path(path).suffix
    prefix = _COMMENT_BY_EXT.get(ext)
    if prefix is None:
        raise AblationError(f"no known comment prefix for {path!r}")
    return prefix


def _group_spans(sites: Sequence[KnockoutSite], path: str,
                 n_lines: int) -> dict[str, tuple[int, int]]:
    anchors = sorted((s for s in sites if s.kind == "test_case" and s.path == path),
                     key=lambda s: s.line)
    spans = {}
    for i, anchor in enumerate(anchors):
        end = anchors[i + 1].line - 1 if i + 1 < len(anchors) else n_lines
        spans[anchor.id] = (anchor.line, end)
    return spans


def materialize_configuration(project_root, config: SuiteConfiguration,
                              sites: Sequence[KnockoutSite]) -> None:
    """Comment out non-retained sites in place.

    A knocked-out test case takes its whole body (anchor line through the
    line before the next anchor); a knocked-out assert inside a retained
    test takes only its own line. Line counts are preserved.
    """
    root = Path(project_root)
    for path in sorted({s.path for s in sites}):
        prefix = _comment_prefix_for(path)
        target = root / path
        text = target.read_text(encoding="utf-8")
        lines = text.splitlines(keepends=True)
        to_comment: set[int] = set()
        spans = _group_spans(sites, path, len(lines))
        for site in sites:
            if site.path != path or site.id in config.retained:
                continue
            if site.kind == "test_case":
                lo, hi = spans[site.id]
                to_comment.update(range(lo, hi + 1))
            else:
                to_comment.add(site.line)
        if not to_comment:
            continue
        for lineno in to_comment:
            raw = lines[lineno - 1]
            body = raw.rstrip("\r\n")
            ending = raw[len(body):]
            if body.strip():
                lines[lineno - 1] = f"{prefix} {body}{ending}"
        target.write_text("".join(lines), encoding="utf-8")


@dataclass
class ConfigurationResult:
    config: SuiteConfiguration
    failed: bool
    detail: str
    reports: tuple[FileGapReport, ...]


def run_ablation_grid(project_root, target_files: Sequence[str],
                      grid: Sequence[SuiteConfiguration],
                      campaign_config: CampaignConfig,
                      sites: Sequence[KnockoutSite],
                      mutants_by_file: Mapping[str, Sequence[Mutant]],
                      coverage_command: str | None = None,
                      coverage_report: str = "coverage.lcov",
                      base_coverage: cov_mod.CoverageMap | None = None,
                      timeout_as_kill: bool = True,
                      progress=None) -> list[ConfigurationResult]:
    """One gap report per (configuration, target file).

    Coverage is re-measured per configuration when ``coverage_command``
    is given (it must write ``coverage_report``, LCOV, at the workspace
    root); otherwise ``base_coverage`` is reused for every cell. A red
    suite marks that configuration failed and the grid continues.
    """
    if coverage_command is None and base_coverage is None:
        raise AblationError("need either coverage_command or base_coverage")
    root = Path(project_root)
    results: list[ConfigurationResult] = []
    for config in grid:
        if progress:
            progress(config)
        base = Path(tempfile.mkdtemp(prefix="oraclegap-ablate-"))
        try:
            ws = base / "project"
            shutil.copytree(root, ws, symlinks=True,
                            ignore=shutil.ignore_patterns(".git", "__pycache__"))
            materialize_configuration(ws, config, sites)
            try:
                baseline_ms = baseline_check(ws, campaign_config)
            except RedBaselineError as exc:
                results.append(ConfigurationResult(config, True, str(exc), ()))
                continue
            if coverage_command is not None:
                proc = subprocess.run(coverage_command, shell=True, cwd=str(ws),
                                      stdout=subprocess.PIPE, stderr=subprocess.STDOUT)
                if proc.returncode != 0:
                    results.append(ConfigurationResult(
                        config, True,
                        f"coverage command failed (exit {proc.returncode})", ()))
                    continue
                coverage_map = cov_mod.parse_lcov(
                    (ws / coverage_report).read_text(encoding="utf-8"))
            else:
                coverage_map = base_coverage
            reports = []
            for path in target_files:
                mutants = list(mutants_by_file.get(path, ()))
                campaign = run_campaign(ws, mutants, campaign_config,
                                        baseline_ms=baseline_ms)
                reports.append(build_file_report(
                    path, coverage_map, mutants, campaign.outcomes,
                    timeout_as_kill=timeout_as_kill))
            results.append(ConfigurationResult(config, False, "", tuple(reports)))
        finally:
            shutil.rmtree(base, ignore_errors=True)
    return results


def _cell_gaps(results: Sequence[ConfigurationResult]
               ) -> dict[tuple[int, int], list[float]]:
    cells: dict[tuple[int, int], list[float]] = {}
    for res in results:
        if res.failed:
            continue
        gaps = [float(r.covered_gap) for r in res.reports if r.covered_gap is not None]
        if not gaps:
            continue
        cells.setdefault((res.config.test_pct, res.config.assert_pct), []).append(
            statistics.fmean(gaps))
    return cells


def gap_delta_matrix(results: Sequence[ConfigurationResult],
                     reference: str = "full") -> list[dict]:
    """Mean covered-gap per cell and delta against a reference cell.

    ``reference="full"`` compares against the (100, 100) cell;
    ``reference="previous"`` against the preceding cell in grid
    traversal order.
    """
    if reference not in ("full", "previous"):
        raise AblationError(f"unknown reference {reference!r}")
    cells = _cell_gaps(results)
    mean_of = {shape: statistics.fmean(samples) for shape, samples in cells.items()}
    matrix = []
    for i, shape in enumerate(GRID_SHAPES):
        if shape not in mean_of:
            continue
        if reference == "full":
            ref_shape = (100, 100)
        else:
            ref_shape = GRID_SHAPES[i - 1] if i > 0 else shape
        if ref_shape not in mean_of:
            raise AblationError(f"missing reference cell {ref_shape} for {shape}")
        matrix.append({
            "cell": {"test_pct": shape[0], "assert_pct": shape[1]},
            "samples": cells[shape],
            "mean_covered_gap": mean_of[shape],
            "delta": mean_of[shape] - mean_of[ref_shape],
        })
    return matrix


def write_ablation_matrix(path, results: Sequence[ConfigurationResult]) -> None:
    vs_full = gap_delta_matrix(results, "full")
    vs_prev = {(c["cell"]["test_pct"], c["cell"]["assert_pct"]): c["delta"]
               for c in gap_delta_matrix(results, "previous")}
    doc = []
    for cell in vs_full:
        shape = (cell["cell"]["test_pct"], cell["cell"]["assert_pct"])
        doc.append({
            "cell": cell["cell"],
            "samples": cell["samples"],
            "mean_covered_gap": cell["mean_covered_gap"],
            "delta_vs_full": cell["delta"],
            "delta_vs_previous": vs_prev[shape],
        })
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"cells": doc}, fh, indent=2, sort_keys=True)
        fh.write("\n")
