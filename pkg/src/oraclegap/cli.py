"""Command-line orchestration: mutate -> run -> gap -> rank/stats/ablate.

The pipeline is staged through files in the output directory so long
campaigns can be interrupted and resumed. All stages accept a key=value
config file; command-line flags override file values.
"""

from __future__ import annotations

import argparse
import glob as globmod
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import ablation, coverage, executor, metrics, operators, report, sampling, stats

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SUSPECTS = 2
EXIT_RED_BASELINE = 3


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    project_root: str = "."
    language_tag: str = "generic"
    coverage_report_path: str = "coverage.lcov"
    test_command: str = ""
    build_command: str = ""
    seed: int = 0
    jobs: int = 1
    timeout_factor: float = 10.0
    mutant_cap: int = 100
    files_per_bucket: int = 25
    file_cap: int = 100
    exclusion_patterns: list[str] = field(default_factory=list)
    exclude_log_lines: bool = False
    output_dir: str = "oraclegap-out"
    catalog_file: str = ""
    # ablation-only settings
    test_file_glob: str = ""
    coverage_command: str = ""
    ablation_samples: int = 5

    def plan(self) -> sampling.BucketPlan:
        return sampling.BucketPlan(per_bucket=self.files_per_bucket,
                                   mutant_cap=self.mutant_cap,
                                   file_cap=self.file_cap, seed=self.seed)

    def campaign(self) -> executor.CampaignConfig:
        return executor.CampaignConfig(
            test_command=self.test_command,
            build_command=self.build_command or None,
            timeout_factor=self.timeout_factor,
            jobs=self.jobs, seed=self.seed)


_BOOL_KEYS = {"exclude_log_lines"}
_INT_KEYS = {"seed", "jobs", "mutant_cap", "files_per_bucket", "file_cap",
             "ablation_samples"}
_FLOAT_KEYS = {"timeout_factor"}
_LIST_KEYS = {"exclusion_patterns"}


def load_config_file(path) -> dict:
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key in _BOOL_KEYS:
                values[key] = value.lower() in ("1", "true", "yes", "on")
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _LIST_KEYS:
                values.setdefault(key, []).append(value)
            else:
                values[key] = value
    return values


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            if not hasattr(cfg, key):
                raise CliError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    for key in ("project_root", "language_tag", "coverage_report_path",
                "test_command", "build_command", "seed", "jobs",
                "timeout_factor", "mutant_cap", "files_per_bucket", "file_cap",
                "output_dir", "catalog_file", "test_file_glob",
                "coverage_command", "ablation_samples"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "exclude", None):
        cfg.exclusion_patterns.extend(args.exclude)
    if getattr(args, "exclude_log_lines", False):
        cfg.exclude_log_lines = True
    return cfg


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_coverage(cfg: RunConfig) -> coverage.CoverageMap:
    path = Path(cfg.coverage_report_path)
    if not path.is_absolute():
        path = Path(cfg.project_root) / path
    if not path.exists():
        raise CliError(
            f"coverage report not found at {path}; produce an LCOV tracefile "
            "(e.g. `coverage lcov`, `gcovr --lcov`, or a JaCoCo-to-LCOV "
            "converter) and point --coverage-report-path at it")
    return coverage.parse_lcov(path.read_text(encoding="utf-8"))


def _exclusions(cfg: RunConfig) -> list[str]:
    patterns = list(cfg.exclusion_patterns)
    if cfg.exclude_log_lines:
        patterns.extend(operators.DEFAULT_LOG_EXCLUSIONS)
    return patterns


def cmd_mutate(cfg: RunConfig) -> int:
    cov = _read_coverage(cfg)
    catalog = (operators.load_catalog_file(cfg.catalog_file)
               if cfg.catalog_file else operators.CATALOG)
    ops = operators.load_operator_catalog(cfg.language_tag, catalog)
    plan = cfg.plan()

    buckets = sampling.bucket_files(cov)
    selected = sampling.sample_files(buckets, plan)
    selected_set = set(selected)
    selected_by_bucket = {b: [p for p in paths if p in selected_set]
                          for b, paths in buckets.items()}

    exclusions = _exclusions(cfg)
    all_mutants: list[operators.Mutant] = []
    ids_by_file: dict[str, list[str]] = {}
    for path in selected:
        source = Path(cfg.project_root, path)
        if not source.exists():
            print(f"warning: {path} in coverage report but not on disk, skipped",
                  file=sys.stderr)
            continue
        generated = operators.generate_mutants(
            source.read_text(encoding="utf-8"), path, ops,
            exclusions, cfg.language_tag)
        sampled = sampling.sample_mutants(generated, plan, salt=path)
        all_mutants.extend(sampled)
        ids_by_file[path] = [m.id for m in sampled]

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    sampling.write_manifest(out / "manifest.json", plan, selected_by_bucket,
                            ids_by_file)
    operators.write_mutants_jsonl(all_mutants, out / "mutants.jsonl")
    print(f"{len(all_mutants)} mutants over {len(ids_by_file)} files "
          f"-> {out / 'mutants.jsonl'}")
    return EXIT_OK


def cmd_run(cfg: RunConfig) -> int:
    out = Path(cfg.output_dir)
    mutants_path = out / "mutants.jsonl"
    if not mutants_path.exists():
        raise CliError(f"{mutants_path} not found; run `oraclegap mutate` first")
    mutants = operators.read_mutants_jsonl(mutants_path)
    outcomes_path = out / "outcomes.jsonl"

    done: dict[str, executor.MutantOutcome] = {}
    if outcomes_path.exists():
        header, prior = executor.read_outcomes_jsonl(outcomes_path)
        if header.get("seed") == cfg.seed and header.get("test_command") == cfg.test_command:
            done = {o.mutant_id: o for o in prior}
            if done:
                print(f"resuming: {len(done)} outcomes already recorded")
        else:
            print("existing outcomes file is from a different campaign; restarting",
                  file=sys.stderr)

    remaining = [m for m in mutants if m.id not in done]
    campaign_cfg = cfg.campaign()
    try:
        baseline_ms = executor.baseline_check(cfg.project_root, campaign_cfg)
    except executor.RedBaselineError as exc:
        print(f"red baseline: {exc}", file=sys.stderr)
        return EXIT_RED_BASELINE

    timeout_ms = executor.campaign_timeout_ms(baseline_ms, campaign_cfg)
    header_doc = json.dumps({
        "seed": cfg.seed, "timeout_ms": timeout_ms, "baseline_ms": baseline_ms,
        "test_command": cfg.test_command,
        "started_at": "",
    }, sort_keys=True)
    if not done:
        _atomic_write(outcomes_path, header_doc + "\n")

    # Journal each outcome as it completes so an interrupted run resumes.
    def journal(outcome: executor.MutantOutcome) -> None:
        executor.append_outcomes_jsonl([outcome], outcomes_path)

    result = executor.run_campaign(cfg.project_root, remaining, campaign_cfg,
                                   baseline_ms=baseline_ms, progress=journal)
    done.update({o.mutant_id: o for o in result.outcomes})

    # Canonical rewrite: header plus one outcome per mutant, in mutant order.
    final = executor.CampaignResult(
        [done[m.id] for m in mutants if m.id in done],
        cfg.seed, timeout_ms, baseline_ms, cfg.test_command, result.started_at)
    fd, tmp = tempfile.mkstemp(dir=str(out), prefix="outcomes.")
    os.close(fd)
    executor.write_outcomes_jsonl(final, tmp)
    os.replace(tmp, outcomes_path)
    print(f"{len(final.outcomes)} outcomes -> {outcomes_path} "
          f"({final.counts})")
    return EXIT_OK


def _build_summary(cfg: RunConfig, timeout_as_kill: bool = True):
    out = Path(cfg.output_dir)
    cov = _read_coverage(cfg)
    mutants = operators.read_mutants_jsonl(out / "mutants.jsonl")
    _, outcomes = executor.read_outcomes_jsonl(out / "outcomes.jsonl")
    known = {m.id for m in mutants}
    stray = [o.mutant_id for o in outcomes if o.mutant_id not in known]
    if stray:
        raise CliError(
            f"outcomes file does not match mutants file ({len(stray)} unknown "
            f"mutant ids, first: {stray[0]})")
    missing = known - {o.mutant_id for o in outcomes}
    if missing:
        raise CliError(
            f"{len(missing)} mutants have no outcome yet; finish `oraclegap run` first")

    by_path: dict[str, list[operators.Mutant]] = {}
    for m in mutants:
        by_path.setdefault(m.path, []).append(m)
    outcome_by_id = {o.mutant_id: o for o in outcomes}
    reports = []
    for path in sorted(by_path):
        ms = by_path[path]
        os_ = [outcome_by_id[m.id] for m in ms]
        reports.append(metrics.build_file_report(path, cov, ms, os_,
                                                 timeout_as_kill=timeout_as_kill))
    return metrics.summarize_project(reports)


def _suspect_rule(args) -> report.SuspectRule:
    rule = report.SuspectRule()
    kwargs = {}
    if getattr(args, "suspect_min_coverage", None) is not None:
        kwargs["min_coverage"] = Fraction(args.suspect_min_coverage).limit_denominator(10000)
    if getattr(args, "suspect_max_score", None) is not None:
        kwargs["max_mutation_score"] = Fraction(args.suspect_max_score).limit_denominator(10000)
    if getattr(args, "suspect_scope", None) is not None:
        kwargs["scope"] = args.suspect_scope
    return report.SuspectRule(**kwargs) if kwargs else rule


def cmd_gap(cfg: RunConfig, args) -> int:
    summary = _build_summary(cfg, timeout_as_kill=not getattr(args, "timeout_survives", False))
    out = Path(cfg.output_dir)
    rule = _suspect_rule(args)
    _atomic_write(out / "gap.json", report.render(summary, "json"))
    _atomic_write(out / "gap.csv", report.render(summary, "csv"))
    sys.stdout.write(report.render(summary, "text", rule))
    if args.fail_on_suspect and report.flag_suspects(summary.files, rule):
        return EXIT_SUSPECTS
    return EXIT_OK


def cmd_rank(cfg: RunConfig) -> int:
    summary = metrics.read_summary_json(Path(cfg.output_dir) / "gap.json")
    ranked, without = report.rank_by_covered_gap(summary.files)
    for r in ranked:
        print(f"{report.fmt_points(r.covered_gap):>8}  {r.path}")
    if without:
        print("no covered gap:")
        for r in without:
            print(f"{'—':>8}  {r.path}")
    return EXIT_OK


def cmd_stats(cfg: RunConfig, gap_files: list[str]) -> int:
    paths = gap_files or [str(Path(cfg.output_dir) / "gap.json")]
    reports = []
    groups: dict[str, list[float]] = {}
    for path in paths:
        summary = metrics.read_summary_json(path)
        reports.extend(summary.files)
        groups[path] = [float(r.raw_gap) for r in summary.files
                        if r.raw_gap is not None]
    doc = stats.stats_document(reports)
    if len(paths) >= 2:
        try:
            within, overall = stats.grouped_variance(groups)
            doc["project_variance"] = {"mean_within_project": within,
                                       "overall": overall}
        except stats.StatsError:
            doc["project_variance"] = None
    out = Path(cfg.output_dir)
    _atomic_write(out / "stats.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _atomic_write(out / "stats_points.csv", stats.stats_points_csv(reports))
    for scope in ("raw", "covered"):
        section = doc[scope]
        reg = section["regression"]
        print(f"{scope:8s} n={section['n']:<5d} "
              + ("regression absent" if reg is None else
                 f"slope={reg['slope']:.4f} r={reg['r']:.4f} R2={reg['r_squared']:.4f}"))
        bv = section["bucket_variance"]
        cells = "  ".join(
            f"{name}: {'—' if v is None else format(v, '.2f')}"
            for name, v in bv["buckets"].items())
        print(f"         gap variance (population) {cells}")
    return EXIT_OK


def cmd_ablate(cfg: RunConfig, args) -> int:
    if not cfg.test_file_glob:
        raise CliError("ablate needs test_file_glob (config) or --test-file-glob")
    out = Path(cfg.output_dir)
    mutants = operators.read_mutants_jsonl(out / "mutants.jsonl")
    by_path: dict[str, list[operators.Mutant]] = {}
    for m in mutants:
        by_path.setdefault(m.path, []).append(m)

    root = Path(cfg.project_root)
    test_files = {}
    for match in sorted(globmod.glob(str(root / cfg.test_file_glob), recursive=True)):
        rel = os.path.relpath(match, root).replace(os.sep, "/")
        test_files[rel] = Path(match).read_text(encoding="utf-8")
    if not test_files:
        raise CliError(f"no test files match {cfg.test_file_glob!r} under {root}")

    assert_patterns = args.assert_pattern or list(ablation.DEFAULT_ASSERT_PATTERNS)
    test_patterns = args.test_pattern or list(ablation.DEFAULT_TEST_PATTERNS)
    sites = ablation.enumerate_knockout_sites(
        test_files, assert_patterns, test_patterns,
        warn=lambda msg: print(f"warning: {msg}", file=sys.stderr))
    grid = ablation.generate_grid(sites, cfg.ablation_samples, cfg.seed)

    base_cov = None if cfg.coverage_command else _read_coverage(cfg)
    try:
        results = ablation.run_ablation_grid(
            cfg.project_root, sorted(by_path), grid, cfg.campaign(), sites,
            by_path,
            coverage_command=cfg.coverage_command or None,
            coverage_report=cfg.coverage_report_path,
            base_coverage=base_cov,
            progress=lambda c: print(f"configuration {c.label}"))
    except executor.RedBaselineError as exc:
        print(f"red baseline: {exc}", file=sys.stderr)
        return EXIT_RED_BASELINE

    grid_dir = out / "ablation"
    grid_dir.mkdir(parents=True, exist_ok=True)
    for res in results:
        if res.failed:
            _atomic_write(grid_dir / f"{res.config.label}.failed.txt", res.detail + "\n")
            continue
        summary = metrics.summarize_project(list(res.reports))
        _atomic_write(grid_dir / f"gap-{res.config.label}.json",
                      report.render(summary, "json"))
    ablation.write_ablation_matrix(grid_dir / "ablation_matrix.json", results)
    print(f"ablation matrix -> {grid_dir / 'ablation_matrix.json'}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oraclegap",
        description="Measure the oracle gap: coverage minus mutation score.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--project-root", dest="project_root")
        p.add_argument("--output-dir", dest="output_dir")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--coverage-report-path", dest="coverage_report_path")

    p = sub.add_parser("mutate", help="sample files and generate mutants")
    common(p)
    p.add_argument("--language-tag", dest="language_tag")
    p.add_argument("--catalog-file", dest="catalog_file")
    p.add_argument("--mutant-cap", dest="mutant_cap", type=int)
    p.add_argument("--files-per-bucket", dest="files_per_bucket", type=int)
    p.add_argument("--file-cap", dest="file_cap", type=int)
    p.add_argument("--exclude", action="append",
                   help="line exclusion regex (repeatable)")
    p.add_argument("--exclude-log-lines", action="store_true",
                   help="skip likely log/message lines")

    p = sub.add_parser("run", help="evaluate mutants against the test suite")
    common(p)
    p.add_argument("--test-command", dest="test_command")
    p.add_argument("--build-command", dest="build_command")
    p.add_argument("--timeout-factor", dest="timeout_factor", type=float)

    p = sub.add_parser("gap", help="compute per-file and project gap reports")
    common(p)
    p.add_argument("--fail-on-suspect", action="store_true")
    p.add_argument("--timeout-survives", action="store_true",
                   help="count TIMEOUT verdicts as surviving instead of killed")
    p.add_argument("--suspect-min-coverage", type=float)
    p.add_argument("--suspect-max-score", type=float)
    p.add_argument("--suspect-scope", choices=("raw", "covered"))

    p = sub.add_parser("rank", help="rank files by covered oracle gap")
    common(p)

    p = sub.add_parser("stats", help="correlation/regression/variance analytics")
    common(p)
    p.add_argument("gap_files", nargs="*",
                   help="gap.json documents (default: output dir's)")

    p = sub.add_parser("ablate", help="assertion/test knockout grid")
    common(p)
    p.add_argument("--test-command", dest="test_command")
    p.add_argument("--build-command", dest="build_command")
    p.add_argument("--timeout-factor", dest="timeout_factor", type=float)
    p.add_argument("--test-file-glob", dest="test_file_glob")
    p.add_argument("--coverage-command", dest="coverage_command",
                   help="command regenerating the LCOV report per configuration")
    p.add_argument("--samples", dest="ablation_samples", type=int)
    p.add_argument("--assert-pattern", action="append")
    p.add_argument("--test-pattern", action="append")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "mutate":
            return cmd_mutate(cfg)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "gap":
            return cmd_gap(cfg, args)
        if args.command == "rank":
            return cmd_rank(cfg)
        if args.command == "stats":
            return cmd_stats(cfg, args.gap_files)
        if args.command == "ablate":
            return cmd_ablate(cfg, args)
        raise CliError(f"unknown command {args.command!r}")
    except (CliError, coverage.CoverageError, operators.OperatorError,
            metrics.MetricsError, stats.StatsError, ablation.AblationError,
            report.ReportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
