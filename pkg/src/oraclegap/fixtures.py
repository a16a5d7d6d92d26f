"""Bundled miniature projects used as the desk-scale test corpus.

Each fixture under ``fixtures/`` ships source files, a scripted test
suite, a precomputed LCOV tracefile, and expected verdict/gap tables.
The expected tables are produced by an independent sequential oracle
(``fixtures/tools/regen_expected.py``), never by the campaign engine,
so ``verify_fixture`` is a genuine cross-check of the pipeline.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .coverage import parse_lcov
from .executor import CampaignConfig, run_campaign
from .metrics import build_file_report, report_to_dict
from .operators import generate_mutants, load_operator_catalog, read_mutants_jsonl
from .sampling import BucketPlan, sample_mutants


class FixtureError(Exception):
    pass


@dataclass
class FixtureProject:
    root: Path
    name: str
    language_tag: str
    test_command: str
    coverage_report: str
    coverage_command: str
    seed: int
    mutant_cap: int
    source_files: list[str]
    test_file_glob: str


def default_fixture_root() -> Path:
    env = os.environ.get("ORACLE_GAP_FIXTURES")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "fixtures"


def load_fixture(root) -> FixtureProject:
    root = Path(root)
    meta_path = root / "fixture.json"
    if not meta_path.exists():
        raise FixtureError(f"{root} is not a fixture (no fixture.json)")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    return FixtureProject(
        root=root, name=meta["name"], language_tag=meta["language_tag"],
        test_command=meta["test_command"],
        coverage_report=meta["coverage_report"],
        coverage_command=meta.get("coverage_command", ""),
        seed=meta["seed"], mutant_cap=meta["mutant_cap"],
        source_files=list(meta["source_files"]),
        test_file_glob=meta["test_file_glob"])


def fixture_mutants(fixture: FixtureProject):
    """The deterministic sampled mutant set for each fixture source file."""
    ops = load_operator_catalog(fixture.language_tag)
    plan = BucketPlan(mutant_cap=fixture.mutant_cap, seed=fixture.seed)
    by_file = {}
    for path in fixture.source_files:
        text = (fixture.root / path).read_text(encoding="utf-8")
        generated = generate_mutants(text, path, ops,
                                     language_tag=fixture.language_tag)
        by_file[path] = sample_mutants(generated, plan, salt=path)
    return by_file


@dataclass
class VerifyResult:
    passed: bool
    mismatches: list[str]

    def first(self) -> str:
        return self.mismatches[0] if self.mismatches else ""


def verify_fixture(fixture: FixtureProject, jobs: int = 2) -> VerifyResult:
    """Run the full pipeline and diff against the fixture's expected tables."""
    mismatches: list[str] = []
    expected_dir = fixture.root / "expected"
    expected_mutants = read_mutants_jsonl(expected_dir / "mutants.jsonl")
    expected_verdicts = {}
    with open(expected_dir / "outcomes.jsonl", encoding="utf-8") as fh:
        for raw in fh:
            if raw.strip():
                rec = json.loads(raw)
                expected_verdicts[rec["mutant_id"]] = rec["verdict"]
    expected_gap = json.loads((expected_dir / "gap.json").read_text(encoding="utf-8"))

    by_file = fixture_mutants(fixture)
    flat = [m for path in fixture.source_files for m in by_file[path]]
    if [m.id for m in flat] != [m.id for m in expected_mutants]:
        mismatches.append("mutant list differs from expected/mutants.jsonl")

    config = CampaignConfig(test_command=fixture.test_command,
                            jobs=jobs, seed=fixture.seed)
    campaign = run_campaign(fixture.root, flat, config)
    for outcome in campaign.outcomes:
        want = expected_verdicts.get(outcome.mutant_id)
        if want is None:
            mismatches.append(f"unexpected outcome for {outcome.mutant_id}")
        elif outcome.verdict != want:
            mismatches.append(
                f"{outcome.mutant_id}: verdict {outcome.verdict}, expected {want}")

    cov = parse_lcov((fixture.root / fixture.coverage_report).read_text(encoding="utf-8"))
    outcome_by_id = {o.mutant_id: o for o in campaign.outcomes}
    for path in fixture.source_files:
        mutants = by_file[path]
        outcomes = [outcome_by_id[m.id] for m in mutants if m.id in outcome_by_id]
        got = report_to_dict(build_file_report(path, cov, mutants, outcomes))
        want = expected_gap["files"].get(path)
        if want is None:
            mismatches.append(f"no expected gap record for {path}")
            continue
        for key, expected_value in want.items():
            if got.get(key) != expected_value:
                mismatches.append(
                    f"{path}.{key}: got {got.get(key)!r}, expected {expected_value!r}")
    return VerifyResult(not mismatches, mismatches)
