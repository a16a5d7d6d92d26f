from __future__ import annotations

import pytest

from oraclegap.executor import (INVALID, KILLED, MIN_TIMEOUT_MS, MUTANT_ID_ENV,
                                SURVIVED, CampaignConfig, CampaignResult,
                                MutantOutcome, RedBaselineError,
                                baseline_check, campaign_timeout_ms,
                                evaluate_mutant, read_outcomes_jsonl,
                                run_campaign, write_outcomes_jsonl)
from oraclegap.operators import Mutant

SRC = """\
def double(x):
    return x + x

def shift(x):
    return x + 1
"""

TESTS = """\
import sys
sys.path.insert(0, "src")
from m import double, shift
assert double(2) == 4
shift(1)  # executed but never checked
print("ok")
"""


@pytest.fixture
def project(tmp_path):
    (tmp_path / "src").mkdir()
    (tmp_path / "src" / "m.py").write_text(SRC, encoding="utf-8")
    (tmp_path / "run_tests.py").write_text(TESTS, encoding="utf-8")
    return tmp_path


CONFIG = CampaignConfig(test_command="python3 -B run_tests.py", jobs=2, seed=1)

KILLABLE = Mutant("src/m.py:2:arith-plus:0", "src/m.py", 2,
                  "    return x + x", "    return x - x", "arith-plus")
SURVIVOR = Mutant("src/m.py:5:arith-plus:0", "src/m.py", 5,
                  "    return x + 1", "    return x - 1", "arith-plus")
STALE = Mutant("src/m.py:2:arith-plus:1", "src/m.py", 2,
               "    return x * x", "    return x / x", "arith-plus")


class TestBaseline:
    def test_green_baseline_returns_duration(self, project):
        assert baseline_check(project, CONFIG) >= 1

    def test_red_baseline_raises_with_output(self, project):
        (project / "run_tests.py").write_text("raise SystemExit(3)\n",
                                              encoding="utf-8")
        with pytest.raises(RedBaselineError, match="exit 3"):
            baseline_check(project, CONFIG)

    def test_red_build_raises(self, project):
        cfg = CampaignConfig(test_command=CONFIG.test_command,
                             build_command="exit 2")
        with pytest.raises(RedBaselineError, match="build failed"):
            baseline_check(project, cfg)

    def test_timeout_floor(self):
        assert campaign_timeout_ms(5, CONFIG) == MIN_TIMEOUT_MS
        assert campaign_timeout_ms(1000, CONFIG) == 10000


class TestEvaluate:
    def test_kill_and_survive_verdicts(self, project):
        assert evaluate_mutant(project, KILLABLE, CONFIG, 5000).verdict == KILLED
        assert evaluate_mutant(project, SURVIVOR, CONFIG, 5000).verdict == SURVIVED

    def test_workspace_restored_after_each_mutant(self, project):
        before = (project / "src" / "m.py").read_text(encoding="utf-8")
        evaluate_mutant(project, KILLABLE, CONFIG, 5000)
        assert (project / "src" / "m.py").read_text(encoding="utf-8") == before

    def test_stale_mutant_is_invalid(self, project):
        out = evaluate_mutant(project, STALE, CONFIG, 5000)
        assert out.verdict == INVALID and "stale" in out.detail

    def test_build_failure_is_invalid(self, project):
        cfg = CampaignConfig(test_command=CONFIG.test_command,
                             build_command="python3 -m py_compile src/m.py")
        broken = Mutant("src/m.py:1:x:0", "src/m.py", 1,
                        "def double(x):", "def double(x:", "x")
        out = evaluate_mutant(project, broken, cfg, 5000)
        assert out.verdict == INVALID and "build exit" in out.detail

    def test_mutant_id_exported_to_test_process(self, project):
        probe = (f"import os\nassert os.environ.get({MUTANT_ID_ENV!r}) == "
                 f"{KILLABLE.id!r}\n")
        (project / "run_tests.py").write_text(probe, encoding="utf-8")
        cfg = CampaignConfig(test_command="python3 -B run_tests.py")
        # mutating an unrelated line: only the env check decides the verdict
        assert evaluate_mutant(project, SURVIVOR, cfg, 5000).verdict == KILLED
        assert evaluate_mutant(project, KILLABLE, cfg, 5000).verdict == SURVIVED


class TestCampaign:
    MUTANTS = [KILLABLE, SURVIVOR, STALE]

    def test_outcomes_in_input_order_with_counts(self, project):
        result = run_campaign(project, self.MUTANTS, CONFIG)
        assert [o.mutant_id for o in result.outcomes] == [m.id for m in self.MUTANTS]
        assert [o.verdict for o in result.outcomes] == [KILLED, SURVIVED, INVALID]
        assert result.counts == {KILLED: 1, SURVIVED: 1, INVALID: 1, "TIMEOUT": 0}

    def test_verdicts_independent_of_jobs(self, project):
        seq = run_campaign(project, self.MUTANTS,
                           CampaignConfig(test_command=CONFIG.test_command, jobs=1))
        par = run_campaign(project, self.MUTANTS,
                           CampaignConfig(test_command=CONFIG.test_command, jobs=3))
        assert [(o.mutant_id, o.verdict) for o in seq.outcomes] == \
            [(o.mutant_id, o.verdict) for o in par.outcomes]

    def test_empty_campaign(self, project):
        result = run_campaign(project, [], CONFIG)
        assert result.outcomes == []

    def test_red_baseline_propagates(self, project):
        (project / "run_tests.py").write_text("raise SystemExit(1)\n",
                                              encoding="utf-8")
        with pytest.raises(RedBaselineError):
            run_campaign(project, self.MUTANTS, CONFIG)

    def test_progress_callback_sees_every_outcome(self, project):
        seen = []
        run_campaign(project, self.MUTANTS, CONFIG, progress=seen.append)
        assert sorted(o.mutant_id for o in seen) == sorted(m.id for m in self.MUTANTS)

    def test_project_tree_untouched(self, project):
        before = {p: p.read_bytes() for p in project.rglob("*") if p.is_file()}
        run_campaign(project, self.MUTANTS, CONFIG)
        after = {p: p.read_bytes() for p in project.rglob("*") if p.is_file()}
        assert after == before


class TestSerialization:
    def test_outcomes_jsonl_round_trip(self, tmp_path):
        result = CampaignResult(
            [MutantOutcome("a", KILLED, 12, "test exit 1"),
             MutantOutcome("b", SURVIVED, 30)],
            seed=5, timeout_ms=2000, baseline_ms=100,
            test_command="make test", started_at="2026-01-01T00:00:00+0000")
        path = tmp_path / "outcomes.jsonl"
        write_outcomes_jsonl(result, path)
        header, outcomes = read_outcomes_jsonl(path)
        assert header["seed"] == 5
        assert header["test_command"] == "make test"
        assert outcomes == result.outcomes

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CampaignConfig(test_command="x", jobs=0)
        with pytest.raises(ValueError):
            CampaignConfig(test_command="x", timeout_factor=0)
