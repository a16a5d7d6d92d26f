from __future__ import annotations

import json
import shutil

import pytest

from oraclegap import cli
from oraclegap.metrics import report_from_dict, summarize_project, write_summary_json
from oraclegap.sampling import read_manifest

from conftest import FIXTURES


def copy_fixture(name, tmp_path):
    root = tmp_path / name
    shutil.copytree(FIXTURES / name, root,
                    ignore=shutil.ignore_patterns("expected", "__pycache__"))
    return root


def base_args(root, out):
    return ["--project-root", str(root), "--output-dir", str(out), "--seed", "1"]


def pipeline(tmp_path, name="asserted", jobs="2"):
    root = copy_fixture(name, tmp_path)
    out = tmp_path / "out"
    meta = json.loads((FIXTURES / name / "fixture.json").read_text())
    assert cli.main(["mutate", *base_args(root, out),
                     "--language-tag", "python"]) == 0
    assert cli.main(["run", *base_args(root, out), "--jobs", jobs,
                     "--test-command", meta["test_command"]]) == 0
    return root, out, meta


class TestConfigHandling:
    def test_key_value_file_with_types(self, tmp_path):
        cfg_file = tmp_path / "oraclegap.cfg"
        cfg_file.write_text(
            "# comment\n"
            "seed = 9\n"
            "jobs=4\n"
            "timeout_factor = 2.5\n"
            "exclude_log_lines = true\n"
            "exclusion_patterns = foo\n"
            "exclusion_patterns = bar\n"
            "test_command = make check\n", encoding="utf-8")
        values = cli.load_config_file(cfg_file)
        assert values == {"seed": 9, "jobs": 4, "timeout_factor": 2.5,
                          "exclude_log_lines": True,
                          "exclusion_patterns": ["foo", "bar"],
                          "test_command": "make check"}

    def test_flags_override_file(self, tmp_path):
        cfg_file = tmp_path / "cfg"
        cfg_file.write_text("seed = 9\njobs = 4\n", encoding="utf-8")
        args = cli.make_parser().parse_args(
            ["run", "--config", str(cfg_file), "--seed", "2"])
        cfg = cli.build_config(args)
        assert cfg.seed == 2 and cfg.jobs == 4

    def test_malformed_line_rejected(self, tmp_path):
        cfg_file = tmp_path / "cfg"
        cfg_file.write_text("not a pair\n", encoding="utf-8")
        with pytest.raises(cli.CliError, match="key=value"):
            cli.load_config_file(cfg_file)

    def test_unknown_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "cfg"
        cfg_file.write_text("sede = 1\n", encoding="utf-8")
        args = cli.make_parser().parse_args(["run", "--config", str(cfg_file)])
        with pytest.raises(cli.CliError, match="unknown config key"):
            cli.build_config(args)


class TestMutate:
    def test_writes_manifest_and_mutants(self, tmp_path):
        root = copy_fixture("asserted", tmp_path)
        out = tmp_path / "out"
        assert cli.main(["mutate", *base_args(root, out),
                         "--language-tag", "python"]) == 0
        manifest = read_manifest(out / "manifest.json")
        assert manifest["seed"] == 1
        assert "src/mathops.py" in manifest["mutants_per_file"]
        lines = (out / "mutants.jsonl").read_text().strip().splitlines()
        assert lines and all(json.loads(l)["path"] == "src/mathops.py"
                             for l in lines)

    def test_missing_coverage_report_is_a_clear_error(self, tmp_path, capsys):
        assert cli.main(["mutate", "--project-root", str(tmp_path),
                         "--output-dir", str(tmp_path / "out")]) == 1
        assert "coverage report not found" in capsys.readouterr().err


class TestRunAndGap:
    def test_full_pipeline_matches_expected_tables(self, tmp_path, capsys):
        root, out, meta = pipeline(tmp_path)
        assert cli.main(["gap", *base_args(root, out)]) == 0
        got = json.loads((out / "gap.json").read_text())
        want = json.loads(
            (FIXTURES / "asserted" / "expected" / "gap.json").read_text())
        assert got["files"][0] == want["files"]["src/mathops.py"]
        assert (out / "gap.csv").exists()
        assert "src/mathops.py" in capsys.readouterr().out

    def test_run_without_mutants_is_an_error(self, tmp_path, capsys):
        root = copy_fixture("asserted", tmp_path)
        assert cli.main(["run", *base_args(root, tmp_path / "out"),
                         "--test-command", "true"]) == 1
        assert "oraclegap mutate" in capsys.readouterr().err

    def test_red_baseline_exits_3(self, tmp_path, capsys):
        root = copy_fixture("asserted", tmp_path)
        out = tmp_path / "out"
        assert cli.main(["mutate", *base_args(root, out),
                         "--language-tag", "python"]) == 0
        assert cli.main(["run", *base_args(root, out),
                         "--test-command", "exit 7"]) == 3
        assert "red baseline" in capsys.readouterr().err

    def test_interrupted_run_resumes(self, tmp_path, capsys):
        root, out, meta = pipeline(tmp_path)
        outcomes_path = out / "outcomes.jsonl"
        full = outcomes_path.read_text().splitlines()
        outcomes_path.write_text("\n".join(full[:6]) + "\n", encoding="utf-8")
        assert cli.main(["run", *base_args(root, out), "--jobs", "2",
                         "--test-command", meta["test_command"]]) == 0
        assert "resuming: 5 outcomes already recorded" in capsys.readouterr().out
        resumed = outcomes_path.read_text().splitlines()
        assert [json.loads(l).get("mutant_id") for l in resumed] == \
            [json.loads(l).get("mutant_id") for l in full]
        assert [json.loads(l).get("verdict") for l in resumed] == \
            [json.loads(l).get("verdict") for l in full]

    def test_changed_campaign_restarts_instead_of_resuming(self, tmp_path, capsys):
        root, out, meta = pipeline(tmp_path)
        before = (out / "outcomes.jsonl").read_text().splitlines()
        assert cli.main(["run", *base_args(root, out)[:-2], "--seed", "2",
                         "--jobs", "2",
                         "--test-command", meta["test_command"]]) == 0
        captured = capsys.readouterr()
        assert "different campaign" in captured.err
        after = (out / "outcomes.jsonl").read_text().splitlines()
        assert json.loads(after[0])["seed"] == 2
        assert len(after) == len(before)

    def test_incomplete_outcomes_block_gap(self, tmp_path, capsys):
        root, out, meta = pipeline(tmp_path)
        outcomes_path = out / "outcomes.jsonl"
        lines = outcomes_path.read_text().splitlines()
        outcomes_path.write_text("\n".join(lines[:3]) + "\n", encoding="utf-8")
        assert cli.main(["gap", *base_args(root, out)]) == 1
        assert "no outcome yet" in capsys.readouterr().err

    def test_stray_outcome_blocks_gap(self, tmp_path, capsys):
        root, out, meta = pipeline(tmp_path)
        with open(out / "outcomes.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"mutant_id": "ghost:1:op:0",
                                 "verdict": "KILLED", "duration_ms": 1}) + "\n")
        assert cli.main(["gap", *base_args(root, out)]) == 1
        assert "does not match" in capsys.readouterr().err


def synthetic_summary(paths_covs_scores):
    reports = []
    for path, (cov_n, cov_d), (k, v) in paths_covs_scores:
        reports.append(report_from_dict({
            "path": path, "coverage": cov_n / cov_d,
            "lines_instrumented": cov_d, "lines_covered": cov_n,
            "mutants_total": v, "mutants_valid": v,
            "mutants_on_covered_lines": v, "killed": k,
            "killed_on_covered_lines": k, "mutation_score": k / v,
            "covered_mutation_score": k / v, "raw_gap": None,
            "covered_gap": None}))
    return summarize_project(reports)


class TestRankAndStats:
    def test_rank_orders_by_covered_gap(self, tmp_path, capsys):
        out = tmp_path / "out"
        out.mkdir()
        summary = synthetic_summary([
            ("small.py", (9, 10), (8, 10)),
            ("large.py", (9, 10), (1, 10)),
        ])
        write_summary_json(summary, out / "gap.json")
        assert cli.main(["rank", "--output-dir", str(out)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].endswith("large.py") and lines[0].startswith("    80.0")
        assert lines[1].endswith("small.py")

    def test_stats_over_multiple_projects(self, tmp_path, capsys):
        out = tmp_path / "out"
        out.mkdir()
        a, b = out / "a.json", out / "b.json"
        write_summary_json(synthetic_summary([
            ("a1.py", (9, 10), (8, 10)), ("a2.py", (5, 10), (4, 10)),
        ]), a)
        write_summary_json(synthetic_summary([
            ("b1.py", (8, 10), (2, 10)), ("b2.py", (3, 10), (1, 10)),
        ]), b)
        assert cli.main(["stats", "--output-dir", str(out),
                         str(a), str(b)]) == 0
        doc = json.loads((out / "stats.json").read_text())
        assert doc["raw"]["n"] == 4
        assert doc["raw"]["regression"] is not None
        assert doc["project_variance"] is not None
        assert (out / "stats_points.csv").exists()
        assert "slope=" in capsys.readouterr().out

    def test_suspect_thresholds_are_configurable(self, tmp_path, capsys):
        root, out, meta = pipeline(tmp_path)
        # the fixture's score (~84%) is healthy under the default rule but
        # falls below an artificially strict threshold
        assert cli.main(["gap", *base_args(root, out),
                         "--fail-on-suspect"]) == 0
        capsys.readouterr()
        assert cli.main(["gap", *base_args(root, out), "--fail-on-suspect",
                         "--suspect-min-coverage", "0.95",
                         "--suspect-max-score", "0.9"]) == 2
        assert "suspects:" in capsys.readouterr().out


def test_unknown_subcommand_rejected_by_parser():
    with pytest.raises(SystemExit):
        cli.main(["frobnicate"])
