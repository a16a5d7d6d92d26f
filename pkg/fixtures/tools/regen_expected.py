#!/usr/bin/env python3
"""Regenerate each fixture's expected verdict and gap tables.

This is the independent oracle: every sampled mutant is applied by plain
string replacement and evaluated one at a time with a direct subprocess
run of the fixture's test command. The campaign engine is deliberately
not used here, so the expected tables can catch its bugs.

Usage: python3 fixtures/tools/regen_expected.py [fixture-name ...]
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

FIXTURES = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(FIXTURES.parent / "src"))

from oraclegap.fixtures import fixture_mutants, load_fixture  # noqa: E402
from oraclegap.operators import write_mutants_jsonl  # noqa: E402

MIN_TIMEOUT_S = 2.0


def parse_lcov_plain(text):
    """Line-by-line LCOV reading, independent of the package parser."""
    files, current = {}, None
    for raw in text.splitlines():
        raw = raw.strip()
        if raw.startswith("SF:"):
            current = files.setdefault(raw[3:], {})
        elif raw.startswith("DA:") and current is not None:
            line, hits = raw[3:].split(",")[:2]
            current[int(line)] = current.get(int(line), 0) + int(hits)
    return files


def evaluate_sequentially(fixture, mutants):
    verdicts = {}
    start = time.monotonic()
    subprocess.run(fixture.test_command, shell=True, cwd=fixture.root,
                   check=True, capture_output=True)
    baseline = time.monotonic() - start
    timeout = max(10 * baseline, MIN_TIMEOUT_S)

    with tempfile.TemporaryDirectory() as td:
        ws = Path(td) / "project"
        shutil.copytree(fixture.root, ws,
                        ignore=shutil.ignore_patterns("__pycache__", "expected"))
        for m in mutants:
            target = ws / m.path
            pristine = target.read_text(encoding="utf-8")
            lines = pristine.split("\n")
            assert lines[m.line - 1] == m.original, f"stale fixture mutant {m.id}"
            lines[m.line - 1] = m.mutated
            target.write_text("\n".join(lines), encoding="utf-8")
            try:
                proc = subprocess.run(fixture.test_command, shell=True, cwd=ws,
                                      capture_output=True, timeout=timeout)
                verdicts[m.id] = "SURVIVED" if proc.returncode == 0 else "KILLED"
            except subprocess.TimeoutExpired:
                verdicts[m.id] = "TIMEOUT"
            finally:
                target.write_text(pristine, encoding="utf-8")
    return verdicts


def tally_gap(fixture, by_file, verdicts):
    lcov = parse_lcov_plain(
        (fixture.root / fixture.coverage_report).read_text(encoding="utf-8"))
    files = {}
    for path, mutants in by_file.items():
        hits = lcov[path]
        covered = {line for line, h in hits.items() if h > 0}
        valid = killed = on_cov = killed_on_cov = 0
        for m in mutants:
            v = verdicts[m.id]
            if v == "INVALID":
                continue
            valid += 1
            kill = v in ("KILLED", "TIMEOUT")
            killed += kill
            if m.line in covered:
                on_cov += 1
                killed_on_cov += kill
        cov = Fraction(len(covered), len(hits))
        score = Fraction(killed, valid) if valid else None
        cscore = Fraction(killed_on_cov, on_cov) if on_cov else None
        files[path] = {
            "path": path,
            "coverage": float(cov),
            "lines_instrumented": len(hits),
            "lines_covered": len(covered),
            "mutants_total": len(mutants),
            "mutants_valid": valid,
            "mutants_on_covered_lines": on_cov,
            "killed": killed,
            "killed_on_covered_lines": killed_on_cov,
            "mutation_score": None if score is None else float(score),
            "covered_mutation_score": None if cscore is None else float(cscore),
            "raw_gap": None if score is None else float(100 * (cov - score)),
            "covered_gap": None if cscore is None else float(100 * (cov - cscore)),
        }
    return {"files": files}


def regenerate(name):
    fixture = load_fixture(FIXTURES / name)
    by_file = fixture_mutants(fixture)
    flat = [m for path in fixture.source_files for m in by_file[path]]
    print(f"{name}: {len(flat)} mutants, evaluating sequentially...")
    verdicts = evaluate_sequentially(fixture, flat)

    expected = fixture.root / "expected"
    expected.mkdir(exist_ok=True)
    write_mutants_jsonl(flat, expected / "mutants.jsonl")
    with open(expected / "outcomes.jsonl", "w", encoding="utf-8") as fh:
        for m in flat:
            fh.write(json.dumps({"mutant_id": m.id, "verdict": verdicts[m.id]},
                                sort_keys=True) + "\n")
    with open(expected / "gap.json", "w", encoding="utf-8") as fh:
        json.dump(tally_gap(fixture, by_file, verdicts), fh, indent=2, sort_keys=True)
        fh.write("\n")
    counts = {}
    for v in verdicts.values():
        counts[v] = counts.get(v, 0) + 1
    print(f"{name}: {counts}")


def main():
    names = sys.argv[1:] or [p.name for p in sorted(FIXTURES.iterdir())
                             if (p / "fixture.json").exists()]
    for name in names:
        regenerate(name)


if __name__ == "__main__":
    main()
