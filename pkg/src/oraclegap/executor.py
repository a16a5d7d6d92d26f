"""Mutant evaluation: isolated workspaces, build/test runs, verdicts.

Each mutant is applied inside a private copy of the project tree, the
project's own build/test commands are run through the shell, and the
exit status decides the verdict. Timeouts are their own verdict so the
scoring policy (count them as kills or not) stays a metrics decision.
"""

from __future__ import annotations

import concurrent.futures
import json
import os
import queue
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .operators import Mutant, StaleMutantError, apply_mutant

KILLED = "KILLED"
SURVIVED = "SURVIVED"
TIMEOUT = "TIMEOUT"
INVALID = "INVALID"
VERDICTS = (KILLED, SURVIVED, TIMEOUT, INVALID)

# Floor below which the campaign timeout never drops, so that a fast
# baseline on a loaded machine cannot misclassify slow-but-passing runs.
MIN_TIMEOUT_MS = 2000

MUTANT_ID_ENV = "ORACLE_GAP_MUTANT_ID"


class ExecutorError(Exception):
    pass


class RedBaselineError(ExecutorError):
    """The unmutated project fails to build or test; a campaign is meaningless."""


@dataclass(frozen=True)
class MutantOutcome:
    mutant_id: str
    verdict: str
    duration_ms: int
    detail: str = ""


@dataclass
class CampaignConfig:
    test_command: str
    build_command: str | None = None
    timeout_factor: float = 10.0
    jobs: int = 1
    seed: int = 0
    workspace_root: str | None = None

    def __post_init__(self):
        if self.timeout_factor <= 0:
            raise ValueError("timeout_factor must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass
class CampaignResult:
    outcomes: list[MutantOutcome]
    seed: int
    timeout_ms: int
    baseline_ms: int
    test_command: str
    started_at: str = ""
    counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.counts:
            self.counts = {v: 0 for v in VERDICTS}
            for o in self.outcomes:
                self.counts[o.verdict] += 1


def _run_shell(command: str, cwd: Path, timeout_ms: int | None,
               extra_env: dict[str, str] | None = None):
    env = dict(os.environ)
    if extra_env:
        env.update(extra_env)
    timeout = timeout_ms / 1000.0 if timeout_ms is not None else None
    return subprocess.run(
        command, shell=True, cwd=str(cwd), env=env,
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, timeout=timeout)


def _tail(data: bytes, limit: int = 300) -> str:
    text = data.decode("utf-8", errors="replace").strip()
    return text[-limit:]


def baseline_check(project_root, config: CampaignConfig) -> int:
    """Wall-clock one clean build+test run; raises on any failure."""
    root = Path(project_root)
    start = time.monotonic()
    if config.build_command:
        proc = _run_shell(config.build_command, root, None)
        if proc.returncode != 0:
            raise RedBaselineError(
                f"baseline build failed (exit {proc.returncode}): {_tail(proc.stdout)}")
    proc = _run_shell(config.test_command, root, None)
    if proc.returncode != 0:
        raise RedBaselineError(
            f"baseline tests failed (exit {proc.returncode}): {_tail(proc.stdout)}")
    return max(1, int((time.monotonic() - start) * 1000))


def campaign_timeout_ms(baseline_ms: int, config: CampaignConfig) -> int:
    return max(int(baseline_ms * config.timeout_factor), MIN_TIMEOUT_MS)


def evaluate_mutant(workspace, mutant: Mutant, config: CampaignConfig,
                    timeout_ms: int) -> MutantOutcome:
    """Apply, build, test, restore. The workspace is pristine again on return."""
    ws = Path(workspace)
    target = ws / mutant.path
    start = time.monotonic()

    def done(verdict: str, detail: str) -> MutantOutcome:
        elapsed = int((time.monotonic() - start) * 1000)
        if verdict != TIMEOUT:
            elapsed = min(elapsed, timeout_ms)
        return MutantOutcome(mutant.id, verdict, elapsed, detail)

    try:
        original_text = target.read_text(encoding="utf-8")
    except OSError as exc:
        return done(INVALID, f"unreadable target: {exc}")
    try:
        mutated_text = apply_mutant(original_text, mutant)
    except StaleMutantError as exc:
        return done(INVALID, f"stale: {exc}")

    target.write_text(mutated_text, encoding="utf-8")
    env = {MUTANT_ID_ENV: mutant.id}
    try:
        if config.build_command:
            try:
                proc = _run_shell(config.build_command, ws, timeout_ms, env)
            except subprocess.TimeoutExpired:
                return done(TIMEOUT, "build timeout")
            if proc.returncode != 0:
                return done(INVALID, f"build exit {proc.returncode}: {_tail(proc.stdout)}")
        try:
            proc = _run_shell(config.test_command, ws, timeout_ms, env)
        except subprocess.TimeoutExpired:
            return done(TIMEOUT, f"test timeout after {timeout_ms}ms")
        if proc.returncode != 0:
            return done(KILLED, f"test exit {proc.returncode}")
        return done(SURVIVED, "test exit 0")
    finally:
        target.write_text(original_text, encoding="utf-8")


def _provision_workspaces(project_root: Path, config: CampaignConfig,
                          count: int) -> tuple[Path, list[Path]]:
    base = Path(tempfile.mkdtemp(prefix="oraclegap-", dir=config.workspace_root))
    workspaces = []
    for i in range(count):
        ws = base / f"ws{i}"
        shutil.copytree(project_root, ws, symlinks=True,
                        ignore=shutil.ignore_patterns(".git", "__pycache__"))
        workspaces.append(ws)
    return base, workspaces


def run_campaign(project_root, mutants: Sequence[Mutant],
                 config: CampaignConfig,
                 baseline_ms: int | None = None,
                 progress=None) -> CampaignResult:
    """One outcome per mutant, in input order regardless of scheduling.

    Per-mutant failures become INVALID outcomes; only workspace
    provisioning problems abort the campaign.
    """
    root = Path(project_root)
    if baseline_ms is None:
        baseline_ms = baseline_check(root, config)
    timeout_ms = campaign_timeout_ms(baseline_ms, config)
    started_at = time.strftime("%Y-%m-%dT%H:%M:%S%z")

    if not mutants:
        return CampaignResult([], config.seed, timeout_ms, baseline_ms,
                              config.test_command, started_at)

    jobs = min(config.jobs, len(mutants))
    try:
        base, workspaces = _provision_workspaces(root, config, jobs)
    except OSError as exc:
        raise ExecutorError(f"workspace provisioning failed: {exc}") from exc

    pool: queue.SimpleQueue[Path] = queue.SimpleQueue()
    for ws in workspaces:
        pool.put(ws)

    def job(index: int, mutant: Mutant) -> tuple[int, MutantOutcome]:
        ws = pool.get()
        try:
            try:
                outcome = evaluate_mutant(ws, mutant, config, timeout_ms)
            except Exception as exc:  # never abort the campaign for one mutant
                outcome = MutantOutcome(mutant.id, INVALID, 0, f"evaluator error: {exc}")
            if progress:
                progress(outcome)
            return index, outcome
        finally:
            pool.put(ws)

    results: list[MutantOutcome | None] = [None] * len(mutants)
    try:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as ex:
            futures = [ex.submit(job, i, m) for i, m in enumerate(mutants)]
            for fut in concurrent.futures.as_completed(futures):
                index, outcome = fut.result()
                results[index] = outcome
    finally:
        shutil.rmtree(base, ignore_errors=True)

    return CampaignResult([o for o in results if o is not None],
                          config.seed, timeout_ms, baseline_ms,
                          config.test_command, started_at)


def write_outcomes_jsonl(result: CampaignResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "seed": result.seed, "timeout_ms": result.timeout_ms,
            "baseline_ms": result.baseline_ms,
            "test_command": result.test_command,
            "started_at": result.started_at,
        }, sort_keys=True) + "\n")
        for o in result.outcomes:
            fh.write(json.dumps({
                "mutant_id": o.mutant_id, "verdict": o.verdict,
                "duration_ms": o.duration_ms, "detail": o.detail,
            }, sort_keys=True) + "\n")


def append_outcomes_jsonl(outcomes: Iterable[MutantOutcome], path) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for o in outcomes:
            fh.write(json.dumps({
                "mutant_id": o.mutant_id, "verdict": o.verdict,
                "duration_ms": o.duration_ms, "detail": o.detail,
            }, sort_keys=True) + "\n")


def read_outcomes_jsonl(path) -> tuple[dict, list[MutantOutcome]]:
    """Returns (campaign header, outcomes)."""
    header: dict = {}
    outcomes: list[MutantOutcome] = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            rec = json.loads(raw)
            if "mutant_id" in rec:
                outcomes.append(MutantOutcome(
                    rec["mutant_id"], rec["verdict"],
                    rec["duration_ms"], rec.get("detail", "")))
            else:
                header = rec
    return header, outcomes
