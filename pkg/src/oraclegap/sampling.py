"""Stratified file sampling and per-file mutant sampling.

All randomness flows from a single 64-bit seed through Python's
``random.Random`` (Mersenne Twister), which has a fixed, documented
algorithm, so samples reproduce across runs and platforms. Per-file
mutant draws are salted with the file path so different files get
independent (but still seed-determined) samples.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .coverage import CoverageMap, NoCoverageData, file_line_coverage
from .operators import Mutant

# Half-open coverage-percent intervals except the last; boundary values go up.
BUCKETS: tuple[tuple[int, int], ...] = ((0, 25), (25, 50), (50, 75), (75, 100))


@dataclass
class BucketPlan:
    per_bucket: int = 25
    mutant_cap: int = 100
    file_cap: int = 100
    seed: int = 0
    buckets: tuple[tuple[int, int], ...] = BUCKETS

    def __post_init__(self):
        if min(self.per_bucket, self.mutant_cap, self.file_cap) < 1:
            raise ValueError("caps must be >= 1")


def bucket_for(coverage: Fraction | float) -> tuple[int, int]:
    pct = coverage * 100
    for lo, hi in BUCKETS[:-1]:
        if lo <= pct < hi:
            return (lo, hi)
    return BUCKETS[-1]


def bucket_files(coverage_map: CoverageMap) -> dict[tuple[int, int], list[str]]:
    """Every coverable file in exactly one bucket, paths sorted."""
    buckets: dict[tuple[int, int], list[str]] = {b: [] for b in BUCKETS}
    for path in coverage_map.paths():
        try:
            cov = file_line_coverage(coverage_map, path)
        except NoCoverageData:
            continue
        buckets[bucket_for(cov)].append(path)
    return buckets


def _derive_rng(seed: int, salt: str) -> random.Random:
    digest = hashlib.blake2b(f"{seed}:{salt}".encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def sample_files(buckets: Mapping[tuple[int, int], Sequence[str]],
                 plan: BucketPlan) -> list[str]:
    """Up to ``per_bucket`` files per bucket, at most ``file_cap`` overall."""
    selected: list[str] = []
    for bucket in plan.buckets:
        paths = sorted(buckets.get(bucket, ()))
        if len(paths) <= plan.per_bucket:
            chosen = paths
        else:
            rng = _derive_rng(plan.seed, f"files:{bucket[0]}-{bucket[1]}")
            chosen = sorted(rng.sample(paths, plan.per_bucket))
        selected.extend(chosen)
    return selected[: plan.file_cap]


def sample_mutants(mutants: Sequence[Mutant], plan: BucketPlan,
                   salt: str = "") -> list[Mutant]:
    """min(mutant_cap, all) mutants, returned in generation order."""
    if len(mutants) <= plan.mutant_cap:
        return list(mutants)
    rng = _derive_rng(plan.seed, f"mutants:{salt}")
    indices = sorted(rng.sample(range(len(mutants)), plan.mutant_cap))
    return [mutants[i] for i in indices]


def write_manifest(path, plan: BucketPlan,
                   selected_files: Mapping[tuple[int, int], Sequence[str]],
                   mutant_ids: Mapping[str, Sequence[str]]) -> None:
    doc = {
        "seed": plan.seed,
        "plan": {
            "per_bucket": plan.per_bucket,
            "mutant_cap": plan.mutant_cap,
            "file_cap": plan.file_cap,
            "buckets": [list(b) for b in plan.buckets],
        },
        "files_per_bucket": {
            f"{lo}-{hi}": list(paths)
            for (lo, hi), paths in sorted(selected_files.items())
        },
        "mutants_per_file": {p: list(ids) for p, ids in sorted(mutant_ids.items())},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
