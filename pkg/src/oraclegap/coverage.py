"""LCOV tracefile parsing and per-file line-coverage queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class CoverageError(Exception):
    """Raised for malformed tracefiles or missing coverage data."""


class NoCoverageData(CoverageError):
    """No usable coverage entry for the requested path."""


@dataclass
class FileCoverage:
    # line -> accumulated hit count; instrumented = keys, covered = hits > 0
    hits: dict[int, int] = field(default_factory=dict)

    @property
    def instrumented(self) -> set[int]:
        return set(self.hits)

    @property
    def covered(self) -> set[int]:
        return {line for line, h in self.hits.items() if h > 0}


@dataclass
class CoverageMap:
    entries: dict[str, FileCoverage] = field(default_factory=dict)

    def paths(self) -> list[str]:
        return sorted(self.entries)


def _normalize_path(path: str) -> str:
    path = path.replace("\\", "/")
    while path.startswith("./"):
        path = path[2:]
    return path


def parse_lcov(report_text: str) -> CoverageMap:
    """Parse an LCOV tracefile.

    Only ``SF:``/``DA:``/``end_of_record`` carry information; ``TN:``,
    ``LF:`` and ``LH:`` are accepted and ignored (totals are recomputed
    from the ``DA`` records). Duplicate ``DA`` lines and duplicate ``SF``
    sections merge by summing hit counts.
    """
    cov = CoverageMap()
    current: FileCoverage | None = None
    for lineno, raw in enumerate(report_text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("SF:"):
            path = _normalize_path(line[3:].strip())
            current = cov.entries.setdefault(path, FileCoverage())
        elif line.startswith("DA:"):
            if current is None:
                raise CoverageError(f"line {lineno}: DA record before any SF record")
            body = line[3:]
            parts = body.split(",")
            if len(parts) < 2:
                raise CoverageError(f"line {lineno}: malformed DA record {line!r}")
            try:
                da_line = int(parts[0])
                da_hits = int(parts[1])
            except ValueError:
                raise CoverageError(f"line {lineno}: malformed DA record {line!r}") from None
            if da_line < 1 or da_hits < 0:
                raise CoverageError(f"line {lineno}: malformed DA record {line!r}")
            current.hits[da_line] = current.hits.get(da_line, 0) + da_hits
        elif line == "end_of_record":
            current = None
        elif line.startswith(("TN:", "LF:", "LH:", "FN:", "FNDA:", "FNF:", "FNH:",
                              "BRDA:", "BRF:", "BRH:")):
            continue
        else:
            raise CoverageError(f"line {lineno}: unrecognized record {line!r}")
    return cov


def render_lcov(cov: CoverageMap) -> str:
    """Canonical renderer: sorted paths, sorted lines, recomputed LF/LH."""
    out: list[str] = []
    for path in cov.paths():
        entry = cov.entries[path]
        out.append(f"SF:{path}")
        for line in sorted(entry.hits):
            out.append(f"DA:{line},{entry.hits[line]}")
        out.append(f"LF:{len(entry.instrumented)}")
        out.append(f"LH:{len(entry.covered)}")
        out.append("end_of_record")
    return "\n".join(out) + ("\n" if out else "")


def merge(a: CoverageMap, b: CoverageMap) -> CoverageMap:
    """Union of two tracefiles with summed hit counts."""
    merged = CoverageMap()
    for src in (a, b):
        for path, entry in src.entries.items():
            tgt = merged.entries.setdefault(path, FileCoverage())
            for line, h in entry.hits.items():
                tgt.hits[line] = tgt.hits.get(line, 0) + h
    return merged


def _entry(cov: CoverageMap, path: str) -> FileCoverage:
    entry = cov.entries.get(_normalize_path(path))
    if entry is None:
        raise NoCoverageData(f"no coverage data for {path!r}")
    if not entry.hits:
        raise NoCoverageData(f"zero instrumented lines for {path!r}")
    return entry


def file_line_coverage(cov: CoverageMap, path: str) -> Fraction:
    """Fraction of instrumented lines with hit count > 0, as an exact rational."""
    entry = _entry(cov, path)
    return Fraction(len(entry.covered), len(entry.instrumented))


def covered_lines(cov: CoverageMap, path: str) -> set[int]:
    return _entry(cov, path).covered


def instrumented_lines(cov: CoverageMap, path: str) -> set[int]:
    return _entry(cov, path).instrumented
