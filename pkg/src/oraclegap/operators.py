"""Mutation-operator catalog and line-oriented mutant generation.

Mutants are produced by regular-expression rewriting of single source
lines, in the style of multi-language regex mutation tools. The unit of
change is always exactly one line, and statement deletion blanks a line
into a comment instead of removing it, so line numbering (and therefore
coverage alignment) is stable across every mutant.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

SUPPORTED_LANGUAGES = ("java", "c", "cpp", "go", "python", "generic")

# Sentinel replacement handled by the generator: blank the line into a comment.
DELETE = "__DELETE__"

CATEGORIES = {
    "arithmetic",
    "relational",
    "logical",
    "constant",
    "statement_deletion",
    "control_flow",
}

_COMMENT_PREFIXES = {
    "java": ("//",),
    "c": ("//",),
    "cpp": ("//",),
    "go": ("//",),
    "python": ("#",),
    "generic": ("//", "#", "--"),
}


class OperatorError(Exception):
    pass


class StaleMutantError(Exception):
    """The source line no longer matches the mutant's recorded original."""


@dataclass(frozen=True)
class MutationOperator:
    id: str
    match_pattern: str
    replacements: tuple[str, ...]
    languages: frozenset[str]
    category: str

    def __post_init__(self):
        if not self.replacements:
            raise OperatorError(f"operator {self.id}: empty replacement list")
        if self.category not in CATEGORIES:
            raise OperatorError(f"operator {self.id}: unknown category {self.category!r}")
        re.compile(self.match_pattern)


@dataclass(frozen=True)
class Mutant:
    id: str
    path: str
    line: int
    original: str
    mutated: str
    operator_id: str


def _op(id, pattern, replacements, languages, category):
    return MutationOperator(id, pattern, tuple(replacements), frozenset(languages), category)


_ALL = ("java", "c", "cpp", "go", "python", "generic")
_C_FAMILY = ("java", "c", "cpp", "go")

# Catalog order is load order and therefore generation order; treat as
# versioned data. Language-specific entries (&&/||, `and`/`or`, early
# return) are our own choices; the shared core mirrors the usual
# arithmetic/relational/logical/deletion/control-flow set.
CATALOG: tuple[MutationOperator, ...] = (
    _op("arith-plus", r"(?<=[\w)\]])(\s*)\+(?![+=])", [r"\1-"], _ALL, "arithmetic"),
    _op("arith-minus", r"(?<=[\w)\]])(\s*)-(?![-=>])", [r"\1+"], _ALL, "arithmetic"),
    _op("arith-mul", r"(?<=[\w)\]])(\s*)\*(?![*=/])", [r"\1/"], _ALL, "arithmetic"),
    _op("arith-div", r"(?<=[\w)\]])(\s*)/(?![/=*])", [r"\1*"], _ALL, "arithmetic"),
    _op("arith-mod", r"(?<=[\w)\]])(\s*)%(?![=])", [r"\1*"], _ALL, "arithmetic"),
    _op("rel-lt", r"(?<![<>=!\-])<(?![<=])", ["<=", ">="], _ALL, "relational"),
    _op("rel-gt", r"(?<![<>=!\-])>(?![>=])", [">=", "<="], _ALL, "relational"),
    _op("rel-le", r"(?<![<>=!])<=(?![<=])", ["<"], _ALL, "relational"),
    _op("rel-ge", r"(?<![<>=!])>=(?![>=])", [">"], _ALL, "relational"),
    _op("rel-eq", r"(?<![<>=!+\-*/%])==(?!=)", ["!="], _ALL, "relational"),
    _op("rel-ne", r"(?<![<>=!])!=(?!=)", ["=="], _ALL, "relational"),
    _op("logic-and", r"&&", [r"||"], _C_FAMILY, "logical"),
    _op("logic-or", r"\|\|", ["&&"], _C_FAMILY, "logical"),
    _op("logic-and-py", r"\band\b", ["or"], ("python",), "logical"),
    _op("logic-or-py", r"\bor\b", ["and"], ("python",), "logical"),
    _op("logic-negate-drop", r"(?<![=!])!(?=[A-Za-z_(])", [""], _C_FAMILY, "logical"),
    _op("logic-not-drop-py", r"\bnot\s+", [""], ("python",), "logical"),
    _op("const-0-1", r"(?<![\w.])0(?![\w.])", ["1"], _ALL, "constant"),
    _op("const-1-0", r"(?<![\w.])1(?![\w.])", ["0"], _ALL, "constant"),
    _op("const-int-inc", r"(?<![\w.])([2-9][0-9]*)(?![\w.])", [r"(\1+1)"], _ALL, "constant"),
    _op("stmt-del", r"\S", [DELETE], _ALL, "statement_deletion"),
    _op("cf-break-continue", r"\bbreak\b", ["continue"], _ALL, "control_flow"),
    _op("cf-continue-break", r"\bcontinue\b", ["break"], _ALL, "control_flow"),
    _op("cf-early-return", r"\{\s*$", ["{ return;"], _C_FAMILY, "control_flow"),
)

# Off by default; enabled by flag to suppress message/log-string mutants,
# which tend to survive for uninteresting reasons.
DEFAULT_LOG_EXCLUSIONS: tuple[str, ...] = (
    r"\blog(ger)?\s*[.(]",
    r"\bprintf?\s*\(",
    r"\bprintln\b",
    r"System\.(out|err)\.",
    r"\bfmt\.[A-Z]\w*print\w*",
)


def load_operator_catalog(language_tag: str,
                          catalog: Sequence[MutationOperator] = CATALOG
                          ) -> list[MutationOperator]:
    """All operators applicable to ``language_tag``, in catalog order."""
    if language_tag not in SUPPORTED_LANGUAGES:
        raise OperatorError(
            f"unknown language tag {language_tag!r}; supported: "
            + ", ".join(SUPPORTED_LANGUAGES))
    if language_tag == "generic":
        return list(catalog)
    return [op for op in catalog
            if language_tag in op.languages or "generic" in op.languages]


def load_catalog_file(path) -> list[MutationOperator]:
    """Read a user-supplied catalog: one JSON operator record per line."""
    ops = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            rec = json.loads(raw)
            ops.append(MutationOperator(
                id=rec["id"],
                match_pattern=rec["match_pattern"],
                replacements=tuple(rec["replacements"]),
                languages=frozenset(rec["languages"]),
                category=rec["category"],
            ))
    seen = set()
    for op in ops:
        if op.id in seen:
            raise OperatorError(f"duplicate operator id {op.id!r}")
        seen.add(op.id)
    return ops


def comment_prefix(language_tag: str) -> str:
    return _COMMENT_PREFIXES.get(language_tag, ("#",))[0]


def _is_comment_only(line: str, language_tag: str) -> bool:
    stripped = line.strip()
    if not stripped:
        return True
    return stripped.startswith(_COMMENT_PREFIXES.get(language_tag, _COMMENT_PREFIXES["generic"]))


def _deleted_line(line: str, language_tag: str) -> str:
    indent = line[: len(line) - len(line.lstrip())]
    return f"{indent}{comment_prefix(language_tag)} deleted: {line.strip()}"


def mutant_id(path: str, line: int, operator_id: str, replacement_index: int) -> str:
    return f"{path}:{line}:{operator_id}:{replacement_index}"


def generate_mutants(source_text: str, path: str,
                     operators: Sequence[MutationOperator],
                     exclusions: Iterable[str] = (),
                     language_tag: str = "generic") -> list[Mutant]:
    """Every (line, operator, replacement) mutant for one file.

    Comment-only and exclusion-matching lines never produce mutants.
    Output order is (line, catalog order, replacement index), so the
    result is a pure function of the inputs.
    """
    excl = [re.compile(p) for p in exclusions]
    compiled = [(op, re.compile(op.match_pattern)) for op in operators]
    mutants: list[Mutant] = []
    for lineno, line in enumerate(source_text.splitlines(), start=1):
        if _is_comment_only(line, language_tag):
            continue
        if any(p.search(line) for p in excl):
            continue
        for op, pat in compiled:
            if not pat.search(line):
                continue
            for ridx, repl in enumerate(op.replacements):
                if repl == DELETE:
                    mutated = _deleted_line(line, language_tag)
                else:
                    mutated = pat.sub(repl, line, count=1)
                if mutated == line:
                    continue
                mutants.append(Mutant(
                    id=mutant_id(path, lineno, op.id, ridx),
                    path=path, line=lineno,
                    original=line, mutated=mutated,
                    operator_id=op.id,
                ))
    return mutants


def apply_mutant(source_text: str, mutant: Mutant) -> str:
    """Rewrite one line; every other byte of the file is preserved."""
    lines = source_text.splitlines(keepends=True)
    if mutant.line < 1 or mutant.line > len(lines):
        raise StaleMutantError(
            f"{mutant.id}: line {mutant.line} out of range (file has {len(lines)} lines)")
    raw = lines[mutant.line - 1]
    body = raw.rstrip("\r\n")
    ending = raw[len(body):]
    if body != mutant.original:
        raise StaleMutantError(
            f"{mutant.id}: line {mutant.line} no longer matches; "
            f"expected {mutant.original!r}, found {body!r}")
    lines[mutant.line - 1] = mutant.mutated + ending
    return "".join(lines)


def write_mutants_jsonl(mutants: Iterable[Mutant], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in mutants:
            fh.write(json.dumps({
                "id": m.id, "path": m.path, "line": m.line,
                "operator_id": m.operator_id,
                "original": m.original, "mutated": m.mutated,
            }, sort_keys=True) + "\n")


def read_mutants_jsonl(path) -> list[Mutant]:
    mutants = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            rec = json.loads(raw)
            mutants.append(Mutant(
                id=rec["id"], path=rec["path"], line=rec["line"],
                original=rec["original"], mutated=rec["mutated"],
                operator_id=rec["operator_id"],
            ))
    return mutants
