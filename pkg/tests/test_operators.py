from __future__ import annotations

import json

import pytest

from oraclegap.operators import (CATALOG, DELETE, Mutant, MutationOperator,
                                 OperatorError, StaleMutantError, apply_mutant,
                                 comment_prefix, generate_mutants,
                                 load_catalog_file, load_operator_catalog,
                                 mutant_id, read_mutants_jsonl,
                                 write_mutants_jsonl)

PY_OPS = load_operator_catalog("python")


def ids_for(source, line=None, ops=PY_OPS, **kwargs):
    mutants = generate_mutants(source, "f.py", ops, language_tag="python", **kwargs)
    if line is not None:
        mutants = [m for m in mutants if m.line == line]
    return [m.operator_id for m in mutants]


class TestCatalog:
    def test_every_operator_compiles_and_is_unique(self):
        seen = set()
        for op in CATALOG:
            assert op.id not in seen
            seen.add(op.id)

    def test_python_catalog_excludes_c_family_operators(self):
        ids = {op.id for op in PY_OPS}
        assert "logic-and-py" in ids
        assert "logic-and" not in ids
        assert "cf-early-return" not in ids

    def test_go_catalog_excludes_python_operators(self):
        ids = {op.id for op in load_operator_catalog("go")}
        assert "logic-and" in ids
        assert "logic-and-py" not in ids

    def test_generic_catalog_is_everything(self):
        assert load_operator_catalog("generic") == list(CATALOG)

    def test_unknown_language_error_lists_supported_tags(self):
        with pytest.raises(OperatorError, match="python"):
            load_operator_catalog("cobol")

    def test_empty_replacements_rejected(self):
        with pytest.raises(OperatorError, match="empty replacement"):
            MutationOperator("x", "a", (), frozenset({"python"}), "arithmetic")

    def test_unknown_category_rejected(self):
        with pytest.raises(OperatorError, match="unknown category"):
            MutationOperator("x", "a", ("b",), frozenset({"python"}), "nonsense")


class TestGenerate:
    def test_plus_becomes_minus(self):
        mutants = generate_mutants("x = a + b\n", "f.py", PY_OPS,
                                   language_tag="python")
        arith = [m for m in mutants if m.operator_id == "arith-plus"]
        assert len(arith) == 1
        assert arith[0].mutated == "x = a - b"
        assert arith[0].original == "x = a + b"
        assert arith[0].line == 1

    def test_only_first_occurrence_is_rewritten(self):
        mutants = generate_mutants("y = a + b + c\n", "f.py", PY_OPS,
                                   language_tag="python")
        arith = [m for m in mutants if m.operator_id == "arith-plus"]
        assert len(arith) == 1
        assert arith[0].mutated == "y = a - b + c"

    def test_relational_lt_has_two_replacements(self):
        mutants = generate_mutants("if a < b:\n    pass\n", "f.py", PY_OPS,
                                   language_tag="python")
        lt = [m for m in mutants if m.operator_id == "rel-lt"]
        assert [m.mutated for m in lt] == ["if a <= b:", "if a >= b:"]
        assert [m.id for m in lt] == ["f.py:1:rel-lt:0", "f.py:1:rel-lt:1"]

    def test_le_not_double_matched_by_lt(self):
        assert "rel-lt" not in ids_for("if a <= b:\n    pass\n", line=1)

    def test_unary_minus_not_mutated(self):
        # arith-minus needs an operand on the left; a sign does not count.
        assert "arith-minus" not in ids_for("x = -5\n")
        assert "arith-minus" in ids_for("x = a - 5\n")

    def test_augmented_assign_not_mutated_as_comparison(self):
        assert "rel-lt" not in ids_for("x <<= 2\n")

    def test_statement_deletion_preserves_indent_and_comments_out(self):
        mutants = generate_mutants("    x = f()\n", "f.py", PY_OPS,
                                   language_tag="python")
        dels = [m for m in mutants if m.operator_id == "stmt-del"]
        assert len(dels) == 1
        assert dels[0].mutated == "    # deleted: x = f()"

    def test_comment_and_blank_lines_produce_no_mutants(self):
        assert ids_for("# x = a + b\n") == []
        assert ids_for("\n   \n") == []

    def test_exclusion_patterns_suppress_lines(self):
        src = "log.info(a + b)\nx = a + b\n"
        mutants = generate_mutants(src, "f.py", PY_OPS,
                                   exclusions=[r"\blog\."], language_tag="python")
        assert {m.line for m in mutants} == {2}

    def test_constant_increment(self):
        mutants = generate_mutants("n = 41\n", "f.py", PY_OPS,
                                   language_tag="python")
        inc = [m for m in mutants if m.operator_id == "const-int-inc"]
        assert inc[0].mutated == "n = (41+1)"

    def test_constants_skip_identifier_and_float_contexts(self):
        assert "const-0-1" not in ids_for("x = a0 + x.0\n")
        assert "const-1-0" not in ids_for("v = 1.5\n")

    def test_output_order_is_line_then_catalog_then_replacement(self):
        src = "a = x + y\nb = x < y\n"
        mutants = generate_mutants(src, "f.py", PY_OPS, language_tag="python")
        keys = [(m.line, m.operator_id) for m in mutants]
        assert keys == sorted(keys, key=lambda k: (k[0],))
        line2 = [m.id for m in mutants if m.line == 2 and m.operator_id == "rel-lt"]
        assert line2 == ["f.py:2:rel-lt:0", "f.py:2:rel-lt:1"]

    def test_noop_rewrites_are_dropped(self):
        # `not` followed by nothing mutatable: dropping `not ` from a line
        # that does not contain it must never emit an identical mutant.
        for m in generate_mutants("x = a or b\n", "f.py", PY_OPS,
                                  language_tag="python"):
            assert m.mutated != m.original


class TestApply:
    SRC = "line one\nx = a + b\nline three\n"

    def mutant(self):
        return generate_mutants(self.SRC, "f.py", PY_OPS,
                                language_tag="python")[0]

    def test_apply_changes_exactly_one_line(self):
        out = apply_mutant(self.SRC, self.mutant())
        orig_lines, out_lines = self.SRC.splitlines(), out.splitlines()
        assert len(orig_lines) == len(out_lines)
        assert sum(a != b for a, b in zip(orig_lines, out_lines)) == 1

    def test_crlf_endings_survive(self):
        src = "x = a + b\r\nrest\r\n"
        m = generate_mutants(src, "f.py", PY_OPS, language_tag="python")[0]
        out = apply_mutant(src, m)
        assert out.endswith("\r\nrest\r\n")
        assert out.splitlines()[0] == m.mutated

    def test_stale_line_content_raises(self):
        stale = Mutant("f.py:2:arith-plus:0", "f.py", 2, "x = a * b",
                       "x = a / b", "arith-plus")
        with pytest.raises(StaleMutantError, match="no longer matches"):
            apply_mutant(self.SRC, stale)

    def test_out_of_range_line_raises(self):
        stale = Mutant("f.py:9:arith-plus:0", "f.py", 9, "x", "y", "arith-plus")
        with pytest.raises(StaleMutantError, match="out of range"):
            apply_mutant(self.SRC, stale)

    def test_every_generated_mutant_round_trips(self):
        src = "def f(a, b):\n    if a < b and b != 0:\n        return a % b\n    return 0\n"
        for m in generate_mutants(src, "f.py", PY_OPS, language_tag="python"):
            out = apply_mutant(src, m)
            assert out.splitlines()[m.line - 1] == m.mutated


class TestSerialization:
    def test_jsonl_round_trip(self, tmp_path):
        src = "x = a + b\ny = a < b\n"
        mutants = generate_mutants(src, "f.py", PY_OPS, language_tag="python")
        path = tmp_path / "mutants.jsonl"
        write_mutants_jsonl(mutants, path)
        assert read_mutants_jsonl(path) == mutants

    def test_catalog_file_round_trip(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rec = {"id": "my-op", "match_pattern": "foo", "replacements": ["bar"],
               "languages": ["python"], "category": "constant"}
        path.write_text(json.dumps(rec) + "\n", encoding="utf-8")
        ops = load_catalog_file(path)
        assert ops[0].id == "my-op"
        assert ops[0].replacements == ("bar",)

    def test_catalog_file_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rec = {"id": "dup", "match_pattern": "a", "replacements": ["b"],
               "languages": ["python"], "category": "constant"}
        path.write_text(json.dumps(rec) + "\n" + json.dumps(rec) + "\n",
                        encoding="utf-8")
        with pytest.raises(OperatorError, match="duplicate"):
            load_catalog_file(path)


def test_mutant_id_format():
    assert mutant_id("a/b.py", 7, "rel-lt", 1) == "a/b.py:7:rel-lt:1"


def test_comment_prefix_per_language():
    assert comment_prefix("python") == "#"
    assert comment_prefix("go") == "//"
    assert comment_prefix("unknown") == "#"


def test_delete_sentinel_is_not_a_literal_replacement():
    dels = [op for op in CATALOG if op.category == "statement_deletion"]
    assert len(dels) == 1 and dels[0].replacements == (DELETE,)
