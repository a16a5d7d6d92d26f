#!/usr/bin/env python3
"""Write an LCOV tracefile for this fixture by tracing the test run.

Instrumented lines come from walking the compiled code objects of every
file under src/; covered lines from a settrace hook while the test
script runs. Output goes to coverage.lcov at the project root.
"""

import os
import runpy
import sys
import types

SRC = "src"
TEST_SCRIPT = os.path.join("tests", "run_tests.py")
OUT = "coverage.lcov"


def code_lines(code):
    lines = set()
    for _start, _end, line in code.co_lines():
        if line is not None:
            lines.add(line)
    for const in code.co_consts:
        if isinstance(const, types.CodeType):
            lines |= code_lines(const)
    return lines


def main():
    project = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    os.chdir(project)

    targets = {}
    for name in sorted(os.listdir(SRC)):
        if not name.endswith(".py"):
            continue
        rel = os.path.join(SRC, name).replace(os.sep, "/")
        with open(rel, encoding="utf-8") as fh:
            code = compile(fh.read(), os.path.abspath(rel), "exec")
        targets[os.path.abspath(rel)] = (rel, code_lines(code))

    hits = {path: {} for path in targets}

    def tracer(frame, event, _arg):
        path = frame.f_code.co_filename
        if event == "line" and path in hits:
            hits[path][frame.f_lineno] = hits[path].get(frame.f_lineno, 0) + 1
        return tracer

    sys.settrace(tracer)
    try:
        runpy.run_path(TEST_SCRIPT, run_name="__main__")
    finally:
        sys.settrace(None)

    with open(OUT, "w", encoding="utf-8") as fh:
        for abspath in sorted(targets):
            rel, instrumented = targets[abspath]
            fh.write("SF:%s\n" % rel)
            all_lines = sorted(instrumented | set(hits[abspath]))
            for line in all_lines:
                fh.write("DA:%d,%d\n" % (line, hits[abspath].get(line, 0)))
            fh.write("LF:%d\n" % len(all_lines))
            fh.write("LH:%d\n" % sum(1 for l in all_lines if hits[abspath].get(l, 0)))
            fh.write("end_of_record\n")


if __name__ == "__main__":
    main()
