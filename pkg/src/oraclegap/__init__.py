"""oraclegap: measure the gap between code coverage and mutation score.

The pipeline is staged through files: ``mutate`` writes a mutant list,
``run`` evaluates it against the project's test suite, ``gap`` joins the
outcomes with an LCOV tracefile into per-file and per-project reports.
``stats`` and ``ablate`` provide the analysis layers on top.
"""

__version__ = "0.1.0"
