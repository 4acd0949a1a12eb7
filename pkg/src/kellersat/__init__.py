"""SAT toolkit for clique nonexistence in Keller graphs.

Modules:
  kellergraph  graph predicates, automorphisms, brute-force clique oracle
  encoder      compact clique-existence CNF with deterministic numbering
  symmetry     fixed vertices, case enumeration, blocking clauses, cover check
  satkit       DIMACS/incremental parsing, propagation, CDCL with proof output
  dratcheck    clausal proof checking and trimming
  tilinglab    exact rational cube-tiling verification
  pipeline     command-line orchestration
"""

from .kellergraph import KellerInstance

__all__ = ["KellerInstance"]
__version__ = "0.1.0"
