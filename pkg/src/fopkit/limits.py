"""Default budgets for the exhaustive components.

All deciders in this package are brute-force oracles meant for desk-scale
inputs; the caps below keep a mistyped CLI invocation from running for
hours.  Every cap can be overridden per call.
"""

from __future__ import annotations

# enumerate_structures refuses to start when the total structure count
# (2 ** total_relation_bits * size ** num_constants) would exceed this
MAX_STRUCTURES = 1 << 24

# decide_2cc refuses graphs with more nodes than this (2^n colorings)
MAX_COLORING_NODES = 20

# eval_so2 caps the relation bits per quantifier block (2^bits interpretations)
MAX_SO2_BLOCK_BITS = 20

# maximal_cliques aborts after this many cliques
MAX_CLIQUES = 1 << 20

# boolean deciders refuse truth tables over more occurring variables than
# this (the table is a 2^vars-bit integer)
MAX_TRUTH_TABLE_VARS = 20

# check_universality falls back to searching all graphs on m nodes only
# while 2^C(m,2) stays under this
MAX_GRAPH_SEARCH = 1 << 16

# default size bound for the semantic guard-exclusivity check
DEFAULT_EXCLUSIVITY_BOUND = 8
