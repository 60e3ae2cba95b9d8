"""Problem instances, their structure encodings, and ground-truth deciders.

Four problems, four vocabularies:

  sigma_g   = <E/2>            simple graphs
  sigma_dnf = <E/1, Q/2, M/2>  exists-forall DNF satisfiability
  sigma_cnf = <E/1, P/2, N/2>  exists-forall CNF falsifiability / unique extension
  tau       = <P/2, N/2, V/2, K/1>  value-bounded choice of existential variables

For the boolean vocabularies one universe of size n indexes both the n
implicants (or clauses) and the n variables: Q(i, v) reads "variable v
occurs positively in implicant i", E(v) marks v existential.  Decoding a
structure therefore always yields exactly n rows; rows the encoder did not
fill are empty conjunctions and evaluate true, so reductions that use
fewer than n rows must poison the spares explicitly.

All deciders are exhaustive.  The boolean ones run on truth tables packed
into Python ints (assignment a sets bit a), restricted to the variables
that actually occur; decide_2cc enumerates maximal cliques with a bitmask
Bron-Kerbosch and then backtracks over colorings with unit propagation.
They are the oracles the reduction sweeps trust, so no step of them relies
on any of the equivalences being verified.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from ._lex import TokenStream
from .errors import BudgetExceededError, FopkitError, InstanceError, ParseError
from .formulas import Formula, parse_formula
from .limits import MAX_CLIQUES, MAX_COLORING_NODES, MAX_TRUTH_TABLE_VARS
from .structures import Structure, Vocabulary, make_structure, make_vocabulary

SIGMA_G = make_vocabulary("sigma_g", [("E", 2)])
SIGMA_DNF = make_vocabulary("sigma_dnf", [("E", 1), ("Q", 2), ("M", 2)])
SIGMA_CNF = make_vocabulary("sigma_cnf", [("E", 1), ("P", 2), ("N", 2)])
TAU = make_vocabulary("tau", [("P", 2), ("N", 2), ("V", 2), ("K", 1)])

Row = tuple[frozenset, frozenset]  # (positive indices, negative indices)


def _check_rows(rows, var_count: int, what: str) -> tuple[Row, ...]:
    out = []
    for pos, neg in rows:
        pos, neg = frozenset(pos), frozenset(neg)
        for v in pos | neg:
            if not 0 <= v < var_count:
                raise InstanceError(f"{what} index {v} out of range for {var_count} variables")
        out.append((pos, neg))
    return tuple(out)


@dataclass(frozen=True)
class Qbf2Dnf:
    """DNF matrix with an existential variable set; the rest are universal.

    A variable may appear in both sides of one implicant, which just makes
    that implicant unsatisfiable.
    """

    var_count: int
    existential: frozenset
    implicants: tuple[Row, ...]

    def __post_init__(self) -> None:
        if self.var_count < 0:
            raise InstanceError("negative variable count")
        for v in self.existential:
            if not 0 <= v < self.var_count:
                raise InstanceError(f"existential index {v} out of range")
        object.__setattr__(self, "implicants",
                           _check_rows(self.implicants, self.var_count, "implicant"))
        object.__setattr__(self, "existential", frozenset(self.existential))


@dataclass(frozen=True)
class Qbf2Cnf:
    var_count: int
    existential: frozenset
    clauses: tuple[Row, ...]

    def __post_init__(self) -> None:
        if self.var_count < 0:
            raise InstanceError("negative variable count")
        for v in self.existential:
            if not 0 <= v < self.var_count:
                raise InstanceError(f"existential index {v} out of range")
        object.__setattr__(self, "clauses",
                           _check_rows(self.clauses, self.var_count, "clause"))
        object.__setattr__(self, "existential", frozenset(self.existential))


@dataclass(frozen=True)
class Graph:
    """Simple graph: unordered loop-free edges over {0..node_count-1}."""

    node_count: int
    edges: frozenset  # of (u, v) pairs with u < v

    def __post_init__(self) -> None:
        if self.node_count < 0:
            raise InstanceError("negative node count")
        canon = set()
        for u, v in self.edges:
            if u == v:
                raise InstanceError(f"loop ({u},{v}) not allowed")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise InstanceError(f"edge ({u},{v}) out of range")
            canon.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "edges", frozenset(canon))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def adjacency(self) -> list[int]:
        """Neighborhood bitmasks, one int per node."""
        adj = [0] * self.node_count
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj


def make_graph(node_count: int, edges: Iterable[tuple[int, int]] = ()) -> Graph:
    return Graph(node_count, frozenset(tuple(e) for e in edges))


@dataclass(frozen=True)
class VcsatInstance:
    """DNF matrix with no existential marking, per-variable values, a cost cap.

    Values and cost are arbitrary non-negative integers here; the n-bit
    range restriction belongs to the structure encoding and is enforced by
    encode_vcsat.
    """

    var_count: int
    implicants: tuple[Row, ...]
    values: tuple[int, ...]
    cost: int

    def __post_init__(self) -> None:
        if self.var_count < 0:
            raise InstanceError("negative variable count")
        object.__setattr__(self, "implicants",
                           _check_rows(self.implicants, self.var_count, "implicant"))
        if len(self.values) != self.var_count:
            raise InstanceError(f"need {self.var_count} values, got {len(self.values)}")
        if any(v < 0 for v in self.values) or self.cost < 0:
            raise InstanceError("values and cost must be non-negative")
        object.__setattr__(self, "values", tuple(self.values))


# --- encode / decode --------------------------------------------------------

def encode_dnf(inst: Qbf2Dnf) -> Structure:
    n = inst.var_count
    if n < 1:
        raise InstanceError("cannot encode an instance with no variables")
    if len(inst.implicants) > n:
        raise InstanceError(
            f"{len(inst.implicants)} implicants exceed the universe of size {n}")
    q = [(i, v) for i, (pos, _neg) in enumerate(inst.implicants) for v in pos]
    m = [(i, v) for i, (_pos, neg) in enumerate(inst.implicants) for v in neg]
    return make_structure(SIGMA_DNF, n, {
        "E": [(v,) for v in inst.existential], "Q": q, "M": m})


def decode_dnf(A: Structure) -> Qbf2Dnf:
    """Read a sigma_dnf structure back; every element is an implicant index."""
    n = A.size
    rows = [[set(), set()] for _ in range(n)]
    for i, v in A.rel("Q"):
        rows[i][0].add(v)
    for i, v in A.rel("M"):
        rows[i][1].add(v)
    return Qbf2Dnf(n, frozenset(v for (v,) in A.rel("E")),
                   tuple((frozenset(p), frozenset(q)) for p, q in rows))


def encode_cnf(inst: Qbf2Cnf) -> Structure:
    n = inst.var_count
    if n < 1:
        raise InstanceError("cannot encode an instance with no variables")
    if len(inst.clauses) > n:
        raise InstanceError(f"{len(inst.clauses)} clauses exceed the universe of size {n}")
    p = [(i, v) for i, (pos, _neg) in enumerate(inst.clauses) for v in pos]
    q = [(i, v) for i, (_pos, neg) in enumerate(inst.clauses) for v in neg]
    return make_structure(SIGMA_CNF, n, {
        "E": [(v,) for v in inst.existential], "P": p, "N": q})


def decode_cnf(A: Structure) -> Qbf2Cnf:
    n = A.size
    rows = [[set(), set()] for _ in range(n)]
    for i, v in A.rel("P"):
        rows[i][0].add(v)
    for i, v in A.rel("N"):
        rows[i][1].add(v)
    return Qbf2Cnf(n, frozenset(v for (v,) in A.rel("E")),
                   tuple((frozenset(p), frozenset(q)) for p, q in rows))


def encode_graph(g: Graph) -> Structure:
    if g.node_count < 1:
        raise InstanceError("cannot encode a graph with no nodes")
    closure = [(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges]
    return make_structure(SIGMA_G, g.node_count, {"E": closure})


def decode_graph(A: Structure) -> Graph:
    """Symmetrize E; loops are dropped with a warning, not an error."""
    edges = set()
    loops = 0
    for u, v in A.rel("E"):
        if u == v:
            loops += 1
        else:
            edges.add((min(u, v), max(u, v)))
    if loops:
        warnings.warn(f"dropped {loops} loop(s) while decoding a graph", stacklevel=2)
    return Graph(A.size, frozenset(edges))


def encode_vcsat(inst: VcsatInstance) -> Structure:
    """tau encoding; values and cost must fit in var_count bits."""
    n = inst.var_count
    if n < 1:
        raise InstanceError("cannot encode an instance with no variables")
    if len(inst.implicants) > n:
        raise InstanceError(
            f"{len(inst.implicants)} implicants exceed the universe of size {n}")
    bound = 1 << n
    for x, value in enumerate(inst.values):
        if value >= bound:
            raise InstanceError(f"value {value} of variable {x} does not fit in {n} bits")
    if inst.cost >= bound:
        raise InstanceError(f"cost {inst.cost} does not fit in {n} bits")
    p = [(i, v) for i, (pos, _neg) in enumerate(inst.implicants) for v in pos]
    q = [(i, v) for i, (_pos, neg) in enumerate(inst.implicants) for v in neg]
    # bit j of a value is V(x, j), j = 0 least significant; same for K
    vbits = [(x, j) for x, value in enumerate(inst.values)
             for j in range(n) if value >> j & 1]
    kbits = [(j,) for j in range(n) if inst.cost >> j & 1]
    return make_structure(TAU, n, {"P": p, "N": q, "V": vbits, "K": kbits})


def decode_vcsat(A: Structure) -> VcsatInstance:
    n = A.size
    rows = [[set(), set()] for _ in range(n)]
    for i, v in A.rel("P"):
        rows[i][0].add(v)
    for i, v in A.rel("N"):
        rows[i][1].add(v)
    values = [0] * n
    for x, j in A.rel("V"):
        values[x] |= 1 << j
    cost = 0
    for (j,) in A.rel("K"):
        cost |= 1 << j
    return VcsatInstance(n, tuple((frozenset(p), frozenset(q)) for p, q in rows),
                         tuple(values), cost)


# --- boolean deciders -------------------------------------------------------

def _var_pattern(position: int, table_bits: int) -> int:
    """Truth-table mask of the variable at a bit position: bit a is set
    iff bit `position` of assignment id a is set."""
    half = 1 << position
    period_ones = ((1 << half) - 1) << half
    repeat = ((1 << table_bits) - 1) // ((1 << (half * 2)) - 1)
    return period_ones * repeat


def _dnf_table(rows: list[Row], pos_of: dict, table_bits: int) -> int:
    full = (1 << table_bits) - 1
    patterns = {v: _var_pattern(j, table_bits) for v, j in pos_of.items()}
    table = 0
    for pos, neg in rows:
        m = full
        for v in pos:
            m &= patterns[v]
        for v in neg:
            m &= ~patterns[v]
        table |= m & full
    return table


def _split_occurring(rows: list[Row], existential: frozenset
                     ) -> tuple[list[int], list[int]]:
    occurring = set()
    for pos, neg in rows:
        occurring |= pos | neg
    univ = sorted(v for v in occurring if v not in existential)
    exist = sorted(v for v in occurring if v in existential)
    return univ, exist


def _require_table(total_vars: int) -> None:
    if total_vars > MAX_TRUTH_TABLE_VARS:
        raise BudgetExceededError(
            f"truth table over {total_vars} variables exceeds the cap of "
            f"{MAX_TRUTH_TABLE_VARS}")


def decide_qsat2(inst: Qbf2Dnf) -> bool:
    """Some existential assignment makes the DNF hold for all universal ones.

    Variables not occurring in any satisfiable implicant are irrelevant and
    are compacted away before the truth table is built, so instances coming
    out of the generic compiler (large universe, few live rows) stay cheap.
    """
    return decide_qsat2_witness(inst)[0]


def decide_qsat2_witness(inst: Qbf2Dnf) -> tuple[bool, dict | None]:
    """Like decide_qsat2 but with a satisfying existential assignment."""
    live = [(pos, neg) for pos, neg in inst.implicants if not pos & neg]
    if not live:
        return False, None
    univ, exist = _split_occurring(live, inst.existential)
    _require_table(len(univ) + len(exist))
    # universal variables take the low bit positions so each existential
    # choice owns one contiguous block of the table
    pos_of = {v: j for j, v in enumerate(univ + exist)}
    table_bits = 1 << len(pos_of)
    table = _dnf_table(live, pos_of, table_bits)
    u = len(univ)
    block = (1 << (1 << u)) - 1
    for xid in range(1 << len(exist)):
        if (table >> (xid << u)) & block == block:
            assignment = {v: False for v in inst.existential}
            for j, v in enumerate(exist):
                assignment[v] = bool(xid >> j & 1)
            return True, assignment
    return False, None


def _cnf_true_table(rows: list[Row], pos_of: dict, table_bits: int) -> int:
    full = (1 << table_bits) - 1
    patterns = {v: _var_pattern(j, table_bits) for v, j in pos_of.items()}
    table = full
    for pos, neg in rows:
        clause_false = full
        for v in pos:
            clause_false &= ~patterns[v]
        for v in neg:
            clause_false &= patterns[v]
        table &= ~clause_false
    return table & full


def decide_qunsat2(inst: Qbf2Cnf) -> bool:
    """Some existential assignment makes the CNF false for every universal one."""
    rows = [(pos, neg) for pos, neg in inst.clauses if not pos & neg]
    if not rows:
        return False  # empty (or all-tautological) CNF is true everywhere
    univ, exist = _split_occurring(rows, inst.existential)
    _require_table(len(univ) + len(exist))
    pos_of = {v: j for j, v in enumerate(univ + exist)}
    table_bits = 1 << len(pos_of)
    table = _cnf_true_table(rows, pos_of, table_bits)
    u = len(univ)
    block = (1 << (1 << u)) - 1
    for xid in range(1 << len(exist)):
        if (table >> (xid << u)) & block == 0:
            return True
    return False


def decide_unique_ext(inst: Qbf2Cnf) -> bool:
    return decide_unique_ext_witness(inst)[0]


def decide_unique_ext_witness(inst: Qbf2Cnf
                              ) -> tuple[bool, tuple[dict, dict] | None]:
    """Some existential assignment under which exactly one assignment of the
    remaining variables satisfies the CNF; returns (existential assignment,
    the unique completion) as the witness.

    A universal variable absent from every clause doubles each completion
    count, so uniqueness then fails outright.
    """
    rows = [(pos, neg) for pos, neg in inst.clauses if not pos & neg]
    universal_all = [v for v in range(inst.var_count) if v not in inst.existential]
    univ, exist = _split_occurring(rows, inst.existential)
    if len(univ) < len(universal_all):
        return False, None  # free universal variable: counts come in powers of two
    _require_table(len(univ) + len(exist))
    pos_of = {v: j for j, v in enumerate(univ + exist)}
    table_bits = 1 << len(pos_of)
    table = _cnf_true_table(rows, pos_of, table_bits)
    u = len(univ)
    block = (1 << (1 << u)) - 1
    for xid in range(1 << len(exist)):
        part = (table >> (xid << u)) & block
        if part.bit_count() == 1:
            yid = part.bit_length() - 1
            x_assign = {v: False for v in inst.existential}
            for j, v in enumerate(exist):
                x_assign[v] = bool(xid >> j & 1)
            y_assign = {v: bool(yid >> j & 1) for j, v in enumerate(univ)}
            return True, (x_assign, y_assign)
    return False, None


def decide_vcsat(inst: VcsatInstance) -> bool:
    return decide_vcsat_witness(inst)[0]


def decide_vcsat_witness(inst: VcsatInstance) -> tuple[bool, frozenset | None]:
    """Search all variable subsets X with total value <= cost for one whose
    existential marking makes the DNF an accepted exists-forall instance."""
    n = inst.var_count
    _require_table(n)
    live = [(pos, neg) for pos, neg in inst.implicants if not pos & neg]
    pos_of = {v: v for v in range(n)}
    table_bits = 1 << n
    table = _dnf_table(live, pos_of, table_bits) if live else 0
    for choice in range(1 << n):
        total = 0
        for v in range(n):
            if choice >> v & 1:
                total += inst.values[v]
        if total > inst.cost:
            continue
        if _qsat2_on_table(table, n, choice):
            return True, frozenset(v for v in range(n) if choice >> v & 1)
    return False, None


def _qsat2_on_table(table: int, n: int, exist_mask: int) -> bool:
    """Exists an assignment of the exist_mask variables such that every
    completion hits a set bit of the n-variable truth table."""
    univ_mask = ((1 << n) - 1) ^ exist_mask
    # enumerate assignments of the existential bits via subset stepping
    x = 0
    while True:
        ok = True
        y = 0
        while True:
            if not table >> (x | y) & 1:
                ok = False
                break
            y = (y - univ_mask) & univ_mask
            if y == 0:
                break
        if ok:
            return True
        x = (x - exist_mask) & exist_mask
        if x == 0:
            return False


# --- clique coloring --------------------------------------------------------

def _maximal_clique_masks(adj: list[int], n: int, budget: int) -> list[int]:
    """Bron-Kerbosch with pivoting over bitmask adjacency."""
    out: list[int] = []

    def bk(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            out.append(r)
            if len(out) > budget:
                raise BudgetExceededError(
                    f"more than {budget} maximal cliques")
            return
        # pivot: vertex of P|X covering most of P
        px = p | x
        best, best_cover = -1, -1
        m = px
        while m:
            bit = m & -m
            m ^= bit
            cover = (p & adj[bit.bit_length() - 1]).bit_count()
            if cover > best_cover:
                best_cover, best = cover, bit.bit_length() - 1
        cand = p & ~adj[best]
        while cand:
            bit = cand & -cand
            cand ^= bit
            v = bit.bit_length() - 1
            bk(r | bit, p & adj[v], x & adj[v])
            p ^= bit
            x |= bit

    if n:
        bk(0, (1 << n) - 1, 0)
    return out


def maximal_cliques(g: Graph, budget: int = MAX_CLIQUES) -> frozenset:
    """All inclusion-maximal cliques, singletons included."""
    masks = _maximal_clique_masks(g.adjacency(), g.node_count, budget)
    return frozenset(frozenset(v for v in range(g.node_count) if m >> v & 1)
                     for m in masks)


def _nae_colorable(constraints: list[int], n: int) -> int | None:
    """Find a 2-coloring where no constraint mask is monochromatic.

    Returns the color-1 mask, or None.  Backtracking with unit propagation:
    a constraint whose assigned nodes are all one color and which has a
    single unassigned node forces that node to the other color.
    """
    full = (1 << n) - 1

    def propagate(col0: int, col1: int) -> tuple[int, int] | None:
        changed = True
        while changed:
            changed = False
            assigned = col0 | col1
            for m in constraints:
                if m & col0 and m & col1:
                    continue  # already bichromatic
                free = m & ~assigned
                if free == 0:
                    return None  # monochromatic and complete
                if free & (free - 1) == 0:  # single free node
                    if m & col0:
                        col1 |= free
                    elif m & col1:
                        col0 |= free
                    else:
                        continue  # nothing assigned yet, no forcing
                    assigned |= free
                    changed = True
        return col0, col1

    def solve(col0: int, col1: int) -> int | None:
        state = propagate(col0, col1)
        if state is None:
            return None
        col0, col1 = state
        assigned = col0 | col1
        for m in constraints:
            if not (m & col0 and m & col1):
                free = m & ~assigned
                if free:
                    bit = free & -free
                    for c0, c1 in ((col0 | bit, col1), (col0, col1 | bit)):
                        got = solve(c0, c1)
                        if got is not None:
                            return got
                    return None
        return col1  # every constraint bichromatic; free nodes default to color 0

    if not constraints:
        return 0
    # the first constrained node's color can be fixed by symmetry
    first = constraints[0] & -constraints[0]
    return solve(first, 0)


def decide_2cc(g: Graph, node_cap: int = MAX_COLORING_NODES,
               clique_budget: int = MAX_CLIQUES) -> tuple[bool, tuple | None]:
    """Is there a 2-coloring making every maximal clique of size >= 2
    bichromatic?  Singleton cliques (isolated nodes) are exempt.

    Returns (verdict, coloring) with the coloring as a 0/1 tuple; the
    witness is re-checked against the clique list before being returned.
    """
    n = g.node_count
    if n > node_cap:
        raise BudgetExceededError(f"{n} nodes exceed the coloring cap of {node_cap}")
    if n == 0:
        return True, ()
    adj = g.adjacency()
    cliques = _maximal_clique_masks(adj, n, clique_budget)
    constraints = sorted((m for m in cliques if m.bit_count() >= 2),
                         key=lambda m: m.bit_count())
    col1 = _nae_colorable(constraints, n)
    if col1 is None:
        return False, None
    for m in constraints:
        if m & col1 == 0 or m & col1 == m:
            raise FopkitError("internal error: coloring failed validation")
    return True, tuple(col1 >> v & 1 for v in range(n))


def decide_2cc_n(g: Graph, threshold: int,
                 node_cap: int = MAX_COLORING_NODES) -> bool:
    """Membership in the padded problem: small graphs pass outright."""
    if threshold < 1:
        raise InstanceError("padding threshold must be >= 1")
    if g.node_count < threshold:
        return True
    return decide_2cc(g, node_cap)[0]


# --- second-order definition of the clique-coloring problem -----------------

_TWO_CC_SENTENCE = """
exists2 C/1 forall2 K/1 (
  !( (forall x forall y (K(x) & K(y) & !(x = y) -> E(x,y) | E(y,x)))
   & (forall z (!K(z) -> (exists w (K(w) & !(E(z,w) | E(w,z))))))
   & (exists x exists y (!(x = y) & K(x) & K(y))) )
  | (exists x exists y (K(x) & K(y) & C(x) & !C(y)))
)
"""


def two_clique_coloring_sentence() -> Formula:
    """The problem as an existential-universal second-order sentence over
    sigma_g: some color class C such that every set K that is a maximal
    clique with at least two nodes meets both C and its complement."""
    return parse_formula(_TWO_CC_SENTENCE, SIGMA_G)


# --- instance shorthand formats ---------------------------------------------
#
#   graph g { n = 5 ; edges = { (0,1) (1,2) } }
#   qdnf { vars = 3 ; E = { 0 2 } ; imp = (+0 -1) (+2) }
#   qcnf { vars = 2 ; E = { } ; cls = (+0) (-0) }
#   vcsat { vars = 3 ; imp = (+0 -1) ; v = [1 7 7] ; K = 4 }
#
# +i / -i are positive / negative literals on variable i; () is the empty
# implicant (always true) and an absent row list means no rows at all.

_SYMBOLS = ("{", "}", "(", ")", "[", "]", ",", ";", "=", "+", "-")


def _parse_index_set(ts: TokenStream) -> frozenset:
    ts.expect("{")
    out = set()
    while ts.at_kind("num"):
        out.add(ts.expect_num())
        ts.accept(",")
    ts.expect("}")
    return frozenset(out)


def _parse_rows(ts: TokenStream) -> tuple[Row, ...]:
    rows = []
    while ts.accept("("):
        pos, neg = set(), set()
        while not ts.at(")"):
            if ts.accept("+"):
                pos.add(ts.expect_num())
            elif ts.accept("-"):
                neg.add(ts.expect_num())
            else:
                ts.error("expected '+', '-' or ')'")
        ts.expect(")")
        rows.append((frozenset(pos), frozenset(neg)))
    return tuple(rows)


def parse_graph(text: str) -> tuple[str, Graph]:
    ts = TokenStream(text, _SYMBOLS)
    ts.expect("graph")
    name = ts.expect_name().text
    ts.expect("{")
    ts.expect("n")
    ts.expect("=")
    n = ts.expect_num()
    ts.expect(";")
    ts.expect("edges")
    ts.expect("=")
    ts.expect("{")
    edges = []
    while ts.accept("("):
        u = ts.expect_num()
        ts.expect(",")
        v = ts.expect_num()
        ts.expect(")")
        edges.append((u, v))
    ts.expect("}")
    ts.expect("}")
    ts.expect_eof()
    try:
        return name, make_graph(n, edges)
    except InstanceError as exc:
        raise ParseError(str(exc), 1, 1) from exc


def parse_qdnf(text: str) -> Qbf2Dnf:
    ts = TokenStream(text, _SYMBOLS)
    ts.expect("qdnf")
    ts.expect("{")
    ts.expect("vars")
    ts.expect("=")
    n = ts.expect_num()
    ts.expect(";")
    ts.expect("E")
    ts.expect("=")
    existential = _parse_index_set(ts)
    ts.expect(";")
    ts.expect("imp")
    ts.expect("=")
    rows = _parse_rows(ts)
    ts.expect("}")
    ts.expect_eof()
    try:
        return Qbf2Dnf(n, existential, rows)
    except InstanceError as exc:
        raise ParseError(str(exc), 1, 1) from exc


def parse_qcnf(text: str) -> Qbf2Cnf:
    ts = TokenStream(text, _SYMBOLS)
    ts.expect("qcnf")
    ts.expect("{")
    ts.expect("vars")
    ts.expect("=")
    n = ts.expect_num()
    ts.expect(";")
    ts.expect("E")
    ts.expect("=")
    existential = _parse_index_set(ts)
    ts.expect(";")
    ts.expect("cls")
    ts.expect("=")
    rows = _parse_rows(ts)
    ts.expect("}")
    ts.expect_eof()
    try:
        return Qbf2Cnf(n, existential, rows)
    except InstanceError as exc:
        raise ParseError(str(exc), 1, 1) from exc


def parse_vcsat(text: str) -> VcsatInstance:
    ts = TokenStream(text, _SYMBOLS)
    ts.expect("vcsat")
    ts.expect("{")
    ts.expect("vars")
    ts.expect("=")
    n = ts.expect_num()
    ts.expect(";")
    ts.expect("imp")
    ts.expect("=")
    rows = _parse_rows(ts)
    ts.expect(";")
    ts.expect("v")
    ts.expect("=")
    ts.expect("[")
    values = []
    while ts.at_kind("num"):
        values.append(ts.expect_num())
        ts.accept(",")
    ts.expect("]")
    ts.expect(";")
    ts.expect("K")
    ts.expect("=")
    cost = ts.expect_num()
    ts.expect("}")
    ts.expect_eof()
    try:
        return VcsatInstance(n, rows, tuple(values), cost)
    except InstanceError as exc:
        raise ParseError(str(exc), 1, 1) from exc


def parse_instance(text: str):
    """Dispatch on the leading keyword; returns the matching instance type
    (graphs come back as (name, Graph))."""
    ts = TokenStream(text, _SYMBOLS)
    head = ts.peek()
    if head.kind != "name":
        raise ParseError("expected an instance keyword", head.line, head.col)
    parsers = {"graph": parse_graph, "qdnf": parse_qdnf,
               "qcnf": parse_qcnf, "vcsat": parse_vcsat}
    parser = parsers.get(head.text)
    if parser is None:
        raise ParseError(f"unknown instance keyword {head.text!r}",
                         head.line, head.col)
    return parser(text)


def _format_rows(rows: Iterable[Row]) -> str:
    parts = []
    for pos, neg in rows:
        lits = [f"+{v}" for v in sorted(pos)] + [f"-{v}" for v in sorted(neg)]
        parts.append("(" + " ".join(lits) + ")")
    return " ".join(parts)


def format_graph(g: Graph, name: str = "g") -> str:
    body = " ".join(f"({u},{v})" for u, v in sorted(g.edges))
    inner = f"{{ {body} }}" if body else "{ }"
    return f"graph {name} {{ n = {g.node_count} ; edges = {inner} }}\n"


def format_qdnf(inst: Qbf2Dnf) -> str:
    e = " ".join(str(v) for v in sorted(inst.existential))
    eset = f"{{ {e} }}" if e else "{ }"
    return (f"qdnf {{ vars = {inst.var_count} ; E = {eset} ; "
            f"imp = {_format_rows(inst.implicants)} }}\n")


def format_qcnf(inst: Qbf2Cnf) -> str:
    e = " ".join(str(v) for v in sorted(inst.existential))
    eset = f"{{ {e} }}" if e else "{ }"
    return (f"qcnf {{ vars = {inst.var_count} ; E = {eset} ; "
            f"cls = {_format_rows(inst.clauses)} }}\n")


def format_vcsat(inst: VcsatInstance) -> str:
    vals = " ".join(str(v) for v in inst.values)
    return (f"vcsat {{ vars = {inst.var_count} ; imp = {_format_rows(inst.implicants)} ; "
            f"v = [{vals}] ; K = {inst.cost} }}\n")
