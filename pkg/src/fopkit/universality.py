"""Ground-literal consistency and (n,k)-universality sweeps over graphs.

A problem over the graph vocabulary is (n,k)-universal when, from size n
on, any satisfiable conjunction of k edge literals is satisfiable inside
the problem.  The checks here enumerate literal sequences up to symmetry,
try a registered witness construction first and fall back to exhaustive
graph search, so the constructive proofs and the bare existence claims are
both exercised.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .errors import BudgetExceededError, InstanceError, ParseError, WitnessError
from .limits import MAX_GRAPH_SEARCH
from .problems import Graph, make_graph


@dataclass(frozen=True)
class LiteralCondition:
    """One ground edge literal: E(u,v) or its negation."""

    relation: str
    positive: bool
    args: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.relation != "E" or len(self.args) != 2:
            raise InstanceError("only binary E literals are supported")

    def __str__(self) -> str:
        sign = "" if self.positive else "!"
        return f"{sign}E({self.args[0]},{self.args[1]})"


_COND_RE = re.compile(r"\s*(!?)\s*E\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def parse_condition(text: str) -> LiteralCondition:
    m = _COND_RE.match(text)
    if m is None:
        raise ParseError(f"cannot read edge literal {text!r}", 1, 1)
    return LiteralCondition("E", m.group(1) == "", (int(m.group(2)), int(m.group(3))))


def _check_args(conds: Sequence[LiteralCondition], m: int) -> None:
    for cond in conds:
        if any(a < 0 or a >= m for a in cond.args):
            raise InstanceError(f"condition {cond} mentions nodes outside size {m}")


def is_consistent_graph(conds: Sequence[LiteralCondition], m: int,
                        ordered: bool = False) -> bool:
    """Whether some simple graph on m nodes satisfies all the literals.

    A demanded loop is unsatisfiable, as is a pair required both present
    and absent.  By default E(u,v) and its mirror E(v,u) name the same
    edge; the ordered reading treats only syntactically identical pairs as
    clashing.
    """
    _check_args(conds, m)
    signs: dict[tuple[int, int], bool] = {}
    for cond in conds:
        u, v = cond.args
        if u == v:
            if cond.positive:
                return False
            continue
        key = (u, v) if ordered else (min(u, v), max(u, v))
        if signs.setdefault(key, cond.positive) != cond.positive:
            return False
    return True


def conditions_hold(g: Graph, conds: Sequence[LiteralCondition]) -> bool:
    for cond in conds:
        u, v = cond.args
        if g.has_edge(u, v) != cond.positive:
            return False
    return True


def _touched(conds: Iterable[LiteralCondition],
             negative_only: bool = False) -> frozenset:
    nodes = set()
    for cond in conds:
        if negative_only and cond.positive:
            continue
        nodes.update(cond.args)
    return frozenset(nodes)


def witness_2cc(conds: Sequence[LiteralCondition], m: int
                ) -> tuple[Graph, frozenset]:
    """A clique-colorable graph satisfying the literals, with its red side.

    All-positive sequences are met by the complete graph.  Otherwise the
    witness is the complete graph minus exactly the negated pairs, colored
    red on the nodes no negative literal touches: that set induces a
    clique joined to everything else, so no maximal clique fits inside
    either color class.  Both cases need m at least 2k+1.
    """
    if not is_consistent_graph(conds, m):
        raise WitnessError("conditions are not satisfiable by any graph")
    if m < 2 * len(conds) + 1:
        raise WitnessError(f"need at least {2 * len(conds) + 1} nodes, have {m}")
    negated = {(min(u, v), max(u, v))
               for cond in conds if not cond.positive
               for u, v in [cond.args] if u != v}
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)
             if (u, v) not in negated]
    if all(cond.positive for cond in conds):
        return make_graph(m, edges), frozenset({0})
    red = frozenset(range(m)) - _touched(conds, negative_only=True)
    return make_graph(m, edges), red


def witness_2cc_complement(conds: Sequence[LiteralCondition], m: int) -> Graph:
    """A non-clique-colorable witness: demanded edges plus a far-away C5.

    The five-cycle goes on nodes no condition mentions; its edges are
    maximal cliques of the result and an odd cycle admits no proper
    2-coloring, so one of them is monochromatic under any coloring.
    """
    if not is_consistent_graph(conds, m):
        raise WitnessError("conditions are not satisfiable by any graph")
    free = sorted(set(range(m)) - _touched(conds))
    if len(free) < 5:
        raise WitnessError(f"need 5 untouched nodes for the cycle, have {len(free)}")
    cycle = free[:5]
    edges = [cond.args for cond in conds if cond.positive]
    edges += [(cycle[i], cycle[(i + 1) % 5]) for i in range(5)]
    return make_graph(m, edges)


@dataclass(frozen=True)
class UniversalityReport:
    problem: str
    n: int
    k: int
    m_range: tuple[int, int]
    passed: bool
    counterexample: tuple[int, tuple[LiteralCondition, ...]] | None
    witnesses_validated: int
    sequences_full: int
    sequences_checked: int


def _condition_pool(m: int) -> list[LiteralCondition]:
    pool = []
    for u in range(m):
        for v in range(u, m):
            for positive in (True, False):
                pool.append(LiteralCondition("E", positive, (u, v)))
    return pool


def _all_graphs(m: int, budget: int):
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    count = 1 << len(pairs)
    if count > budget:
        raise BudgetExceededError(
            f"graph search space 2^{len(pairs)} exceeds budget {budget}")
    for mask in range(count):
        yield make_graph(m, [pairs[i] for i in range(len(pairs))
                             if mask >> i & 1])


def check_universality(oracle: Callable[[Graph], bool], n: int, k: int,
                       m_max: int,
                       witness: Callable | None = None,
                       problem: str = "",
                       search_budget: int = MAX_GRAPH_SEARCH,
                       ordered: bool = False) -> UniversalityReport:
    """Test (n,k)-universality of the problem the oracle decides.

    Sequences are enumerated as sets of canonical literals of size up to k
    (duplicates and mirrored pairs collapse; the raw sequence count is
    recorded alongside).  Each consistent set must be satisfied by some
    graph inside the problem: the witness constructor is consulted first
    and exhaustive search over all graphs of that size is the fallback.
    The first failing (m, sequence) pair, in enumeration order, is the
    counterexample.
    """
    if m_max < n:
        raise InstanceError("m_max below the starting size")
    if k < 1:
        raise InstanceError("need at least one literal")
    validated = 0
    full = 0
    checked = 0
    for m in range(n, m_max + 1):
        full += (2 * m * m) ** k
        pool = _condition_pool(m)
        for size in range(1, k + 1):
            for conds in combinations(pool, size):
                checked += 1
                if not is_consistent_graph(conds, m, ordered=ordered):
                    continue
                satisfied = False
                if witness is not None:
                    try:
                        built = witness(conds, m)
                    except WitnessError:
                        built = None
                    if built is not None:
                        g = built[0] if isinstance(built, tuple) else built
                        if not conditions_hold(g, conds) or not oracle(g):
                            raise WitnessError(
                                f"witness for {[str(c) for c in conds]} at "
                                f"size {m} violates its contract")
                        validated += 1
                        satisfied = True
                if not satisfied:
                    for g in _all_graphs(m, search_budget):
                        if conditions_hold(g, conds) and oracle(g):
                            satisfied = True
                            break
                if not satisfied:
                    return UniversalityReport(problem, n, k, (n, m_max), False,
                                              (m, tuple(conds)), validated,
                                              full, checked)
    return UniversalityReport(problem, n, k, (n, m_max), True, None,
                              validated, full, checked)


def check_monotone(oracle: Callable[[Graph], bool], n: int, k: int,
                   m_max: int,
                   witness: Callable | None = None,
                   problem: str = "") -> bool:
    """The two monotonicity directions of a verified (n,k) result.

    Universality survives lowering k and raising n.  Dropping to k=0 over
    a constant-free vocabulary leaves nothing to check, so that side is
    vacuously true.
    """
    if k < 1:
        raise InstanceError("monotonicity starts from k >= 1")
    if k > 1:
        lower = check_universality(oracle, n, k - 1, m_max,
                                   witness=witness, problem=problem)
        if not lower.passed:
            return False
    higher = check_universality(oracle, n + 1, k, m_max,
                                witness=witness, problem=problem)
    return higher.passed
