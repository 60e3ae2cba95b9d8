"""The reduction catalog: every structure map shipped by the workbench.

Each entry is a :class:`NamedReduction` holding a first-order projection
(the authoritative object) and, where a natural one exists, an
instance-level ``direct_map`` used as a fast path in exhaustive sweeps.
The generic compiler :func:`generic_to_qsat2` turns any validated
prenex-DNF second-order sentence into such a projection, which is the
constructive half of the completeness argument the deciders in
:mod:`fopkit.problems` test against.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import CompileError, ReductionError
from .evaluate import NormalFormSentence, validate_normal_form
from .formulas import (
    TRUE,
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    MaxConst,
    Not,
    Num,
    Or,
    RelAtom,
    Var,
    conj,
    disj,
    parse_formula,
)
from .problems import (
    SIGMA_CNF,
    SIGMA_DNF,
    SIGMA_G,
    TAU,
    Graph,
    Qbf2Cnf,
    Qbf2Dnf,
    VcsatInstance,
    decide_2cc,
    decide_2cc_n,
    decide_qsat2,
    decide_qunsat2,
    decide_unique_ext,
    decide_vcsat,
    decode_cnf,
    decode_dnf,
    decode_graph,
    decode_vcsat,
    make_graph,
)
from .queries import FirstOrderQuery, apply_query, block_names, make_query
from .structures import Structure, Vocabulary, enumerate_structures
from .limits import MAX_STRUCTURES


def bit_width(count: int) -> int:
    # ceil(log2(count)), never less than one bit
    if count < 1:
        raise ValueError("bit_width needs a positive count")
    return max(1, (count - 1).bit_length())


def _bin_code(value: int, width: int) -> tuple[int, ...]:
    """Binary digits of value, most significant first, fixed width."""
    return tuple((value >> (width - 1 - t)) & 1 for t in range(width))


def _bits_pin(names: Sequence[str], value: int) -> list[Formula]:
    return [Eq(Var(n), Num(bit)) for n, bit in zip(names, _bin_code(value, len(names)))]


def _tuple_equal(left: Sequence[str], right: Sequence[str]) -> list[Formula]:
    return [Eq(Var(a), Var(b)) for a, b in zip(left, right)]


@dataclass(frozen=True)
class NamedReduction:
    """A registered reduction: a fop plus an optional instance-level twin.

    ``source_tag`` and ``target_tag`` are problem names understood by
    :func:`problem_oracle`.  When ``direct_map`` is present it must agree
    with ``apply_query`` on every instance (tested at desk scale).
    """

    name: str
    source_tag: str
    target_tag: str
    query: FirstOrderQuery
    direct_map: Callable | None = None
    fidelity: str = "corrected"


# ---------------------------------------------------------------------------
# generic compilation of a prenex-DNF second-order sentence


def _rename_term(term, mapping: dict) -> object:
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    return term


def _rename_literal(lit: Formula, mapping: dict) -> Formula:
    """Simultaneous variable renaming inside a matrix literal."""
    if isinstance(lit, Not):
        return Not(_rename_literal(lit.sub, mapping))
    if isinstance(lit, RelAtom):
        return RelAtom(lit.name, tuple(_rename_term(t, mapping) for t in lit.args))
    if isinstance(lit, Eq):
        return Eq(_rename_term(lit.left, mapping), _rename_term(lit.right, mapping))
    raise CompileError(f"matrix literal expected, got {type(lit).__name__}")


def _classify_implicant(lits: Sequence[Formula], rel_codes: dict, vocab: Vocabulary):
    """Split one implicant into (numeric part, sigma literal, variable literals).

    Variable literals come back as (positive, name, args) triples with the
    argument tuple checked to be a sub-tuple of the first-order variables.
    """
    numeric: list[Formula] = []
    sigma: Formula | None = None
    varlits: list[tuple[bool, str, tuple[str, ...]]] = []
    for lit in lits:
        positive = True
        atom = lit
        if isinstance(atom, Not):
            positive = False
            atom = atom.sub
        if isinstance(atom, RelAtom) and atom.name in rel_codes:
            args = []
            for term in atom.args:
                if not isinstance(term, Var):
                    raise CompileError(
                        f"relation variable {atom.name} applied to a non-variable term")
                args.append(term.name)
            varlits.append((positive, atom.name, tuple(args)))
        elif isinstance(atom, RelAtom) and vocab.arity(atom.name) is not None:
            sigma = lit
        else:
            numeric.append(lit)
    return numeric, sigma, varlits


def generic_to_qsat2(phi: Formula | NormalFormSentence,
                     source_vocab: Vocabulary) -> FirstOrderQuery:
    """Compile a prenex-DNF SO2 sentence into a projection onto sigma_dnf.

    The image structure's k-tuples serve both as implicant copies (one per
    assignment of the first-order variables) and as boolean variables.  The
    leading ``bit_width(m)`` coordinates carry a binary code: implicant
    index on the row side, relation-variable index on the variable side
    (existential variables first, then universal ones).  Rows whose code is
    not an implicant index, or whose numeric or vocabulary precondition
    fails, receive one variable both positively and negatively, which makes
    them unsatisfiable and therefore harmless in the disjunction.
    """
    nf = phi if isinstance(phi, NormalFormSentence) else validate_normal_form(phi)
    g = len(nf.existential_rels)
    h = len(nf.universal_rels)
    c = len(nf.variables)
    r = len(nf.implicants)
    rel_codes: dict[str, int] = {}
    rel_arity: dict[str, int] = {}
    for offset, rels in ((0, nf.existential_rels), (g, nf.universal_rels)):
        for index, (name, arity) in enumerate(rels):
            rel_codes[name] = offset + index
            rel_arity[name] = arity
            if arity > c:
                raise CompileError(
                    f"relation variable {name} has arity {arity} but only "
                    f"{c} first-order variables are available")

    b = bit_width(max(g + h, r))
    k = b + c
    xs = block_names(0, k)
    ys = block_names(1, k)
    x_bits, x_slots = xs[:b], xs[b:]
    y_bits, y_slots = ys[:b], ys[b:]
    var_slot = {name: x_slots[i] for i, name in enumerate(nf.variables)}
    var_pos = {name: i for i, name in enumerate(nf.variables)}

    def check_subtuple(name: str, args: tuple[str, ...]) -> tuple[int, ...]:
        positions = []
        for arg in args:
            if arg not in var_pos:
                raise CompileError(
                    f"relation variable {name} applied to unknown variable {arg}")
            positions.append(var_pos[arg])
        if any(q <= p for p, q in zip(positions, positions[1:])):
            raise CompileError(
                f"arguments of {name} must be a sub-tuple of the "
                "first-order variable block")
        return tuple(positions)

    def literal_pins(name: str, args: tuple[str, ...]) -> list[Formula]:
        # the boolean variable for name(args): code bits, argument values,
        # zero padding in the unused value slots
        pins = _bits_pin(y_bits, rel_codes[name])
        for slot, arg in zip(y_slots, args):
            pins.append(Eq(Var(slot), Var(var_slot[arg])))
        for slot in y_slots[len(args):]:
            pins.append(Eq(Var(slot), Num(0)))
        return pins

    spare = g + h if g + h < (1 << b) else None

    def poison_pins(imp_index: int, varlits) -> list[Formula]:
        """Pins for the self-contradictory variable of a dead row.

        The tuple must stay clear of every real literal variable of the same
        implicant, otherwise the numeric guards stop being exclusive.
        """
        if spare is not None:
            return _bits_pin(y_bits, spare) + _tuple_equal(y_slots, x_slots)
        holder = None
        for name, code in rel_codes.items():
            if code == imp_index:
                holder = name
        if holder is None or not any(name == holder for _, name, _a in varlits):
            return _tuple_equal(ys, xs)
        pins = _bits_pin(y_bits, imp_index)
        if rel_arity[holder] < c:
            pins += [Eq(Var(slot), Num(0)) for slot in y_slots[:-1]]
            pins.append(Eq(Var(y_slots[-1]), Num(1)))
            return pins
        # full-arity holder: shift the first value coordinate by one, with
        # wraparound so the poison variable exists on every row
        first_x, first_y = x_slots[0], y_slots[0]
        pins.append(Or(RelAtom("SUC", (Var(first_x), Var(first_y))),
                       And(Eq(Var(first_x), MaxConst()), Eq(Var(first_y), Num(0)))))
        pins += _tuple_equal(y_slots[1:], x_slots[1:])
        return pins

    phi_e = disj(conj(_bits_pin(x_bits, j)) for j in range(g))
    q_parts: list[Formula] = []
    m_parts: list[Formula] = []

    for i, lits in enumerate(nf.implicants):
        numeric, sigma, varlits = _classify_implicant(lits, rel_codes, source_vocab)
        rename = {name: Var(var_slot[name]) for name in nf.variables}
        alpha = [_rename_literal(lit, rename) for lit in numeric]
        sigma_lit = _rename_literal(sigma, rename) if sigma is not None else None
        row = _bits_pin(x_bits, i)

        seen: dict[tuple[bool, str], list[tuple[str, ...]]] = {}
        for positive, name, args in varlits:
            if len(args) != rel_arity[name]:
                raise CompileError(
                    f"{name} declared with arity {rel_arity[name]} "
                    f"but applied to {len(args)} arguments")
            check_subtuple(name, args)
            guard = row + literal_pins(name, args) + list(alpha)
            if sigma_lit is not None:
                guard.append(sigma_lit)
            # same variable, same sign, different argument lists: fire the
            # later occurrence only where the argument values differ
            for earlier in seen.setdefault((positive, name), []):
                guard.append(Not(conj(
                    Eq(Var(var_slot[a]), Var(var_slot[e]))
                    for a, e in zip(args, earlier))))
            seen[(positive, name)].append(args)
            (q_parts if positive else m_parts).append(conj(guard))

        dead = []
        if alpha:
            dead.append(conj(row + [Not(conj(alpha))] + _tuple_equal(ys, xs)))
        if sigma_lit is not None:
            dead.append(conj(row + list(alpha) + [Not(sigma_lit)]
                             + poison_pins(i, varlits)))
        q_parts.extend(dead)
        m_parts.extend(dead)

    # rows whose leading coordinates are no implicant code at all
    off_row = conj([Not(conj(_bits_pin(x_bits, i))) for i in range(r)]
                   + _tuple_equal(ys, xs))
    q_parts.append(off_row)
    m_parts.append(off_row)

    return make_query(source_vocab, SIGMA_DNF, k, TRUE,
                      {"E": phi_e, "Q": disj(q_parts), "M": disj(m_parts)})


PHI_TOY = parse_formula(
    "exists2 S/1 forall2 T/1 exists x1 exists x2 "
    "((S(x1) & !T(x2) & E(x1,x2)) | (!S(x1) & T(x1)))",
    SIGMA_G)


# ---------------------------------------------------------------------------
# fixed catalog reductions


def _dnf_negation_cnf(inst: Qbf2Dnf) -> Qbf2Cnf:
    # De Morgan: each implicant flips into one clause with signs swapped
    return Qbf2Cnf(inst.var_count, inst.existential,
                   tuple((neg, pos) for pos, neg in inst.implicants))


def qsat2_to_qunsat2() -> NamedReduction:
    """Negate a DNF formula: satisfied-for-all flips to false-for-all."""
    x1, y1 = "x1", "y1"
    query = make_query(SIGMA_DNF, SIGMA_CNF, 1, TRUE, {
        "E": RelAtom("E", (Var(x1),)),
        "P": RelAtom("M", (Var(x1), Var(y1))),
        "N": RelAtom("Q", (Var(x1), Var(y1))),
    })
    return NamedReduction("qsat2-qunsat2", "qsat2", "qunsat2", query,
                          direct_map=_dnf_negation_cnf)


def fresh_variable_transform(inst: Qbf2Cnf) -> Qbf2Cnf:
    """The boolean core of the unique-extension reduction.

    A fresh variable z (index n, universal) joins every clause positively;
    each universal variable y gains a clause (not z or y), each existential
    variable a tautology.  The input formula is universally falsifiable
    exactly when the output has a unique satisfying completion.
    """
    n = inst.var_count
    clauses = [(pos | {n}, neg) for pos, neg in inst.clauses]
    for j in range(n):
        if j in inst.existential:
            clauses.append(({j}, {j}))
        else:
            clauses.append(({j}, {n}))
    return Qbf2Cnf(n + 1, inst.existential, tuple(clauses))


def _unique_direct(inst: Qbf2Cnf, fidelity: str) -> Qbf2Cnf:
    """Instance-level unique-extension image on the doubled universe.

    Element (i,j) of the image is i*n+j: variables y_j live at (0,j), the
    new variable z at (1,0) and the remaining (1,j) are existential fillers.
    Rows (0,c) carry the old clauses with z added; row (1,c) carries the
    per-variable clause for y_c.  The corrected fidelity writes the
    existential tautology on y_c itself, the verbatim one on the filler
    (1,c), matching the printed projection formulas.
    """
    n = inst.var_count
    z = n
    existential = frozenset(inst.existential) | frozenset(range(n + 1, 2 * n))
    rows: list[tuple[set, set]] = []
    for pos, neg in inst.clauses:
        rows.append((set(pos) | {z}, set(neg)))
    for j in range(n):
        if j not in inst.existential:
            rows.append(({j}, {z}))
        elif fidelity == "verbatim":
            rows.append(({n + j}, {n + j}))
        else:
            rows.append(({j}, {j}))
    return Qbf2Cnf(2 * n, existential, tuple(rows))


def qunsat2_to_unique(fidelity: str = "corrected") -> NamedReduction:
    """Arity-2 projection from universal falsifiability to unique extension.

    fidelity selects between the printed projection formulas (verbatim,
    whose last two negative-side guards overlap and therefore fail the
    exclusivity check) and a guard-disjoint rewrite of the same
    construction (corrected, the default).
    """
    if fidelity not in ("verbatim", "corrected"):
        raise ReductionError(f"unknown fidelity {fidelity!r}")
    x1, x2, y1, y2 = Var("x1"), Var("x2"), Var("y1"), Var("y2")
    universe = Or(Eq(x1, Num(0)), Eq(x1, Num(1)))
    psi_e = Or(conj([Eq(x1, Num(1)), Not(Eq(x2, Num(0)))]),
               conj([Eq(x1, Num(0)), RelAtom("E", (x2,))]))
    common_p = [
        conj([Eq(x1, Num(0)), Eq(y1, Num(1)), Eq(y2, Num(0))]),
        conj([Eq(x1, Num(0)), Eq(y1, Num(0)), RelAtom("P", (x2, y2))]),
    ]
    common_n = [
        conj([Eq(x1, Num(0)), Eq(y1, Num(0)), RelAtom("N", (x2, y2))]),
        conj([Eq(x1, Num(1)), Eq(y1, Num(1)), Eq(y2, Num(0)),
              Not(RelAtom("E", (x2,)))]),
    ]
    if fidelity == "verbatim":
        psi_p = disj(common_p + [
            conj([Eq(x1, Num(1)), Eq(y1, Num(0)), Eq(x2, y2),
                  Not(RelAtom("E", (x2,)))]),
            conj([Eq(x1, Num(1)), Eq(y1, Num(1)), Eq(x2, y2),
                  RelAtom("E", (x2,))]),
        ])
        psi_n = disj(common_n + [
            conj([Eq(x1, Num(1)), Eq(y1, Num(1)), Eq(x2, y2),
                  RelAtom("E", (x2,))]),
        ])
    else:
        psi_p = disj(common_p + [
            conj([Eq(x1, Num(1)), Eq(y1, Num(0)), Eq(x2, y2)]),
        ])
        psi_n = disj(common_n + [
            conj([Eq(x1, Num(1)), Eq(y1, Num(0)), Eq(x2, y2),
                  RelAtom("E", (x2,))]),
        ])
    query = make_query(SIGMA_CNF, SIGMA_CNF, 2, universe,
                       {"E": psi_e, "P": psi_p, "N": psi_n})
    return NamedReduction("qunsat2-unique", "qunsat2", "unique", query,
                          direct_map=lambda inst: _unique_direct(inst, fidelity),
                          fidelity=fidelity)


# node kind codes for the clique-coloring image, in tuple lexicographic
# order: 1 plain, 2 primed, 3 negated-primed, 4 negated, 5 implicant,
# 6 implicant-primed.  The spare codes 0 and 7 hold the anchor pair and
# its primed companions in the corrected variant.
_KIND_Z, _KIND_ZP = 0, 7
_KIND_X, _KIND_XP, _KIND_NXP, _KIND_NX, _KIND_P, _KIND_PP = range(1, 7)


def _clique_coloring_graph(inst: Qbf2Dnf, anchored: bool = False) -> Graph:
    """The graph whose 2-clique-colorability mirrors the source.

    Node numbering follows the fop tuple order: variable nodes first
    (plain, primed, negated-primed, negated), then implicant nodes and
    their primed companions, each block of size n.  With ``anchored`` the
    two anchor nodes precede everything and their primed companions come
    last, for 6n + 4 nodes in all.
    """
    n = inst.var_count
    base = 2 if anchored else 0
    x = lambda v: base + v
    xp = lambda v: base + n + v
    nxp = lambda v: base + 2 * n + v
    nx = lambda v: base + 3 * n + v
    p = lambda i: base + 4 * n + i
    pp = lambda i: base + 5 * n + i
    edges: list[tuple[int, int]] = []
    layer = [x(v) for v in range(n)] + [nx(v) for v in range(n)]
    for a in range(len(layer)):
        for bb in range(a + 1, len(layer)):
            u, w = layer[a], layer[bb]
            if abs(u - w) == 3 * n:
                continue  # the excluded matching pair
            edges.append((u, w))
    for v in range(n):
        edges.append((x(v), xp(v)))
        edges.append((nx(v), nxp(v)))
        if v in inst.existential:
            edges.append((xp(v), nxp(v)))
        else:
            edges.append((xp(v), pp(n - 1)))
            edges.append((nxp(v), pp(n - 1)))
    for i in range(n):
        edges.append((p(i), pp(i)))
        if i + 1 < n:
            edges.append((pp(i), p(i + 1)))
    for i, (pos, neg) in enumerate(inst.implicants):
        for v in range(n):
            if v not in neg:
                edges.append((x(v), p(i)))
            if v not in pos:
                edges.append((nx(v), p(i)))
    if anchored:
        zp, zbp = base + 6 * n, base + 6 * n + 1
        for z in (0, 1):
            for node in layer:
                edges.append((z, node))
            for i in range(n):
                edges.append((z, p(i)))
        edges.append((0, zp))
        edges.append((1, zbp))
        edges.append((zp, pp(n - 1)))
        edges.append((zbp, pp(n - 1)))
        return make_graph(6 * n + 4, edges)
    return make_graph(6 * n, edges)


def _kind_pins(names: Sequence[str], kind: int) -> list[Formula]:
    return _bits_pin(names[:3], kind)


def qsat2_to_2cc(fidelity: str = "corrected") -> NamedReduction:
    """Arity-4 projection from QSat2 to 2-clique-coloring.

    Tuples (i,j,k,v) with ijk the binary code of the node kind; the edge
    guards are mutually exclusive through the kind codes alone.  The
    image edge relation is written one-directional and relies on the
    graph decoder's symmetric reading.

    The verbatim form uses kinds 1..6 and twelve edge families.  It
    misreads two corners of the instance space: a source whose variables
    are all existential always leaves a one-colored transversal clique in
    the image, and an implicant claiming some variable both positively
    and negatively detaches both of that variable's nodes from its
    implicant node.  The corrected form behaves like the verbatim one run
    on the source plus one extra universal variable no implicant touches:
    an anchor pair (kind 0, first two nodes) adjacent to the whole
    variable layer and all implicant nodes, with primed companions
    (kind 7, last two nodes) wired to the final primed implicant node the
    way any universal variable's primed nodes are.
    """
    xs = block_names(0, 4)
    ys = block_names(1, 4)
    xv, yv = Var(xs[3]), Var(ys[3])
    anchored = fidelity == "corrected"
    if not anchored and fidelity != "verbatim":
        raise ReductionError(f"unknown fidelity {fidelity!r}")

    def member(kind: int) -> Formula:
        pins = _kind_pins(xs, kind)
        if kind in (_KIND_Z, _KIND_ZP):
            # only two anchor nodes per kind, so the slot index is 0 or 1
            pins = pins + [Or(Eq(xv, Num(0)), Eq(xv, Num(1)))]
        return conj(pins)

    kinds = range(8) if anchored else range(1, 7)
    universe = disj(member(kind) for kind in kinds)

    def edge(xkind: int, ykind: int, *extra: Formula) -> Formula:
        return conj(_kind_pins(xs, xkind) + _kind_pins(ys, ykind) + list(extra))

    same = Eq(xv, yv)
    families = [
        edge(_KIND_X, _KIND_XP, same),
        edge(_KIND_NXP, _KIND_NX, same),
        edge(_KIND_XP, _KIND_NXP, RelAtom("E", (xv,)), same),
        edge(_KIND_P, _KIND_PP, same),
        edge(_KIND_PP, _KIND_P, RelAtom("SUC", (xv, yv))),
        edge(_KIND_XP, _KIND_PP, Not(RelAtom("E", (xv,))), Eq(yv, MaxConst())),
        edge(_KIND_NXP, _KIND_PP, Not(RelAtom("E", (xv,))), Eq(yv, MaxConst())),
        edge(_KIND_X, _KIND_X, Not(same)),
        edge(_KIND_NX, _KIND_NX, Not(same)),
        edge(_KIND_X, _KIND_NX, Not(same)),
        edge(_KIND_X, _KIND_P, Not(RelAtom("M", (yv, xv)))),
        edge(_KIND_NX, _KIND_P, Not(RelAtom("Q", (yv, xv)))),
    ]
    if anchored:
        families += [
            edge(_KIND_Z, _KIND_X),
            edge(_KIND_Z, _KIND_NX),
            edge(_KIND_Z, _KIND_P),
            edge(_KIND_Z, _KIND_ZP, same),
            edge(_KIND_ZP, _KIND_PP, Eq(yv, MaxConst())),
        ]
    phi_g = disj(families)
    query = make_query(SIGMA_DNF, SIGMA_G, 4, universe, {"E": phi_g})
    return NamedReduction("qsat2-2cc", "qsat2", "2cc", query,
                          direct_map=lambda inst: _clique_coloring_graph(inst, anchored),
                          fidelity=fidelity)


# ---------------------------------------------------------------------------
# padding below a cardinality threshold


def padding_copies(threshold: int) -> int:
    """Smallest count whose doubled value exceeds the threshold."""
    if threshold < 2:
        raise ReductionError("padding threshold must be at least 2")
    return threshold // 2 + 1


def padding_query(threshold: int) -> FirstOrderQuery:
    """Duplicate a graph into enough disjoint copies to reach the threshold.

    With k copies the image of a graph on s nodes has k*s nodes, and
    2k > threshold guarantees that is never below the threshold (every
    structure has at least one element; sizes below 2 are padded members
    by definition anyway).  The copy index lives in the leading
    ceil(log2 k) coordinates, the node in the last one.
    """
    k = padding_copies(threshold)
    bits = bit_width(k)
    arity = bits + 1
    xs = block_names(0, arity)
    ys = block_names(1, arity)
    universe = disj(conj(_bits_pin(xs[:bits], j)) for j in range(k))
    edge = conj(_tuple_equal(xs[:bits], ys[:bits])
                + [RelAtom("E", (Var(xs[-1]), Var(ys[-1])))])
    return make_query(SIGMA_G, SIGMA_G, arity, universe, {"E": edge})


def _padding_direct(threshold: int) -> Callable[[Graph], Graph]:
    def build(g: Graph) -> Graph:
        k = padding_copies(threshold)
        n = g.node_count
        edges = [(copy * n + u, copy * n + v)
                 for copy in range(k) for u, v in g.edges]
        return make_graph(k * n, edges)
    return build


def padding_reduction(threshold: int) -> NamedReduction:
    return NamedReduction(f"pad-2cc:{threshold}", "2cc", f"2cc-n:{threshold}",
                          padding_query(threshold),
                          direct_map=_padding_direct(threshold))


def cardinality_sentence(count: int) -> Formula:
    """A first-order sentence true exactly on universes of the given size."""
    if count < 1:
        raise ReductionError("cardinality sentence needs a positive count")
    names = [f"x{i}" for i in range(1, count + 1)]
    distinct = conj(Not(Eq(Var(names[i]), Var(names[j])))
                    for i in range(count) for j in range(i + 1, count))
    covered = Forall("y", disj(Eq(Var("y"), Var(n)) for n in names))
    body = And(distinct, covered)
    for name in reversed(names):
        body = Exists(name, body)
    return body


# ---------------------------------------------------------------------------
# value-cost embedding


def qsat2_to_vcsat(inst: Qbf2Dnf) -> VcsatInstance:
    """Forget the existential marking, price it into values instead.

    Existential variables cost 1, universal ones 2^n - 1; the budget
    2^(n-1) then admits exactly the subsets of the original existential
    set, and enlarging an accepting subset keeps it accepting.
    """
    n = inst.var_count
    if n < 2:
        raise ReductionError("value-cost embedding needs at least 2 variables")
    values = tuple(1 if v in inst.existential else (1 << n) - 1 for v in range(n))
    return VcsatInstance(n, inst.implicants, values, 1 << (n - 1))


def _vcsat_named() -> NamedReduction:
    x1, y1 = Var("x1"), Var("y1")
    query = make_query(SIGMA_DNF, TAU, 1, TRUE, {
        "P": RelAtom("Q", (x1, y1)),
        "N": RelAtom("M", (x1, y1)),
        "V": Or(Eq(y1, Num(0)),
                conj([Not(Eq(y1, Num(0))), Not(RelAtom("E", (x1,)))])),
        "K": Eq(x1, MaxConst()),
    })
    return NamedReduction("qsat2-vcsat", "qsat2", "vcsat", query,
                          direct_map=qsat2_to_vcsat)


def value_cost_sentences() -> tuple[Formula, Formula]:
    """The two tau-sentences every value-cost image satisfies.

    The first says each variable's value is 1 or all-ones (the printed
    version quantifies the bit position outside the exclusive-or, which no
    structure satisfies; here the disjunction is scoped per variable).
    The second pins the cost to the single high bit.
    """
    psi1 = parse_formula(
        "forall x ((forall y (V(x,y) <-> y = 0)) (+) (forall y V(x,y)))", TAU)
    psi2 = parse_formula("forall x (K(x) <-> x = max)", TAU)
    return psi1, psi2


# ---------------------------------------------------------------------------
# registry and verification harness


def reduction_names() -> tuple[str, ...]:
    return ("qsat2-qunsat2", "qunsat2-unique", "qsat2-2cc", "qsat2-vcsat",
            "pad-2cc:<n>", "gen-qsat2")


def get_reduction(name: str, fidelity: str = "corrected") -> NamedReduction:
    if name == "qsat2-qunsat2":
        return qsat2_to_qunsat2()
    if name == "qunsat2-unique":
        return qunsat2_to_unique(fidelity)
    if name == "qsat2-2cc":
        return qsat2_to_2cc(fidelity)
    if name == "qsat2-vcsat":
        return _vcsat_named()
    if name.startswith("pad-2cc:"):
        try:
            threshold = int(name.split(":", 1)[1])
        except ValueError:
            raise ReductionError(f"bad padding threshold in {name!r}") from None
        return padding_reduction(threshold)
    if name == "gen-qsat2":
        raise ReductionError(
            "gen-qsat2 takes a sentence, not an instance; use the compiler")
    raise ReductionError(f"unknown reduction {name!r}")


def _quiet_decode(A: Structure) -> Graph:
    # enumeration sweeps hit loopy E relations constantly; the drop warning
    # is for hand-written files, not bulk oracles
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return decode_graph(A)


def problem_oracle(tag: str) -> Callable[[Structure], bool]:
    """A structure-level decider for a problem tag, decoding included."""
    if tag == "qsat2":
        return lambda A: decide_qsat2(decode_dnf(A))
    if tag == "qunsat2":
        return lambda A: decide_qunsat2(decode_cnf(A))
    if tag == "unique":
        return lambda A: decide_unique_ext(decode_cnf(A))
    if tag == "2cc":
        # reduction images at sweep sizes run past the interactive default cap
        return lambda A: decide_2cc(_quiet_decode(A), node_cap=32)[0]
    if tag.startswith("2cc-n:"):
        threshold = int(tag.split(":", 1)[1])
        return lambda A: decide_2cc_n(_quiet_decode(A), threshold, node_cap=32)
    if tag == "vcsat":
        return lambda A: decide_vcsat(decode_vcsat(A))
    raise ReductionError(f"unknown problem tag {tag!r}")


@dataclass(frozen=True)
class VerificationReport:
    sizes: tuple[int, ...]
    instance_count: int
    agreements: int
    counterexamples: tuple[tuple[int, int, bool, bool], ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify_reduction(red: NamedReduction | FirstOrderQuery,
                     src_oracle: Callable[[Structure], bool],
                     dst_oracle: Callable[[Structure], bool],
                     sizes: Iterable[int],
                     budget: int = MAX_STRUCTURES,
                     row_sink: Callable | None = None) -> VerificationReport:
    """Sweep every source structure of the given sizes through the fop.

    Counterexamples are recorded as (size, structure index, source verdict,
    image verdict); the index is the canonical enumeration rank, so the
    structure is recoverable with structure_at.
    """
    query = red.query if isinstance(red, NamedReduction) else red
    sizes = tuple(sizes)
    total = 0
    agreements = 0
    counterexamples: list[tuple[int, int, bool, bool]] = []
    for size in sizes:
        for index, A in enumerate(enumerate_structures(query.source_vocab, size,
                                                       budget=budget)):
            src = src_oracle(A)
            dst = dst_oracle(apply_query(query, A))
            total += 1
            if src == dst:
                agreements += 1
            else:
                counterexamples.append((size, index, src, dst))
            if row_sink is not None:
                row_sink(size, index, src, dst)
    return VerificationReport(sizes, total, agreements, tuple(counterexamples))
