"""First-order queries between vocabularies, and projection validation.

A query of arity k maps a structure A to a structure I(A): the new
universe is the set of k-tuples satisfying the universe formula, indexed
in lexicographic order; each target relation of arity a is defined by a
formula over a blocks of k variables named x1..xk, y1..yk, z1..zk, w.., v..,
u..; each target constant by a one-block formula with exactly one
satisfying tuple.

A query is a projection when the universe formula is numeric and every
defining formula is a disjunction of guarded disjuncts: a numeric guard,
optionally conjoined with exactly one literal of the source vocabulary,
with the guards of any two disjuncts never true together.  Guard
exclusivity is checked semantically over all universe sizes up to a bound;
since guards are numeric, one (empty) structure per size suffices.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping

from .errors import EmptyUniverseError, ParseError, QueryError
from .evaluate import eval_fo
from .formulas import (Eq, Formula, MaxConst, Not, Num, RelAtom, Var,
                       conjuncts, disjuncts, format_formula, free_vars,
                       is_numeric, parse_formula)
from .limits import DEFAULT_EXCLUSIVITY_BOUND
from .structures import Structure, Vocabulary, make_structure

_BLOCK_LETTERS = "xyzwvu"


def block_names(block: int, arity: int) -> tuple[str, ...]:
    """Variable names of one argument block: block 0 is x1..xk, block 1
    is y1..yk, and so on."""
    if block >= len(_BLOCK_LETTERS):
        raise QueryError(f"no variable naming for argument block {block}")
    letter = _BLOCK_LETTERS[block]
    return tuple(f"{letter}{i + 1}" for i in range(arity))


@dataclass(frozen=True)
class FirstOrderQuery:
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    arity: int
    universe_formula: Formula
    relation_formulas: tuple[tuple[str, Formula], ...]  # target declaration order
    constant_formulas: tuple[tuple[str, Formula], ...]

    def relation_formula(self, name: str) -> Formula:
        for rel, phi in self.relation_formulas:
            if rel == name:
                return phi
        raise QueryError(f"no formula for target relation {name!r}")


def make_query(source: Vocabulary, target: Vocabulary, arity: int,
               universe: Formula,
               relations: Mapping[str, Formula],
               constants: Mapping[str, Formula] | None = None) -> FirstOrderQuery:
    """Build a query, checking coverage and free-variable discipline."""
    if arity < 1:
        raise QueryError(f"query arity must be >= 1, got {arity}")
    relations = dict(relations)
    constants = dict(constants or {})
    allowed0 = set(block_names(0, arity))
    extra = free_vars(universe) - allowed0
    if extra:
        raise QueryError(f"universe formula uses variables {sorted(extra)} "
                         f"outside its block {sorted(allowed0)}")
    rel_list: list[tuple[str, Formula]] = []
    for rel, rel_arity in target.relations:
        if rel not in relations:
            raise QueryError(f"missing formula for target relation {rel!r}")
        phi = relations.pop(rel)
        allowed = set()
        for b in range(rel_arity):
            allowed |= set(block_names(b, arity))
        extra = free_vars(phi) - allowed
        if extra:
            raise QueryError(f"formula for {rel!r} uses variables {sorted(extra)} "
                             f"outside its {rel_arity} block(s)")
        rel_list.append((rel, phi))
    if relations:
        raise QueryError(f"unknown target relation(s) {sorted(relations)}")
    const_list: list[tuple[str, Formula]] = []
    for const in target.constants:
        if const not in constants:
            raise QueryError(f"missing formula for target constant {const!r}")
        psi = constants.pop(const)
        extra = free_vars(psi) - allowed0
        if extra:
            raise QueryError(f"formula for constant {const!r} uses variables "
                             f"{sorted(extra)} outside its block")
        const_list.append((const, psi))
    if constants:
        raise QueryError(f"unknown target constant(s) {sorted(constants)}")
    return FirstOrderQuery(source, target, arity, universe,
                           tuple(rel_list), tuple(const_list))


def identity_query(vocab: Vocabulary) -> FirstOrderQuery:
    """The arity-1 query mapping every structure to itself."""
    if vocab.constants:
        raise QueryError("identity query not supported for constant-bearing vocabularies")
    relations = {}
    for rel, arity in vocab.relations:
        args = tuple(Var(block_names(b, 1)[0]) for b in range(arity))
        relations[rel] = RelAtom(rel, args)
    return make_query(vocab, vocab, 1, Eq(Num(0), Num(0)), relations)


def apply_query(I: FirstOrderQuery, A: Structure) -> Structure:
    """Evaluate the query on a structure.

    The output universe is the lex-ordered list of satisfying k-tuples,
    re-indexed as 0..N-1; numeric relations in the defining formulas refer
    to the source universe, numeric relations used on the output refer to
    the new indices.
    """
    if A.vocab != I.source_vocab:
        raise QueryError(f"query expects vocabulary {I.source_vocab.name!r}, "
                         f"structure has {A.vocab.name!r}")
    k = I.arity
    u_vars = block_names(0, k)
    tuples: list[tuple[int, ...]] = []
    for cand in itertools.product(range(A.size), repeat=k):
        if eval_fo(A, I.universe_formula, dict(zip(u_vars, cand))):
            tuples.append(cand)
    if not tuples:
        raise EmptyUniverseError("universe formula selected no tuples")
    index = {t: i for i, t in enumerate(tuples)}
    relations: dict[str, list[tuple[int, ...]]] = {}
    for rel, phi in I.relation_formulas:
        rel_arity = I.target_vocab.arity(rel)
        blocks = [block_names(b, k) for b in range(rel_arity)]
        rows = []
        for combo in itertools.product(tuples, repeat=rel_arity):
            env = {}
            for names, values in zip(blocks, combo):
                env.update(zip(names, values))
            if eval_fo(A, phi, env):
                rows.append(tuple(index[t] for t in combo))
        relations[rel] = rows
    constants: dict[str, int] = {}
    for const, psi in I.constant_formulas:
        hits = [index[t] for t in tuples
                if eval_fo(A, psi, dict(zip(u_vars, t)))]
        if len(hits) != 1:
            raise QueryError(f"constant formula for {const!r} has {len(hits)} "
                             f"witnesses, needs exactly one")
        constants[const] = hits[0]
    return make_structure(I.target_vocab, len(tuples), relations, constants)


def compose_apply(I: FirstOrderQuery, J: FirstOrderQuery, A: Structure) -> Structure:
    """apply J after I; the vocabularies must chain."""
    if I.target_vocab != J.source_vocab:
        raise QueryError("queries do not compose: target and source vocabularies differ")
    return apply_query(J, apply_query(I, A))


# --- projection validation --------------------------------------------------

@dataclass(frozen=True)
class ProjectionReport:
    is_projection: bool
    syntactic_ok: bool
    exclusivity_ok: bool
    violations: tuple[tuple[str, str], ...]  # (formula name, description)


def _split_disjunct(d: Formula, source: Vocabulary
                    ) -> tuple[list[Formula], Formula | None] | None:
    """Split one disjunct into (numeric conjuncts, optional source literal);
    None if the disjunct does not fit the guarded shape."""
    guard: list[Formula] = []
    literal: Formula | None = None
    for part in conjuncts(d):
        atom = part.sub if isinstance(part, Not) else part
        if isinstance(atom, RelAtom) and source.arity(atom.name) is not None:
            if literal is not None:
                return None
            literal = part
        elif is_numeric(part):
            guard.append(part)
        else:
            return None
    return guard, literal


def _guard_pins(guard: list[Formula]) -> dict[str, object]:
    """Variables pinned to a fixed term by a top-level equality conjunct."""
    pins: dict[str, object] = {}
    for g in guard:
        if isinstance(g, Eq):
            var, val = None, None
            if isinstance(g.left, Var) and isinstance(g.right, (Num, MaxConst)):
                var, val = g.left.name, g.right
            elif isinstance(g.right, Var) and isinstance(g.left, (Num, MaxConst)):
                var, val = g.right.name, g.left
            if var is not None and var not in pins:
                pins[var] = val
    return pins


def _pin_value(val, size: int) -> int | None:
    if isinstance(val, Num):
        return val.value if val.value < size else None
    return size - 1


def _guard_holds(A: Structure, guard: list[Formula], env: dict) -> bool:
    return all(eval_fo(A, g, env) for g in guard)


def validate_projection(I: FirstOrderQuery,
                        size_bound: int = DEFAULT_EXCLUSIVITY_BOUND
                        ) -> ProjectionReport:
    """Check the guarded-disjunction shape and semantic guard exclusivity.

    Exclusivity of a pair of guards is first decided by comparing pinned
    coordinates (two guards pinning the same variable to different values
    can never overlap); only pairs surviving that filter are checked by
    enumerating assignments of their shared free variables.
    """
    violations: list[tuple[str, str]] = []
    syntactic_ok = True
    if not is_numeric(I.universe_formula):
        syntactic_ok = False
        violations.append(("universe", "universe formula is not numeric"))
    named: list[tuple[str, Formula, int]] = []
    for rel, phi in I.relation_formulas:
        named.append((rel, phi, I.target_vocab.arity(rel)))
    for const, psi in I.constant_formulas:
        named.append((f"const {const}", psi, 1))
    guarded: list[tuple[str, list[list[Formula]]]] = []
    for name, phi, _blocks in named:
        guards: list[list[Formula]] = []
        ok = True
        for d in disjuncts(phi):
            split = _split_disjunct(d, I.source_vocab)
            if split is None:
                syntactic_ok = False
                ok = False
                violations.append((name, f"disjunct not in guarded shape: "
                                         f"{format_formula(d)}"))
                continue
            guards.append(split[0])
        if ok:
            guarded.append((name, guards))
    exclusivity_ok = True
    for name, guards in guarded:
        if len(guards) < 2:
            continue
        for size in range(1, size_bound + 1):
            probe = make_structure(
                I.source_vocab, size,
                {rel: [] for rel, _a in I.source_vocab.relations},
                {c: 0 for c in I.source_vocab.constants})
            for i, j in itertools.combinations(range(len(guards)), 2):
                g1, g2 = guards[i], guards[j]
                pins1, pins2 = _guard_pins(g1), _guard_pins(g2)
                disjoint = False
                for var in pins1.keys() & pins2.keys():
                    v1 = _pin_value(pins1[var], size)
                    v2 = _pin_value(pins2[var], size)
                    if v1 is None or v2 is None or v1 != v2:
                        disjoint = True
                        break
                if disjoint:
                    continue
                shared = sorted(set().union(*(free_vars(g) for g in g1 + g2))
                                ) if g1 + g2 else []
                fixed = {}
                loose = []
                for var in shared:
                    pin = pins1.get(var, pins2.get(var))
                    value = _pin_value(pin, size) if pin is not None else None
                    if value is not None:
                        fixed[var] = value
                    elif pin is not None:
                        fixed = None  # unsatisfiable pin at this size
                        break
                    else:
                        loose.append(var)
                if fixed is None:
                    continue
                overlap = None
                for combo in itertools.product(range(size), repeat=len(loose)):
                    env = dict(fixed)
                    env.update(zip(loose, combo))
                    if _guard_holds(probe, g1, env) and _guard_holds(probe, g2, env):
                        overlap = env
                        break
                if overlap is not None:
                    exclusivity_ok = False
                    violations.append(
                        (name, f"guards {i} and {j} overlap at size {size}, "
                               f"assignment {overlap}"))
            if not exclusivity_ok:
                break
    return ProjectionReport(syntactic_ok and exclusivity_ok, syntactic_ok,
                            exclusivity_ok, tuple(violations))


# --- fop text format --------------------------------------------------------

_FOP_RE = re.compile(
    r"\s*fop\s+(\w+)\s*:\s*(\w+)\s*->\s*(\w+)\s*\{(.*)\}\s*$", re.S)


def parse_fop(text: str, vocabs: Mapping[str, Vocabulary]
              ) -> tuple[str, FirstOrderQuery]:
    """Parse the fop file format:

        fop <name> : <src> -> <dst> { arity = <k> ; universe = <formula> ;
                                      <Rel> = <formula> ; const <c> = <formula> }
    """
    stripped = re.sub(r"#[^\n]*", "", text)
    m = _FOP_RE.match(stripped)
    if m is None:
        raise ParseError("malformed fop declaration", 1, 1)
    name, src_name, dst_name, inner = m.groups()
    if src_name not in vocabs:
        raise ParseError(f"unknown source vocabulary {src_name!r}", 1, 1)
    if dst_name not in vocabs:
        raise ParseError(f"unknown target vocabulary {dst_name!r}", 1, 1)
    source, target = vocabs[src_name], vocabs[dst_name]
    arity: int | None = None
    universe: Formula | None = None
    relations: dict[str, Formula] = {}
    constants: dict[str, Formula] = {}
    for part in inner.split(";"):
        part = part.strip()
        if not part:
            continue
        key, eq, value = part.partition("=")
        if not eq:
            raise ParseError(f"expected 'name = ...' near {part[:30]!r}", 1, 1)
        key = key.strip()
        if key == "arity":
            try:
                arity = int(value.strip())
            except ValueError:
                raise ParseError(f"bad arity {value.strip()!r}", 1, 1) from None
        elif key == "universe":
            universe = parse_formula(value, source)
        elif key.startswith("const "):
            constants[key[len("const "):].strip()] = parse_formula(value, source)
        else:
            relations[key] = parse_formula(value, source)
    if arity is None:
        raise ParseError("fop declaration is missing 'arity'", 1, 1)
    if universe is None:
        raise ParseError("fop declaration is missing 'universe'", 1, 1)
    try:
        return name, make_query(source, target, arity, universe,
                                relations, constants)
    except QueryError as exc:
        raise ParseError(str(exc), 1, 1) from exc


def serialize_fop(I: FirstOrderQuery, name: str = "q") -> str:
    lines = [f"fop {name} : {I.source_vocab.name} -> {I.target_vocab.name} {{",
             f"  arity = {I.arity} ;",
             f"  universe = {format_formula(I.universe_formula)}"]
    for rel, phi in I.relation_formulas:
        lines[-1] += " ;"
        lines.append(f"  {rel} = {format_formula(phi)}")
    for const, psi in I.constant_formulas:
        lines[-1] += " ;"
        lines.append(f"  const {const} = {format_formula(psi)}")
    lines.append("}")
    return "\n".join(lines) + "\n"
