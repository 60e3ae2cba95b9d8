"""Relational vocabularies and finite structures.

A structure has universe {0, ..., size-1}.  The numeric symbols <=, BIT,
PLUS, TIMES, SUC and the constants 0, 1, max are implicit in every
vocabulary: they are never stored, and numeric_holds computes them from
the element indices.  BIT(x, j) reads bit j of x with j = 0 the least
significant bit.

Structures are immutable and hashable; relations are kept as sorted tuple
lists in vocabulary declaration order, which makes serialization and the
indexed enumeration deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from ._lex import TokenStream
from .errors import (BudgetExceededError, EvalError, ParseError, StructureError,
                     VocabularyError)
from .limits import MAX_STRUCTURES

NUMERIC_RELATIONS: dict[str, int] = {"<=": 2, "BIT": 2, "PLUS": 3, "TIMES": 3, "SUC": 2}
NUMERIC_CONSTANTS: tuple[str, ...] = ("0", "1", "max")
_RESERVED = set(NUMERIC_RELATIONS) | set(NUMERIC_CONSTANTS)


@dataclass(frozen=True)
class Vocabulary:
    """A named relational vocabulary: relation symbols with arities, plus constants."""

    name: str
    relations: tuple[tuple[str, int], ...]
    constants: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for rel, arity in self.relations:
            if rel in _RESERVED:
                raise VocabularyError(f"relation name {rel!r} is reserved for numeric symbols")
            if arity < 1:
                raise VocabularyError(f"relation {rel!r} must have arity >= 1, got {arity}")
            if rel in seen:
                raise VocabularyError(f"duplicate symbol {rel!r}")
            seen.add(rel)
        for const in self.constants:
            if const in _RESERVED:
                raise VocabularyError(f"constant name {const!r} is reserved")
            if const in seen:
                raise VocabularyError(f"duplicate symbol {const!r}")
            seen.add(const)

    def arity(self, rel: str) -> int | None:
        for name, arity in self.relations:
            if name == rel:
                return arity
        return None

    def has_constant(self, const: str) -> bool:
        return const in self.constants


def make_vocabulary(name: str,
                    relations: Iterable[tuple[str, int]],
                    constants: Iterable[str] = ()) -> Vocabulary:
    return Vocabulary(name, tuple(relations), tuple(constants))


@dataclass(frozen=True)
class Structure:
    """A finite structure over a vocabulary, universe {0..size-1}."""

    vocab: Vocabulary
    size: int
    relations: tuple[tuple[tuple[int, ...], ...], ...]  # vocab declaration order
    constants: tuple[int, ...]
    _rel_map: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise StructureError(f"universe size must be >= 1, got {self.size}")
        if len(self.relations) != len(self.vocab.relations):
            raise StructureError("relation list does not match vocabulary")
        for (name, arity), tuples in zip(self.vocab.relations, self.relations):
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"tuple {t} has wrong arity for {name!r}/{arity}")
                for v in t:
                    if not 0 <= v < self.size:
                        raise StructureError(f"element {v} of {name!r} tuple {t} out of range")
            self._rel_map[name] = frozenset(tuples)
        if len(self.constants) != len(self.vocab.constants):
            raise StructureError("constant list does not match vocabulary")
        for name, v in zip(self.vocab.constants, self.constants):
            if not 0 <= v < self.size:
                raise StructureError(f"constant {name!r} = {v} out of range")

    def rel(self, name: str) -> frozenset:
        try:
            return self._rel_map[name]
        except KeyError:
            raise StructureError(f"no relation {name!r} in vocabulary {self.vocab.name!r}") from None

    def const(self, name: str) -> int:
        for cname, v in zip(self.vocab.constants, self.constants):
            if cname == name:
                return v
        raise StructureError(f"no constant {name!r} in vocabulary {self.vocab.name!r}")


def make_structure(vocab: Vocabulary,
                   size: int,
                   relations: Mapping[str, Iterable[tuple[int, ...]]] | None = None,
                   constants: Mapping[str, int] | None = None) -> Structure:
    """Build a structure, checking the interpretation against the vocabulary.

    Every declared relation and constant must be given; unknown names are
    rejected.  Relation tuples are canonicalized to sorted order.
    """
    relations = dict(relations or {})
    constants = dict(constants or {})
    rel_columns: list[tuple[tuple[int, ...], ...]] = []
    for name, _arity in vocab.relations:
        if name not in relations:
            raise StructureError(f"missing interpretation for relation {name!r}")
        tuples = {tuple(t) for t in relations.pop(name)}
        rel_columns.append(tuple(sorted(tuples)))
    if relations:
        extra = sorted(relations)
        raise StructureError(f"unknown relation(s) {extra} for vocabulary {vocab.name!r}")
    const_values: list[int] = []
    for name in vocab.constants:
        if name not in constants:
            raise StructureError(f"missing interpretation for constant {name!r}")
        const_values.append(constants.pop(name))
    if constants:
        raise StructureError(f"unknown constant(s) {sorted(constants)} for vocabulary {vocab.name!r}")
    return Structure(vocab, size, tuple(rel_columns), tuple(const_values))


def numeric_holds(symbol: str, args: tuple[int, ...], size: int) -> bool:
    """Decide a numeric atom on universe {0..size-1}."""
    arity = NUMERIC_RELATIONS.get(symbol)
    if arity is None:
        raise EvalError(f"unknown numeric symbol {symbol!r}")
    if len(args) != arity:
        raise EvalError(f"{symbol} expects {arity} arguments, got {len(args)}")
    for v in args:
        if not 0 <= v < size:
            raise EvalError(f"argument {v} of {symbol} out of range for size {size}")
    if symbol == "<=":
        return args[0] <= args[1]
    if symbol == "BIT":
        x, j = args
        return (x >> j) & 1 == 1
    if symbol == "PLUS":
        return args[0] + args[1] == args[2]
    if symbol == "TIMES":
        return args[0] * args[1] == args[2]
    # SUC
    return args[1] == args[0] + 1


def all_tuples(size: int, arity: int) -> list[tuple[int, ...]]:
    """All arity-tuples over {0..size-1} in lexicographic order."""
    return list(itertools.product(range(size), repeat=arity))


def structure_count(vocab: Vocabulary, size: int) -> int:
    """Number of structures over vocab with the given universe size."""
    bits = sum(size ** arity for _name, arity in vocab.relations)
    return (1 << bits) * size ** len(vocab.constants)


def structure_at(vocab: Vocabulary, size: int, index: int) -> Structure:
    """The index-th structure in the canonical enumeration order.

    The order treats each relation as a bitmask over its lexicographically
    sorted tuple space and each constant as a base-size digit; the first
    declared relation is the most significant component.  structure_at is
    the random-access twin of enumerate_structures, which lets sweeps be
    sharded or resumed by plain index ranges.
    """
    if index < 0 or index >= structure_count(vocab, size):
        raise StructureError(f"structure index {index} out of range")
    const_values = []
    for _ in vocab.constants:
        index, digit = divmod(index, size)
        const_values.append(digit)
    const_values.reverse()
    rel_columns: list[tuple[tuple[int, ...], ...]] = []
    for name, arity in reversed(vocab.relations):
        space = all_tuples(size, arity)
        index, mask = divmod(index, 1 << len(space))
        rel_columns.append(tuple(t for i, t in enumerate(space) if mask >> i & 1))
    rel_columns.reverse()
    return Structure(vocab, size, tuple(rel_columns), tuple(const_values))


def enumerate_structures(vocab: Vocabulary, size: int,
                         budget: int = MAX_STRUCTURES) -> Iterator[Structure]:
    """Yield every structure over vocab with the given size, in index order."""
    total = structure_count(vocab, size)
    if total > budget:
        raise BudgetExceededError(
            f"enumerating {total} structures exceeds the budget of {budget}")
    for index in range(total):
        yield structure_at(vocab, size, index)


# --- text format ------------------------------------------------------------
#
# vocab sigma_g {
#   E/2
# }
# structure g1 : sigma_g {
#   size = 3
#   E = { (0,1) (1,2) }
# }
#
# Vocabularies with constants list them after the relations:
#   vocab v { R/2 ; const c d }
# and structures assign them with "c = 0" entries.

_SYMBOLS = ("{", "}", "(", ")", ",", ";", "=", "/", ":")


def parse_structures(text: str,
                     vocabs: Mapping[str, Vocabulary] | None = None,
                     ) -> tuple[dict[str, Vocabulary], dict[str, Structure]]:
    """Parse a file of vocab and structure declarations.

    Returns the newly declared vocabularies and the structures.  Structures
    may refer to vocabularies passed in through `vocabs` (for example the
    built-in problem signatures) as well as ones declared in the same text.
    """
    known: dict[str, Vocabulary] = dict(vocabs or {})
    declared: dict[str, Vocabulary] = {}
    structures: dict[str, Structure] = {}
    ts = TokenStream(text, _SYMBOLS)
    while not ts.at_kind("eof"):
        head = ts.expect_name()
        if head.text == "vocab":
            name_tok = ts.expect_name()
            ts.expect("{")
            relations: list[tuple[str, int]] = []
            constants: list[str] = []
            while ts.at_kind("name") and not ts.at("const"):
                rel = ts.expect_name().text
                ts.expect("/")
                arity = ts.expect_num()
                relations.append((rel, arity))
            ts.accept(";")
            if ts.accept("const"):
                while ts.at_kind("name"):
                    constants.append(ts.expect_name().text)
            ts.expect("}")
            try:
                vocab = make_vocabulary(name_tok.text, relations, constants)
            except VocabularyError as exc:
                raise ParseError(str(exc), name_tok.line, name_tok.col) from exc
            # files carrying their own copy of a known signature stay
            # readable; only a conflicting redeclaration is an error
            previous = known.get(vocab.name)
            if previous is not None and previous != vocab:
                raise ParseError(f"vocabulary {vocab.name!r} already declared "
                                 "with a different signature",
                                 name_tok.line, name_tok.col)
            known[vocab.name] = vocab
            declared[vocab.name] = vocab
        elif head.text == "structure":
            name_tok = ts.expect_name()
            if name_tok.text in structures:
                ts.error(f"structure {name_tok.text!r} already declared")
            ts.expect(":")
            vocab_tok = ts.expect_name()
            vocab = known.get(vocab_tok.text)
            if vocab is None:
                ts.error(f"unknown vocabulary {vocab_tok.text!r}")
            ts.expect("{")
            ts.expect("size")
            ts.expect("=")
            size = ts.expect_num()
            relations_map: dict[str, list[tuple[int, ...]]] = {}
            constants_map: dict[str, int] = {}
            while ts.at_kind("name"):
                sym_tok = ts.expect_name()
                ts.expect("=")
                if ts.accept("{"):
                    tuples: list[tuple[int, ...]] = []
                    while ts.accept("("):
                        elems = [ts.expect_num()]
                        while ts.accept(","):
                            elems.append(ts.expect_num())
                        ts.expect(")")
                        tuples.append(tuple(elems))
                    ts.expect("}")
                    relations_map[sym_tok.text] = tuples
                else:
                    constants_map[sym_tok.text] = ts.expect_num()
            ts.expect("}")
            try:
                structures[name_tok.text] = make_structure(vocab, size, relations_map,
                                                           constants_map)
            except StructureError as exc:
                raise ParseError(str(exc), name_tok.line, name_tok.col) from exc
        else:
            ts.error(f"expected 'vocab' or 'structure', found {head.text!r}")
    return declared, structures


def serialize_vocabulary(vocab: Vocabulary) -> str:
    parts = " ".join(f"{name}/{arity}" for name, arity in vocab.relations)
    if vocab.constants:
        consts = " ".join(vocab.constants)
        body = f"{parts} ; const {consts}" if parts else f"const {consts}"
    else:
        body = parts
    return f"vocab {vocab.name} {{ {body} }}\n" if body else f"vocab {vocab.name} {{ }}\n"


def serialize_structure(structure: Structure, name: str = "s",
                        include_vocab: bool = True) -> str:
    """Canonical text for a structure; parse(serialize(A)) round-trips byte-identically."""
    out: list[str] = []
    if include_vocab:
        out.append(serialize_vocabulary(structure.vocab))
    out.append(f"structure {name} : {structure.vocab.name} {{\n")
    out.append(f"  size = {structure.size}\n")
    for (rel, _arity), tuples in zip(structure.vocab.relations, structure.relations):
        body = " ".join("(" + ",".join(str(v) for v in t) + ")" for t in tuples)
        out.append(f"  {rel} = {{ {body} }}\n" if body else f"  {rel} = {{ }}\n")
    for cname, value in zip(structure.vocab.constants, structure.constants):
        out.append(f"  {cname} = {value}\n")
    out.append("}\n")
    return "".join(out)
