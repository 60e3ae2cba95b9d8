"""Formula AST, parser and printer.

The grammar (ASCII):

    sentence := soq* fo
    soq      := ("exists2"|"forall2") NAME "/" NAT
    fo       := ("forall"|"exists") VAR fo | iff
    iff      := imp ("<->" imp)*
    imp      := xr ("->" xr)*            # right associative
    xr       := or ("(+)" or)*
    or       := and ("|" and)*
    and      := un ("&" un)*
    un       := "!" un | "(" fo ")" | atom
    atom     := NAME "(" term ("," term)* ")" | term "=" term | term "<=" term
    term     := VAR | "0" | "1" | "max" | NAT

Relation names start with an uppercase letter, variables with a lowercase
one.  BIT, PLUS, TIMES, SUC and <= are the numeric relations; they need no
declaration.  Second-order relation variables are introduced only by the
prefix and checked for arity at every use.

format_formula emits text that parses back to the identical AST, which is
what keeps serialized queries byte-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from ._lex import TokenStream
from .errors import ParseError
from .structures import NUMERIC_RELATIONS, Vocabulary


# --- terms ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class MaxConst:
    """The constant max = n-1."""


Term = Union[Var, Num, MaxConst]


# --- formulas ---------------------------------------------------------------

@dataclass(frozen=True)
class RelAtom:
    """R(t1,...,ta) where R is a declared relation, a numeric relation,
    or a second-order relation variable bound by the prefix."""

    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Xor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sub: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sub: "Formula"


@dataclass(frozen=True)
class SOExists:
    """exists2 S/a: second-order existential over an arity-a relation."""

    name: str
    arity: int
    sub: "Formula"


@dataclass(frozen=True)
class SOForall:
    name: str
    arity: int
    sub: "Formula"


Formula = Union[RelAtom, Eq, Not, And, Or, Implies, Iff, Xor,
                Forall, Exists, SOExists, SOForall]

TRUE = Eq(Num(0), Num(0))
FALSE = Not(TRUE)


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; empty input gives TRUE."""
    out: Formula | None = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-folded disjunction; empty input gives FALSE."""
    out: Formula | None = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def conjuncts(phi: Formula) -> Iterator[Formula]:
    """Leaves of the top-level conjunction tree."""
    if isinstance(phi, And):
        yield from conjuncts(phi.left)
        yield from conjuncts(phi.right)
    else:
        yield phi


def disjuncts(phi: Formula) -> Iterator[Formula]:
    if isinstance(phi, Or):
        yield from disjuncts(phi.left)
        yield from disjuncts(phi.right)
    else:
        yield phi


def free_vars(phi: Formula) -> frozenset[str]:
    """Free first-order variables of phi."""
    if isinstance(phi, RelAtom):
        return frozenset(t.name for t in phi.args if isinstance(t, Var))
    if isinstance(phi, Eq):
        return frozenset(t.name for t in (phi.left, phi.right) if isinstance(t, Var))
    if isinstance(phi, Not):
        return free_vars(phi.sub)
    if isinstance(phi, (And, Or, Implies, Iff, Xor)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.sub) - {phi.var}
    if isinstance(phi, (SOExists, SOForall)):
        return free_vars(phi.sub)
    raise TypeError(f"not a formula: {phi!r}")


def is_numeric(phi: Formula) -> bool:
    """True iff every atom of phi is a numeric relation or a term equality."""
    if isinstance(phi, RelAtom):
        return phi.name in NUMERIC_RELATIONS
    if isinstance(phi, Eq):
        return True
    if isinstance(phi, Not):
        return is_numeric(phi.sub)
    if isinstance(phi, (And, Or, Implies, Iff, Xor)):
        return is_numeric(phi.left) and is_numeric(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return is_numeric(phi.sub)
    if isinstance(phi, (SOExists, SOForall)):
        return False
    raise TypeError(f"not a formula: {phi!r}")


# --- parser -----------------------------------------------------------------

_SYMBOLS = ("(+)", "<->", "->", "<=", "(", ")", ",", "=", "&", "|", "!", "/")
_KEYWORDS = {"forall", "exists", "forall2", "exists2", "max"}


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary,
                 so_arities: Mapping[str, int] | None = None) -> None:
        self.ts = TokenStream(text, _SYMBOLS)
        self.vocab = vocab
        self.so: dict[str, int] = dict(so_arities or {})

    def sentence(self) -> Formula:
        prefix: list[tuple[str, str, int]] = []
        while self.ts.at("exists2") or self.ts.at("forall2"):
            kind = self.ts.next().text
            name_tok = self.ts.expect_name()
            name = name_tok.text
            if not name[0].isupper():
                self.ts_error_at(name_tok, "second-order variable must start uppercase")
            if name in self.so or self.vocab.arity(name) is not None or name in NUMERIC_RELATIONS:
                self.ts_error_at(name_tok, f"second-order variable {name!r} shadows another symbol")
            self.ts.expect("/")
            arity = self.ts.expect_num()
            if arity < 1:
                self.ts.error("second-order arity must be >= 1")
            self.so[name] = arity
            prefix.append((kind, name, arity))
        body = self.fo()
        self.ts.expect_eof()
        for kind, name, arity in reversed(prefix):
            body = (SOExists if kind == "exists2" else SOForall)(name, arity, body)
        return body

    def ts_error_at(self, tok, message: str) -> None:
        raise ParseError(message, tok.line, tok.col)

    def fo(self) -> Formula:
        if self.ts.at("forall") or self.ts.at("exists"):
            kind = self.ts.next().text
            var_tok = self.ts.expect_name()
            if not var_tok.text[0].islower() or var_tok.text in _KEYWORDS:
                self.ts_error_at(var_tok, "quantified variable must start lowercase")
            sub = self.fo()
            return (Forall if kind == "forall" else Exists)(var_tok.text, sub)
        return self.iff()

    def iff(self) -> Formula:
        out = self.imp()
        while self.ts.accept("<->"):
            out = Iff(out, self.imp())
        return out

    def imp(self) -> Formula:
        left = self.xr()
        if self.ts.accept("->"):
            return Implies(left, self.imp())
        return left

    def xr(self) -> Formula:
        out = self.orf()
        while self.ts.accept("(+)"):
            out = Xor(out, self.orf())
        return out

    def orf(self) -> Formula:
        out = self.andf()
        while self.ts.accept("|"):
            out = Or(out, self.andf())
        return out

    def andf(self) -> Formula:
        out = self.unary()
        while self.ts.accept("&"):
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        if self.ts.accept("!"):
            return Not(self.unary())
        if self.ts.accept("("):
            sub = self.fo()
            self.ts.expect(")")
            return sub
        return self.atom()

    def atom(self) -> Formula:
        tok = self.ts.peek()
        if tok.kind == "name" and tok.text[0].isupper():
            name_tok = self.ts.expect_name()
            name = name_tok.text
            self.ts.expect("(")
            args = [self.term()]
            while self.ts.accept(","):
                args.append(self.term())
            self.ts.expect(")")
            arity = self.so.get(name)
            if arity is None:
                arity = NUMERIC_RELATIONS.get(name)
            if arity is None:
                arity = self.vocab.arity(name)
            if arity is None:
                self.ts_error_at(name_tok, f"unknown relation symbol {name!r}")
            if len(args) != arity:
                self.ts_error_at(name_tok,
                                 f"{name} expects {arity} argument(s), got {len(args)}")
            return RelAtom(name, tuple(args))
        left = self.term()
        if self.ts.accept("="):
            return Eq(left, self.term())
        if self.ts.accept("<="):
            return RelAtom("<=", (left, self.term()))
        self.ts.error("expected '=' or '<=' after term")
        raise AssertionError  # unreachable

    def term(self) -> Term:
        tok = self.ts.peek()
        if tok.kind == "num":
            return Num(self.ts.expect_num())
        if tok.kind == "name":
            if tok.text == "max":
                self.ts.next()
                return MaxConst()
            if tok.text[0].islower() and tok.text not in _KEYWORDS:
                self.ts.next()
                return Var(tok.text)
        self.ts.error(f"expected a term, found {tok.text!r}" if tok.kind != "eof"
                      else "expected a term, found end of input")
        raise AssertionError  # unreachable


def parse_formula(text: str, vocab: Vocabulary,
                  so_arities: Mapping[str, int] | None = None) -> Formula:
    """Parse a sentence or open formula over the vocabulary.

    Free first-order variables are allowed (query formulas use them);
    relation symbols must resolve against the vocabulary, the numeric
    relations, or the second-order prefix.  `so_arities` pre-binds
    second-order names when parsing a bare matrix.
    """
    return _Parser(text, vocab, so_arities).sentence()


# --- printer ----------------------------------------------------------------

_LEVEL_QUANT = 0
_LEVEL_IFF = 1
_LEVEL_IMP = 2
_LEVEL_XOR = 3
_LEVEL_OR = 4
_LEVEL_AND = 5
_LEVEL_NOT = 6
_LEVEL_ATOM = 7


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Num):
        return str(t.value)
    return "max"


def _fmt(phi: Formula, parent: int) -> str:
    if isinstance(phi, RelAtom):
        if phi.name == "<=":
            out, level = f"{format_term(phi.args[0])} <= {format_term(phi.args[1])}", _LEVEL_ATOM
        else:
            out = f"{phi.name}({','.join(format_term(a) for a in phi.args)})"
            level = _LEVEL_ATOM
    elif isinstance(phi, Eq):
        out, level = f"{format_term(phi.left)} = {format_term(phi.right)}", _LEVEL_ATOM
    elif isinstance(phi, Not):
        out, level = "!" + _fmt(phi.sub, _LEVEL_NOT), _LEVEL_NOT
    elif isinstance(phi, And):
        out = f"{_fmt(phi.left, _LEVEL_AND)} & {_fmt(phi.right, _LEVEL_NOT)}"
        level = _LEVEL_AND
    elif isinstance(phi, Or):
        out = f"{_fmt(phi.left, _LEVEL_OR)} | {_fmt(phi.right, _LEVEL_AND)}"
        level = _LEVEL_OR
    elif isinstance(phi, Xor):
        out = f"{_fmt(phi.left, _LEVEL_XOR)} (+) {_fmt(phi.right, _LEVEL_OR)}"
        level = _LEVEL_XOR
    elif isinstance(phi, Implies):
        out = f"{_fmt(phi.left, _LEVEL_XOR)} -> {_fmt(phi.right, _LEVEL_IMP)}"
        level = _LEVEL_IMP
    elif isinstance(phi, Iff):
        out = f"{_fmt(phi.left, _LEVEL_IFF)} <-> {_fmt(phi.right, _LEVEL_IMP)}"
        level = _LEVEL_IFF
    elif isinstance(phi, Forall):
        out, level = f"forall {phi.var} {_fmt(phi.sub, _LEVEL_QUANT)}", _LEVEL_QUANT
    elif isinstance(phi, Exists):
        out, level = f"exists {phi.var} {_fmt(phi.sub, _LEVEL_QUANT)}", _LEVEL_QUANT
    elif isinstance(phi, SOExists):
        out = f"exists2 {phi.name}/{phi.arity} {_fmt(phi.sub, _LEVEL_QUANT)}"
        level = _LEVEL_QUANT
    elif isinstance(phi, SOForall):
        out = f"forall2 {phi.name}/{phi.arity} {_fmt(phi.sub, _LEVEL_QUANT)}"
        level = _LEVEL_QUANT
    else:
        raise TypeError(f"not a formula: {phi!r}")
    if level < parent:
        return f"({out})"
    return out


def format_formula(phi: Formula) -> str:
    """Canonical text form; parse_formula(format_formula(phi)) == phi."""
    return _fmt(phi, _LEVEL_QUANT)
