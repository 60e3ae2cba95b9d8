"""Brute-force evaluation of formulas over finite structures.

eval_fo is plain Tarskian evaluation by quantifier expansion.  eval_so2
handles sentences whose second-order prefix is an existential block
followed by a universal block: it enumerates relation valuations as
bitmasks over the lexicographic tuple space, existential block in the
outer loop, universal block in the inner loop with early exit.  Valuation
order is mask-ascending, so the first witness or counterexample found is
deterministic.

These evaluators are the ground truth everything else in the package is
checked against; they favor obvious correctness over speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import (BudgetExceededError, EvalError, NormalFormError,
                     PrefixShapeError)
from .formulas import (And, Eq, Exists, Forall, Formula, Iff, Implies, Not, Num,
                       Or, RelAtom, SOExists, SOForall, Var, Xor, conj,
                       conjuncts, disj, disjuncts, free_vars)
from .limits import MAX_SO2_BLOCK_BITS
from .structures import NUMERIC_RELATIONS, Structure, all_tuples, numeric_holds


def _term_value(t, env: dict, size: int) -> int | None:
    """Element named by a term; None when a numeric literal has no
    denotation on this universe (an atom over such a term is false)."""
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Num):
        return t.value if t.value < size else None
    return size - 1  # max


def _eval(A: Structure, phi: Formula, env: dict,
          so_env: Mapping[str, frozenset]) -> bool:
    if isinstance(phi, RelAtom):
        args = tuple(_term_value(t, env, A.size) for t in phi.args)
        if None in args:
            return False
        rel = so_env.get(phi.name)
        if rel is not None:
            return args in rel
        if phi.name in NUMERIC_RELATIONS:
            return numeric_holds(phi.name, args, A.size)
        return args in A.rel(phi.name)
    if isinstance(phi, Eq):
        left = _term_value(phi.left, env, A.size)
        right = _term_value(phi.right, env, A.size)
        return left is not None and left == right
    if isinstance(phi, Not):
        return not _eval(A, phi.sub, env, so_env)
    if isinstance(phi, And):
        return _eval(A, phi.left, env, so_env) and _eval(A, phi.right, env, so_env)
    if isinstance(phi, Or):
        return _eval(A, phi.left, env, so_env) or _eval(A, phi.right, env, so_env)
    if isinstance(phi, Implies):
        return not _eval(A, phi.left, env, so_env) or _eval(A, phi.right, env, so_env)
    if isinstance(phi, Iff):
        return _eval(A, phi.left, env, so_env) == _eval(A, phi.right, env, so_env)
    if isinstance(phi, Xor):
        return _eval(A, phi.left, env, so_env) != _eval(A, phi.right, env, so_env)
    if isinstance(phi, (Forall, Exists)):
        want_all = isinstance(phi, Forall)
        var, sub = phi.var, phi.sub
        old = env.get(var, _MISSING)
        try:
            for value in range(A.size):
                env[var] = value
                if _eval(A, sub, env, so_env) != want_all:
                    return not want_all
            return want_all
        finally:
            if old is _MISSING:
                del env[var]
            else:
                env[var] = old
    if isinstance(phi, (SOExists, SOForall)):
        raise EvalError("second-order quantifier inside first-order evaluation")
    raise TypeError(f"not a formula: {phi!r}")


_MISSING = object()


def eval_fo(A: Structure, phi: Formula, env: Mapping[str, int] | None = None) -> bool:
    """Truth value of a first-order formula; env binds its free variables."""
    return _eval(A, phi, dict(env or {}), {})


def _peel_prefix(phi: Formula) -> tuple[list[tuple[str, int]], list[tuple[str, int]], Formula]:
    """Split off an exists2* forall2* prefix; error on any other shape."""
    exist: list[tuple[str, int]] = []
    univ: list[tuple[str, int]] = []
    while isinstance(phi, SOExists):
        if univ:
            raise PrefixShapeError(
                "second-order existential after a universal; prefix must be exists2* forall2*")
        exist.append((phi.name, phi.arity))
        phi = phi.sub
    while isinstance(phi, SOForall):
        univ.append((phi.name, phi.arity))
        phi = phi.sub
    if _contains_so(phi):
        raise PrefixShapeError("second-order quantifier below the prefix")
    return exist, univ, phi


def _contains_so(phi: Formula) -> bool:
    if isinstance(phi, (SOExists, SOForall)):
        return True
    if isinstance(phi, (Not, Forall, Exists)):
        return _contains_so(phi.sub)
    if isinstance(phi, (And, Or, Implies, Iff, Xor)):
        return _contains_so(phi.left) or _contains_so(phi.right)
    return False


def _block_valuations(block: list[tuple[str, int]], size: int
                      ) -> Iterator[dict[str, frozenset]]:
    """All joint valuations of a block of relation variables, mask order."""
    spaces = [all_tuples(size, arity) for _name, arity in block]
    subset_lists = []
    for space in spaces:
        subsets = []
        for mask in range(1 << len(space)):
            subsets.append(frozenset(t for i, t in enumerate(space) if mask >> i & 1))
        subset_lists.append(subsets)
    for choice in itertools.product(*subset_lists):
        yield {name: rel for (name, _arity), rel in zip(block, choice)}


def _block_bits(block: list[tuple[str, int]], size: int) -> int:
    return sum(size ** arity for _name, arity in block)


def eval_so2(A: Structure, phi: Formula,
             budget_bits: int = MAX_SO2_BLOCK_BITS) -> bool:
    """Decide an exists2* forall2* sentence by exhaustive enumeration.

    True iff some valuation of the existential relation variables makes the
    matrix hold under every valuation of the universal ones.  Each block's
    total bit count (sum of size**arity) must stay within budget_bits.
    """
    exist, univ, matrix = _peel_prefix(phi)
    for block in (exist, univ):
        bits = _block_bits(block, A.size)
        if bits > budget_bits:
            raise BudgetExceededError(
                f"second-order block needs {bits} bits, budget is {budget_bits}")
    for e_val in _block_valuations(exist, A.size):
        ok = True
        for u_val in _block_valuations(univ, A.size):
            so_env = {**e_val, **u_val}
            if not _eval(A, matrix, {}, so_env):
                ok = False
                break
        if ok:
            return True
    return False


def eval_pi2(A: Structure, phi: Formula,
             budget_bits: int = MAX_SO2_BLOCK_BITS) -> bool:
    """Decide a forall2* exists2* sentence through the dual route.

    The sentence forall2 X exists2 Y M holds iff exists2 X forall2 Y !M
    fails, so this negates the matrix, swaps every block kind, and calls
    eval_so2 on the result.
    """
    univ: list[tuple[str, int]] = []
    exist: list[tuple[str, int]] = []
    while isinstance(phi, SOForall):
        univ.append((phi.name, phi.arity))
        phi = phi.sub
    while isinstance(phi, SOExists):
        exist.append((phi.name, phi.arity))
        phi = phi.sub
    # any leftover second-order node in phi is caught by eval_so2's peel
    body: Formula = Not(phi)
    for name, arity in reversed(exist):
        body = SOForall(name, arity, body)
    for name, arity in reversed(univ):
        body = SOExists(name, arity, body)
    return not eval_so2(A, body, budget_bits)


# --- normal form ------------------------------------------------------------

@dataclass(frozen=True)
class NormalFormSentence:
    """A sentence in prenex shape: second-order existential block, then
    second-order universal block, then first-order existentials, then a
    quantifier-free DNF matrix given as implicants (literal lists).

    Each implicant carries at most one literal over the structure's own
    vocabulary; the rest are literals on the quantified relation variables,
    numeric atoms, and equalities.
    """

    existential_rels: tuple[tuple[str, int], ...]
    universal_rels: tuple[tuple[str, int], ...]
    variables: tuple[str, ...]
    implicants: tuple[tuple[Formula, ...], ...]

    def to_formula(self) -> Formula:
        body = disj(conj(lits) for lits in self.implicants)
        for var in reversed(self.variables):
            body = Exists(var, body)
        for name, arity in reversed(self.universal_rels):
            body = SOForall(name, arity, body)
        for name, arity in reversed(self.existential_rels):
            body = SOExists(name, arity, body)
        return body


def _literal_atom(lit: Formula) -> Formula | None:
    """The atom under an optional negation, or None if not a literal."""
    if isinstance(lit, Not):
        lit = lit.sub
    if isinstance(lit, (RelAtom, Eq)):
        return lit
    return None


def validate_normal_form(phi: Formula) -> NormalFormSentence:
    """Decompose a sentence into the prenex-DNF shape, or explain why not.

    Requirements: prefix exists2* forall2* exists+ over at least one
    first-order variable, a quantifier-free matrix that is a disjunction of
    conjunctions of literals, and at most one vocabulary literal per
    implicant.
    """
    try:
        exist, univ, rest = _peel_prefix(phi)
    except PrefixShapeError as exc:
        raise NormalFormError(f"prefix shape: {exc}") from exc
    so_names = {name for name, _arity in exist} | {name for name, _arity in univ}
    fo_vars: list[str] = []
    while isinstance(rest, Exists):
        fo_vars.append(rest.var)
        rest = rest.sub
    if not fo_vars:
        raise NormalFormError("prefix shape: need at least one first-order existential")
    if isinstance(rest, Forall):
        raise NormalFormError("prefix shape: universal first-order quantifier in prefix")
    loose = free_vars(rest) - set(fo_vars)
    if loose:
        raise NormalFormError(f"matrix has unbound variable(s) {sorted(loose)}")
    implicants: list[tuple[Formula, ...]] = []
    for imp in disjuncts(rest):
        lits: list[Formula] = []
        vocab_lits = 0
        for lit in conjuncts(imp):
            atom = _literal_atom(lit)
            if atom is None:
                raise NormalFormError("matrix not DNF: non-literal conjunct")
            if isinstance(atom, RelAtom) and atom.name not in so_names \
                    and atom.name not in NUMERIC_RELATIONS:
                vocab_lits += 1
                if vocab_lits > 1:
                    raise NormalFormError("multiple vocabulary literals in one implicant")
            lits.append(lit)
        implicants.append(tuple(lits))
    return NormalFormSentence(tuple(exist), tuple(univ), tuple(fo_vars),
                              tuple(implicants))
