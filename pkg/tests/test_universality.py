import pytest

from fopkit import (
    BudgetExceededError, InstanceError, LiteralCondition, WitnessError,
    check_monotone, check_universality, conditions_hold, decide_2cc,
    is_consistent_graph, make_graph, maximal_cliques, parse_condition,
    witness_2cc, witness_2cc_complement,
)
from fopkit.errors import ParseError


def in_2cc(g):
    return decide_2cc(g)[0]


def not_in_2cc(g):
    return not decide_2cc(g)[0]


def lit(text):
    return parse_condition(text)


# --- literals ----------------------------------------------------------------

def test_parse_condition():
    c = parse_condition("E(0,3)")
    assert (c.relation, c.positive, c.args) == ("E", True, (0, 3))
    assert str(c) == "E(0,3)"
    c = parse_condition(" ! E( 2 , 2 ) ")
    assert not c.positive and c.args == (2, 2)
    assert str(c) == "!E(2,2)"
    with pytest.raises(ParseError):
        parse_condition("E(0)")
    with pytest.raises(InstanceError):
        LiteralCondition("F", True, (0, 1))


def test_consistency():
    assert is_consistent_graph([], 1)
    assert not is_consistent_graph([lit("E(1,1)")], 3)  # demanded loop
    assert is_consistent_graph([lit("!E(1,1)")], 3)
    assert not is_consistent_graph([lit("E(0,1)"), lit("!E(1,0)")], 3)
    assert is_consistent_graph([lit("E(0,1)"), lit("!E(1,0)")], 3, ordered=True)
    assert is_consistent_graph([lit("E(0,1)"), lit("E(1,0)")], 2)
    with pytest.raises(InstanceError):
        is_consistent_graph([lit("E(0,5)")], 3)


def test_conditions_hold():
    g = make_graph(3, [(0, 1)])
    assert conditions_hold(g, [lit("E(0,1)"), lit("E(1,0)"), lit("!E(0,2)")])
    assert not conditions_hold(g, [lit("!E(1,0)")])
    assert not conditions_hold(g, [lit("E(2,2)")])  # loops never present


# --- witness constructions ---------------------------------------------------

def red_side_is_valid(g, red):
    for clique in maximal_cliques(g):
        if len(clique) >= 2 and (clique <= red or not (clique & red)):
            return False
    return True


def test_member_witness_all_positive():
    conds = [lit("E(0,1)")]
    g, red = witness_2cc(conds, 3)
    assert g == make_graph(3, [(0, 1), (0, 2), (1, 2)])
    assert conditions_hold(g, conds) and in_2cc(g)
    assert red_side_is_valid(g, red)


def test_member_witness_mixed_signs():
    conds = [lit("!E(0,1)"), lit("E(1,2)")]
    g, red = witness_2cc(conds, 5)
    assert conditions_hold(g, conds) and in_2cc(g)
    assert red == frozenset({2, 3, 4})  # untouched by negative literals
    assert red_side_is_valid(g, red)


def test_member_witness_contract_bounds():
    with pytest.raises(WitnessError):
        witness_2cc([lit("E(0,1)"), lit("!E(0,2)"), lit("E(1,2)")], 6)  # < 2k+1
    with pytest.raises(WitnessError):
        witness_2cc([lit("E(0,0)")], 5)  # inconsistent


def test_complement_witness():
    conds = [lit("E(0,1)")]
    g = witness_2cc_complement(conds, 7)
    assert conditions_hold(g, conds) and not_in_2cc(g)
    assert g.has_edge(2, 3) and g.has_edge(2, 6)  # the far-away cycle
    with pytest.raises(WitnessError):
        witness_2cc_complement([lit("E(0,1)"), lit("E(2,3)")], 7)  # 3 free < 5
    with pytest.raises(WitnessError):
        witness_2cc_complement([lit("E(1,1)")], 8)


# --- the sweep ---------------------------------------------------------------

def test_small_universality_pass_with_and_without_witness():
    with_w = check_universality(in_2cc, 3, 1, 3, witness=witness_2cc,
                                problem="2cc")
    assert with_w.passed and with_w.counterexample is None
    assert with_w.witnesses_validated > 0
    assert with_w.sequences_checked <= with_w.sequences_full
    bare = check_universality(in_2cc, 3, 1, 3)
    assert bare.passed and bare.witnesses_validated == 0


def test_complement_fails_down_at_size_two():
    rep = check_universality(not_in_2cc, 2, 1, 2,
                             witness=witness_2cc_complement, problem="not-2cc")
    assert not rep.passed
    m, conds = rep.counterexample
    assert m == 2 and [str(c) for c in conds] == ["!E(0,0)"]


def test_ordered_flag_is_inert_over_the_canonical_pool():
    # the sweep pool lists each pair once with u <= v, so mirrored literals
    # never collide; the flag only matters for externally supplied ones
    plain = check_universality(in_2cc, 3, 2, 3)
    ordered = check_universality(in_2cc, 3, 2, 3, ordered=True)
    assert plain.passed and ordered.passed
    assert plain.sequences_checked == ordered.sequences_checked


def test_misbehaving_witness_is_reported():
    def complete_regardless(conds, m):
        return make_graph(m, [(u, v) for u in range(m)
                              for v in range(u + 1, m)])
    with pytest.raises(WitnessError):
        check_universality(in_2cc, 3, 1, 3, witness=complete_regardless)


def test_sweep_argument_validation_and_budget():
    with pytest.raises(InstanceError):
        check_universality(in_2cc, 3, 1, 2)
    with pytest.raises(InstanceError):
        check_universality(in_2cc, 3, 0, 3)
    with pytest.raises(BudgetExceededError):
        check_universality(in_2cc, 5, 1, 5, search_budget=16)


def test_monotone_directions():
    assert check_monotone(in_2cc, 3, 1, 4, witness=witness_2cc)
    assert check_monotone(in_2cc, 3, 2, 4)
    assert not check_monotone(not_in_2cc, 2, 1, 3)
    with pytest.raises(InstanceError):
        check_monotone(in_2cc, 3, 0, 4)
