import itertools
import pathlib

import pytest

from fopkit import Qbf2Dnf, make_graph

DATA = pathlib.Path(__file__).parent / "data"
SAMPLES = pathlib.Path(__file__).parent.parent / "samples"


@pytest.fixture
def phi1():
    """The running 4-variable example: two existential, four implicants."""
    return Qbf2Dnf(4, frozenset({0, 1}), (
        (frozenset({0}), frozenset({1})),
        (frozenset({0, 1, 2}), frozenset()),
        (frozenset(), frozenset({0, 2})),
        (frozenset({1}), frozenset({2})),
    ))


def all_graphs(size):
    pairs = list(itertools.combinations(range(size), 2))
    for mask in range(1 << len(pairs)):
        yield make_graph(size, [pairs[i] for i in range(len(pairs))
                                if mask >> i & 1])


def all_dnf_instances(n):
    """Every Qbf2Dnf with n variables and n implicant rows."""
    subsets = [frozenset(s) for r in range(n + 1)
               for s in itertools.combinations(range(n), r)]
    rows = list(itertools.product(subsets, subsets))
    for exist in subsets:
        for imps in itertools.product(rows, repeat=n):
            yield Qbf2Dnf(n, exist, imps)
