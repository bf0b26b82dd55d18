import numpy as np
import pytest

from sapcert.certify import verify_sap_inequality
from sapcert.errors import InputError
from sapcert.expander import (
    BipartiteGraph,
    corollary1_bound,
    expansion_alpha,
    format_graph,
    parse_graph,
    random_left_regular,
    rip1_deviation,
    sap_constants_expander,
)


def test_random_graph_invariants():
    G = random_left_regular(15, 8, 3, 4)
    assert np.all(G.adjacency.sum(axis=0) == 3)
    assert G == random_left_regular(15, 8, 3, 4)
    with pytest.raises(InputError):
        random_left_regular(4, 2, 3, 0)


def test_matching_is_a_permutation():
    Phi = random_left_regular(6, 6, 1, 2, matching=True).adjacency
    assert np.array_equal(Phi @ Phi.T, np.eye(6))


def test_expansion_examples():
    assert expansion_alpha(random_left_regular(8, 8, 1, 0, matching=True), 4).alpha_star == 0.0
    shared = BipartiteGraph(2, 1, 1, ((0,), (0,)))
    assert expansion_alpha(shared, 2).alpha_star == pytest.approx(0.5)
    complete = BipartiteGraph(2, 2, 2, ((0, 1), (0, 1)))
    assert expansion_alpha(complete, 2).alpha_star == pytest.approx(0.5)


def test_alpha_is_monotone_in_k():
    G = random_left_regular(10, 12, 3, 5)
    vals = [expansion_alpha(G, k).alpha_star for k in range(1, 5)]
    assert vals[0] == 0.0
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_enumeration_cap():
    with pytest.raises(InputError):
        expansion_alpha(random_left_regular(60, 30, 2, 0), 8)


def test_expander_constants():
    c = sap_constants_expander(1, 0.0)
    assert (c.D, c.beta) == (1.0, 0.0)
    c = sap_constants_expander(3, 1 / 8)
    assert c.D == pytest.approx(2 / 3) and c.beta == pytest.approx(0.5)
    with pytest.raises(InputError):
        sap_constants_expander(2, 0.25)


def test_corollary_bound():
    assert corollary1_bound(1, 0.0, 0.1, 0.3) == pytest.approx(1.0)
    assert corollary1_bound(3, 0.1, 0.0, 0.0) == 0.0
    assert corollary1_bound(1, 1 / 12, 1.0, 1.0) == pytest.approx(8 + 10 / 3)
    with pytest.raises(InputError):
        corollary1_bound(1, 1 / 6, 0, 0)


def test_expander_certificate_holds_on_samples():
    G = random_left_regular(20, 16, 4, 3)
    a = expansion_alpha(G, 2).alpha_star
    if a < 0.25:
        cert = sap_constants_expander(4, a, 1)
        assert verify_sap_inequality(G.adjacency, cert, samples=10000).passed


def test_rip1_deviation():
    G = random_left_regular(8, 8, 1, 0, matching=True)
    lo, hi = rip1_deviation(G, 1)
    assert lo == pytest.approx(1.0) and hi == pytest.approx(1.0)
    shared = BipartiteGraph(2, 1, 1, ((0,), (0,)))
    assert rip1_deviation(shared, 1)[0] == pytest.approx(0.0)
    lo, hi = rip1_deviation(random_left_regular(10, 10, 3, 1), 2)
    assert 0.0 <= lo <= hi <= 1.0 + 1e-12


def test_graph_text_round_trip():
    G = random_left_regular(7, 9, 2, 11)
    text = format_graph(G)
    assert text.splitlines()[0] == "7 9 2"
    assert min(int(t) for t in " ".join(text.splitlines()[1:]).split()) >= 1
    assert parse_graph(text) == G
    with pytest.raises(InputError):
        parse_graph("2 2 1\n1\n3\n")
