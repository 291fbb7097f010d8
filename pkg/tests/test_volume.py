import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdl.families import ball_path_graph, hanoi_graph, lamplighter_graph, standard_graph
from sdl.graph import GraphError, all_pairs_distances
from sdl.volume import (
    RhoSizeError,
    check_prop6,
    find_clique,
    required_size,
    rho_exact,
    rho_lower_ballcount,
    rho_upper_witness,
)
from test_graph import connected_multigraphs


def brute_rho(g, eps):
    d = all_pairs_distances(g).dense
    n = g.vertex_count
    size = required_size(eps, n)
    best = min(int(d[np.ix_(s, s)].max()) for s in map(list, itertools.combinations(range(n), size)))
    return best / d.max()


def test_required_size_ceiling():
    assert required_size(0.5, 6) == 3
    assert required_size(0.5, 7) == 4
    assert required_size(2 / 3, 27) == 18
    assert required_size(2 / 3, 9) == 6
    with pytest.raises(GraphError):
        required_size(1.0, 4)


def test_path3():
    g = standard_graph("path", 3)
    r = rho_exact(g, all_pairs_distances(g), 0.5)
    assert r.lower == r.upper == 0.5
    assert len(r.witness) == 2


def test_cycle6_all_methods():
    g = standard_graph("cycle", 6)
    d = all_pairs_distances(g)
    assert rho_exact(g, d, 0.5).lower == pytest.approx(2 / 3)
    assert rho_lower_ballcount(g, d, 0.5).lower == pytest.approx(1 / 3)
    up = rho_upper_witness(g, d, 0.5)
    assert up.upper == pytest.approx(2 / 3)
    w = list(up.witness)
    assert len(w) >= 3 and d.dense[np.ix_(w, w)].max() == 2


def test_singleton_threshold_is_degenerate():
    g = standard_graph("complete", 2)
    r = rho_exact(g, all_pairs_distances(g), 0.5)
    assert r.degenerate and r.lower == 0.0


def test_complete_ballcount_is_exact():
    for n in range(4, 9):
        g = standard_graph("complete", n)
        d = all_pairs_distances(g)
        assert rho_lower_ballcount(g, d, 0.5).lower == 1.0 == rho_exact(g, d, 0.5).lower


def test_size_cap():
    g = lamplighter_graph(4)
    with pytest.raises(RhoSizeError, match="rho_lower_ballcount"):
        rho_exact(g, all_pairs_distances(g), 0.5)


def test_hanoi_two_thirds():
    for n in (1, 2, 3):
        g = hanoi_graph(n)
        assert rho_exact(g, all_pairs_distances(g), 2 / 3).lower >= 0.5


def test_ball_path_witness():
    g = ball_path_graph(7)
    assert rho_upper_witness(g, all_pairs_distances(g), 0.5).upper <= 14 / 382


def test_find_clique():
    adj = np.ones((5, 5), dtype=bool)
    adj[0, 1] = adj[1, 0] = False
    assert find_clique(adj, 4) in ([0, 2, 3, 4], [1, 2, 3, 4])
    assert find_clique(adj, 5) is None


def test_prop6():
    for n in range(3, 12):
        g = standard_graph("cycle", n)
        assert check_prop6(g, all_pairs_distances(g)).passed
    g = standard_graph("complete", 5)
    rep = check_prop6(g, all_pairs_distances(g))
    assert rep.passed and rep.rhs == 1.0
    with pytest.raises(GraphError, match="transitive"):
        g = standard_graph("path", 4)
        check_prop6(g, all_pairs_distances(g))
    g = lamplighter_graph(5)
    assert check_prop6(g, all_pairs_distances(g)).passed


@settings(max_examples=50, deadline=None)
@given(connected_multigraphs(max_n=9), st.sampled_from([0.3, 0.5, 2 / 3, 0.8]))
def test_exact_matches_brute_force_and_sandwich(g, eps):
    if g.vertex_count < 2:
        return
    d = all_pairs_distances(g)
    ex = rho_exact(g, d, eps)
    assert ex.lower == pytest.approx(brute_rho(g, eps))
    lo = rho_lower_ballcount(g, d, eps).lower
    up = rho_upper_witness(g, d, eps).upper
    assert lo <= ex.lower + 1e-12 <= up + 2e-12
    w = list(ex.witness)
    assert len(w) >= required_size(eps, g.vertex_count)
