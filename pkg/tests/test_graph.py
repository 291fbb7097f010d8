import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdl.graph import (
    DistanceMatrix,
    DisconnectedGraphError,
    GraphError,
    Multigraph,
    all_pairs_distances,
    bfs_distances,
    diameter,
    is_regular,
    max_degree,
    multi_source_distances,
)


@st.composite
def connected_multigraphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    edges = []
    for v in range(1, n):
        edges.append((draw(st.integers(0, v - 1)), v, draw(st.integers(1, 3))))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, 3)), max_size=10))
    return Multigraph.from_edges(n, edges + extra)


def test_from_edges_aggregates_and_sorts():
    g = Multigraph.from_edges(3, [(1, 0), (0, 1), (2, 1, 2), (2, 2)])
    assert g.edges == ((0, 1, 2), (1, 2, 2), (2, 2, 1))
    assert g.omega(1, 0) == 2
    assert g.omega(0, 2) == 0
    assert g.loops() == {2: 1}


def test_loop_counts_once_in_degree():
    g = Multigraph.from_edges(2, [(0, 1), (0, 0, 2)])
    assert list(g.degrees()) == [3, 1]


def test_laplacian_ignores_loops_adjacency_keeps_them():
    g = Multigraph.from_edges(2, [(0, 1, 3), (1, 1)])
    assert np.array_equal(g.laplacian_matrix(), [[3, -3], [-3, 3]])
    assert np.array_equal(g.adjacency_matrix(), [[0, 3], [3, 1]])


def test_disconnected_rejected_with_pair():
    with pytest.raises(DisconnectedGraphError, match="disconnected: vertex 2 is unreachable from vertex 0"):
        Multigraph.from_edges(3, [(0, 1)])


def test_bad_entries_rejected():
    with pytest.raises(GraphError):
        Multigraph(2, ((0, 1, 0),))
    with pytest.raises(GraphError):
        Multigraph(2, ((0, 3, 1),))
    with pytest.raises(GraphError):
        Multigraph.from_edges(2, [(0, 1, -1)])


def test_metric_ignores_multiplicity():
    g = Multigraph.from_edges(3, [(0, 1, 5), (1, 2, 1)])
    assert all_pairs_distances(g)[0, 2] == 2


def test_json_roundtrip_and_format():
    g = Multigraph.from_edges(3, [(0, 1), (1, 2, 2), (0, 0)], labels=["a", "b", "c"], transitive=False)
    text = g.to_json()
    assert json.loads(text) == {
        "vertex_count": 3,
        "edges": [[0, 0, 1], [0, 1, 1], [1, 2, 2]],
        "labels": ["a", "b", "c"],
        "transitive": False,
    }
    assert Multigraph.from_json(text) == g


def test_malformed_json():
    with pytest.raises(GraphError, match="malformed"):
        Multigraph.from_json("{")
    with pytest.raises(GraphError):
        Multigraph.from_json('{"vertex_count": 2, "edges": [[0, 1]]}')


def test_lazy_matrix_matches_dense():
    g = Multigraph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    dense = all_pairs_distances(g)
    lazy = all_pairs_distances(g, dense=False)
    assert not lazy.is_dense
    for x in range(6):
        assert np.array_equal(lazy.row(x), dense.row(x))
    assert diameter(lazy) == diameter(dense) == 3
    assert lazy[1, 4] == 3
    with pytest.raises(GraphError):
        lazy.dense
    with pytest.raises(ValueError):
        DistanceMatrix()


def test_multi_source():
    g = Multigraph.from_edges(5, [(i, i + 1) for i in range(4)])
    assert list(multi_source_distances(g, [0, 4])) == [0, 1, 2, 1, 0]


def test_regularity():
    g = Multigraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert is_regular(g) and max_degree(g) == 2
    assert not is_regular(Multigraph.from_edges(3, [(0, 1), (1, 2)]))


@settings(max_examples=60, deadline=None)
@given(connected_multigraphs())
def test_scipy_distances_match_bfs_oracle(g):
    d = all_pairs_distances(g)
    for x in range(g.vertex_count):
        assert np.array_equal(d.row(x), bfs_distances(g, x))
    dd = d.dense
    assert np.array_equal(dd, dd.T)
    assert (np.diag(dd) == 0).all()


@settings(max_examples=60, deadline=None)
@given(connected_multigraphs())
def test_triangle_inequality_and_roundtrip(g):
    dd = all_pairs_distances(g).dense
    n = g.vertex_count
    assert (dd[:, None, :] <= dd[:, :, None] + dd[None, :, :]).all()
    assert Multigraph.from_json(g.to_json()) == g
    assert int(g.degrees().sum()) == sum(m if u == v else 2 * m for u, v, m in g.edges)
    assert n == len(g.degrees())
