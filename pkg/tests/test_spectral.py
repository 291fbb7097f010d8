import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdl.families import grigorchuk_graph, hanoi_graph, petersen_graph, standard_graph
from sdl.graph import Multigraph
from sdl.spectral import (
    Convention,
    SpectralError,
    adjacency_alpha,
    apply_p_laplacian,
    dirichlet_energy,
    eigen_residual,
    jacobi_eigh,
    lambda1_p2_exact,
    lambda1_variational,
    optimal_shift,
    rayleigh_quotient,
    signed_power,
)
from test_graph import connected_multigraphs


def test_signed_power():
    assert np.allclose(signed_power(np.array([-2.0, 0.0, 3.0]), 3), [-4.0, 0.0, 9.0])


def test_p_laplacian_at_two_is_laplacian():
    g = Multigraph.from_edges(4, [(0, 1, 2), (1, 2), (2, 3), (3, 3)])
    f = np.array([1.0, -2.0, 0.5, 3.0])
    assert np.allclose(apply_p_laplacian(g, f, 2), g.laplacian_matrix() @ f)
    with pytest.raises(SpectralError):
        apply_p_laplacian(g, f, 0.5)


@pytest.mark.parametrize("p", [1.0, 1.3, 2.0, 3.0, 4.5])
def test_optimal_shift_minimises(p):
    rng = np.random.default_rng(1)
    f = rng.normal(size=15)
    a = optimal_shift(f, p)
    cost = lambda x: np.sum(np.abs(f - x) ** p)
    grid = np.linspace(f.min(), f.max(), 2001)
    assert cost(a) <= min(cost(x) for x in grid) + 1e-9


@pytest.mark.parametrize("n", [3, 4, 5, 8, 13])
def test_cycle_gap(n):
    assert lambda1_p2_exact(standard_graph("cycle", n), Convention.OPERATOR).value == pytest.approx(
        2 - 2 * math.cos(2 * math.pi / n), abs=1e-12
    )


def test_conventions_relate_by_factor_two():
    g = hanoi_graph(2)
    op = lambda1_p2_exact(g, Convention.OPERATOR)
    eq3 = lambda1_p2_exact(g, "eq3")
    assert eq3.value == pytest.approx(2 * op.value, rel=1e-13)
    assert op.as_convention(Convention.EQ3) == pytest.approx(eq3.value)


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(20, 20))
    a = a + a.T
    w, v = jacobi_eigh(a)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-10)
    assert np.allclose(v @ np.diag(w) @ v.T, a, atol=1e-9)


def test_iterative_matches_dense():
    g = hanoi_graph(5)
    a = lambda1_p2_exact(g, method="dense").value
    b = lambda1_p2_exact(g, method="iterative").value
    assert b == pytest.approx(a, rel=1e-9)


def test_exact_pair_residual_small():
    for g in (hanoi_graph(3), grigorchuk_graph(5), petersen_graph()):
        res = lambda1_p2_exact(g)
        assert res.residual < 1e-8
        assert eigen_residual(g, res.minimizer, res.as_convention(Convention.OPERATOR), 2) < 1e-8


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_two_vertex_gap(p):
    g = standard_graph("complete", 2)
    assert lambda1_variational(g, p).value == pytest.approx(2**p, rel=1e-6)
    assert lambda1_variational(g, p, Convention.OPERATOR).value == pytest.approx(2 ** (p - 1), rel=1e-6)


def test_p1_cycle_is_cheeger_like():
    # splitting C4 into two paths cuts two edges
    assert lambda1_variational(standard_graph("cycle", 4), 1.0, Convention.OPERATOR).value == pytest.approx(1.0)


def test_variational_at_two_matches_exact():
    g = grigorchuk_graph(4)
    assert lambda1_variational(g, 2.0).value == pytest.approx(lambda1_p2_exact(g).value, rel=1e-6)


def test_variational_deterministic():
    g = hanoi_graph(2)
    a = lambda1_variational(g, 1.5, seed=4, restarts=4)
    b = lambda1_variational(g, 1.5, seed=4, restarts=4)
    assert a.value == b.value
    assert np.array_equal(a.minimizer, b.minimizer)


def test_variational_residual_none_at_p1():
    assert lambda1_variational(standard_graph("path", 3), 1.0, restarts=2).residual is None


def test_grigorchuk_gaps_decrease_in_n():
    for p in (1.5, 3.0):
        vals = [lambda1_variational(grigorchuk_graph(n), p, restarts=6).value for n in range(1, 6)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_alpha_values():
    c5 = adjacency_alpha(standard_graph("cycle", 5))
    assert c5.alpha == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)
    assert adjacency_alpha(petersen_graph()).alpha == pytest.approx(2.0, abs=1e-12)
    assert adjacency_alpha(standard_graph("cycle", 4)).bipartite
    with pytest.raises(SpectralError, match="non-regular"):
        adjacency_alpha(standard_graph("path", 4))


@settings(max_examples=40, deadline=None)
@given(connected_multigraphs(max_n=10), st.floats(1.0, 4.0))
def test_quotient_bounds_gap(g, p):
    if g.vertex_count < 2:
        return
    rng = np.random.default_rng(0)
    f = rng.normal(size=g.vertex_count)
    q_eq3 = rayleigh_quotient(g, f, p, Convention.EQ3)
    q_op = rayleigh_quotient(g, f, p, Convention.OPERATOR)
    assert q_eq3 == pytest.approx(2 * q_op, rel=1e-12)
    if p == 2:
        assert q_eq3 >= lambda1_p2_exact(g).value * (1 - 1e-9)
    # shift invariance of the quotient
    assert rayleigh_quotient(g, f + 3.7, p) == pytest.approx(q_eq3, rel=1e-8)
    assert dirichlet_energy(g, 2 * f, p) == pytest.approx(2**p * dirichlet_energy(g, f, p), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(connected_multigraphs(max_n=10))
def test_p2_exact_below_any_quotient(g):
    if g.vertex_count < 2:
        return
    lam = lambda1_p2_exact(g).value
    f = np.cos(np.arange(g.vertex_count) * 1.3)
    if np.ptp(f) > 0:
        assert rayleigh_quotient(g, f, 2.0) >= lam * (1 - 1e-9)
