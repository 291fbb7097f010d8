"""Volume distribution: the smallest relative diameter of a vertex subset
holding at least an eps-fraction of the vertices.

Subset sizes use the threshold ``ceil(eps * |V|)``.  Values are kept as the
integer pair (subset diameter, graph diameter) alongside the float ratio so
threshold comparisons can be made exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import DistanceMatrix, GraphError, Multigraph, diameter
from .reports import InequalityReport

EXACT_LIMIT = 40


class RhoSizeError(GraphError):
    pass


@dataclass
class RhoResult:
    eps: float
    lower: float
    upper: float
    witness: tuple[int, ...] | None
    method: str
    subset_diameter: int | None = None
    delta: int = 0
    degenerate: bool = False

    @property
    def value(self) -> float:
        return self.upper if self.method == "witness_upper" else self.lower


def required_size(eps: float, n: int) -> int:
    """``ceil(eps * n)`` computed on the rational nearest ``eps``."""
    if not 0 < eps < 1:
        raise GraphError(f"eps must lie in (0, 1), got {eps}")
    frac = Fraction(eps).limit_denominator(10**6)
    return max(math.ceil(frac * n), 0)


def _degenerate(eps: float, delta: int) -> RhoResult:
    return RhoResult(eps, 0.0, 0.0, (0,), "exact", 0, delta, True)


# -- exact search via threshold cliques ------------------------------------------


def _degeneracy_order(nbr: list[int], n: int) -> list[int]:
    remaining = set(range(n))
    deg = {v: bin(nbr[v]).count("1") for v in range(n)}
    order = []
    while remaining:
        v = min(remaining, key=lambda x: (deg[x], x))
        order.append(v)
        remaining.remove(v)
        for w in range(n):
            if w in remaining and nbr[v] >> w & 1:
                deg[w] -= 1
    # largest-core vertices first: they are the likeliest clique members
    return order[::-1]


def find_clique(adj: np.ndarray, target: int) -> list[int] | None:
    """A clique of size ``target`` in a boolean adjacency matrix, or None.

    Branch and bound with greedy-colouring bounds on bitsets; vertices are
    relabelled in degeneracy order first.
    """
    n = adj.shape[0]
    if target <= 1:
        return [0] if n and target == 1 else ([] if target <= 0 else None)
    raw = [sum(1 << int(w) for w in np.flatnonzero(adj[v])) & ~(1 << v) for v in range(n)]
    order = _degeneracy_order(raw, n)
    pos = {v: i for i, v in enumerate(order)}
    nbr = [0] * n
    for v in range(n):
        bits = 0
        for w in np.flatnonzero(adj[v]):
            if w != v:
                bits |= 1 << pos[int(w)]
        nbr[pos[v]] = bits

    def colour(cands: int):
        verts, cols = [], []
        uncoloured = cands
        c = 0
        while uncoloured:
            c += 1
            q = uncoloured
            while q:
                v = (q & -q).bit_length() - 1
                q &= ~nbr[v] & ~(1 << v)
                uncoloured &= ~(1 << v)
                verts.append(v)
                cols.append(c)
        return verts, cols

    chosen: list[int] = []

    def expand(cands: int) -> bool:
        if len(chosen) >= target:
            return True
        if len(chosen) + bin(cands).count("1") < target:
            return False
        verts, cols = colour(cands)
        for i in range(len(verts) - 1, -1, -1):
            if len(chosen) + cols[i] < target:
                return False
            v = verts[i]
            chosen.append(v)
            if expand(cands & nbr[v]):
                return True
            chosen.pop()
            cands &= ~(1 << v)
        return False

    if expand((1 << n) - 1):
        return sorted(order[v] for v in chosen)
    return None


def rho_exact(g: Multigraph, d: DistanceMatrix, eps: float) -> RhoResult:
    n = g.vertex_count
    delta = diameter(d)
    target = required_size(eps, n)
    if target <= 1:
        return _degenerate(eps, delta)
    if n > EXACT_LIMIT:
        raise RhoSizeError(
            f"exact search is capped at {EXACT_LIMIT} vertices ({n} given); use rho_lower_ballcount/rho_upper_witness"
        )
    dense = d.dense
    start = rho_lower_ballcount(g, d, eps).subset_diameter
    for D in range(max(start, 1), delta + 1):
        clique = find_clique(dense <= D, target)
        if clique is not None:
            width = int(dense[np.ix_(clique, clique)].max())
            return RhoResult(eps, width / delta, width / delta, tuple(clique), "exact", width, delta)
    raise AssertionError("unreachable: the whole vertex set is always feasible")


def ball_counts(d: DistanceMatrix) -> np.ndarray:
    """``counts[r] = max_x |B_x(r)|`` for ``r = 0..diameter``."""
    best = None
    for row in d.rows():
        c = np.cumsum(np.bincount(row))
        if best is None:
            best = c
        else:
            if len(c) > len(best):
                best = np.concatenate([best, np.full(len(c) - len(best), best[-1])])
            elif len(c) < len(best):
                c = np.concatenate([c, np.full(len(best) - len(c), c[-1])])
            best = np.maximum(best, c)
    return best


def rho_lower_ballcount(g: Multigraph, d: DistanceMatrix, eps: float) -> RhoResult:
    """Lower bound: a set of size ``ceil(eps |V|)`` and diameter D fits in a
    ball of radius D around any of its points, so D exceeds every radius
    whose balls are all too small."""
    n = g.vertex_count
    target = required_size(eps, n)
    counts = ball_counts(d)
    delta = len(counts) - 1
    if delta < 1:
        raise GraphError("ballcount bound needs diameter >= 1")
    if target <= 1:
        res = _degenerate(eps, delta)
        res.method = "ballcount_lower"
        res.upper = 1.0
        res.witness = None
        return res
    r_star = int(np.count_nonzero(counts < target)) - 1
    D = r_star + 1
    return RhoResult(eps, D / delta, 1.0, None, "ballcount_lower", D, delta)


def rho_upper_witness(g: Multigraph, d: DistanceMatrix, eps: float) -> RhoResult:
    """Upper bound from the best ball ``B_x(r)`` with enough vertices."""
    n = g.vertex_count
    target = required_size(eps, n)
    delta = diameter(d)
    if target <= 1:
        res = _degenerate(eps, delta)
        res.method = "witness_upper"
        return res
    radii = []
    for x, row in enumerate(d.rows()):
        srt = np.sort(row)
        radii.append((int(srt[target - 1]), x))
    radii.sort()
    best_width, best_set = None, None
    for r, x in radii:
        if best_width is not None and r >= best_width:
            break
        row = d.row(x)
        members = np.flatnonzero(row <= r)
        if d.is_dense:
            width = int(d.dense[np.ix_(members, members)].max())
        else:
            width = int(max(d.row(int(y))[members].max() for y in members))
        if best_width is None or width < best_width:
            best_width, best_set = width, members
    return RhoResult(
        eps, 0.0, best_width / delta, tuple(int(v) for v in best_set), "witness_upper", best_width, delta
    )


def rho_best(g: Multigraph, d: DistanceMatrix, eps: float) -> RhoResult:
    """Exact when affordable, otherwise the ballcount lower bound."""
    if g.vertex_count <= EXACT_LIMIT:
        return rho_exact(g, d, eps)
    return rho_lower_ballcount(g, d, eps)


def check_prop6(g: Multigraph, d: DistanceMatrix) -> InequalityReport:
    """Vertex-transitive graphs on at least 3 vertices have rho_{1/2} >= 1/4."""
    if not g.transitive:
        raise GraphError("check_prop6 needs a graph constructed as vertex-transitive (transitivity is never inferred)")
    n = g.vertex_count
    if n < 3:
        raise GraphError("check_prop6 needs at least 3 vertices")
    delta = diameter(d)
    notes = []
    if n <= EXACT_LIMIT:
        res = rho_exact(g, d, 0.5)
        value, method = res.lower, "exact"
    elif delta <= 2:
        # any 2-set has diameter >= 1
        value, method = 1.0 / delta, "direct"
        notes.append("diameter <= 2: verified directly")
    else:
        res = rho_lower_ballcount(g, d, 0.5)
        value, method = res.lower, "ballcount_lower"
    return InequalityReport.compare(
        "prop6", g.name, {"eps": 0.5, "method": method, "delta": delta}, 0.25, value, notes=notes, tol=1e-12
    )
