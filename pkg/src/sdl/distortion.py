"""Embeddings into finite-dimensional p-normed spaces and their distortion.

Realized distortion of an injective map is expansion times contraction,
i.e. the bi-Lipschitz constant after rescaling the map to be 1-Lipschitz.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.distance import pdist, squareform

from .graph import DistanceMatrix, GraphError, Multigraph, diameter, multi_source_distances

SQRT3 = math.sqrt(3.0)
# Frozen empirical ceiling for realized Bourgain distortion / log2|V| on the
# family graphs with |V| <= 729, seeds 0..9 (observed maximum 1.0, at |V| = 2).
BOURGAIN_CAP = 2.0

LATTICE_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1), (-1, 1), (1, -1))


class EmbeddingError(GraphError):
    pass


@dataclass
class Embedding:
    coords: np.ndarray
    p: float

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim == 1:
            self.coords = self.coords[:, None]
        if self.p < 1:
            raise EmbeddingError("target norm exponent must be >= 1")

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def to_json(self) -> str:
        data = {"p": self.p, "dim": self.dim, "coords": self.coords.tolist()}
        return json.dumps(data, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Embedding":
        data = json.loads(text)
        coords = np.array(data["coords"], dtype=float).reshape(-1, int(data["dim"]))
        return cls(coords, float(data["p"]))


@dataclass
class DistortionReport:
    expansion: float
    contraction: float
    method: str = ""
    seed: int | None = None
    lower_bound: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def realized(self) -> float:
        return self.expansion * self.contraction


def _pair_norms(coords: np.ndarray, p: float) -> np.ndarray:
    if p == 2:
        return pdist(coords)
    return pdist(coords, metric="minkowski", p=p)


def realized_distortion(d: DistanceMatrix, e: Embedding, method: str = "", seed=None) -> DistortionReport:
    n = d.n
    if e.coords.shape[0] != n:
        raise EmbeddingError(f"embedding has {e.coords.shape[0]} points for {n} vertices")
    if n < 2:
        return DistortionReport(1.0, 1.0, method, seed)
    if d.is_dense:
        norms = _pair_norms(e.coords, e.p)
        dist = squareform(d.dense, checks=False).astype(float)
        zero = np.flatnonzero(norms == 0)
        if zero.size:
            i, j = _condensed_pair(int(zero[0]), n)
            raise EmbeddingError(f"non-injective: vertices {i} and {j} share coordinates")
        ratio = norms / dist
        return DistortionReport(float(ratio.max()), float((1.0 / ratio).max()), method, seed)
    expansion, contraction = 0.0, 0.0
    for x in range(n - 1):
        diff = e.coords[x + 1 :] - e.coords[x]
        norms = np.linalg.norm(diff, ord=e.p, axis=1) if e.p != 2 else np.sqrt((diff * diff).sum(1))
        dist = d.row(x)[x + 1 :].astype(float)
        if (norms == 0).any():
            j = x + 1 + int(np.flatnonzero(norms == 0)[0])
            raise EmbeddingError(f"non-injective: vertices {x} and {j} share coordinates")
        ratio = norms / dist
        expansion = max(expansion, float(ratio.max()))
        contraction = max(contraction, float((1.0 / ratio).max()))
    return DistortionReport(expansion, contraction, method, seed)


def _condensed_pair(k: int, n: int) -> tuple[int, int]:
    i = 0
    while k >= n - 1 - i:
        k -= n - 1 - i
        i += 1
    return i, i + 1 + k


# -- Bourgain ------------------------------------------------------------------


def _column_min(d: DistanceMatrix, g: Multigraph, members: np.ndarray, adj) -> np.ndarray:
    if d.is_dense:
        return d.dense[:, members].min(axis=1)
    return multi_source_distances(g, members, adj)


def bourgain_embedding(
    g: Multigraph, d: DistanceMatrix, p: float = 2.0, seed: int = 0, c: float = 8.0
) -> Embedding:
    """Random point-to-set embedding.

    Scale ``i = 1..floor(log2 n)`` draws ``ceil(c log2 n)`` subsets, each
    vertex kept with probability ``2^-i``; the coordinate is the distance to
    the subset (the graph diameter for an empty subset).  Coordinates are
    divided by ``m^(1/p)`` (m = coordinate count) so the map is 1-Lipschitz.
    """
    n = g.vertex_count
    if n < 2:
        raise EmbeddingError("need at least two vertices")
    rng = np.random.default_rng(seed)
    levels = max(int(math.floor(math.log2(n))), 1)
    per_level = int(math.ceil(c * math.log2(n)))
    delta = diameter(d)
    adj = None if d.is_dense else g.neighbors()
    cols = []
    for i in range(1, levels + 1):
        for _ in range(per_level):
            members = np.flatnonzero(rng.random(n) < 2.0**-i)
            if members.size == 0:
                cols.append(np.full(n, float(delta)))
            else:
                cols.append(_column_min(d, g, members, adj).astype(float))
    raw = np.column_stack(cols)
    while True:
        _, first, inverse = np.unique(raw, axis=0, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        clash = np.flatnonzero(first[inverse] != np.arange(n))
        if clash.size == 0:
            break
        v0 = int(first[inverse[clash[0]]])
        extra = d.dense[:, v0] if d.is_dense else d.row(v0)
        raw = np.column_stack([raw, extra.astype(float)])
    return Embedding(raw / raw.shape[1] ** (1.0 / p), p)


# -- triangular lattice ----------------------------------------------------------


def lattice_distance(u, v) -> int:
    """Word metric on Z^2 for the six triangular-lattice generators."""
    dx, dy = v[0] - u[0], v[1] - u[1]
    return (abs(dx) + abs(dy) + abs(dx + dy)) // 2


def axial_to_planar(u) -> tuple[float, float]:
    return (u[0] + u[1] / 2.0, u[1] * SQRT3 / 2.0)


def _check_pascal_level(n):
    if not isinstance(n, int) or not 1 <= n <= 6:
        raise EmbeddingError(f"pascal embedding level must be in 1..6, got {n}")


def pascal_lattice_embedding(n: int) -> dict[str, tuple[int, int]]:
    """Lattice positions for the level-``n`` Pascal graph, keyed by word.

    The graph fills the lattice triangle with corners 0^n -> (0, 0),
    1^n -> (s, 0), 2^n -> (0, s), s = 2^n - 1.  The copy of the level-(m-1)
    graph whose words end in letter l sits in the corner triangle at l,
    oriented so its corner k^(m-1) (k != l) faces the third copy: that corner
    is where the edge generated by the transposition fixing k leaves the copy.
    """
    _check_pascal_level(n)
    out: dict[str, tuple[int, int]] = {}

    def place(m: int, suffix: str, anchors):
        if m == 0:
            out[suffix] = anchors[0]
            return
        side = 2**m - 1
        sub = 2 ** (m - 1) - 1
        for ell in range(3):
            others = [x for x in range(3) if x != ell]
            b = [None, None, None]
            b[ell] = anchors[ell]
            for k in others:
                towards = others[0] if k == others[1] else others[1]
                step = _lattice_unit(anchors[ell], anchors[towards], side)
                b[k] = (anchors[ell][0] + sub * step[0], anchors[ell][1] + sub * step[1])
            place(m - 1, str(ell) + suffix, b)

    s = 2**n - 1
    place(n, "", [(0, 0), (s, 0), (0, s)])
    return out


def _lattice_unit(a, b, side):
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx % side or dy % side:
        raise AssertionError("anchors are not a lattice triangle")
    return dx // side, dy // side


def pascal_lattice_coords(n: int) -> np.ndarray:
    """``pascal_lattice_embedding`` as an integer array in vertex order."""
    from .families import hanoi_graph

    emb = pascal_lattice_embedding(n)
    labels = hanoi_graph(n).labels
    return np.array([emb[w] for w in labels], dtype=np.int64)


def planar_coords(axial: np.ndarray) -> np.ndarray:
    axial = np.asarray(axial, dtype=float)
    return np.column_stack([axial[:, 0] + axial[:, 1] / 2.0, axial[:, 1] * SQRT3 / 2.0])


def pascal_planar_embedding(n: int, p: float = 2.0) -> Embedding:
    """The lattice layout drawn in the plane, rescaled so the longest edge
    has p-norm 1 (hence expansion exactly 1)."""
    _check_pascal_level(n)
    pts = planar_coords(pascal_lattice_coords(n))
    steps = planar_coords(np.array(LATTICE_STEPS))
    longest = float(np.max(np.linalg.norm(steps, ord=p, axis=1)))
    return Embedding(pts / longest, p)


# -- bounds ---------------------------------------------------------------------------


def distortion_lower_bound(lambda_eq3_lower, delta, rho_eps, k, eps, p) -> float:
    """``0.5 * rho * delta * lambda^(1/p) * (k / (1 - eps))^(-1/p)``.

    Valid when ``lambda_eq3_lower`` is a lower estimate of the spectral gap
    in the ordered-pair convention and ``rho_eps`` a lower estimate of the
    volume distribution.
    """
    if rho_eps <= 0:
        raise EmbeddingError("rho_eps = 0: distortion lower bound is vacuous")
    if not 0 < eps < 1:
        raise EmbeddingError("eps must lie in (0, 1)")
    return 0.5 * rho_eps * delta * lambda_eq3_lower ** (1.0 / p) * (k / (1.0 - eps)) ** (-1.0 / p)


def _pnorm_rows(z: np.ndarray, p: float):
    """p-norms of rows of ``z`` and their gradients (smoothed at 0)."""
    if p == 2:
        nrm = np.sqrt((z * z).sum(1) + 1e-300)
        return nrm, z / nrm[:, None]
    a = np.abs(z) + 1e-300
    s = (a**p).sum(1)
    nrm = s ** (1.0 / p)
    grad = np.sign(z) * a ** (p - 1) / (nrm ** (p - 1))[:, None]
    return nrm, grad


def _surrogate(x, ii, jj, logd, n, dim, p, mode, t):
    pts = x.reshape(n, dim)
    z = pts[ii] - pts[jj]
    nrm, dn = _pnorm_rows(z, p)
    lr = np.log(nrm) - logd
    if mode == "lsq":
        val = float(lr @ lr)
        w = 2.0 * lr
    else:
        # smooth (max lr) - (min lr): log-sum-exp at temperature t
        hi = lr.max()
        lo = lr.min()
        eh = np.exp(t * (lr - hi))
        el = np.exp(-t * (lr - lo))
        sh, sl = eh.sum(), el.sum()
        val = float(hi + math.log(sh) / t - lo + math.log(sl) / t)
        w = eh / sh - el / sl
    coef = (w / nrm)[:, None] * dn
    grad = np.zeros_like(pts)
    np.add.at(grad, ii, coef)
    np.add.at(grad, jj, -coef)
    return val, grad.ravel()


def _classical_mds(dd: np.ndarray, dim: int) -> np.ndarray:
    n = dd.shape[0]
    j = np.eye(n) - 1.0 / n
    b = -0.5 * j @ (dd.astype(float) ** 2) @ j
    w, v = np.linalg.eigh(b)
    idx = np.argsort(w)[::-1][:dim]
    return v[:, idx] * np.sqrt(np.maximum(w[idx], 1e-12))


def _project(coords: np.ndarray, dim: int) -> np.ndarray:
    c = coords - coords.mean(0)
    if c.shape[1] <= dim:
        return np.column_stack([c, np.zeros((c.shape[0], dim - c.shape[1]))])
    _, _, vt = np.linalg.svd(c, full_matrices=False)
    return c @ vt[:dim].T


def local_opt_distortion(
    g: Multigraph,
    d: DistanceMatrix,
    p: float = 2.0,
    dim: int = 2,
    seed: int = 0,
    iters: int = 500,
    restarts: int = 4,
) -> tuple[DistortionReport, Embedding]:
    """Distortion upper bound by local search over ``dim``-dimensional maps.

    Each start (classical MDS, Bourgain projected to ``dim``, seeded random
    configurations) is first fitted by least squares on log-ratios, then
    polished on a smoothed max-minus-min log-ratio.  The best realized
    distortion over all starts wins.
    """
    if dim < 1:
        raise EmbeddingError("dim must be >= 1")
    n = g.vertex_count
    dd = d.dense
    ii, jj = np.triu_indices(n, 1)
    logd = np.log(dd[ii, jj].astype(float))
    rng = np.random.default_rng(seed)
    scale = float(diameter(d))
    starts = [_classical_mds(dd, dim)]
    if n >= 2:
        starts.append(_project(bourgain_embedding(g, d, p, seed).coords, dim))
    while len(starts) < restarts + 2:
        starts.append(rng.normal(scale=scale, size=(n, dim)))
    # jitter breaks exact coincidences that MDS produces on symmetric graphs
    starts = [s + 1e-6 * scale * rng.standard_normal(s.shape) for s in starts]

    best = None
    for k, x0 in enumerate(starts):
        x = x0.ravel()
        res = minimize(_surrogate, x, args=(ii, jj, logd, n, dim, p, "lsq", 0.0), jac=True,
                       method="L-BFGS-B", options={"maxiter": iters, "gtol": 1e-12, "ftol": 1e-15})
        x = res.x
        for t in (10.0, 100.0, 1000.0, 1e4):
            res = minimize(_surrogate, x, args=(ii, jj, logd, n, dim, p, "lse", t), jac=True,
                           method="L-BFGS-B", options={"maxiter": iters, "gtol": 1e-14, "ftol": 1e-16})
            x = res.x
        emb = Embedding(x.reshape(n, dim), p)
        try:
            rep = realized_distortion(d, emb, "local_opt", seed)
        except EmbeddingError:
            continue
        if best is None or rep.realized < best[0].realized:
            best = (rep, emb)
    if best is None:
        raise EmbeddingError("local search produced no injective embedding")
    return best


def quasi_isometry_constants(dx: np.ndarray, dy: np.ndarray, f) -> tuple[float, float, float]:
    """Constants (L, C, K) of a map between finite metric spaces.

    ``f[i]`` is the index in the target of the image of point ``i``.  L is
    the bi-Lipschitz constant of ``f`` on pairs with distinct images (at
    least 1), C the smallest additive constant making both inequalities hold
    with that L, and K the largest distance from a target point to the image.
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    f = np.asarray(f)
    n = dx.shape[0]
    ii, jj = np.triu_indices(n, 1)
    a = dx[ii, jj]
    b = dy[f[ii], f[jj]]
    ok = (a > 0) & (b > 0)
    L = 1.0
    if ok.any():
        L = max(1.0, float((b[ok] / a[ok]).max()), float((a[ok] / b[ok]).max()))
    C = 0.0
    if a.size:
        C = max(0.0, float((a / L - b).max()), float((b - L * a).max()))
        if C <= 1e-12 * max(1.0, float(a.max())):
            C = 0.0
    K = float(dy[:, np.unique(f)].min(axis=1).max())
    return L, C, K
