"""Discrete p-Laplacian and its first positive eigenvalue.

Two normalisations of the variational quotient are supported.  ``EQ3`` sums
``|f(x) - f(y)|^p w(x, y)`` over ordered neighbour pairs (every edge twice);
``OPERATOR`` sums over edges once, which at p = 2 makes the minimum the
second-smallest Laplacian eigenvalue.  ``EQ3 == 2 * OPERATOR`` always.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import eigsh

from .graph import GraphError, Multigraph, is_regular

JACOBI_LIMIT = 64
DENSE_LIMIT = 3000


class SpectralError(GraphError):
    pass


class Convention(str, enum.Enum):
    EQ3 = "eq3"
    OPERATOR = "operator"

    @property
    def factor(self) -> float:
        return 2.0 if self is Convention.EQ3 else 1.0


@dataclass
class SpectralResult:
    value: float
    convention: Convention
    p: float
    minimizer: np.ndarray
    residual: float | None
    method: str

    def as_convention(self, convention: Convention) -> float:
        return self.value * Convention(convention).factor / self.convention.factor


def signed_power(a: np.ndarray, p: float) -> np.ndarray:
    """``a^[p] = |a|^(p-1) sign(a)``."""
    return np.sign(a) * np.abs(a) ** (p - 1)


def apply_p_laplacian(g: Multigraph, f, p: float) -> np.ndarray:
    if p < 1:
        raise SpectralError(f"p must be >= 1, got {p}")
    f = np.asarray(f, dtype=float)
    u, v, m = g.proper_edges()
    flow = m * signed_power(f[u] - f[v], p)
    out = np.zeros(g.vertex_count)
    np.add.at(out, u, flow)
    np.add.at(out, v, -flow)
    return out


def optimal_shift(f, p: float, start: float | None = None, tol: float = 1e-12) -> float:
    """Minimiser of ``sum |f - alpha|^p`` over real alpha.

    Mean for p = 2, a median for p = 1, otherwise safeguarded Newton on the
    monotone derivative, bracketed by ``[min f, max f]``.  For p < 2 the
    curvature is regularised near the data points; the bracket keeps the
    iteration convergent regardless.
    """
    f = np.asarray(f, dtype=float)
    if p == 2:
        return float(f.mean())
    if p == 1:
        return float(np.median(f))
    lo, hi = float(f.min()), float(f.max())
    scale = hi - lo
    if scale == 0:
        return lo
    alpha = min(max(start, lo), hi) if start is not None else float(np.median(f))
    floor = 1e-9 * scale
    for _ in range(200):
        r = f - alpha
        a = np.abs(r)
        grad = -(np.sign(r) * a ** (p - 1)).sum()
        if grad > 0:
            hi = alpha
        elif grad < 0:
            lo = alpha
        else:
            break
        if hi - lo <= tol * scale:
            break
        curv = (p - 1) * (np.maximum(a, floor) ** (p - 2)).sum()
        step = alpha - grad / curv
        if not lo < step < hi:
            step = 0.5 * (lo + hi)
        if abs(step - alpha) <= tol * scale:
            alpha = step
            break
        alpha = step
    return float(alpha)


def dirichlet_energy(g: Multigraph, f, p: float, convention=Convention.EQ3) -> float:
    u, v, m = g.proper_edges()
    f = np.asarray(f, dtype=float)
    return Convention(convention).factor * float(np.sum(m * np.abs(f[u] - f[v]) ** p))


def rayleigh_quotient(g: Multigraph, f, p: float, convention=Convention.EQ3) -> float:
    """The variational quotient with the optimal shift in the denominator."""
    f = np.asarray(f, dtype=float)
    alpha = optimal_shift(f, p)
    den = float(np.sum(np.abs(f - alpha) ** p))
    if den == 0:
        raise SpectralError("quotient undefined for constant f")
    return dirichlet_energy(g, f, p, convention) / den


# -- dense symmetric eigensolver -----------------------------------------------


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ascending eigenvalues and the matching orthonormal eigenvectors
    (as columns).  Sweeps stop once the off-diagonal Frobenius norm falls
    below ``tol`` times the matrix norm.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T):
        raise SpectralError("jacobi_eigh needs a square symmetric matrix")
    vecs = np.eye(n)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, q] = a[q, p] = 0.0
                vp = vecs[:, p].copy()
                vq = vecs[:, q]
                vecs[:, p] = c * vp - s * vq
                vecs[:, q] = s * vp + c * vq
    else:
        raise SpectralError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], vecs[:, order]


def symmetric_eigh(a: np.ndarray):
    """Jacobi for small matrices, LAPACK above ``JACOBI_LIMIT``."""
    if a.shape[0] <= JACOBI_LIMIT:
        return jacobi_eigh(a)
    return np.linalg.eigh(a)


def _sparse_laplacian(g: Multigraph):
    n = g.vertex_count
    u, v, m = g.proper_edges()
    rows = np.concatenate([u, v, u, v])
    cols = np.concatenate([v, u, u, v])
    vals = np.concatenate([-m, -m, m, m]).astype(float)
    return csr_matrix((vals, (rows, cols)), shape=(n, n))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v) > 1e-9 * np.abs(v).max()))
    return v if v[i] > 0 else -v


def lambda1_p2_exact(g: Multigraph, convention=Convention.EQ3, method: str | None = None) -> SpectralResult:
    """Algebraic connectivity, scaled to the requested convention.

    ``method`` is ``"dense"`` (default up to ``DENSE_LIMIT`` vertices) or
    ``"iterative"`` (shift-inverted Lanczos on the sparse Laplacian).
    """
    convention = Convention(convention)
    n = g.vertex_count
    if n < 2:
        raise SpectralError("need at least two vertices")
    if method is None:
        method = "dense" if n <= DENSE_LIMIT else "iterative"
    if method == "dense":
        w, vecs = symmetric_eigh(g.laplacian_matrix())
        lam, vec = float(w[1]), vecs[:, 1]
    elif method == "iterative":
        lap = _sparse_laplacian(g)
        v0 = np.cos(np.arange(n) + 0.5)
        k = min(3, n - 1)
        w, vecs = eigsh(lap, k=k, sigma=-1e-3, which="LM", v0=v0, tol=0)
        order = np.argsort(w)
        lam, vec = float(w[order[1]]), vecs[:, order[1]]
        vec = vec - vec.mean()
        lam = float(vec @ (lap @ vec) / (vec @ vec))
    else:
        raise SpectralError(f"unknown method '{method}'")
    vec = _fix_sign(vec / np.linalg.norm(vec))
    res = eigen_residual(g, vec, lam, 2.0)
    return SpectralResult(lam * convention.factor, convention, 2.0, vec, res, "dense" if method == "dense" else "iterative")


def eigen_residual(g: Multigraph, f, lambda_operator: float, p: float) -> float:
    """Relative residual of ``Delta_p f = lambda |f|^(p-2) f``."""
    if p <= 1:
        raise SpectralError("eigen-equation is only meaningful for p > 1")
    f = np.asarray(f, dtype=float)
    rhs = signed_power(f, p)
    norm = np.linalg.norm(rhs)
    if norm == 0:
        raise SpectralError("zero function")
    return float(np.linalg.norm(apply_p_laplacian(g, f, p) - lambda_operator * rhs) / norm)


# -- variational solver ----------------------------------------------------------


class VariationalFailure(SpectralError):
    pass


class _Quotient:
    """Quotient and gradient evaluation on a fixed edge list."""

    def __init__(self, g: Multigraph, p: float, factor: float):
        self.u, self.v, m = g.proper_edges()
        self.m = m.astype(float)
        self.n = g.vertex_count
        e = len(self.u)
        rows = np.concatenate([np.arange(e), np.arange(e)])
        cols = np.concatenate([self.u, self.v])
        vals = np.concatenate([np.ones(e), -np.ones(e)])
        self.incidence = csr_matrix((vals, (rows, cols)), shape=(e, self.n))
        self.incidence_t = self.incidence.T.tocsr()
        self.p = p
        self.factor = factor

    def value(self, f, alpha=None):
        p = self.p
        alpha = optimal_shift(f, p, start=alpha)
        den = np.sum(np.abs(f - alpha) ** p)
        if den <= 0:
            return math.inf, alpha
        diff = self.incidence @ f
        num = self.factor * np.dot(self.m, np.abs(diff) ** p)
        return float(num / den), alpha

    def grad(self, f, alpha, r):
        p = self.p
        g = f - alpha
        den = np.sum(np.abs(g) ** p)
        lap = self.incidence_t @ (self.m * signed_power(self.incidence @ f, p))
        return p * (self.factor * lap - r * signed_power(g, p)) / den


def _normalize(f, alpha):
    g = f - alpha
    nrm = np.linalg.norm(g)
    return g / nrm if nrm > 0 else g


def _descend(q: _Quotient, f0: np.ndarray, iters: int):
    """Normalised (sub)gradient descent with Armijo backtracking.

    Trial steps come from the Barzilai-Borwein formula; the iterate is
    re-centred on its optimal shift and rescaled to unit 2-norm each step,
    which leaves the quotient unchanged.
    """
    r, alpha = q.value(f0)
    if not math.isfinite(r):
        return math.inf, f0
    f = _normalize(f0, alpha)
    r, alpha = q.value(f, 0.0)
    smooth = q.p >= 1.2
    eta = 1e-2
    prev_f = prev_g = None
    history = [r]
    for it in range(iters):
        gr = q.grad(f, alpha, r)
        gn = np.linalg.norm(gr)
        if gn == 0 or not np.isfinite(gn):
            break
        if prev_g is not None:
            s = f - prev_f
            y = gr - prev_g
            sy = float(s @ y)
            if sy > 0:
                eta = min(max(float(s @ s) / sy * gn, 1e-12), 1.0)
        d = gr / gn
        accepted = False
        for _ in range(60):
            cand = f - eta * d
            rc, ac = q.value(cand, alpha)
            if rc < r - (1e-4 * eta * gn if smooth else 0.0):
                accepted = True
                break
            eta *= 0.5
            if eta < 1e-16:
                break
        if not accepted:
            break
        # the quotient is scale invariant, so rescale the previous pair too
        scale = np.linalg.norm(cand - ac)
        prev_f = (f - ac) / scale
        prev_g = gr * scale
        f = (cand - ac) / scale
        r, alpha = q.value(f, 0.0)
        history.append(r)
        if it >= 50 and history[-50] - r <= 1e-12 * abs(r):
            break
    return r, f


def _sweep_cut_start(q: _Quotient, v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    best, best_f = math.inf, None
    for k in range(1, q.n):
        f = np.zeros(q.n)
        f[order[k:]] = 1.0
        r, _ = q.value(f)
        if r < best:
            best, best_f = r, f
    return best_f


def lambda1_variational(
    g: Multigraph,
    p: float,
    convention=Convention.EQ3,
    restarts: int = 16,
    seed: int = 0,
    iters: int = 2000,
) -> SpectralResult:
    """Upper estimate of the p-spectral gap by minimising the quotient.

    Restart 0 starts from the p = 2 eigenvector, restart 1 from its best
    sweep cut, the rest from seeded random sign vectors.  The best value wins
    (ties to the lower restart index).
    """
    if p < 1:
        raise SpectralError(f"p must be >= 1, got {p}")
    if restarts < 1:
        raise SpectralError("restarts must be >= 1")
    convention = Convention(convention)
    n = g.vertex_count
    if n < 2:
        raise SpectralError("need at least two vertices")
    q = _Quotient(g, float(p), convention.factor)
    rng = np.random.default_rng(seed)
    eig = lambda1_p2_exact(g, Convention.OPERATOR).minimizer
    starts = [eig, _sweep_cut_start(q, eig)]
    while len(starts) < restarts:
        s = rng.choice([-1.0, 1.0], size=n)
        if np.all(s == s[0]):
            s[0] = -s[0]
        starts.append(s)
    starts = starts[:restarts]
    best_r, best_f = math.inf, None
    for f0 in starts:
        r, f = _descend(q, np.asarray(f0, dtype=float), iters)
        if r < best_r:
            best_r, best_f = r, f
    if best_f is None or not math.isfinite(best_r):
        raise VariationalFailure("no restart produced a non-constant function")
    alpha = optimal_shift(best_f, p)
    best_f = _fix_sign(best_f - alpha)
    residual = None
    if p > 1:
        residual = eigen_residual(g, best_f, best_r / convention.factor, p)
    return SpectralResult(best_r, convention, float(p), best_f, residual, "variational")


# -- adjacency ------------------------------------------------------------------------


@dataclass
class AlphaResult:
    alpha: float
    k: int
    bipartite: bool
    spectrum: np.ndarray


def adjacency_alpha(g: Multigraph) -> AlphaResult:
    """Second-largest adjacency eigenvalue modulus of a regular graph.

    Loops sit on the diagonal with their multiplicity, matching the degree
    convention.  ``bipartite`` flags ``alpha == k``.
    """
    if not is_regular(g):
        raise SpectralError("non-regular graph: adjacency_alpha needs a k-regular graph")
    if g.vertex_count > DENSE_LIMIT:
        raise SpectralError(f"{g.vertex_count} vertices exceeds the dense limit {DENSE_LIMIT}")
    k = int(g.degrees()[0])
    w, _ = symmetric_eigh(g.adjacency_matrix())
    by_modulus = w[np.argsort(-np.abs(w), kind="stable")]
    alpha = float(abs(by_modulus[1])) if len(w) > 1 else 0.0
    bipartite = abs(alpha - k) <= 1e-9 * max(k, 1)
    return AlphaResult(alpha, k, bipartite, np.sort(w))
