"""Lowest eigenvalues of assembled Hermitian operators.

``dense_eigs`` is the small-scale oracle (LAPACK Hermitian eigensolver);
``lanczos_lowest`` is a thick-restart Lanczos iteration with full
reorthogonalization for production grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import SolverError

CLUSTER_RTOL = 1e-6
DENSE_LIMIT = 5000
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SolverConfig:
    count: int = 10
    tolerance: float = 1e-10
    max_iterations: int = 20000
    seed: int = 0
    basis_size: int | None = None
    reorthogonalization: str = "full"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("solver count must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("solver tolerance must be > 0")
        if self.reorthogonalization != "full":
            raise ValueError("only full reorthogonalization is supported")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with residuals and multiplicity clusters."""

    eigenvalues: np.ndarray
    residual_norms: np.ndarray
    cluster_ids: np.ndarray
    converged: np.ndarray
    metadata: dict = field(default_factory=dict)
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def cluster_sizes(self) -> dict[int, int]:
        ids, counts = np.unique(self.cluster_ids, return_counts=True)
        return {int(i): int(c) for i, c in zip(ids, counts)}


def cluster_ids(values, rtol: float = CLUSTER_RTOL) -> np.ndarray:
    """Group consecutive ascending values whose relative gap is within ``rtol``."""
    values = np.asarray(values, dtype=float)
    ids = np.zeros(len(values), dtype=int)
    for i in range(1, len(values)):
        a, b = values[i - 1], values[i]
        same = abs(b - a) <= rtol * max(abs(a), abs(b), 1e-12)
        ids[i] = ids[i - 1] if same else ids[i - 1] + 1
    return ids


def _matrix(op):
    return op.matrix if hasattr(op, "matrix") else op


def residual_norms(op, eigenvalues, vectors) -> np.ndarray:
    """||H v - lambda v|| / ||v|| for each column v of ``vectors``."""
    H = _matrix(op)
    X = np.asarray(vectors)
    if X.ndim == 1:
        X = X[:, None]
    lam = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise ValueError("residual of a zero vector is undefined")
    R = H @ X - X * lam
    return np.linalg.norm(R, axis=0) / norms


def dense_eigs(op) -> Spectrum:
    """All eigenvalues via a dense Hermitian eigensolver; refuses dimensions above 5000."""
    H = _matrix(op)
    n = H.shape[0]
    if n > DENSE_LIMIT:
        raise SolverError(f"dense_eigs refuses dimension {n} > {DENSE_LIMIT}; use lanczos_lowest")
    M = H.toarray() if sp.issparse(H) else np.asarray(H)
    w, X = np.linalg.eigh(M)
    res = residual_norms(H, w, X)
    return Spectrum(eigenvalues=w, residual_norms=res, cluster_ids=cluster_ids(w),
                    converged=np.ones(n, dtype=bool),
                    metadata={"method": "dense", "dimension": n}, eigenvectors=X)


def _gershgorin(H) -> float:
    if sp.issparse(H):
        return float(abs(H).sum(axis=1).max())
    return float(np.abs(H).sum(axis=1).max())


def _random_vector(rng, n, dtype):
    v = rng.standard_normal(n)
    if np.issubdtype(dtype, np.complexfloating):
        v = v + 1j * rng.standard_normal(n)
    return v.astype(dtype)


def _orthogonalize(V, w, locked=None):
    """Two passes of classical Gram-Schmidt against the rows of V; returns coefficients.

    Rows of ``locked`` are projected out as well, without recording coefficients.
    """
    h = np.zeros(V.shape[0], dtype=np.result_type(V, w))
    for _ in range(2):
        if locked is not None:
            w -= (locked.conj() @ w) @ locked
        c = V.conj() @ w
        w -= c @ V
        h += c
    return h


@dataclass
class _CoreResult:
    theta: np.ndarray
    vectors: np.ndarray  # N x m
    matvecs: int
    restarts: int


def _lanczos_core(H, m, cfg, rng, dtype, threshold, anorm, locked, budget) -> _CoreResult:
    N = H.shape[0]
    free = N - (0 if locked is None else locked.shape[0])
    p = cfg.basis_size or max(2 * m + 20, m + 40)
    p = min(max(p, m + 2), free)
    V = np.zeros((p + 1, N), dtype=dtype)
    T = np.zeros((p, p), dtype=dtype)
    v = _random_vector(rng, N, dtype)
    if locked is not None:
        for _ in range(2):
            v -= (locked.conj() @ v) @ locked
    V[0] = v / np.linalg.norm(v)
    start = 0
    matvecs = restarts = breakdowns = 0
    beta = 0.0
    while True:
        for j in range(start, p):
            w = H @ V[j]
            matvecs += 1
            h = _orthogonalize(V[: j + 1], w, locked)
            T[: j + 1, j] = h
            beta = float(np.linalg.norm(w))
            if beta <= 1e-12 * anorm:
                if j + 1 == p:
                    V[p] = 0.0
                    beta = 0.0
                    break
                breakdowns += 1
                if breakdowns > 3:
                    raise SolverError("Lanczos breakdown persisted after 3 restarts")
                w = _random_vector(rng, N, dtype)
                _orthogonalize(V[: j + 1], w, locked)
                V[j + 1] = w / np.linalg.norm(w)
                beta = 0.0
                continue
            V[j + 1] = w / beta

        upper = np.triu(T)
        Tp = upper + np.triu(upper, 1).conj().T
        Tp[np.diag_indices(p)] = Tp.diagonal().real
        theta, S = np.linalg.eigh(Tp)
        est = np.abs(beta * S[p - 1, :])
        done = np.all(est[:m] <= threshold(theta[:m]))
        if done or matvecs >= budget or p == free:
            X = (S[:, :m].T @ V[:p]).T
            X /= np.linalg.norm(X, axis=0)
            R = H @ X - X * theta[:m]
            if locked is not None:
                R -= locked.T @ (locked.conj() @ R)
            res = np.linalg.norm(R, axis=0)
            if np.all(res <= threshold(theta[:m])) or matvecs >= budget or p == free:
                return _CoreResult(theta[:m].copy(), X, matvecs, restarts)
        keep = min(p - 1, m + max(1, (p - m) // 2))
        Y = S[:, :keep].T @ V[:p]
        last = V[p].copy()
        V[:] = 0.0
        V[:keep] = Y
        V[keep] = last
        T[:] = 0.0
        T[np.arange(keep), np.arange(keep)] = theta[:keep]
        start = keep
        restarts += 1


def lanczos_lowest(op, cfg: SolverConfig | None = None) -> Spectrum:
    """Lowest ``cfg.count`` eigenpairs by thick-restart Lanczos.

    Each step orthogonalizes against the whole basis twice, so the projected
    matrix is the exact Rayleigh quotient V^H H V. At a restart the lowest
    Ritz vectors are kept together with the last Lanczos vector. A pair is
    converged when its residual is at most ``tolerance * max(1, |lambda|)``,
    floored at ``64 eps ||H||`` (the attainable level in double precision).

    A single Krylov sequence holds only one copy of a degenerate eigenvalue,
    so after convergence the iteration is rerun in the orthogonal complement
    of the accepted vectors. Anything found there below the current m-th
    value is merged in, and the check repeats until nothing is.
    """
    cfg = cfg or SolverConfig()
    H = _matrix(op)
    N = H.shape[0]
    m = cfg.count
    if m > N:
        raise ValueError(f"requested {m} eigenvalues of a {N}-dimensional operator")
    dtype = np.complex128 if np.iscomplexobj(H.data if sp.issparse(H) else H) else np.float64
    anorm = _gershgorin(H)
    floor = 64 * _EPS * anorm

    def threshold(theta):
        return np.maximum(cfg.tolerance * np.maximum(1.0, np.abs(theta)), floor)

    rng = np.random.default_rng(cfg.seed)
    core = _lanczos_core(H, m, cfg, rng, dtype, threshold, anorm, None, cfg.max_iterations)
    theta, X = core.theta, core.vectors
    matvecs, restarts, checks = core.matvecs, core.restarts, 0
    while matvecs < cfg.max_iterations and N - X.shape[1] >= 1:
        extra_count = min(2, N - X.shape[1])
        extra = _lanczos_core(H, extra_count, cfg, rng, dtype, threshold, anorm,
                              np.ascontiguousarray(X.T), cfg.max_iterations - matvecs)
        matvecs += extra.matvecs
        restarts += extra.restarts
        checks += 1
        new = extra.theta < theta[-1] - threshold(theta[-1])
        if not np.any(new):
            break
        theta = np.concatenate([theta, extra.theta[new]])
        X = np.concatenate([X, extra.vectors[:, new]], axis=1)
        order = np.argsort(theta, kind="stable")[:m]
        theta, X = theta[order], X[:, order]
    res = residual_norms(H, theta, X)
    converged = res <= threshold(theta)
    return Spectrum(
        eigenvalues=theta.copy(), residual_norms=res, cluster_ids=cluster_ids(theta),
        converged=converged,
        metadata={"method": "lanczos", "iterations": matvecs, "restarts": restarts,
                  "deflation_checks": checks, "seed": cfg.seed, "tolerance": cfg.tolerance,
                  "residual_floor": float(floor), "converged": bool(converged.all())},
        eigenvectors=X)


def count_below(op, shift: float) -> int:
    """Number of eigenvalues below ``shift`` from the inertia of an LDL* factorization."""
    H = _matrix(op)
    M = H.toarray() if sp.issparse(H) else np.asarray(H)
    M = M - shift * np.eye(M.shape[0])
    _, D, _ = sla.ldl(M, hermitian=True)
    count = 0
    i = 0
    n = D.shape[0]
    while i < n:
        if i + 1 < n and D[i + 1, i] != 0:
            count += int(np.sum(np.linalg.eigvalsh(D[i:i + 2, i:i + 2]) < 0))
            i += 2
        else:
            count += int(D[i, i].real < 0)
            i += 1
    return count


def solve(op, cfg: SolverConfig | None = None, method: str = "auto") -> Spectrum:
    """Dispatch to dense or Lanczos; ``auto`` uses dense only for tiny problems."""
    cfg = cfg or SolverConfig()
    if method == "dense" or (method == "auto" and _matrix(op).shape[0] <= 400):
        full = dense_eigs(op)
        m = min(cfg.count, len(full))
        return Spectrum(full.eigenvalues[:m], full.residual_norms[:m],
                        cluster_ids(full.eigenvalues[:m]), full.converged[:m],
                        {**full.metadata, "seed": cfg.seed, "tolerance": cfg.tolerance},
                        full.eigenvectors[:, :m])
    return lanczos_lowest(op, cfg)
