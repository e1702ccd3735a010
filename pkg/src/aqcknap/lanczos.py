"""Thick-restart Lanczos with full reorthogonalization and explicit locking.

Only a matrix-vector product is needed. Converged eigenvectors are locked
and every new Krylov vector is orthogonalized against them, so repeated
runs from fresh random vectors pick up additional copies of degenerate
eigenvalues that a single Krylov space cannot see.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SpectralError

_EPS = np.finfo(float).eps
# never accept a residual above this on the strength of the quadratic bound alone
_SQRT_TOL_CAP = 1e-5


@dataclass
class LanczosResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    matvecs: int
    restarts: int
    residuals: np.ndarray


def _orthogonalize(w, blocks):
    # classical Gram-Schmidt applied twice; blocks hold vectors as rows
    for _ in range(2):
        for Q in blocks:
            if len(Q):
                w -= (Q @ w) @ Q
    return w


class _Counter:
    def __init__(self, matvec):
        self.matvec = matvec
        self.count = 0

    def __call__(self, v):
        self.count += 1
        return self.matvec(v)


def _random_start(rng, dim, blocks):
    for _ in range(5):
        v = rng.standard_normal(dim)
        v = _orthogonalize(v, blocks)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            return v / nv
    raise SpectralError("NO_CONVERGENCE", "could not draw a start vector outside the locked space")


def _lowest_in_complement(op, dim, locked, rng, *, nwant, basis, tol, max_restarts, v0=None):
    """Run thick-restart Lanczos on ``op`` restricted to the complement of ``locked``.

    Returns the Ritz values/vectors that converged contiguously from the
    bottom of the spectrum (at least one), the residuals and the restart count.
    """
    m = min(basis, dim - len(locked))
    if m <= 0:
        raise SpectralError("NO_CONVERGENCE", "no room left outside the locked space")
    V = np.zeros((m + 1, dim))
    H = np.zeros((m, m))
    V[0] = v0 if v0 is not None else _random_start(rng, dim, [locked])
    start = 0
    keep = min(max(nwant + 2, m // 2), m - 1)
    normest = 0.0
    last_res = np.inf
    for restart in range(max_restarts + 1):
        beta = 0.0
        j_end = m
        for j in range(start, m):
            w = op(V[j])
            Vj = V[: j + 1]
            h = np.zeros(j + 1)
            # project out the locked space last: done first, the basis
            # subtraction would reintroduce locked components that 1/beta
            # then amplifies step after step
            for _ in range(2):
                c = Vj @ w
                w -= c @ Vj
                h += c
                if len(locked):
                    w -= (locked @ w) @ locked
            H[: j + 1, j] = h
            H[j, : j + 1] = h
            beta = np.linalg.norm(w)
            normest = max(normest, abs(h[j]) + beta)
            if j + 1 < m:
                H[j + 1, j] = H[j, j + 1] = beta
            if beta <= 1e3 * _EPS * max(normest, 1.0):
                # invariant subspace; Ritz values in span are exact
                j_end = j + 1
                beta = 0.0
                break
            V[j + 1] = w / beta

        theta, Y = np.linalg.eigh(H[:j_end, :j_end])
        res = np.abs(beta * Y[j_end - 1, :])
        thresh = max(tol, 64 * _EPS * normest)
        # Ritz-value error is about res^2 / (distance to the rest of the spectrum)
        sep = np.abs(theta[:, None] - theta[None, :])
        np.fill_diagonal(sep, np.inf)
        sep = sep.min(axis=1) if j_end > 1 else np.full(1, np.inf)
        ok = (res <= thresh) | ((res * res <= tol * sep) & (res <= _SQRT_TOL_CAP))
        nconv = 0
        while nconv < min(nwant, j_end) and ok[nconv]:
            nconv += 1
        last_res = res[0]
        if nconv >= 1 and (nconv >= nwant or restart == max_restarts or j_end < m):
            X = Y[:, :nconv].T @ V[:j_end]
            return theta[:nconv], X, res[:nconv], restart

        # thick restart: keep the lowest Ritz vectors plus the residual direction
        k = min(keep, j_end - 1)
        Vk = Y[:, :k].T @ V[:j_end]
        V[:k] = Vk
        V[k] = V[j_end]
        V[k + 1 :] = 0.0
        H[:] = 0.0
        H[np.arange(k), np.arange(k)] = theta[:k]
        H[k, :k] = H[:k, k] = beta * Y[j_end - 1, :k]
        start = k
    raise SpectralError(
        "NO_CONVERGENCE",
        f"residual {last_res:.3g} after {max_restarts} restarts",
        iterations=max_restarts,
        residual=float(last_res),
    )


def lanczos_lowest(
    matvec: Callable[[np.ndarray], np.ndarray],
    dim: int,
    k: int = 4,
    *,
    tol: float = 1e-10,
    basis: int = 60,
    max_restarts: int = 500,
    seed: int = 0,
    verify: bool = True,
) -> LanczosResult:
    """Lowest ``k`` eigenpairs of a real symmetric operator.

    A Ritz pair is accepted when its residual ``r = ||A x - theta x||`` is
    below ``tol`` (raised to ``64 eps ||A||`` if that is larger), or when
    ``r^2 / sep <= tol`` with ``sep`` the distance to the nearest other Ritz
    value, the usual second-order estimate of the eigenvalue error.

    The search ends when a run in the complement of all locked vectors
    cannot find anything below the k-th locked eigenvalue. ``verify=False``
    skips that run: the result is then the lowest k *Ritz* values of one
    Krylov space, which can miss copies of a degenerate eigenvalue.
    """
    k = min(k, dim)
    rng = np.random.default_rng(seed)
    op = _Counter(matvec)
    vals: list[float] = []
    vecs = np.zeros((0, dim))
    resids: list[float] = []
    restarts = 0
    while True:
        if len(vecs) >= dim:
            break
        nwant = max(1, k - len(vals))
        theta, X, res, r = _lowest_in_complement(
            op, dim, vecs, rng, nwant=nwant, basis=basis, tol=tol, max_restarts=max_restarts
        )
        restarts += r
        if len(vals) >= k:
            kth = sorted(vals)[k - 1]
            if theta[0] >= kth - max(tol, 1e-12 * abs(kth)):
                break
            # something below the k-th value was missed; lock only that one
            theta, X, res = theta[:1], X[:1], res[:1]
        vals.extend(theta.tolist())
        resids.extend(res.tolist())
        # re-orthonormalize the new block against locked vectors before appending
        X = np.array([_orthogonalize(x.copy(), [vecs]) for x in X])
        X = np.linalg.qr(X.T)[0].T
        vecs = np.vstack([vecs, X])
        if len(vals) >= k and (not verify or len(vecs) >= dim):
            break
    order = np.argsort(vals, kind="stable")[:k]
    return LanczosResult(
        np.asarray(vals)[order],
        vecs[order].T,
        op.count,
        restarts,
        np.asarray(resids)[order],
    )
