"""Small dense kernels: Cholesky least squares and Jacobi eigenvalues."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import LengthMismatch, NotSymmetric, SingularGram

PIVOT_RATIO = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60


def _check_pivots(pivots):
    pivots = np.asarray(pivots)
    if pivots.size and (not np.all(np.isfinite(pivots))
                        or pivots.min() < PIVOT_RATIO * pivots.max()):
        raise SingularGram()


def cholesky_gram(gram):
    """Lower Cholesky factor of a Gram matrix with a pivot-ratio guard."""
    gram = np.asarray(gram, dtype=float)
    try:
        low = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise SingularGram() from None
    _check_pivots(np.diag(low) ** 2)
    return low


def solve_gram(gram, rhs):
    low = cholesky_gram(gram)
    z = solve_triangular(low, rhs, lower=True, check_finite=False)
    return solve_triangular(low.T, z, lower=False, check_finite=False)


def ols_solve(cols, y):
    """Least-squares coefficients of ``y`` on the columns of ``cols``.

    Solves the normal equations ``E_n[x x'] b = E_n[x y]`` by Cholesky.
    Raises :class:`SingularGram` when the smallest squared pivot falls below
    ``1e-12`` times the largest.
    """
    cols = np.asarray(cols, dtype=float)
    if cols.ndim == 1:
        cols = cols[:, None]
    y = np.asarray(y, dtype=float)
    n, k = cols.shape
    if y.shape[0] != n:
        raise LengthMismatch(f"y has length {y.shape[0]}, expected {n}")
    if k == 0:
        return np.zeros(0)
    if k > n:
        raise SingularGram(f"{k} columns but only {n} rows")
    return solve_gram(cols.T @ cols / n, cols.T @ y / n)


class GrowingCholesky:
    """Cholesky factor of ``G[S, S]`` for an index set ``S`` that only grows.

    Appending an index costs one triangular solve instead of a fresh
    factorization.  The pivot-ratio guard of :func:`cholesky_gram` applies to
    every appended pivot.
    """

    def __init__(self, gram):
        self.gram = gram
        self.index = []
        self._low = np.zeros((8, 8))
        self._pivots = []

    def __len__(self):
        return len(self.index)

    def append(self, j):
        k = len(self.index)
        if k == self._low.shape[0]:
            grown = np.zeros((2 * k, 2 * k))
            grown[:k, :k] = self._low
            self._low = grown
        g = self.gram[self.index, j] if k else np.zeros(0)
        row = solve_triangular(self._low[:k, :k], g, lower=True, check_finite=False) if k else g
        pivot = self.gram[j, j] - row @ row
        scale = max(self._pivots + [self.gram[j, j]])
        if not np.isfinite(pivot) or pivot < PIVOT_RATIO * scale:
            raise SingularGram(columns=self.index + [j])
        self._low[k, :k] = row
        self._low[k, k] = np.sqrt(pivot)
        self._pivots.append(pivot)
        self.index.append(j)

    def solve(self, rhs):
        k = len(self.index)
        low = self._low[:k, :k]
        z = solve_triangular(low, rhs, lower=True, check_finite=False)
        return solve_triangular(low.T, z, lower=False, check_finite=False)


def _round_robin(k):
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = k + (k % 2)
    ring = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(ring[i], ring[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < k and b < k]
        rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        ring = [ring[0], ring[-1]] + ring[1:-1]
    return rounds


def jacobi_eigenvalues(stack, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigenvalues of a batch of symmetric matrices by cyclic Jacobi rotations.

    ``stack`` has shape ``(batch, k, k)``.  Each sweep visits every ``(p, q)``
    pair once in round-robin order; the pairs of one round are disjoint, so
    their rotations are applied together as one orthogonal similarity.
    Iterates until every off-diagonal Frobenius norm is below
    ``tol * max(1, ||A||_F)``.  Returns an array ``(batch, k)`` of eigenvalues
    in ascending order.
    """
    a = np.array(stack, dtype=float, copy=True)
    if a.ndim == 2:
        a = a[None]
    batch, k, _ = a.shape
    if k == 1:
        return a[:, 0, :].copy()
    limit = tol * np.maximum(1.0, np.sqrt(np.sum(a * a, axis=(1, 2))))
    offmask = ~np.eye(k, dtype=bool)
    rounds = _round_robin(k)
    eye = np.eye(k)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a[:, offmask] ** 2, axis=1))
        if np.all(off <= limit):
            break
        for p, q in rounds:
            apq = a[:, p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            safe = np.where(active, apq, 1.0)
            theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = np.where(active, 1.0 / np.sqrt(1.0 + t * t), 1.0)
            s = np.where(active, t, 0.0) * c
            rot = np.broadcast_to(eye, (batch, k, k)).copy()
            rot[:, p, p] = c
            rot[:, q, q] = c
            rot[:, p, q] = s
            rot[:, q, p] = -s
            a = np.swapaxes(rot, 1, 2) @ a @ rot
    return np.sort(np.diagonal(a, axis1=1, axis2=2), axis=1)


def sym_eigen_range(m):
    """Smallest and largest eigenvalue of a symmetric matrix."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise NotSymmetric(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-10:
        raise NotSymmetric("matrix is not symmetric within 1e-10")
    ev = jacobi_eigenvalues(m)[0]
    return float(ev[0]), float(ev[-1])
