"""Subspace identification from constant-probe data.

Arranges the measurements in a block Hankel matrix, factors it by SVD, and
reads the dynamics (up to an unknown similarity) off the shift structure of
the estimated observability matrix.  The transformed initial-state sequence
comes from projecting the Hankel matrix onto that basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NotIdentifiableError
from .linalg import default_rank_tol, numerical_rank, pinv


@dataclass(frozen=True)
class HankelFactorization:
    """Rank-revealing factorization ``Yh ~ Obar @ (states)``.

    ``Obar`` holds the leading left singular vectors (an orthonormal estimate
    of the observability matrix in transformed coordinates), ``r`` the
    numerical rank.
    """

    Yh: np.ndarray
    r: int
    Obar: np.ndarray
    singular_values: np.ndarray
    n: int

    @property
    def q(self):
        """Block depth (and column count) of the Hankel matrix."""
        return self.Yh.shape[1]


@dataclass(frozen=True)
class SimilarRealization:
    """Dynamics estimate ``Abar`` plus the transformed state sequence.

    ``Zbar0[:, j]`` is the transformed state at time ``j`` for
    ``j = 0 .. q-1``; its last column is the reference state used to
    propagate forward.
    """

    Abar: np.ndarray
    Zbar0: np.ndarray
    q: int

    @property
    def r(self):
        return self.Abar.shape[0]

    @property
    def ref_index(self):
        return self.q - 1

    @property
    def zbar_ref(self):
        return self.Zbar0[:, -1]


def default_depth(n_constant_samples):
    """Largest block depth with a square block-Hankel: ``floor((L+1)/2)``."""
    return (n_constant_samples + 1) // 2


def build_hankel(Y0, n, q):
    """Block Hankel matrix ``Yh`` with block ``(i, j)`` equal to ``y(i+j)``.

    ``Y0`` holds at least ``2q - 1`` measurements in R^n (rows); the result is
    ``n*q`` by ``q``.
    """
    Y0 = np.atleast_2d(np.asarray(Y0, dtype=float))
    if Y0.shape[1] != n:
        raise ValueError(f"measurements have dimension {Y0.shape[1]}, expected {n}")
    if q < 1:
        raise ValueError("block depth q must be positive")
    if len(Y0) < 2 * q - 1:
        raise ValueError(f"need at least {2 * q - 1} samples for depth {q}, got {len(Y0)}")
    Yh = np.empty((n * q, q))
    for i in range(q):
        Yh[i * n:(i + 1) * n, :] = Y0[i:i + q].T
    return Yh


def factorize(Yh, n, tol=None):
    """SVD-factor a Hankel matrix and truncate at the numerical rank."""
    Yh = np.asarray(Yh, dtype=float)
    u, s, _ = np.linalg.svd(Yh, full_matrices=False)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        raise NotIdentifiableError("Hankel matrix is zero; nothing identifiable")
    rel = default_rank_tol(Yh.shape) if tol is None else tol
    r = int(np.count_nonzero(s > rel * smax))
    return HankelFactorization(Yh=Yh, r=r, Obar=u[:, :r], singular_values=s, n=n)


def shift_estimate(fact, tol=None):
    """Dynamics estimate from the shift structure of the observability basis.

    Solves ``Obar_1 @ Abar = Obar_2`` in the least-squares sense, where
    ``Obar_1`` drops the last block row and ``Obar_2`` the first.  The
    eigenvalues of the result equal the identifiable eigenvalues of the true
    dynamics (similarity invariance).
    """
    n = fact.n
    if fact.q < 2:
        raise NotIdentifiableError("need at least two block rows to exploit the shift structure")
    o1 = fact.Obar[:-n, :]
    o2 = fact.Obar[n:, :]
    if numerical_rank(o1, tol) < fact.r:
        raise NotIdentifiableError(
            "truncated observability matrix loses rank after dropping a block row"
        )
    return pinv(o1, tol) @ o2


def initial_states(fact, tol=None):
    """Transformed state sequence: pseudoinverse of the basis applied to ``Yh``."""
    return pinv(fact.Obar, tol) @ fact.Yh


def realize(Y0, n, q=None, tol=None):
    """Full constant-probe identification step.

    Returns the factorization and the similar realization; ``q`` defaults to
    the largest depth the data supports.
    """
    Y0 = np.atleast_2d(np.asarray(Y0, dtype=float))
    if q is None:
        q = default_depth(len(Y0))
    Yh = build_hankel(Y0, n, q)
    fact = factorize(Yh, n, tol)
    abar = shift_estimate(fact, tol)
    zbar0 = initial_states(fact, tol)
    return fact, SimilarRealization(Abar=abar, Zbar0=zbar0, q=q)
