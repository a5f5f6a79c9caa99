"""Dense Kronecker / vectorization algebra and SVD-based rank machinery.

All rank decisions in the package go through :func:`numerical_rank` (or the
pseudoinverses built on the same rule): a singular value counts as nonzero iff
``sigma > tol * sigma_max``.  The default ``tol`` grows with matrix size, see
:func:`default_rank_tol`.  Everything here is generic over real and complex
scalars.
"""

from __future__ import annotations

import numpy as np

#: Size coefficient of the default relative rank threshold.
DEFAULT_TOL_COEFF = 1e-9


def default_rank_tol(shape):
    """Default relative singular-value threshold for a matrix of this shape."""
    return DEFAULT_TOL_COEFF * max(shape)


def _resolve_tol(a, tol):
    return default_rank_tol(a.shape) if tol is None else float(tol)


def kron(a, b):
    """Kronecker product: block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(np.asarray(a), np.asarray(b))


def vec(a):
    """Stack the columns of ``a`` into a single vector (column-major)."""
    a = np.asarray(a)
    if a.ndim == 1:
        return a.copy()
    return a.ravel(order="F")


def invvec(v, m, n):
    """Inverse of :func:`vec`: reshape a length ``m*n`` vector to ``m`` x ``n``.

    Raises
    ------
    ValueError
        If ``v`` does not have exactly ``m*n`` entries.
    """
    v = np.asarray(v).ravel()
    if v.size != m * n:
        raise ValueError(f"cannot reshape {v.size} entries into a {m}x{n} matrix")
    return v.reshape((m, n), order="F")


def numerical_rank(a, tol=None):
    """Number of singular values above ``tol * sigma_max``."""
    a = np.atleast_2d(np.asarray(a))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    smax = s[0]
    if smax == 0.0:
        return 0
    return int(np.count_nonzero(s > _resolve_tol(a, tol) * smax))


def null_space_basis(a, tol=None):
    """Orthonormal basis of the null space of ``a``.

    Returns an array with ``a.shape[1] - rank(a)`` orthonormal columns,
    computed from the right singular vectors below the rank threshold.
    """
    a = np.atleast_2d(np.asarray(a))
    _, s, vh = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > _resolve_tol(a, tol) * smax))
    return vh[r:].conj().T


def lifted_null_basis(k_basis, k):
    """Lift a null-space basis ``K`` of ``A`` to one of ``A (x) I_k``.

    Given ``K`` with independent columns spanning ``Null(A)``, the columns of
    ``K (x) I_k`` span ``Null(A (x) I_k)``.
    """
    k_basis = np.atleast_2d(np.asarray(k_basis))
    return np.kron(k_basis, np.eye(k))


def pinv(a, tol=None):
    """Moore-Penrose pseudoinverse with the shared rank threshold."""
    a = np.asarray(a)
    return np.linalg.pinv(a, rcond=_resolve_tol(a, tol))


def orthonormal_columns(a, tol=None):
    """Orthonormal basis of the column space of ``a`` (left singular vectors)."""
    a = np.atleast_2d(np.asarray(a))
    if a.shape[1] == 0:
        return a.copy()
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return u[:, :0]
    r = int(np.count_nonzero(s > _resolve_tol(a, tol) * smax))
    return u[:, :r]


def projector(basis, tol=None):
    """Orthogonal projector onto the column space of ``basis``.

    An empty basis (zero columns) yields the zero projector, so subspaces can
    be compared through their projectors regardless of dimension.
    """
    basis = np.atleast_2d(np.asarray(basis))
    m = basis.shape[0]
    if basis.shape[1] == 0:
        return np.zeros((m, m))
    q = orthonormal_columns(basis, tol)
    return q @ q.conj().T
