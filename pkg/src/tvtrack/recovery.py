"""Recovery of the coordinate transform from moving-probe data.

The moving-probe measurements satisfy ``y(t) = (zbar(t)^T (x) C(t)) vec(P)``
where ``P`` maps transformed states back to original parameter coordinates.
Stacking these rows gives a Kronecker-structured linear system; its
least-squares solution pins down ``P`` and, when the realization has full
order, the dynamics in original coordinates.  Two rank certificates decide
solvability: a necessary stacked-output condition and a necessary-and-
sufficient condition on an eigenvalue-weighted stack of the output matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    CertificateUnavailableError,
    SingularTransformError,
    UnderdeterminedTransformError,
)
from .linalg import default_rank_tol, invvec, numerical_rank, pinv
from .subspace import realize


@dataclass(frozen=True)
class IdentificationResult:
    """Everything the moving-probe stage recovers.

    ``P`` is the back-transform (p x r); ``T`` (its inverse) and ``A_hat``
    (the dynamics in original coordinates) exist only when the realization
    order equals the parameter dimension.  ``residual`` is the least-squares
    residual of the transform system; ``rank_M`` its numerical rank.
    """

    Abar: np.ndarray
    P: np.ndarray
    T: np.ndarray | None
    A_hat: np.ndarray | None
    Zbar0: np.ndarray
    ref_index: int
    rank_r: int
    rank_M: int
    residual: float

    @property
    def p(self):
        return self.P.shape[0]

    @property
    def zbar_ref(self):
        return self.Zbar0[:, -1]

    @property
    def underdetermined(self):
        return self.rank_M < self.p * self.rank_r


@dataclass(frozen=True)
class WCertificate:
    """Solvability certificate built from the realization's eigenstructure.

    ``W`` stacks ``F(t) Lambda^k`` where ``F(t)`` repeats the output matrix
    across eigencoordinates and ``Lambda`` carries the eigenvalues; the
    transform system is solvable iff ``W`` has full column rank.
    """

    W: np.ndarray
    Lambda: np.ndarray
    F_blocks: list = field(repr=False)
    full_rank: bool
    min_singular_value: float


def propagate_zbar(abar, zbar_ref, ref_index, t_from, t_to):
    """Transformed states ``zbar(t)`` for ``t = t_from .. t_to``.

    ``zbar_ref`` is the state at time ``ref_index``; propagation is by
    iterated multiplication with ``abar``.
    """
    if t_from < ref_index:
        raise ValueError(f"t_from={t_from} precedes the reference index {ref_index}")
    if t_to < t_from:
        raise ValueError(f"empty range [{t_from}, {t_to}]")
    abar = np.asarray(abar)
    v = np.asarray(zbar_ref).copy()
    for _ in range(t_from - ref_index):
        v = abar @ v
    out = np.empty((t_to - t_from + 1, v.size))
    for k in range(t_to - t_from + 1):
        out[k] = v
        v = abar @ v
    return out


def build_M(zbars, Cs, ys):
    """Assemble the transform system ``M vec(P) = Yv``.

    Row block ``t`` is ``kron(zbar(t)^T, C(t))``; ``Yv`` stacks the
    measurements in the same order.
    """
    if not (len(zbars) == len(Cs) == len(ys)) or len(zbars) == 0:
        raise ValueError("zbars, Cs and ys must be equally long and nonempty")
    blocks = []
    for zb, C in zip(zbars, Cs):
        zb = np.asarray(zb)
        C = np.atleast_2d(np.asarray(C))
        blocks.append(np.kron(zb, C))
    M = np.vstack(blocks)
    Yv = np.concatenate([np.atleast_1d(np.asarray(y, dtype=float)) for y in ys])
    if Yv.size != M.shape[0]:
        raise ValueError("measurement rows do not match the assembled system")
    return M, Yv


@dataclass(frozen=True)
class TransformSolution:
    """Fragment produced by :func:`solve_transform`."""

    P: np.ndarray
    T: np.ndarray | None
    A_hat: np.ndarray | None
    residual: float
    rank_M: int


def solve_transform(M, Yv, p, r, abar=None, tol=None):
    """Minimum-norm least-squares solve of the transform system.

    When ``r == p`` the system must have full column rank and the recovered
    ``P`` must be invertible; then ``T = P^-1`` and the original-coordinate
    dynamics ``A_hat = P Abar P^-1`` are also returned.  For ``r < p`` the
    system may be underdetermined; prediction through ``P`` remains usable
    and the rank is reported to the caller.
    """
    M = np.asarray(M, dtype=float)
    Yv = np.asarray(Yv, dtype=float).ravel()
    if M.shape[1] != p * r:
        raise ValueError(f"M has {M.shape[1]} columns, expected p*r = {p * r}")
    rank_m = numerical_rank(M, tol)
    deficit = p * r - rank_m
    if deficit > 0 and r == p:
        raise UnderdeterminedTransformError(
            f"transform system is rank deficient by {deficit} "
            f"(rank {rank_m} of {p * r})",
            deficit=deficit,
        )
    vec_p = pinv(M, tol) @ Yv
    P = invvec(vec_p, p, r)
    residual = float(np.linalg.norm(M @ vec_p - Yv))

    T = None
    a_hat = None
    if r == p:
        s = np.linalg.svd(P, compute_uv=False)
        rel = default_rank_tol(P.shape) if tol is None else tol
        if s[-1] <= rel * s[0]:
            raise SingularTransformError("recovered back-transform is numerically singular")
        T = np.linalg.inv(P)
        if abar is not None:
            a_hat = P @ np.asarray(abar) @ T
    return TransformSolution(P=P, T=T, A_hat=a_hat, residual=residual, rank_M=rank_m)


def check_necessary(Cs, tol=None):
    """Necessary solvability condition: the stacked output matrices have full column rank."""
    if len(Cs) == 0:
        raise ValueError("need at least one output matrix")
    stacked = np.vstack([np.atleast_2d(np.asarray(C)) for C in Cs])
    return numerical_rank(stacked, tol) == stacked.shape[1]


def check_sufficient_W(abar, Cs, p, tol=None):
    """Necessary-and-sufficient certificate for full column rank of the transform system.

    Requires a diagonalizable ``abar``; the eigendecomposition may be complex,
    and the verdict comes from a complex SVD with the same threshold used for
    the transform system itself.
    """
    abar = np.atleast_2d(np.asarray(abar))
    eigvals, eigvecs = np.linalg.eig(abar)
    sv_u = np.linalg.svd(eigvecs, compute_uv=False)
    if sv_u[-1] <= 1e-12 * sv_u[0]:
        raise CertificateUnavailableError(
            "realization matrix is defective; eigenbasis is numerically singular"
        )
    r = abar.shape[0]
    lam_diag = np.kron(eigvals, np.ones(p))
    ones_r = np.ones(r)
    f_blocks = [np.kron(ones_r, np.atleast_2d(np.asarray(C))) for C in Cs]
    weights = np.ones(r * p, dtype=complex)
    rows = []
    for F in f_blocks:
        rows.append(F * weights)
        weights = weights * lam_diag
    W = np.vstack(rows)

    s = np.linalg.svd(W, compute_uv=False)
    rel = default_rank_tol(W.shape) if tol is None else tol
    cols = W.shape[1]
    rank_w = int(np.count_nonzero(s > rel * s[0])) if s[0] > 0 else 0
    min_sv = float(s[cols - 1]) if W.shape[0] >= cols else 0.0
    return WCertificate(
        W=W,
        Lambda=np.diag(lam_diag),
        F_blocks=f_blocks,
        full_rank=rank_w == cols,
        min_singular_value=min_sv,
    )


def predict_parameters(result, t):
    """Predicted parameter vector at time ``t >= 0``.

    For ``t`` within the constant-probe window the stored state sequence is
    used directly; later states are propagated from the reference state.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t <= result.ref_index:
        zbar = result.Zbar0[:, t]
    else:
        zbar = result.zbar_ref.copy()
        for _ in range(t - result.ref_index):
            zbar = result.Abar @ zbar
    return result.P @ zbar


def predict_parameter_trajectory(result, t_end):
    """Predicted parameters for ``t = 0 .. t_end`` as a ``(t_end+1, p)`` array."""
    out = np.empty((t_end + 1, result.p))
    upto = min(result.ref_index, t_end)
    for t in range(upto + 1):
        out[t] = result.P @ result.Zbar0[:, t]
    zbar = result.zbar_ref.copy()
    for t in range(result.ref_index + 1, t_end + 1):
        zbar = result.Abar @ zbar
        out[t] = result.P @ zbar
    return out


def identify_from_dataset(dataset, model, q=None, tol=None):
    """End-to-end identification from a collected dataset.

    Runs the constant-probe realization, propagates the transformed states
    over the moving window, and solves the transform system.
    """
    _, real = realize(dataset.Y0, model.n, q=q, tol=tol)
    zbars = propagate_zbar(real.Abar, real.zbar_ref, real.ref_index,
                           dataset.N0 + 1, dataset.N)
    Cs = [model.gradient_matrix(x) for x in dataset.X1]
    M, Yv = build_M(zbars, Cs, list(dataset.Y1))
    sol = solve_transform(M, Yv, model.p, real.r, abar=real.Abar, tol=tol)
    return IdentificationResult(
        Abar=real.Abar,
        P=sol.P,
        T=sol.T,
        A_hat=sol.A_hat,
        Zbar0=real.Zbar0,
        ref_index=real.ref_index,
        rank_r=real.r,
        rank_M=sol.rank_M,
        residual=sol.residual,
    )
