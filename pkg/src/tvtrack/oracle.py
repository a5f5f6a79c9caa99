"""Simulated gradient oracle: parameter dynamics, probing schedules, datasets.

The hidden parameters follow ``z(t+1) = A z(t)``; the oracle serves exact
gradient measurements ``y(t) = C(x(t)) z(t)`` at caller-chosen probe points.
A dataset consists of a constant-probe prefix (time-invariant output matrix,
which makes standard subspace identification applicable) followed by a
moving-probe phase that excites the output matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .costs import CostModel
from .linalg import numerical_rank

_CSV_FMT = "%.17g"


@dataclass(frozen=True)
class ParameterSystem:
    """Ground-truth dynamics matrix and initial parameter vector."""

    A: np.ndarray
    z0: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        z0 = np.asarray(self.z0, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if z0.shape != (A.shape[0],):
            raise ValueError(f"z0 has length {z0.size}, expected {A.shape[0]}")
        if not (np.isfinite(A).all() and np.isfinite(z0).all()):
            raise ValueError("A and z0 must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "z0", z0)

    @property
    def p(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class Dataset:
    """Probe points and gradient samples for ``t = 0 .. N``.

    The first ``N0 + 1`` probes are constant; ``X1``/``Y1`` hold the
    moving-probe remainder.
    """

    X: np.ndarray
    Y: np.ndarray
    N0: int
    N: int

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        if len(X) != len(Y) or len(X) != self.N + 1:
            raise ValueError("X and Y must both hold N+1 samples")
        if not (0 <= self.N0 < self.N):
            raise ValueError(f"need 0 <= N0 < N, got N0={self.N0}, N={self.N}")
        if not np.all(X[: self.N0 + 1] == X[0]):
            raise ValueError("probe points must be constant through t = N0")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def X0(self):
        return self.X[: self.N0 + 1]

    @property
    def Y0(self):
        return self.Y[: self.N0 + 1]

    @property
    def X1(self):
        return self.X[self.N0 + 1:]

    @property
    def Y1(self):
        return self.Y[self.N0 + 1:]

    def to_csv(self, path):
        """Write rows ``t, x_1..x_n, y_1..y_n, phase`` with full precision."""
        n = self.X.shape[1]
        header = ["t"] + [f"x_{i+1}" for i in range(n)] + [f"y_{i+1}" for i in range(n)] + ["phase"]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for t in range(self.N + 1):
                phase = "constant" if t <= self.N0 else "probe"
                vals = [str(t)]
                vals += [_CSV_FMT % v for v in self.X[t]]
                vals += [_CSV_FMT % v for v in self.Y[t]]
                vals.append(phase)
                fh.write(",".join(vals) + "\n")


@dataclass(frozen=True)
class ProbeSchedule:
    """How probe points are generated during data collection.

    ``rule`` selects the moving-phase update: ``"static_gd"`` steps against
    the measured gradient with step ``eta`` (the baseline update), ``"hold"``
    keeps the initial point, ``"random"`` samples uniformly from ``box``.
    """

    x0: np.ndarray
    N0: int
    N: int
    rule: str = "static_gd"
    eta: float = 1e-3
    box: tuple = (-1.0, 1.0)
    seed: int = 0

    _RULES = ("static_gd", "hold", "random")

    def __post_init__(self):
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))
        if self.N0 < 1 or self.N <= self.N0:
            raise ValueError(f"need N > N0 >= 1, got N0={self.N0}, N={self.N}")
        if self.rule not in self._RULES:
            raise ValueError(f"unknown probe rule {self.rule!r}")
        if self.rule == "static_gd" and self.eta <= 0:
            raise ValueError("eta must be positive")


@dataclass(frozen=True)
class AssumptionReport:
    """Boolean verdicts for the spectral and excitation conditions.

    ``a1``: distinct nonzero eigenvalues; ``a2``: the initial parameters
    excite every mode (Krylov rank); ``a3``: the constant-probe output matrix
    observes every mode (observability rank).
    """

    a1: bool
    a2: bool
    a3: bool
    eigenvalues: np.ndarray = field(repr=False)

    def as_dict(self):
        return {"a1": self.a1, "a2": self.a2, "a3": self.a3}


def parameter_at(sys, t):
    """Parameters at time ``t``: ``A`` applied ``t`` times to ``z0``.

    Iterated multiplication, for numerical parity with streamed collection.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    z = sys.z0.copy()
    for _ in range(int(t)):
        z = sys.A @ z
    return z


def parameter_trajectory(sys, t_end):
    """All parameter vectors for ``t = 0 .. t_end`` as a ``(t_end+1, p)`` array."""
    out = np.empty((t_end + 1, sys.p))
    z = sys.z0.copy()
    for t in range(t_end + 1):
        out[t] = z
        z = sys.A @ z
    return out


def query_gradient(sys, model, x, t):
    """Oracle response ``C(x) z(t)`` at probe point ``x`` and time ``t``."""
    if model.p != sys.p:
        raise ValueError(f"model has p={model.p} but system has p={sys.p}")
    return model.gradient_matrix(x) @ parameter_at(sys, t)


def collect_dataset(sys, model, schedule):
    """Run the oracle over a probe schedule and return the dataset.

    Probes stay at ``schedule.x0`` through ``t = N0``; afterwards the probe
    rule generates ``x(t)`` from the previous point and measurement.
    """
    if model.p != sys.p:
        raise ValueError(f"model has p={model.p} but system has p={sys.p}")
    x0 = schedule.x0
    if x0.shape != (model.n,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({model.n},)")
    rng = np.random.default_rng(schedule.seed)
    lo, hi = schedule.box

    X = np.empty((schedule.N + 1, model.n))
    Y = np.empty((schedule.N + 1, model.n))
    z = sys.z0.copy()
    x = x0.copy()
    for t in range(schedule.N + 1):
        X[t] = x
        Y[t] = model.gradient_matrix(x) @ z
        z = sys.A @ z
        if t + 1 <= schedule.N0:
            continue
        if schedule.rule == "static_gd":
            x = x - schedule.eta * Y[t]
        elif schedule.rule == "hold":
            x = x0.copy()
        else:
            x = rng.uniform(lo, hi, size=model.n)
    return Dataset(X=X, Y=Y, N0=schedule.N0, N=schedule.N)


def observability_matrix(A, C0, depth):
    """Stack ``C0, C0 A, ..., C0 A^(depth-1)``."""
    blocks = []
    block = np.asarray(C0, dtype=float)
    for _ in range(depth):
        blocks.append(block)
        block = block @ A
    return np.vstack(blocks)


def check_assumptions(sys, model, x0, eig_tol=1e-8, rank_tol=None):
    """Evaluate the identifiability conditions; returns booleans, never raises.

    Eigenvalue distinctness and nonzeroness are tested against
    ``eig_tol * max(1, spectral radius)``; the excitation and observability
    conditions use the shared numerical-rank threshold.
    """
    eigs = np.linalg.eigvals(sys.A)
    scale = max(1.0, float(np.abs(eigs).max()))
    gap = np.abs(eigs[:, None] - eigs[None, :])
    gap[np.diag_indices_from(gap)] = np.inf
    a1 = bool(np.abs(eigs).min() > eig_tol * scale and gap.min() > eig_tol * scale)

    p = sys.p
    krylov = np.empty((p, p))
    v = sys.z0.copy()
    for k in range(p):
        krylov[:, k] = v
        v = sys.A @ v
    a2 = numerical_rank(krylov, rank_tol) == p

    obs = observability_matrix(sys.A, model.gradient_matrix(x0), p)
    a3 = numerical_rank(obs, rank_tol) == p
    return AssumptionReport(a1=a1, a2=a2, a3=a3, eigenvalues=np.sort_complex(eigs))
