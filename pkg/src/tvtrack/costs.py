"""Cost models of the form ``f(x, z) = g(x) . z`` with analytic gradient matrices.

Each model bundles a feature map ``g`` and the map ``C(x)`` whose rows are the
transposed Jacobian of ``g``, so that the gradient of the cost in ``x`` is the
linear function ``C(x) z`` of the parameter vector.  Feature ordering is fixed
per model and is the wire contract for ``z`` vectors in configuration files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ConfigError


@dataclass(frozen=True)
class CostModel:
    """A parametric cost ``f(x, z) = features(x) . z``.

    ``features`` maps an ``n``-vector to a ``p``-vector; ``grad_matrix`` maps
    the same point to the ``n x p`` matrix ``C(x)`` with ``grad_x f = C(x) z``.
    Instances are immutable and safe to share across threads.
    """

    label: str
    n: int
    p: int
    features: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    grad_matrix: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def _check_x(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.n,):
            raise ValueError(f"{self.label}: expected x of length {self.n}, got shape {x.shape}")
        return x

    def _check_z(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.p,):
            raise ValueError(f"{self.label}: expected z of length {self.p}, got shape {z.shape}")
        return z

    def evaluate(self, x, z):
        """Cost value ``features(x) . z``."""
        return float(self.features(self._check_x(x)) @ self._check_z(z))

    def gradient_matrix(self, x):
        """The matrix ``C(x)`` such that ``grad_x f(x, z) = C(x) z``."""
        return self.grad_matrix(self._check_x(x))

    def gradient(self, x, z):
        """Gradient of the cost in ``x`` at parameters ``z``."""
        return self.gradient_matrix(x) @ self._check_z(z)


def make_quadratic_model():
    """Bivariate quadratic cost, features ``(x1, x2, x1^2, 2 x1 x2, x2^2)``.

    The parameter vector is ``(b1, b2, h11, h12, h22)``: linear coefficients
    followed by the upper triangle of the symmetric quadratic-form matrix.
    """

    def features(x):
        x1, x2 = x
        return np.array([x1, x2, x1 * x1, 2.0 * x1 * x2, x2 * x2])

    def grad_matrix(x):
        x1, x2 = x
        return np.array([
            [1.0, 0.0, 2.0 * x1, 2.0 * x2, 0.0],
            [0.0, 1.0, 0.0, 2.0 * x1, 2.0 * x2],
        ])

    return CostModel("quadratic", 2, 5, features, grad_matrix)


def make_polynomial_model():
    """Third-order polynomial cost on R^2 with Kronecker-power features.

    Features are the stacked Kronecker powers ``x``, ``x (x) x`` and
    ``x (x) x (x) x`` (blocks of size 2, 4 and 8, p = 14).  The gradient
    blocks follow from the product rule on each power.
    """
    eye2 = np.eye(2)

    def features(x):
        xx = np.kron(x, x)
        return np.concatenate([x, xx, np.kron(xx, x)])

    def grad_matrix(x):
        p2 = np.kron(x, eye2) + np.kron(eye2, x)
        xx = np.kron(x, x)
        p3 = np.kron(xx, eye2) + np.kron(x, np.kron(eye2, x)) + np.kron(eye2, xx)
        return np.hstack([eye2, p2, p3])

    return CostModel("polynomial3", 2, 14, features, grad_matrix)


def make_nonpoly_model():
    """Scalar non-polynomial cost with features ``(2 e^x, sin x, x)``."""

    def features(x):
        (x1,) = x
        return np.array([2.0 * np.exp(x1), np.sin(x1), x1])

    def grad_matrix(x):
        (x1,) = x
        return np.array([[2.0 * np.exp(x1), np.cos(x1), 1.0]])

    return CostModel("nonpoly", 1, 3, features, grad_matrix)


def make_example1_model():
    """Mixed polynomial/trigonometric cost on R^2 (p = 6).

    Features: ``(x1, x1 x2, x1^2, x2^2, cos x1, sin x2)``.
    """

    def features(x):
        x1, x2 = x
        return np.array([x1, x1 * x2, x1 * x1, x2 * x2, np.cos(x1), np.sin(x2)])

    def grad_matrix(x):
        x1, x2 = x
        return np.array([
            [1.0, x2, 2.0 * x1, 0.0, -np.sin(x1), 0.0],
            [0.0, x1, 0.0, 2.0 * x2, 0.0, np.cos(x2)],
        ])

    return CostModel("example1", 2, 6, features, grad_matrix)


MODEL_FACTORIES = {
    "quadratic": make_quadratic_model,
    "polynomial3": make_polynomial_model,
    "nonpoly": make_nonpoly_model,
    "example1": make_example1_model,
}


def get_model(name):
    """Look up a built-in cost model by scenario name."""
    try:
        factory = MODEL_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(MODEL_FACTORIES))
        raise ConfigError(f"unknown scenario {name!r} (known: {known})") from None
    return factory()
