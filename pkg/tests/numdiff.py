"""Finite-difference oracles used across the test suite."""

import numpy as np


def fd_jacobian(func, x, base_step=1e-6):
    """Central-difference Jacobian of a vector function, rows = input coords.

    Steps scale with coordinate magnitude: ``h_i = base_step * (1 + |x_i|)``.
    Returns the (n, p) matrix whose row i is the partial derivative of
    ``func`` in coordinate i.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    f0 = np.atleast_1d(np.asarray(func(x), dtype=float))
    out = np.empty((x.size, f0.size))
    for i in range(x.size):
        h = base_step * (1.0 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2.0 * h)
    return out


def fd_gradient(func, x, base_step=1e-6):
    """Central-difference gradient of a scalar function."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.size)
    for i in range(x.size):
        h = base_step * (1.0 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (func(x + e) - func(x - e)) / (2.0 * h)
    return out
