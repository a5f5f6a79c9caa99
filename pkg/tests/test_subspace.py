import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import block_diag

from tvtrack.costs import make_quadratic_model
from tvtrack.exceptions import NotIdentifiableError
from tvtrack.oracle import ParameterSystem, ProbeSchedule, collect_dataset
from tvtrack.subspace import (
    build_hankel,
    default_depth,
    factorize,
    initial_states,
    realize,
    shift_estimate,
)
from tvtrack.suites import _random_block_dynamics


def quadratic_dataset():
    A = block_diag(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.diag([0.98, 0.95, 0.981]))
    z0 = np.array([-85.8, -77.9, 1047.0, 329.0, 669.0])
    sys = ParameterSystem(A, z0)
    model = make_quadratic_model()
    x0 = np.array([np.sqrt(2) / 2, np.sqrt(2) / 2])
    return A, collect_dataset(sys, model, ProbeSchedule(x0, 8, 26, eta=1e-3))


def test_default_depth():
    assert default_depth(9) == 5
    assert default_depth(19) == 10
    assert default_depth(7) == 4


def test_build_hankel_scalar():
    yh = build_hankel(np.array([[1.0], [2.0], [3.0]]), 1, 2)
    assert_allclose(yh, [[1.0, 2.0], [2.0, 3.0]])


def test_build_hankel_insufficient_samples():
    with pytest.raises(ValueError):
        build_hankel(np.ones((3, 1)), 1, 3)


def test_scalar_geometric_sequence():
    # A=2, C=1, z0=1 produces y = (1, 2, 4)
    y = np.array([[1.0], [2.0], [4.0]])
    yh = build_hankel(y, 1, 2)
    assert_allclose(yh, [[1.0, 2.0], [2.0, 4.0]])
    fact = factorize(yh, 1)
    assert fact.r == 1
    abar = shift_estimate(fact)
    assert_allclose(abar, [[2.0]], atol=1e-12)
    zbar0 = initial_states(fact)
    assert_allclose(np.abs(zbar0), np.sqrt(5) * np.array([[1.0, 2.0]]), atol=1e-12)
    assert_allclose(fact.Obar @ zbar0, yh, atol=1e-12)


def test_factorize_identity_hankel():
    fact = factorize(np.eye(4), 1)
    assert fact.r == 4
    assert_allclose(fact.Obar.T @ fact.Obar, np.eye(4), atol=1e-12)


def test_factorize_zero_hankel():
    with pytest.raises(NotIdentifiableError):
        factorize(np.zeros((4, 4)), 1)


def test_shift_needs_two_block_rows():
    fact = factorize(np.eye(2), 2)  # a single block row of height 2
    with pytest.raises(NotIdentifiableError):
        shift_estimate(fact)


def test_two_mode_spectrum():
    # A = diag(2, 3) observed through C = [1, 1] from z0 = (1, 1)
    t = np.arange(7)
    y = (2.0 ** t + 3.0 ** t)[:, None]
    _, real = realize(y, 1, q=3)
    assert real.r == 2
    assert_allclose(sorted(np.linalg.eigvals(real.Abar)), [2.0, 3.0], atol=1e-9)


def test_quadratic_scenario_identification():
    A, ds = quadratic_dataset()
    yh = build_hankel(ds.Y0, 2, 5)
    assert yh.shape == (10, 5)
    fact = factorize(yh, 2)
    assert fact.r == 5

    abar = shift_estimate(fact)
    got = np.sort_complex(np.linalg.eigvals(abar))
    expected = np.sort_complex(np.linalg.eigvals(A))
    assert np.abs(got - expected).max() < 1e-8

    # shift-structure consistency of the estimated observability basis
    o1, o2 = fact.Obar[:-2], fact.Obar[2:]
    assert np.linalg.norm(o1 @ abar - o2) < 1e-9 * np.linalg.norm(o2)

    zbar0 = initial_states(fact)
    assert np.linalg.norm(fact.Obar @ zbar0 - yh) < 1e-10 * np.linalg.norm(yh)
    # transformed states follow the estimated dynamics one step at a time
    for j in range(4):
        assert np.linalg.norm(zbar0[:, j + 1] - abar @ zbar0[:, j]) \
            < 1e-8 * np.linalg.norm(zbar0[:, j + 1])


def test_realize_defaults_match_manual_steps():
    _, ds = quadratic_dataset()
    fact, real = realize(ds.Y0, 2)
    assert real.q == 5
    assert real.ref_index == 4
    assert_allclose(real.zbar_ref, real.Zbar0[:, 4])
    assert real.r == fact.r == 5


def test_random_spectrum_invariance():
    rng = np.random.default_rng(10)
    for _ in range(10):
        p = int(rng.integers(2, 7))
        n = int(rng.integers(1, 4))
        A, _ = _random_block_dynamics(rng, p, mag_range=(0.75, 1.06), gap=0.1)
        C = rng.standard_normal((n, p))
        z0 = rng.uniform(-2, 2, size=p)
        samples = 2 * p + 1
        y = np.empty((samples, n))
        z = z0.copy()
        for t in range(samples):
            y[t] = C @ z
            z = A @ z
        _, real = realize(y, n)
        if real.r < p:
            continue  # unlucky draw: some mode numerically unobservable
        got = np.sort_complex(np.linalg.eigvals(real.Abar))
        expected = np.sort_complex(np.linalg.eigvals(A))
        assert np.abs(got - expected).max() < 1e-7
