import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandforge.errors import PreconditionError
from bandforge.numrange import (
    CompressionWindow,
    estimate_essential_range,
    find_state_in_complement,
    find_state_near,
    find_state_with_value,
    two_state_path,
    window_start,
)
from bandforge.seqspace import FinVec, Shift, ToeplitzBanded


def value(M, x):
    return np.vdot(x, M @ x)


def random_matrix(rng, m):
    return rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))


def unit(rng, m):
    x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return x / np.linalg.norm(x)


@given(st.integers(0, 10_000), st.floats(0.0, 1.0))
def test_two_state_path_hits_target(seed, tau):
    # [DERIVED]
    rng = np.random.default_rng(seed)
    M = random_matrix(rng, 5)
    x, y = unit(rng, 5), unit(rng, 5)
    a, c = value(M, x), value(M, y)
    z = two_state_path(M, x, y, a + tau * (c - a))
    assert abs(np.linalg.norm(z) - 1) <= 1e-12
    assert abs(value(M, z) - (a + tau * (c - a))) <= 1e-9 * (1 + abs(c - a))


@given(st.integers(0, 10_000), st.integers(2, 9))
def test_inverse_value_problem(seed, m):
    # [DERIVED]
    rng = np.random.default_rng(seed)
    M = random_matrix(rng, m)
    # an interior point: average of the trace value and a random state value
    lam = 0.5 * np.trace(M) / m + 0.5 * value(M, unit(rng, m))
    x = find_state_with_value(M, lam)
    assert abs(np.linalg.norm(x) - 1) <= 1e-12
    assert abs(value(M, x) - lam) <= 1e-11


def test_value_outside_is_rejected():
    # [TRIVIAL]
    with pytest.raises(PreconditionError):
        find_state_with_value(np.diag([0.0, 1.0]).astype(complex), 2.0)
    with pytest.raises(PreconditionError):
        find_state_with_value(np.eye(3, dtype=complex), 1.0, margin=0.1)


def test_near_mode_reaches_boundary_points():
    # [DERIVED]
    J = np.diag(np.ones(4), 1).astype(complex)
    r = np.cos(np.pi / 6)
    x = find_state_near(J, 0.999 * r, tol=1e-3)
    assert abs(value(J, x) - 0.999 * r) <= 1e-3


def test_complement_window_starts_past_images():
    # [DERIVED]
    S = Shift()
    cons = [FinVec.basis(k) for k in range(1, 11)]
    assert window_start(S, cons) == 12
    v = find_state_in_complement(S, cons, 0.5, 0.25)
    assert v.min_index == 12
    assert abs(S.apply(v).inner(v) - 0.5) <= 1e-11
    for c in cons:
        assert v.inner(c) == 0 and S.apply(v).inner(c) == 0 and S.apply_adjoint(v).inner(c) == 0


def test_complement_near_boundary_uses_longer_window():
    # [TRIVIAL]
    v = find_state_in_complement(Shift(), [], 0.99, 0.005)
    assert abs(Shift().apply(v).inner(v) - 0.99) <= 1e-11


def test_complement_rejects_shallow_targets():
    # [TRIVIAL]
    with pytest.raises(PreconditionError):
        find_state_in_complement(Shift(), [], 0.99, 0.05)
    with pytest.raises(PreconditionError):
        find_state_in_complement(Shift(), [], 1.5, 0.0, tol=1e-3)


def test_compression_window_excludes_directions():
    # [TRIVIAL]
    w = CompressionWindow(3, 6, (FinVec({4: 1.0, 5: 1.0}),))
    Q = w.basis()
    assert Q.shape == (6, 5)
    v = w.embed(Q.conj().T @ np.arange(6.0))
    assert abs(v.inner(FinVec({4: 1.0, 5: 1.0}))) <= 1e-12


def test_essential_range_estimate_inside_symbol_hull():
    # [DERIVED]
    T = ToeplitzBanded({1: 1.0, -1: 0.5})
    est = estimate_essential_range(T, length=128)
    for p in est.extreme_points():
        assert T.we_region.contains(p, tol=1e-6)
