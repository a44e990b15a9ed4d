import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandforge.errors import PreconditionError
from bandforge.forge import build_small_entries, orthogonality_depths, sparsify_weights
from bandforge.seqspace import Shift, ToeplitzBanded, WeightedShift

from .helpers import grid


def depth_oracle(a, ap, n):
    N = len(a)
    for r in range(n, N + 2):
        if all(ap[k - 1] / a[k - 1] < a[n - 1] for k in range(r, N + 1)):
            return r


@given(st.lists(st.floats(0.01, 2.0), min_size=1, max_size=40))
def test_depths_match_brute_force(ws):
    # [DERIVED]
    a = np.array(ws)
    ap = sparsify_weights(a).a_prime
    d = orthogonality_depths(a, ap)
    assert [int(x) for x in d] == [depth_oracle(a, ap, n) for n in range(1, len(a) + 1)]


def test_strict_depths_refuse_vacuous_choice():
    # [TRIVIAL]
    a = 1 / np.arange(1, 30)
    ap = sparsify_weights(a).a_prime
    with pytest.raises(PreconditionError) as exc:
        orthogonality_depths(a, ap, strict=True)
    assert "largest index examined: 29" in str(exc.value)


def test_mixing_coefficient():
    # [PAPER]
    assert math.sqrt(0.25) / 2 == 0.25


@pytest.fixture(scope="module")
def harmonic_run():
    return build_small_entries(Shift(), lambda n: 1 / n, 60)


def test_entry_bounds(harmonic_run):
    # [PAPER]
    A = grid(Shift(), harmonic_run.us)
    a = 1 / np.arange(1, 61)
    B = np.sqrt(np.outer(a, a))
    assert np.all(np.abs(A) <= B * (1 + 1e-8))
    assert np.all(np.abs(np.diag(A)) <= a * (1 + 1e-8))
    assert harmonic_run.us.gram_error() <= 1e-10


def test_decrement_identity(harmonic_run):
    # [PAPER]
    ap = sparsify_weights(1 / np.arange(1, 61)).a_prime
    for r in harmonic_run.records:
        if r.decrement is None:
            continue
        assert r.decrement == pytest.approx(1 - ap[r.n - 1] / 4)
        assert (r.residual_after / r.residual_before) ** 2 == pytest.approx(r.decrement, rel=1e-6)
        assert r.values["c"] == pytest.approx(math.sqrt(ap[r.n - 1]) / 2)
        assert abs(r.values["v_value"]) < ap[r.n - 1] / 2


def test_partition_label_never_exceeds_step(harmonic_run):
    # [PAPER]
    assert all(r.m <= r.n for r in harmonic_run.records)


def test_large_norm_is_rescaled():
    # [PAPER]
    T = WeightedShift(2.0)
    state = build_small_entries(T, lambda n: 0.5 / n, 15)
    A = grid(T, state.us)
    a = 0.5 / np.arange(1, 16)
    assert np.all(np.abs(A) <= 2.0 * np.sqrt(np.outer(a, a)) * (1 + 1e-8))
    assert state.params["norm_scale"] == 2.0


def test_origin_outside_rejected():
    # [TRIVIAL]
    with pytest.raises(PreconditionError):
        build_small_entries(ToeplitzBanded({0: 2.0, 1: 0.5}), lambda n: 1 / n, 5)
    with pytest.raises(PreconditionError):
        build_small_entries(Shift(), lambda n: -1.0, 5)
