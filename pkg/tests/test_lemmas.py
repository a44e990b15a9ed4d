import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandforge.errors import PreconditionError
from bandforge.forge import defect_vectors, lemma2d_state, pearcy_constants_ok, pearcy_state
from bandforge.numrange import Disk, Point
from bandforge.seqspace import FinVec, Perturbed, Shift


@pytest.fixture(scope="module")
def lemma_state():
    return lemma2d_state(Shift(), 0.0, 0.2, [])


def test_lemma_state_values(lemma_state):
    # [PAPER]
    S = Shift()
    vals = [S.apply(x).inner(x) for x in lemma_state.xs]
    np.testing.assert_allclose(vals, [0.2, 0.2j, -0.2, -0.2j], atol=1e-11)
    assert abs(S.apply(lemma_state.u).inner(lemma_state.u)) <= 1e-11
    assert lemma_state.u.norm == pytest.approx(1.0)


def test_zero_coefficients_give_zero(lemma_state):
    # [TRIVIAL]
    assert lemma_state.z_solver(0, 0).norm == 0


def test_biorthogonal_reproduction(lemma_state):
    # [DERIVED]
    z = lemma_state.z_solver(1, 0)
    assert abs(lemma_state.w.inner(z) - 1) <= 1e-10
    assert abs(lemma_state.wp.inner(z)) <= 1e-10


def test_shift_z_bound(lemma_state):
    # [PAPER]
    z = lemma_state.z_solver(0.01, 0.01)
    assert z.norm <= 2 * 0.02 / 0.2 + 1e-10


@settings(max_examples=60)
@given(st.complex_numbers(max_magnitude=1, allow_nan=False), st.complex_numbers(max_magnitude=1, allow_nan=False))
def test_z_solver_reproduces_pairs(lemma_state, alpha, beta):
    # [DERIVED]
    z = lemma_state.z_solver(alpha, beta)
    assert abs(lemma_state.w.inner(z) - alpha) <= 1e-10
    assert abs(lemma_state.wp.inner(z) - beta) <= 1e-10
    assert z.norm <= 2 * (abs(alpha) + abs(beta)) / 0.2 + 1e-10


def test_defect_vectors_orthogonal_to_state(lemma_state):
    # [DERIVED]
    w, wp = defect_vectors(Shift(), lemma_state.u)
    assert abs(w.inner(lemma_state.u)) <= 1e-12 and abs(wp.inner(lemma_state.u)) <= 1e-12
    assert w.allclose(lemma_state.w)


def test_pearcy_admissible_constants_for_disk():
    # [PAPER]
    D = Disk(0, 1)
    assert pearcy_constants_ok(D, 0.35, 0.49)
    assert not pearcy_constants_ok(D, 1 / (2 * math.sqrt(2)), 0.49)
    assert not pearcy_constants_ok(D, 0.35, 0.5)


def test_pearcy_state_bounds():
    # [PAPER]
    S = Shift()
    cons = [FinVec.basis(k) for k in range(1, 6)]
    st_ = pearcy_state(S, cons, 0.35, 0.49)
    u = st_.u
    assert u.min_index > 6
    assert abs(S.apply(u).inner(u)) >= 0.49
    w, wp = defect_vectors(S, u)
    assert w.norm >= 0.35 and wp.norm >= 0.35
    assert st_.lam == 1 and st_.mu == 0


def test_pearcy_rejects_point_region():
    # [TRIVIAL]
    T = Perturbed(Shift(we_region=Point(0)), {})
    with pytest.raises(PreconditionError):
        pearcy_state(T, [], 0.1, 0.1)
