import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandforge.errors import ConfigError
from bandforge.numrange import Disk
from bandforge.seqspace import (
    Affine,
    DirectSum,
    FinVec,
    Perturbed,
    Shift,
    ToeplitzBanded,
    WeightedShift,
    matrix_entry,
    operator_from_json,
    scaled,
)

small = st.floats(-2, 2, allow_nan=False)
cplx = st.builds(complex, small, small)
toeplitz = st.dictionaries(st.integers(-3, 3), cplx, min_size=1, max_size=4).map(ToeplitzBanded)
vec = st.dictionaries(st.integers(1, 30), cplx, max_size=10).map(FinVec)


def dense_matrix(T, n):
    return np.array([[T.entry(j, k) for k in range(1, n + 1)] for j in range(1, n + 1)])


def test_shift_moves_basis_vectors_forward():
    # [TRIVIAL]
    S = Shift()
    assert S.apply(FinVec.basis(4)).allclose(FinVec.basis(5))
    assert S.apply_adjoint(FinVec.basis(4)).allclose(FinVec.basis(3))
    assert S.apply_adjoint(FinVec.basis(1)).is_zero()
    assert S.we_region == Disk(0, 1) and S.norm_bound == 1.0


def test_matrix_entry_convention():
    # [TRIVIAL]
    # <S e_1, e_2> = 1 sits in row 2, column 1
    S = Shift()
    assert matrix_entry(S, FinVec.basis(1), FinVec.basis(2)) == 1
    assert S.entry(2, 1) == 1 and S.entry(1, 2) == 0


@given(toeplitz, vec)
def test_apply_matches_dense_compression(T, x):
    # [DERIVED]
    n = 40
    A = T.compress(1, n)
    xd = x.dense(1, n)
    got = T.apply(x).dense(1, n)
    # rows near the end of the window can receive mass from beyond it only if x has support there
    np.testing.assert_allclose(got[:31], (A @ xd)[:31], atol=1e-10)


@given(toeplitz, vec, vec)
def test_adjoint_identity(T, x, y):
    # [DERIVED]
    lhs = T.apply(x).inner(y)
    rhs = x.inner(T.apply_adjoint(y))
    assert abs(lhs - rhs) <= 1e-9 * (1 + x.norm * y.norm)


@given(toeplitz)
def test_compression_is_toeplitz(T):
    # [DERIVED]
    A = T.compress(5, 12)
    for k, c in T.coefficients.items():
        if abs(k) < 12:
            np.testing.assert_allclose(np.diagonal(A, -k), c)


def test_weighted_shift_norm():
    # [DERIVED]
    W = WeightedShift(0.5)
    assert W.norm_bound == 0.5
    assert W.apply(FinVec.basis(2)).allclose(FinVec.basis(3, 0.5))


def test_affine_and_scaled():
    # [TRIVIAL]
    S = Shift()
    T = Affine(S, 2.0, 1.0)
    assert T.entry(3, 3) == 1.0 and T.entry(4, 3) == 2.0
    assert T.we_region == Disk(1.0, 2.0)
    H = scaled(S, 0.5)
    assert H.norm_bound == 0.5


def test_direct_sum_interleaves():
    # [TRIVIAL]
    D = DirectSum(Shift(), ToeplitzBanded({0: 3.0}))
    # odd indices carry the shift, even ones the constant 3
    assert D.apply(FinVec.basis(1)).allclose(FinVec.basis(3))
    assert D.apply(FinVec.basis(2)).allclose(FinVec.basis(2, 3.0))


def test_perturbed_adds_entries():
    # [TRIVIAL]
    P = Perturbed(Shift(), {(1, 1): 0.5})
    assert P.entry(1, 1) == 0.5 and P.entry(2, 1) == 1.0
    assert P.we_region == Disk(0, 1)


@pytest.mark.parametrize(
    "doc",
    [
        {"kind": "shift"},
        {"kind": "weighted_shift", "weight": 0.5},
        {"kind": "toeplitz_banded", "coefficients": {"0": 0.2, "1": [0.0, 0.5]}},
        {"kind": "affine", "base": {"kind": "shift"}, "alpha": 0.5, "beta": [0.1, 0.0]},
        {"kind": "direct_sum", "summands": [{"kind": "shift"}, {"kind": "shift"}]},
        {"kind": "perturbed", "base": {"kind": "shift"}, "entries": [[1, 2, 0.1, 0.0]]},
    ],
)
def test_json_round_trip(doc):
    # [TRIVIAL]
    T = operator_from_json(doc)
    U = operator_from_json(T.to_json())
    np.testing.assert_allclose(dense_matrix(T, 12), dense_matrix(U, 12))
    assert U.we_region == T.we_region


def test_unknown_keys_rejected():
    # [TRIVIAL]
    with pytest.raises(ConfigError):
        operator_from_json({"kind": "shift", "colour": 1})
    with pytest.raises(ConfigError):
        operator_from_json({"kind": "nope"})
