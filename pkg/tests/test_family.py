import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandforge.seqspace import FinVec, OrthoFamily, orthonormalize

small = st.floats(-3, 3, allow_nan=False)
vec = st.dictionaries(st.integers(1, 25), st.builds(complex, small, small), min_size=1, max_size=8).map(FinVec)


def test_rejects_non_orthonormal():
    # [TRIVIAL]
    with pytest.raises(ValueError):
        OrthoFamily([FinVec.basis(1), FinVec({1: 1.0, 2: 1.0})])


def test_standard_basis_prefix():
    # [TRIVIAL]
    fam = OrthoFamily([FinVec.basis(k) for k in range(1, 6)])
    assert fam.gram_error() == 0.0
    r = fam.residual(FinVec({3: 1.0, 8: 2.0}))
    assert r.allclose(FinVec({8: 2.0}))


@given(st.lists(vec, min_size=1, max_size=6), vec)
def test_residual_is_orthogonal_and_complementary(vs, x):
    # [DERIVED]
    fam = orthonormalize(vs)
    assert fam.gram_error() <= 1e-10
    r = fam.residual(x)
    c = fam.coefficients(x)
    assert np.max(np.abs(fam.coefficients(r)), initial=0.0) <= 1e-10 * (1 + x.norm)
    # Pythagoras: ||x||^2 = ||P x||^2 + ||r||^2
    assert x.norm2 == pytest.approx(np.sum(np.abs(c) ** 2) + r.norm2, rel=1e-9, abs=1e-12)


@given(st.lists(vec, min_size=1, max_size=6))
def test_orthonormalize_spans_inputs(vs):
    # [DERIVED]
    fam = orthonormalize(vs)
    assert len(fam) <= len(vs)
    for v in vs:
        assert fam.residual(v).norm <= 1e-9 * (1 + v.norm)


def test_extended_checks_orthogonality():
    # [TRIVIAL]
    fam = OrthoFamily([FinVec.basis(1)])
    with pytest.raises(ValueError):
        fam.extended(FinVec({1: 0.6, 2: 0.8}))
    assert len(fam.extended(FinVec.basis(2))) == 2
