import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandforge.forge import SeedFamily
from bandforge.seqspace import FinVec, Shift
from bandforge.verify import (
    basis_digest,
    check_decay_ledger,
    check_digests,
    check_orthonormality,
    check_prescribed_entries,
    entry_grid,
    export_decay,
    export_matrix,
    format_complex,
    parse_complex_str,
    read_matrix,
    seed_residuals,
)

from .helpers import grid as brute_grid


def standard(N):
    return [FinVec.basis(k) for k in range(1, N + 1)]


def test_standard_basis_is_orthonormal():
    # [TRIVIAL]
    assert check_orthonormality(standard(6)).worst == 0.0


def test_duplicate_vector_is_caught():
    # [TRIVIAL] <e_1, e_1> = 1 off the diagonal
    us = standard(3) + [FinVec.basis(1)]
    c = check_orthonormality(us)
    assert c.worst == pytest.approx(1.0) and not c.passed


def test_shift_grid_is_subdiagonal():
    # [TRIVIAL] S e_n = e_{n+1}
    A = entry_grid(Shift(), standard(5))
    assert np.array_equal(A, np.eye(5, k=-1))


def test_grid_matches_brute_force(rng):
    # [DERIVED]
    us = []
    for _ in range(4):
        v = FinVec.from_dense(1, rng.normal(size=9) + 1j * rng.normal(size=9))
        for w in us:
            v = v - w * w.inner(v)
        us.append(v.normalized())
    assert np.allclose(entry_grid(Shift(), us, workers=2), brute_grid(Shift(), us))


def test_prescribed_entries_report_location():
    # [TRIVIAL]
    c = check_prescribed_entries(Shift(), standard(4), [(1, 2, 1.0), (2, 3, 0.5)])
    assert c.worst == pytest.approx(0.5) and tuple(c.at) == (2, 3)


def test_empty_decay_ledger_is_vacuous():
    # [TRIVIAL]
    for model in ("equality", "bound", "product"):
        c = check_decay_ledger(standard(3), SeedFamily(), [], model)
        assert c.passed


def test_seed_residual_tail_sum():
    # [DERIVED] with u_k = e_k the residual of e_m drops to zero at step m
    r = seed_residuals(standard(4), SeedFamily(offset=1), [0, 2])
    assert np.allclose(r[0], [1, 0, 0, 0, 0])
    assert np.allclose(r[2], [1, 1, 1, 0, 0])


def test_digest_detects_changes():
    # [TRIVIAL]
    us = standard(3)
    digests = [basis_digest(u) for u in us]
    assert check_digests(us, digests).passed
    us[1] = FinVec.basis(2, 1.0 + 1e-15)
    assert not check_digests(us, digests).passed


complexes = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


@given(complexes)
def test_complex_literal_round_trip(z):
    # [TRIVIAL]
    assert parse_complex_str(format_complex(z)) == z


@given(st.integers(0, 5).flatmap(lambda k: st.lists(complexes, min_size=k * k, max_size=k * k)),
       st.sampled_from(["csv", "json"]))
def test_matrix_export_round_trip(vals, fmt):
    # [TRIVIAL]
    k = int(round(len(vals) ** 0.5))
    A = np.array(vals, dtype=np.complex128).reshape(k, k)
    assert np.array_equal(read_matrix(export_matrix(A, fmt), fmt), A)


def test_decay_export_columns():
    # [TRIVIAL]
    text = export_decay(standard(2), SeedFamily(offset=1), [(1, 0), (2, 1)])
    assert text.splitlines() == ["n,m,residual_norm", "1,0,0", "2,1,0"]
