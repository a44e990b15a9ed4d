import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandforge.forge import (
    dyadic_partition,
    greedy_blocks,
    residue_partition,
    round_robin_labels,
    select_residue_class,
    sparsify_weights,
    two_adic_valuation,
)
from bandforge.numrange import Disk


@given(st.integers(1, 10**9))
def test_valuation_factorization(n):
    # [DERIVED]
    m = two_adic_valuation(n)
    assert n % 2**m == 0 and (n // 2**m) % 2 == 1


def test_valuation_small_values():
    # [TRIVIAL]
    assert [two_adic_valuation(n) for n in range(1, 9)] == [0, 1, 0, 2, 0, 1, 0, 3]
    with pytest.raises(ValueError):
        two_adic_valuation(0)


def test_round_robin_prefix():
    # [TRIVIAL]
    assert list(itertools.islice(round_robin_labels(), 10)) == [1, 1, 2, 1, 2, 3, 1, 2, 3, 4]


@given(st.lists(st.floats(0.0, 2.0), min_size=1, max_size=60))
def test_greedy_blocks_cover_and_reach_weight(ws):
    # [DERIVED]
    idx = list(range(1, len(ws) + 1))
    part = greedy_blocks(idx, ws)
    assert sorted(n for b in part.blocks for n in b.members) == idx
    for b in part.blocks:
        assert b.weight == pytest.approx(sum(ws[n - 1] for n in b.members))
        if b.complete:
            assert b.weight >= 1 - 1e-12
    assert all(b.complete for b in part.blocks[:-1])
    for n in idx:
        assert n in part and n in part.members(part.m(n))


def test_greedy_block_labels_never_exceed_index():
    # [PAPER]
    part = greedy_blocks(range(1, 200), np.full(199, 0.3))
    assert all(part.m(n) <= n for n in range(1, 200))
    assert part.successor(5) == 6


def test_residue_and_dyadic_partitions():
    # [TRIVIAL]
    p = residue_partition(3, 20, r0=1)
    assert p.selected() == [1, 5, 9, 13, 17]
    d = dyadic_partition(16)
    assert d.members(2) == [4, 12]


def test_select_residue_class_prefers_depth():
    # [DERIVED]
    lams = [0.9, 0.0, 0.9, 0.0, 0.9, 0.0]  # even n sit at the center of the disk
    assert select_residue_class(lams, Disk(0, 1), 1) == 0
    # ties go to the smallest residue
    assert select_residue_class([0.0, 0.0], Disk(0, 1), 1) == 0


@given(st.lists(st.floats(1e-3, 3.0), min_size=1, max_size=80))
def test_sparsified_weights(ws):
    # [DERIVED]
    a = np.array(ws)
    sp = sparsify_weights(a)
    assert np.all(sp.a_prime <= a + 1e-15) and np.all(sp.a_prime <= 1.0)
    for k, lo, hi in sp.blocks:
        assert a[lo - 1 : hi].sum() >= k
        np.testing.assert_allclose(sp.a_prime[lo - 1 : hi], np.minimum(1, a[lo - 1 : hi] / k))
        for n in range(lo, hi + 1):
            assert sp.block_of(n) == k


def test_sparsify_harmonic_prefix():
    # [PAPER]
    sp = sparsify_weights(1 / np.arange(1, 151))
    # H_1 = 1, H_11 - H_1 >= 2 first at n = 11
    assert sp.blocks[:2] == ((1, 1, 1), (2, 2, 11))
    assert sp.remainder == (3, 12)
