import math

import numpy as np
import pytest

from bandforge.errors import PreconditionError
from bandforge.forge import build_large_entries, large_constants, plank_weights_ok
from bandforge.seqspace import FinVec, Shift, ToeplitzBanded

from .helpers import grid

C, D = 0.35, 0.49


def test_constants_for_the_shift():
    # [PAPER]
    c = large_constants(C, D)
    assert c["a"] == pytest.approx(1.943e5, rel=1e-3)
    assert c["c1"] == pytest.approx(2.647e-4, rel=1e-3)
    assert c["c2"] == pytest.approx(2.268e-3, rel=1e-3)
    assert c["d"] == 0.245
    # a is the least value meeting both constraints
    assert 54 / math.sqrt(c["a"]) == pytest.approx(C * C)
    assert 4 / c["a"] <= D


def test_plank_weight_budget():
    # [PAPER]
    total, ok = plank_weights_ok(10)
    assert total == pytest.approx(0.95) and ok
    assert all(plank_weights_ok(n)[1] for n in range(1, 500))


def test_first_decay_factor():
    # [PAPER]
    a = large_constants(C, D)["a"]
    assert 1 - 1 / (2 * a) == pytest.approx(1 - 2.57e-6, abs=1e-8)


@pytest.fixture(scope="module")
def run():
    return build_large_entries(Shift(), C, D, 16, seed=5)


def test_entry_bounds(run):
    # [PAPER]
    c = large_constants(C, D)
    A = grid(Shift(), run.us)
    N = A.shape[0]
    assert np.all(np.abs(np.diag(A)) >= c["d"])
    for n in range(1, N + 1):
        for j in range(1, N + 1):
            if n == j:
                continue
            e = abs(A[j - 1, n - 1])
            assert e >= c["c1"] * min(n, j) ** 0.5 / max(n, j) ** 1.5 - 1e-8
            assert e <= c["c2"] / max(n, j) ** 0.5 + 1e-8


def test_recorded_invariants(run):
    # [PAPER]
    for r in run.records:
        v = r.values
        for key in ("inv1_margin", "inv2_lower_margin", "inv2_upper_margin", "inv3_margin", "inv4_margin",
                    "inv5_margin"):
            assert v[key] >= -1e-8
        assert v["plank_slack_min"] >= -1e-10
        assert len(v["resid_T2"]) == r.n and len(v["plank_ratios"]) == 2 * r.n - 1


def test_defect_ledger_recomputed(run):
    # [PAPER]
    # ||(I - P_k) T u_j||^2 >= C^2 j / (2k), from a fresh projection
    S = Shift()
    us = list(run.us)
    for k in (4, 16):
        for j in range(1, k + 1):
            t = S.apply(us[j - 1])
            r = t - sum((u * t.inner(u) for u in us[:k]), FinVec())
            assert r.norm2 >= C * C * j / (2 * k) - 1e-8


def test_seeds_are_shifted_basis(run):
    # [TRIVIAL]
    assert run.seeds(0).allclose(FinVec.basis(1))
    assert [r.m for r in run.records[:8]] == [0, 1, 0, 2, 0, 1, 0, 3]


def test_preconditions():
    # [TRIVIAL]
    with pytest.raises(PreconditionError):
        build_large_entries(Shift(), 0.36, D, 3)
    with pytest.raises(PreconditionError):
        build_large_entries(ToeplitzBanded({1: 2.0}), C, D, 3)
