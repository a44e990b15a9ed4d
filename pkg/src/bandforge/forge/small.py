"""Bases in which every matrix entry obeys ``|<Tu_n, u_j>| <= sqrt(a_n a_j)``."""

from __future__ import annotations

import math

import numpy as np

from ..errors import PreconditionError
from ..numrange.states import find_state_in_complement
from ..seqspace.operators import scaled
from .partitions import greedy_blocks, sparsify_weights
from .state import BuildState, SeedFamily, StepRecord, step_context


def orthogonality_depths(a, a_prime, strict=False):
    """``d(n)``: least ``r >= n`` with ``a'_k / a_k < a_n`` for all ``k`` in ``[r, N]``.

    The search runs over the available prefix; ``r = N + 1`` satisfies the
    condition vacuously and is returned when no earlier ``r`` does, unless
    ``strict`` is set, in which case a :class:`PreconditionError` names the
    first such ``n``.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(a_prime, dtype=float) / a
    N = a.size
    suf = np.full(N + 2, -np.inf)
    for k in range(N, 0, -1):
        suf[k] = max(q[k - 1], suf[k + 1])
    out = np.empty(N, dtype=np.int64)
    for n in range(1, N + 1):
        r = n
        while r <= N and suf[r] >= a[n - 1]:
            r += 1
        if strict and r == N + 1 and N >= n and q[N - 1] >= a[n - 1]:
            raise PreconditionError(
                f"d({n}) is undefined within the horizon (largest index examined: {N})", step=n
            )
        out[n - 1] = r
    return out


def build_small_entries(T, a, steps, seeds=None, window=None, strict_depth=False, on_step=None):
    """Orthonormal ``u_1 .. u_N`` with ``|<Tu_n, u_j>| <= ||T|| sqrt(a_n a_j)``.

    Parameters
    ----------
    T : OperatorModel
        Must have ``0`` in its essential range.  If its norm bound exceeds
        one the construction runs on ``T / ||T||``.
    a : callable
        Positive weights ``a(n)``.
    steps : int
    strict_depth : bool
        Refuse steps whose ``d(n)`` is only vacuously defined.
    """
    window = dict(window or {})
    if not T.we_region.contains(0.0, tol=1e-12):
        raise PreconditionError("0 is not in the essential range")
    a_vals = np.array([complex(a(n)) for n in range(1, steps + 1)])
    if np.any(np.abs(a_vals.imag) > 0) or np.any(a_vals.real <= 0):
        raise PreconditionError("weights must be real and positive")
    a_vals = a_vals.real
    norm = float(T.norm_bound)
    work = scaled(T, 1.0 / norm) if norm > 1.0 else T
    sp = sparsify_weights(a_vals)
    a_p = sp.a_prime
    part = greedy_blocks(range(1, steps + 1), a_p)
    depths = orthogonality_depths(a_vals, a_p, strict=strict_depth)
    params = {
        "steps": steps,
        "norm_scale": max(norm, 1.0),
        "sparsify_blocks": [list(b) for b in sp.blocks],
        "sparsify_remainder": list(sp.remainder) if sp.remainder else None,
    }
    state = BuildState("small", T, seeds or SeedFamily(), params)
    state.aux["partition"] = part

    for n in range(1, steps + 1):
        with step_context(n, state):
            rec, u = _small_step(work, state, part, n, a_vals[n - 1], a_p[n - 1], int(depths[n - 1]), window)
        state.append(u, rec)
        if on_step is not None:
            on_step(rec)
    return state


def _small_step(T, state, part, n, a_n, ap, d, window):
    cons = list(state.us) + [state.seeds(j) for j in range(1, d + 1)]
    v = find_state_in_complement(T, cons, 0.0, 0.0, tol=ap / 2, **window)
    tv = T.apply(v).inner(v)
    m = part.m(n)
    before, w = state.seed_direction(m)
    values = {"a": a_n, "a_prime": ap, "d": d, "v_value": tv}
    if w is None:
        values.update(c=0.0, degenerate=True)
        return StepRecord(n, m, "small", values, before, before, None), v
    c = math.sqrt(ap) / 2
    u = v * math.sqrt(1 - c * c) + w * c
    after = state.us.extended(u, check=False).residual(state.seeds(m)).norm
    values.update(c=c, degenerate=False)
    return StepRecord(n, m, "small", values, before, after, 1.0 - ap / 4), u
