"""Prescribed main diagonal with a zero band of width K around it."""

from __future__ import annotations

import math

from ..errors import PreconditionError
from ..numrange.states import find_state_in_complement
from .partitions import greedy_blocks, select_residue_class
from .state import BuildState, SeedFamily, StepRecord, step_context


def reflection_target(lam, tb, delta):
    """``mu`` on the far side of ``lam`` from ``tb`` at distance ``delta``.

    Solves ``(tb - lam) / |tb - lam| = (lam - mu) / delta``; returns ``lam``
    when ``tb == lam``.
    """
    lam, tb = complex(lam), complex(tb)
    rho = abs(tb - lam)
    if rho == 0.0:
        return lam
    return lam - delta * (tb - lam) / rho


def build_banded_diagonal(T, lams, K, steps, seeds=None, window=None, on_step=None):
    """Orthonormal ``u_1 .. u_N`` with ``<Tu_n, u_n> = lam_n`` and zero band entries.

    Parameters
    ----------
    T : OperatorModel
    lams : callable
        ``lams(n)`` for ``n >= 1``, every value interior to ``T.we_region``.
    K : int
        Entries ``<Tu_n, u_j>`` with ``1 <= |n - j| <= K`` vanish.
    steps : int
    seeds : SeedFamily, optional
        Spanning sequence ``y_m`` (standard basis by default).
    window : dict, optional
        Keyword arguments passed to the fresh-state search.
    on_step : callable, optional
        Called with each :class:`StepRecord` as soon as it is emitted.

    Returns
    -------
    BuildState
    """
    if K < 0 or steps < 1:
        raise PreconditionError("need K >= 0 and at least one step")
    window = dict(window or {})
    we = T.we_region
    ext = steps + K + 1
    lam = {n: complex(lams(n)) for n in range(1, ext + 1)}
    depth = {n: we.interior_margin(lam[n]) for n in lam}
    for n in range(1, steps + 1):
        if depth[n] <= 0:
            raise PreconditionError(f"lambda_{n} = {lam[n]} is not interior to the essential range", step=n)

    r0 = select_residue_class([lam[n] for n in range(1, steps + 1)], we, K)
    selected = [n for n in range(1, ext + 1) if n % (K + 1) == r0]
    part = greedy_blocks(selected, [max(depth[n], 0.0) for n in selected])
    state = BuildState("band", T, seeds or SeedFamily(), {"K": K, "r0": r0, "steps": steps})
    state.aux["partition"] = part

    for n in range(1, steps + 1):
        with step_context(n, state):
            rec, u = _band_step(T, state, part, n, lam[n], depth[n], window)
        state.append(u, rec)
        if on_step is not None:
            on_step(rec)
    return state


def _band_step(T, state, part, n, lam, dist, window):
    us = list(state.us)
    if n not in part:
        n_hat = part.successor(n)
        m_hat = part.m(n_hat)
        y = state.seeds(m_hat)
        u = find_state_in_complement(T, us + [y], lam, dist / 2, **window)
        return StepRecord(n, None, "band", {"lambda": lam, "next_selected": n_hat, "guard_m": m_hat}), u

    m = part.m(n)
    before, b = state.seed_direction(m)
    if b is None:
        u = find_state_in_complement(T, us, lam, dist / 2, **window)
        return StepRecord(n, m, "band", {"lambda": lam, "degenerate": True}, before, before, None), u

    tb = T.apply(b).inner(b)
    rho = abs(tb - lam)
    delta = dist / 2
    mu = reflection_target(lam, tb, delta)
    if rho == 0.0:
        u = b
    else:
        v = find_state_in_complement(T, us + [b], mu, delta / 2, **window)
        u = v * math.sqrt(rho / (rho + delta)) + b * math.sqrt(delta / (rho + delta))
    after = state.us.extended(u, check=False).residual(state.seeds(m)).norm
    factor = rho / (rho + delta)
    values = {"lambda": lam, "rho": rho, "delta": delta, "mu": mu, "tb": tb, "degenerate": False}
    return StepRecord(n, m, "band", values, before, after, factor), u
