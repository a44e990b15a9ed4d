"""Prescribed main diagonal and both neighbouring diagonals."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConstructionError, PreconditionError
from ..seqspace.family import orthonormalize
from .lemmas import lemma2d_state
from .state import BuildState, SeedFamily, StepRecord, step_context

_SEED_SCAN_CAP = 100_000


def tridiag_limits(eps):
    """``(sup bound on |mu_n|, |nu_n|, ||b_n||)`` for a given ``eps``."""
    s = eps * math.sqrt(eps)
    return s / 16, s / 32


def admissible_seed(state, m, span_basis, eps):
    """Residual of ``y_m`` if it passes the admissibility test, else ``None``.

    ``y_m`` is admissible when it is not in the current span and its
    residual ``r`` satisfies ``||P_S r|| <= ||r|| eps / 32`` for the
    subspace ``S`` spanned by ``span_basis``.
    """
    rn, b = state.seed_direction(m)
    if b is None:
        return None
    r = b * rn
    proj = float(np.linalg.norm(span_basis.coefficients(r))) if len(span_basis) else 0.0
    return r if proj <= rn * eps / 32 else None


def choose_seed(state, counts, span_basis, eps):
    """Admissible ``m`` minimizing ``m + counts[m]``; ties go to the smallest ``m``."""
    best = None
    m = 1
    while m <= _SEED_SCAN_CAP:
        if best is not None and m > best[0]:
            break
        score = m + counts.get(m, 0)
        if best is None or score < best[0]:
            r = admissible_seed(state, m, span_basis, eps)
            if r is not None:
                best = (score, m, r)
        m += 1
    if best is None:
        raise ConstructionError("no admissible seed within the scan cap")
    return best[1], best[2]


def build_tridiagonal(T, lams, mus, nus, eps, steps, seeds=None, window=None, on_step=None):
    """Orthonormal ``u_1 .. u_N`` with prescribed three central diagonals.

    ``<Tu_n, u_n> = lams(n)``, ``<Tu_n, u_{n+1}> = mus(n)`` and
    ``<Tu_{n+1}, u_n> = nus(n)``.  Requires ``||T|| <= 1``, every
    ``lams(n)`` deeper than ``2 eps`` in the essential range, and
    ``|mus(n)|, |nus(n)| < eps**1.5 / 16``.
    """
    window = dict(window or {})
    if not 0 < eps <= 1:
        raise PreconditionError("eps must lie in (0, 1]")
    if T.norm_bound > 1 + 1e-12:
        raise PreconditionError(f"operator norm bound {T.norm_bound} exceeds 1")
    sup_bound, b_norm = tridiag_limits(eps)
    we = T.we_region
    lam = {n: complex(lams(n)) for n in range(1, steps + 1)}
    mu = {n: complex(mus(n)) for n in range(1, steps)}
    nu = {n: complex(nus(n)) for n in range(1, steps)}
    for n in range(1, steps + 1):
        if we.interior_margin(lam[n]) <= 2 * eps:
            raise PreconditionError(f"lambda_{n} is not deeper than 2 eps in the essential range", step=n)
    for n in range(1, steps):
        if max(abs(mu[n]), abs(nu[n])) >= sup_bound:
            raise PreconditionError(f"|mu_{n}| or |nu_{n}| is not below eps^1.5/16 = {sup_bound:.4e}", step=n)

    state = BuildState(
        "tridiag", T, seeds or SeedFamily(), {"eps": eps, "steps": steps, "b_norm": b_norm, "sup_bound": sup_bound}
    )
    counts = {}
    with step_context(1, state):
        lem = lemma2d_state(T, lam[1], eps, [], **window)
    u = lem.u
    rec = StepRecord(1, None, "tridiag", {"lambda": lam[1], "lambda_prime": lam[1], "z_norm": 0.0, "b_norm": 0.0})
    state.append(u, rec)
    state.aux.update(v=lem.u, lemma=lem, s=1.0)
    if on_step is not None:
        on_step(rec)

    for n in range(2, steps + 1):
        with step_context(n, state):
            rec, u = _tridiag_step(T, state, counts, n, lam[n], mu[n - 1], nu[n - 1], eps, b_norm, window)
        state.append(u, rec)
        counts[rec.m] = counts.get(rec.m, 0) + 1
        if on_step is not None:
            on_step(rec)
    return state


def _tridiag_step(T, state, counts, n, lam, mu_prev, nu_prev, eps, b_norm, window):
    u_prev = state.us[n - 2]
    v_prev = state.aux["v"]
    lem_prev = state.aux["lemma"]
    s_prev = state.aux["s"]
    span = [u_prev, T.apply(u_prev), T.apply_adjoint(u_prev), v_prev, T.apply(v_prev), T.apply_adjoint(v_prev)]
    span_basis = orthonormalize(span)
    m, r = choose_seed(state, counts, span_basis, eps)
    before = r.norm
    b = r * (b_norm / before)

    alpha = (mu_prev - T.apply(u_prev).inner(b)) / s_prev
    beta = (nu_prev.conjugate() - T.apply_adjoint(u_prev).inner(b)) / s_prev
    z = lem_prev.z_solver(alpha, beta)
    zb = z + b
    zb2 = zb.norm2
    if zb2 > 8 * eps / 25 + 1e-12:
        raise ConstructionError(f"||z + b||^2 = {zb2:.4e} exceeds 8 eps / 25")
    lam_p = (lam - T.apply(zb).inner(zb)) / (1 - zb2)

    images = [z, b, T.apply(z), T.apply_adjoint(z), T.apply(b), T.apply_adjoint(b)]
    y = state.seeds(m)
    lem = lemma2d_state(T, lam_p, eps, list(state.us) + [y] + images, **window)
    s = math.sqrt(1 - zb2)
    u = lem.u * s + zb
    after = state.us.extended(u, check=False).residual(y).norm
    values = {
        "lambda": lam,
        "lambda_prime": lam_p,
        "z_norm": z.norm,
        "b_norm": b.norm,
        "zb_norm2": zb2,
        "scale": s,
        "alpha": alpha,
        "beta": beta,
        "z_bound": lem_prev.z_bound(alpha, beta),
    }
    state.aux.update(v=lem.u, lemma=lem, s=s)
    factor = (after / before) ** 2
    return StepRecord(n, m, "tridiag", values, before, after, min(factor, 1.0)), u
