"""Bases with a large diagonal and off-diagonal entries bounded above and below polynomially."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConstructionError, PreconditionError
from ..numrange.plank import CERT_TOL, solve_plank
from ..seqspace.finvec import FinVec
from .lemmas import pearcy_constants_ok, pearcy_state
from .partitions import two_adic_valuation
from .state import BuildState, SeedFamily, StepRecord, step_context

INVARIANT_SLACK = 1e-8
_RANK_TOL = 1e-12


def large_constants(C, D):
    """``a``, ``d``, ``c1``, ``c2`` for admissible constants ``C`` and ``D``.

    ``a`` is the least real ``>= 1`` with ``4/a <= D`` and ``54/sqrt(a) <= C**2``.
    """
    a = max(4.0 / D, (54.0 / (C * C)) ** 2, 1.0)
    return {"a": a, "d": D / 2, "c1": C / (3 * math.sqrt(a)), "c2": 1 / math.sqrt(a)}


def plank_weights_ok(n):
    """Squared weight sum ``1/2 + 2(n-1)/(4n)``, and whether it is below one."""
    total = 0.5 + 2 * (n - 1) * (1 / (2 * math.sqrt(n))) ** 2
    return total, total < 1.0


class _Rows:
    """Growable dense row store; column ``k`` is the coefficient of ``e_k``."""

    def __init__(self, width=256):
        self.a = np.zeros((8, width), dtype=np.complex128)
        self.k = 0

    @property
    def width(self):
        return self.a.shape[1]

    def reserve(self, width):
        if width > self.a.shape[1]:
            new = np.zeros((self.a.shape[0], max(width, 2 * self.a.shape[1])), dtype=np.complex128)
            new[:, : self.a.shape[1]] = self.a
            self.a = new

    def push(self, row):
        self.reserve(row.size)
        if self.k == self.a.shape[0]:
            self.a = np.concatenate([self.a, np.zeros_like(self.a)], axis=0)
        self.a[self.k, :] = 0
        self.a[self.k, : row.size] = row
        self.k += 1

    @property
    def rows(self):
        return self.a[: self.k]


def _to_dense(x, width):
    out = np.zeros(width, dtype=np.complex128)
    if not x.is_zero():
        out[x.indices] = x.values
    return out


def _band_apply(T, x, adjoint=False):
    """``T x`` (or ``T* x``) for a dense row ``x``; result has ``bw`` extra columns."""
    bw = T.band_width
    L = x.size
    out = np.zeros(L + bw, dtype=np.complex128)
    cols = np.arange(1, L, dtype=np.int64)
    for k in range(-bw, bw + 1):
        if adjoint:
            src = cols + k
            ok = (src >= 1) & (src < L)
            d = T.diagonal(k, cols[ok])
            out[cols[ok]] += np.conj(d) * x[src[ok]]
        else:
            rows = cols + k
            ok = rows >= 1
            d = T.diagonal(k, cols[ok])
            out[rows[ok]] += d * x[cols[ok]]
    return out


def build_large_entries(T, C, D, steps, seed=0, seeds=None, window=None, on_step=None):
    """Orthonormal ``u_1 .. u_N`` with ``|<Tu_n, u_n>| >= D/2`` and, for ``n != j``,

    ``c1 min(n, j)**0.5 / max(n, j)**1.5 <= |<Tu_n, u_j>| <= c2 / max(n, j)**0.5``.

    Parameters
    ----------
    T : OperatorModel
        Norm bound at most one and a non-degenerate essential range.
    C, D : float
        Defect and value constants, below ``diam/(4 sqrt 2)`` and ``diam/4``.
    steps : int
    seed : int
        Seeds the plank-solver restarts.
    seeds : SeedFamily, optional
        Defaults to ``y_m = e_{m+1}`` for ``m >= 0``.

    Notes
    -----
    Every step records the plank slacks and the residual norms
    ``||(I - P_n) T u_j||**2``, ``||(I - P_n) T* u_j||**2`` for all
    ``j <= n`` together with the seed decay products, and raises
    :class:`ConstructionError` as soon as one of the per-step invariants
    fails by more than ``1e-8``.  The error carries the partial state.
    """
    window = dict(window or {})
    if T.norm_bound > 1 + 1e-12:
        raise PreconditionError(f"operator norm bound {T.norm_bound} exceeds 1")
    region = T.we_region
    if region.diameter() <= 0:
        raise PreconditionError("essential range is a single point")
    if not pearcy_constants_ok(region, C, D):
        raise PreconditionError(f"constants C={C}, D={D} are not admissible for this essential range")
    const = large_constants(C, D)
    state = BuildState(
        "large", T, seeds or SeedFamily(offset=1), dict(const, C=C, D=D, steps=steps, seed=seed)
    )
    work = {
        "U": _Rows(),
        "TU": _Rows(),
        "AU": _Rows(),
        "RT": _Rows(),
        "RA": _Rows(),
        "Y": {},
        "prod": {},
        "hi": 1,
    }
    state.aux["work"] = work
    for n in range(1, steps + 1):
        with step_context(n, state):
            rec, u = _large_step(T, state, work, n, C, D, const, seed, window)
        state.append(u, rec)
        if on_step is not None:
            on_step(rec)
    return state


def _residual(U, x, passes=2):
    for _ in range(passes):
        if U.shape[0]:
            x = x - (U[:, : x.size].conj() @ x) @ U[:, : x.size]
    return x


def _large_step(T, state, work, n, C, D, const, seed, window):
    a = const["a"]
    U = work["U"]
    m = two_adic_valuation(n)
    y = state.seeds(m)

    used = sorted({two_adic_valuation(j) for j in range(1, n + 1)})
    ps = pearcy_state(T, list(state.us) + [state.seeds(k) for k in used], C, D, **window)
    v = ps.u

    # highest index any stored vector or its image can reach after this step
    work["hi"] = max(work["hi"], v.max_index, y.max_index) + T.band_width
    width = work["hi"] + 1
    for key in ("U", "TU", "AU", "RT", "RA"):
        work[key].reserve(width)
    if m not in work["Y"]:
        work["Y"][m] = _residual(U.rows, _to_dense(y, U.width))
        work["prod"][m] = 1.0
    ry = work["Y"][m]
    before = float(np.linalg.norm(ry))

    rows, weights, kinds = [], [], []
    if before > 0:
        rows.append(ry)
        weights.append(1 / math.sqrt(2))
        kinds.append(("y", m))
    total, ok = plank_weights_ok(n)
    if not ok:
        raise PreconditionError(f"plank weights have squared sum {total} >= 1")
    w_tu = 1 / (2 * math.sqrt(n))
    for key in ("RT", "RA"):
        for j, r in enumerate(work[key].rows, start=1):
            rows.append(r)
            weights.append(w_tu)
            kinds.append((key, j))

    L = U.width
    W = np.zeros((len(rows), L), dtype=np.complex128)
    for i, r in enumerate(rows):
        W[i, : r.size] = r
    norms = np.linalg.norm(W, axis=1)
    if np.any(norms == 0):
        raise ConstructionError("a plank target vanished", diagnostics={"target": kinds[int(np.argmin(norms))]})
    W = W / norms[:, None]
    G = W.conj() @ W.T
    lam, V = np.linalg.eigh(G)
    keep = lam > _RANK_TOL * lam.max()
    lam, V = lam[keep], V[:, keep]
    B = V * np.sqrt(lam)
    x = solve_plank(B, np.array(weights), seed=[int(seed), n])
    z = W.T @ (V @ (x / np.sqrt(lam)))
    z = z / np.linalg.norm(z)
    plank = np.abs(W.conj() @ z)
    slack = plank - np.array(weights)
    if slack.min() < -CERT_TOL:
        raise ConstructionError("plank vector fails its certificate", diagnostics={"slack": float(slack.min())})

    vd = _to_dense(v, L)
    s = 1 / math.sqrt(a * n)
    u = s * z + math.sqrt(1 - 1 / (a * n)) * vd
    u_vec = FinVec.from_dense(1, u[1:])

    tu = _band_apply(T, u)[:L]
    au = _band_apply(T, u, adjoint=True)[:L]

    diag = np.vdot(u, tu)
    prev = U.rows
    col = prev.conj() @ tu if prev.shape[0] else np.zeros(0, dtype=np.complex128)
    row = work["TU"].rows @ u.conj() if prev.shape[0] else np.zeros(0, dtype=np.complex128)

    for key in ("RT", "RA"):
        R = work[key].rows
        if R.shape[0]:
            R[:, :L] -= np.outer(R[:, :L] @ u.conj(), u)
    for k, r in list(work["Y"].items()):
        r = np.pad(r, (0, L - r.size))
        work["Y"][k] = r - np.vdot(u, r) * u
    U.push(u)
    work["TU"].push(tu)
    work["AU"].push(au)
    work["RT"].push(_residual(U.rows, tu))
    work["RA"].push(_residual(U.rows, au))
    after = float(np.linalg.norm(work["Y"][m]))
    work["prod"][m] *= 1 - 1 / (2 * a * n)

    jj = np.arange(1, n + 1)
    rt2 = np.linalg.norm(work["RT"].rows, axis=1) ** 2
    ra2 = np.linalg.norm(work["RA"].rows, axis=1) ** 2
    floor = C * C * jj / (2 * n)
    decay = {k: (float(np.linalg.norm(r)) ** 2, work["prod"][k]) for k, r in work["Y"].items()}
    jprev = np.arange(1, n)
    lower = const["c1"] * np.sqrt(jprev) / n**1.5
    upper = const["c2"] / math.sqrt(n)
    entries = np.concatenate([np.abs(col), np.abs(row)])
    bounds_lo = np.concatenate([lower, lower])
    margins = {
        "inv1_margin": abs(diag) - const["d"],
        "inv2_lower_margin": float(np.min(entries - bounds_lo)) if n > 1 else math.inf,
        "inv2_upper_margin": float(np.min(upper - entries)) if n > 1 else math.inf,
        "inv3_margin": float(np.min(rt2 - floor)),
        "inv4_margin": float(np.min(ra2 - floor)),
        "inv5_margin": min(p - r for r, p in decay.values()),
    }
    values = {
        "value": diag,
        "v_value": ps.value,
        "v_defect": ps.defect,
        "v_defect_adj": ps.defect_adj,
        "pearcy_eps": ps.eps,
        "plank_weight_sum": total,
        "plank_slack_min": float(slack.min()),
        "plank_ratios": plank.tolist(),
        "plank_kinds": [f"{k}{j}" for k, j in kinds],
        "resid_T2": rt2.tolist(),
        "resid_A2": ra2.tolist(),
        "decay_bound": 1 - 1 / (2 * a * n),
        "seed_products": {str(k): p for k, (_, p) in decay.items()},
        "seed_residuals2": {str(k): r for k, (r, _) in decay.items()},
    }
    values.update({k: (v if math.isfinite(v) else 0.0) for k, v in margins.items()})
    bad = {k: v for k, v in margins.items() if v < -INVARIANT_SLACK}
    if bad:
        raise ConstructionError("per-step invariant violated", diagnostics=bad)
    factor = (after / before) ** 2 if before > 0 else None
    return StepRecord(n, m, "large", values, before, after, None if factor is None else min(factor, 1.0)), u_vec
