"""Plank vectors: a unit ``v`` with ``|<v, w_j>| >= a_j`` for unit ``w_j`` and ``sum a_j**2 <= 1``.

Existence is guaranteed but the classical argument is not constructive, so
the solver maximizes the weighted log-product ``sum_j b_j log|<v, w_j>|**2``
(with ``b_j = a_j**2 / sum a**2``) over the unit sphere of the subspace and
accepts a vector only after checking every bound directly.
"""

from __future__ import annotations

import numpy as np

from ..errors import PlankError, PreconditionError
from ..seqspace.family import OrthoFamily, orthonormalize
from ..seqspace.finvec import combine

CERT_TOL = 1e-10


def plank_certificate(v, targets):
    """Slacks ``|<v, w_j>| - a_j``; all must be ``>= -1e-10`` for a valid vector."""
    return np.array([abs(v.inner(w)) - a for w, a in targets])


def _greedy_start(B, a):
    x = np.zeros(B.shape[1], dtype=np.complex128)
    for j in np.argsort(-a, kind="stable"):
        if a[j] == 0:
            continue
        row = B[j].conj()
        ov = np.vdot(row, x)
        ph = ov / abs(ov) if abs(ov) > 1e-14 else 1.0
        x = x + a[j] * ph * row
    n = np.linalg.norm(x)
    return x / n if n > 0 else None


def _ascend(B, a, beta, x, max_iter):
    def F(y):
        s = np.abs(B @ y)
        if np.any(s == 0):
            return -np.inf, s
        return float(np.sum(beta * np.log(s * s))), s

    f, s = F(x)
    step = 1.0
    for _ in range(max_iter):
        if np.all(s >= a):
            return x, True
        sv = B @ x
        g = B.conj().T @ (beta / sv.conj())
        g = g - beta.sum() * x
        gn2 = float(np.vdot(g, g).real)
        if gn2 < 1e-30:
            break
        step = min(step * 2.0, 1e6)
        while step > 1e-14:
            y = x + step * g
            y = y / np.linalg.norm(y)
            fy, sy = F(y)
            if fy >= f + 1e-4 * step * gn2 / (1.0 + step * np.sqrt(gn2)):
                break
            step *= 0.5
        else:
            break
        x, f, s = y, fy, sy
    return x, bool(np.all(s >= a))


def solve_plank(B, a, seed=0, restarts=16, max_iter=2000):
    """Coordinates ``x`` (unit) with ``|(B x)_j| >= a_j`` for every row of ``B``.

    ``B[j]`` holds the conjugated coordinates of target ``j`` in an
    orthonormal basis of the search subspace, so ``(B x)_j = <v, w_j>``.
    Rows with ``a_j = 0`` are ignored.

    Raises
    ------
    PlankError
        If no start reaches the bound to within ``1e-10``.
    """
    B = np.asarray(B, dtype=np.complex128)
    a = np.asarray(a, dtype=float)
    keep = a > 0
    if not keep.any():
        x = np.zeros(B.shape[1], dtype=np.complex128)
        x[0] = 1.0
        return x
    Bk, ak = B[keep], a[keep]
    beta = ak * ak / np.sum(ak * ak)
    rng = np.random.default_rng(seed)
    best, best_slack = None, -np.inf
    x0 = _greedy_start(Bk, ak)
    for r in range(restarts + 1):
        if r == 0 and x0 is not None:
            x = x0
        else:
            x = rng.standard_normal(B.shape[1]) + 1j * rng.standard_normal(B.shape[1])
            x = x / np.linalg.norm(x)
        x, _ = _ascend(Bk, ak, beta, x, max_iter)
        slack = float(np.min(np.abs(Bk @ x) - ak))
        if slack > best_slack:
            best, best_slack = x, slack
        if slack >= 0.0:
            break
    if best_slack < -CERT_TOL:
        raise PlankError(
            f"plank solver reached slack {best_slack:.3e} after {restarts + 1} starts",
            diagnostics={"slack": best_slack, "targets": int(keep.sum())},
        )
    return best


def plank_vector(targets, subspace_basis=None, seed=0, restarts=16, max_iter=2000):
    """Unit vector in ``span(subspace_basis)`` meeting every plank bound.

    Parameters
    ----------
    targets : list of (FinVec, float)
        Unit vectors ``w_j`` with weights ``a_j >= 0``, ``sum a_j**2 <= 1``.
    subspace_basis : OrthoFamily, optional
        Orthonormal basis of the search subspace; defaults to an
        orthonormal basis of ``span{w_j}``.
    seed : int
        Seed for the random restarts.

    Returns
    -------
    FinVec
        ``v`` with ``|<v, w_j>| >= a_j - 1e-10`` for every ``j``.

    Raises
    ------
    PlankError
        If no restart produces a certified vector.
    """
    targets = [(w, float(a)) for w, a in targets]
    if any(a < 0 for _, a in targets):
        raise PreconditionError("plank weights must be non-negative")
    total = sum(a * a for _, a in targets)
    if total > 1 + 1e-12:
        raise PreconditionError(f"plank weights have squared sum {total:.6g} > 1")
    for w, a in targets:
        if a > 0 and abs(w.norm - 1.0) > 1e-8:
            raise PreconditionError("plank targets must be unit vectors")
    if subspace_basis is None:
        subspace_basis = orthonormalize([w for w, _ in targets])
    elif not isinstance(subspace_basis, OrthoFamily):
        subspace_basis = OrthoFamily(subspace_basis)
    Q = list(subspace_basis)
    if not Q:
        raise PreconditionError("empty search subspace")
    if not targets:
        return Q[0]

    B = subspace_basis.coefficients_many([w for w, _ in targets]).T.conj()
    a = np.array([x for _, x in targets])
    x = solve_plank(B, a, seed=seed, restarts=restarts, max_iter=max_iter)
    v = combine(x, Q)
    v = v / v.norm
    slack = float(np.min(plank_certificate(v, targets)))
    if slack < -CERT_TOL:
        raise PlankError(f"plank certificate failed on re-check: slack {slack:.3e}")
    return v


__all__ = ["plank_vector", "plank_certificate", "solve_plank"]
