"""Unit vectors with prescribed numerical-range values.

The finite solver works on a dense matrix: boundary eigen-states give an
inscribed polygon, a triangle of it containing the target is located, and
two successive two-state paths ``cos t x + exp(i phi) sin t y`` reach the
target exactly.  The infinite-dimensional helpers compress an operator to a
far window whose support is disjoint from (the images of) given constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..errors import ConvergenceError, PreconditionError
from ..seqspace.finvec import FinVec
from .boundary import numerical_range_boundary
from .region import Point, Segment

VALUE_TOL = 1e-11


def _quad(M, x):
    return complex(np.vdot(x, M @ x))


def _unit(x):
    return x / np.linalg.norm(x)


def two_state_path(M, x, y, target):
    """Unit vector on the path from ``x`` to ``y`` whose value is ``target``.

    ``target`` is assumed to lie on the segment between ``<Mx,x>`` and
    ``<My,y>``; its component off that line is ignored.
    """
    a, c = _quad(M, x), _quad(M, y)
    if abs(c - a) <= 1e-300:
        return x.copy()
    tau = ((target - a) / (c - a)).real
    if tau <= 0.0:
        return x.copy()
    if tau >= 1.0:
        return y.copy()
    N = (M - a * np.eye(M.shape[0])) / (c - a)
    p = np.vdot(x, N @ y)
    q = np.vdot(y, N @ x)
    d = p - np.conj(q)
    ph = np.exp(-1j * np.angle(d)) if abs(d) > 0 else 1.0
    R = (ph * (p + np.conj(q))).real
    G = (ph * np.vdot(x, y)).real

    def g(t):
        cs, s = np.cos(t) * np.sin(t), np.sin(t)
        return (s * s + cs * R) / (1.0 + 2.0 * cs * G) - tau

    t = brentq(g, 0.0, np.pi / 2, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    return _unit(np.cos(t) * x + ph * np.sin(t) * y)


def _polish(M, x, lam, iters=4):
    """Gauss-Newton correction of the value along four tangent directions."""
    for _ in range(iters):
        val = _quad(M, x)
        err = lam - val
        if abs(err) <= 1e-15 * max(1.0, abs(lam)):
            break
        dirs = []
        for w in (M @ x, M.conj().T @ x):
            w = w - np.vdot(x, w) * x
            nw = np.linalg.norm(w)
            if nw > 1e-14:
                dirs.extend([w / nw, 1j * w / nw])
        if not dirs:
            break
        J = np.empty((2, len(dirs)))
        for k, d in enumerate(dirs):
            j = np.vdot(x, M @ d) + np.vdot(d, M @ x)
            J[0, k], J[1, k] = j.real, j.imag
        step, *_ = np.linalg.lstsq(J, np.array([err.real, err.imag]), rcond=None)
        x_new = _unit(x + sum(s * d for s, d in zip(step, dirs)))
        if abs(_quad(M, x_new) - lam) >= abs(err):
            break
        x = x_new
    return x


def _locate(vertices, lam):
    """Fan triangle ``(0, i, i+1)`` containing ``lam`` from the farthest vertex."""
    n = len(vertices)
    k0 = int(np.argmax(np.abs(vertices - lam)))
    order = (k0 + np.arange(n)) % n
    v0 = vertices[k0]
    a = vertices[order[1:-1]] - v0
    b = vertices[order[2:]] - v0
    r = lam - v0
    det = a.real * b.imag - a.imag * b.real
    ok = det != 0
    det = np.where(ok, det, 1.0)
    w1 = (r.real * b.imag - r.imag * b.real) / det
    w2 = (a.real * r.imag - a.imag * r.real) / det
    score = np.where(ok, np.minimum(np.minimum(1.0 - w1 - w2, w1), w2), -np.inf)
    i = int(np.argmax(score))
    w = (1.0 - w1[i] - w2[i], w1[i], w2[i])
    return (int(order[0]), int(order[i + 1]), int(order[i + 2])), w


def _solve_on_region(bnd, lam):
    M = bnd.matrix
    region = bnd.region
    verts = bnd.vertices()
    states = bnd.vertex_states()
    k = int(np.argmin(np.abs(verts - lam)))
    if abs(verts[k] - lam) <= 1e-15 * max(1.0, abs(lam)):
        return states[k].copy()
    if isinstance(region, Point):
        return states[0].copy()
    if isinstance(region, Segment):
        return two_state_path(M, states[0], states[1], lam)
    (i0, i1, i2), w = _locate(verts, lam)
    s = w[1] + w[2]
    if s <= 1e-15:
        return states[i0].copy()
    t = min(1.0, max(0.0, w[2] / s))
    q = verts[i1] + t * (verts[i2] - verts[i1])
    y = two_state_path(M, states[i1], states[i2], q)
    return two_state_path(M, states[i0], y, lam)


def find_state_with_value(M, lam, margin=0.0, n_angles=256, tol=VALUE_TOL):
    """Unit ``x`` with ``|<Mx, x> - lam| <= tol``.

    Parameters
    ----------
    M : (m, m) array_like
        Complex square matrix.
    lam : complex
        Target value.
    margin : float
        Required depth of ``lam`` inside the inscribed boundary polygon.
        With ``margin = 0`` any point of the polygon (boundary included)
        is accepted.
    n_angles : int
        Directions used for the boundary sweep.
    tol : float
        Acceptance tolerance on the value.

    Returns
    -------
    ndarray
        Unit vector of length ``m``.

    Raises
    ------
    PreconditionError
        If ``lam`` is not certified inside W(M) with the requested margin.
    ConvergenceError
        If the path solve and polish do not reach ``tol``.
    """
    M = np.asarray(M, dtype=np.complex128)
    lam = complex(lam)
    bnd = numerical_range_boundary(M, n_angles)
    depth = bnd.region.interior_margin(lam)
    if margin > 0:
        if depth < margin:
            raise PreconditionError(
                f"target {lam} has depth {depth:.3e} in W(M), below the margin {margin:.3e}"
            )
    elif not bnd.region.contains(lam, tol=1e-12):
        raise PreconditionError(f"target {lam} lies outside the certified part of W(M)")
    x = _solve_on_region(bnd, lam)
    if abs(_quad(M, x) - lam) > 0.1 * tol:
        x = _polish(M, x, lam)
    err = abs(_quad(M, x) - lam)
    if err > tol or abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ConvergenceError(f"inverse numerical-range solve stalled at error {err:.3e}")
    return x


def find_state_near(M, lam, tol, n_angles=256):
    """Unit ``x`` with ``|<Mx, x> - lam| <= tol``, aiming at the closest polygon point."""
    M = np.asarray(M, dtype=np.complex128)
    lam = complex(lam)
    bnd = numerical_range_boundary(M, n_angles)
    p = complex(bnd.region.closest_point(lam))
    if abs(p - lam) > tol:
        raise PreconditionError(f"no certified value of W(M) within {tol:.3e} of {lam}")
    slack = max(tol - abs(p - lam), 1e-15)
    return find_state_with_value(M, p, 0.0, n_angles, tol=min(VALUE_TOL, slack))


@dataclass(frozen=True)
class CompressionWindow:
    """Standard-basis window ``[start, start + length)`` minus ``excluded`` directions."""

    start: int
    length: int
    excluded: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.start < 1 or self.length < 1:
            raise ValueError("window needs start >= 1 and length >= 1")
        object.__setattr__(self, "excluded", tuple(self.excluded))

    def basis(self):
        """Orthonormal columns spanning the window part orthogonal to ``excluded``."""
        m = self.length
        if not self.excluded:
            return np.eye(m, dtype=np.complex128)
        C = np.stack([c.dense(self.start, m) for c in self.excluded], axis=1)
        U, s, _ = np.linalg.svd(C, full_matrices=True)
        rank = int(np.sum(s > 1e-12 * max(1.0, s[0] if s.size else 0.0)))
        return U[:, rank:]

    def matrix(self, T):
        A = T.compress(self.start, self.length)
        if not self.excluded:
            return A
        Q = self.basis()
        return Q.conj().T @ A @ Q

    def embed(self, y):
        if self.excluded:
            y = self.basis() @ y
        return FinVec.from_dense(self.start, y)


def window_start(T, constraints, protect_images=True):
    """First index usable for fresh vectors orthogonal to ``constraints`` (and images)."""
    horizon = max((c.max_index for c in constraints), default=0)
    return horizon + (T.band_width if protect_images else 0) + 1


def find_state_in_complement(
    T,
    constraints,
    lam,
    margin,
    protect_images=True,
    tol=None,
    initial_length=64,
    max_length=2**14,
    n_angles=256,
    start=None,
):
    """Unit vector ``v`` with ``<Tv, v> = lam`` living past all ``constraints``.

    The support of ``v`` starts beyond the constraint horizon (plus the band
    width when ``protect_images``), so ``v`` and, if requested, ``Tv`` and
    ``T*v`` are orthogonal to every constraint exactly.  Windows double in
    length, with the start advanced past the previous window, until ``lam``
    is certified in the compression's numerical range with depth ``margin``.

    With ``tol`` given, the value only has to be within ``tol`` of ``lam``
    (which may then sit on the boundary of the essential range) and
    ``margin`` may be zero.
    """
    lam = complex(lam)
    we = T.we_region
    if tol is None:
        if margin <= 0:
            raise PreconditionError("margin must be positive")
        depth = we.interior_margin(lam)
        if depth < margin - 1e-12:
            raise PreconditionError(
                f"target {lam} is {depth:.3e} inside the essential range, below margin {margin:.3e}"
            )
    elif not we.contains(lam, tol=tol):
        raise PreconditionError(f"target {lam} is not within {tol:.3e} of the essential range")

    s = window_start(T, constraints, protect_images) if start is None else int(start)
    length = int(initial_length)
    tried = []
    while length <= max_length:
        M = T.compress(s, length)
        bnd = numerical_range_boundary(M, n_angles)
        if tol is None:
            depth = bnd.region.interior_margin(lam)
            ok = depth >= margin
        else:
            depth = -abs(complex(bnd.region.closest_point(lam)) - lam)
            ok = -depth <= 0.5 * tol
        tried.append((s, length, float(depth)))
        if ok:
            if tol is None:
                x = find_state_with_value(M, lam, margin, n_angles)
            else:
                x = find_state_near(M, lam, tol, n_angles)
            v = FinVec.from_dense(s, x)
            v = v / v.norm
            err = abs(T.apply(v).inner(v) - lam)
            limit = VALUE_TOL if tol is None else tol
            if err > limit:
                raise ConvergenceError(
                    f"fresh state misses target {lam} by {err:.3e}", diagnostics={"window": (s, length)}
                )
            return v
        s += length
        length *= 2
    raise ConvergenceError(
        f"no window up to length {max_length} certifies {lam}; it may be too close to the "
        "boundary of the essential range or we_region may be mis-specified",
        diagnostics={"windows": tried},
    )


def estimate_essential_range(T, start=None, length=256, n_angles=256):
    """Inscribed polygon of a far compression; a validation aid for ``we_region``."""
    s = 10 * length if start is None else int(start)
    return numerical_range_boundary(T.compress(s, length), n_angles).region
