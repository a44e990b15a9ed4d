"""Boundary of the numerical range W(M) of a finite matrix by support-function sweep."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import ConvergenceError
from .region import convex_hull, hull_indices

_DENSE_LIMIT = 400
_CHUNK_ELEMS = 4_000_000
_CACHE_SIZE = 64
_cache: OrderedDict = OrderedDict()


@dataclass(frozen=True)
class RangeBoundary:
    """Result of a boundary sweep.

    ``points[i] = <M x_i, x_i>`` where ``x_i = states[i]`` is a top
    eigenvector of the Hermitian part of ``exp(-i angles[i]) M``;
    ``support[i]`` is the matching eigenvalue.  ``region`` is the convex
    hull of the points, an inscribed polygon of W(M), and ``hull`` lists
    the point indices of its vertices counterclockwise.
    """

    matrix: np.ndarray
    angles: np.ndarray
    points: np.ndarray
    support: np.ndarray
    states: np.ndarray
    hull: tuple
    region: object

    def vertices(self):
        return self.points[list(self.hull)]

    def vertex_states(self):
        return self.states[list(self.hull)]


def _bandwidth(M):
    nz = np.nonzero(M)
    if not nz[0].size:
        return 0
    return int(np.max(np.abs(nz[0] - nz[1])))


def _top_dense(M, angles):
    m = M.shape[0]
    MH = M.conj().T
    chunk = max(1, _CHUNK_ELEMS // max(1, m * m))
    vals = np.empty(angles.size)
    vecs = np.empty((angles.size, m), dtype=np.complex128)
    for s in range(0, angles.size, chunk):
        th = angles[s : s + chunk]
        ph = np.exp(-1j * th)[:, None, None]
        H = 0.5 * (ph * M[None] + ph.conj() * MH[None])
        w, V = np.linalg.eigh(H)
        vals[s : s + chunk] = w[:, -1]
        vecs[s : s + chunk] = V[:, :, -1]
    return vals, vecs


def _top_banded(M, angles, bw):
    m = M.shape[0]
    MH = M.conj().T
    vals = np.empty(angles.size)
    vecs = np.empty((angles.size, m), dtype=np.complex128)
    for i, th in enumerate(angles):
        ph = np.exp(-1j * th)
        H = 0.5 * (ph * M + np.conj(ph) * MH)
        ab = np.zeros((bw + 1, m), dtype=np.complex128)
        for k in range(bw + 1):
            ab[bw - k, k:] = np.diagonal(H, k)
        w, V = scipy.linalg.eig_banded(ab, lower=False, select="i", select_range=(m - 1, m - 1))
        vals[i] = w[-1]
        vecs[i] = V[:, -1]
    return vals, vecs


def _sweep(M, angles):
    m = M.shape[0]
    try:
        bw = _bandwidth(M)
        if m > _DENSE_LIMIT and bw < m // 4:
            vals, vecs = _top_banded(M, angles, bw)
        else:
            vals, vecs = _top_dense(M, angles)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"eigen-solver failed during boundary sweep: {exc}") from exc
    pts = np.einsum("ij,ij->i", vecs.conj(), vecs @ M.T)
    return vals, vecs, pts


def numerical_range_boundary(M, n_angles=256, adaptive=True, max_refine=3):
    """Inscribed polygon of W(M) from ``n_angles`` uniformly spaced directions.

    With ``adaptive``, directions are bisected (up to ``max_refine`` times)
    wherever consecutive boundary points are more than four median gaps
    apart, which sharpens rounded corners next to flat facets.

    Raises
    ------
    ConvergenceError
        If the Hermitian eigen-solver fails.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError("M must be a non-empty square matrix")
    if n_angles < 8:
        raise ValueError("n_angles must be at least 8")
    key = (M.shape, M.tobytes(), int(n_angles), bool(adaptive), int(max_refine))
    hit = _cache.get(key)
    if hit is not None:
        _cache.move_to_end(key)
        return hit

    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    vals, vecs, pts = _sweep(M, angles)
    for _ in range(max_refine if adaptive else 0):
        gaps = np.abs(np.roll(pts, -1) - pts)
        scale = max(float(np.max(np.abs(pts - pts.mean()))), 1e-300)
        thresh = max(4 * float(np.median(gaps)), 1e-9 * scale)
        bad = np.nonzero(gaps > thresh)[0]
        if bad.size == 0:
            break
        nxt = np.where(bad + 1 < angles.size, angles[(bad + 1) % angles.size], 2 * np.pi)
        mids = 0.5 * (angles[bad] + nxt)
        v2, x2, p2 = _sweep(M, mids)
        angles = np.concatenate([angles, mids])
        order = np.argsort(angles, kind="stable")
        angles = angles[order]
        vals = np.concatenate([vals, v2])[order]
        vecs = np.concatenate([vecs, x2])[order]
        pts = np.concatenate([pts, p2])[order]

    hull = tuple(hull_indices(pts))
    region = convex_hull(pts[list(hull)])
    out = RangeBoundary(M, angles, pts, vals, vecs, hull, region)
    _cache[key] = out
    if len(_cache) > _CACHE_SIZE:
        _cache.popitem(last=False)
    return out
