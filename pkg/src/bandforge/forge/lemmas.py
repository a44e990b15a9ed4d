"""Single-vector building blocks shared by the tridiagonal and large-entry constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ConstructionError, PreconditionError
from ..numrange.region import Point
from ..numrange.states import find_state_in_complement

LEMMA_TOL = 1e-8


@dataclass(frozen=True)
class Lemma2dState:
    """A unit ``u`` with ``<Tu, u> = lam`` whose defect vectors are well separated.

    ``w = Tu - <Tu,u> u`` and ``wp = T*u - <T*u,u> u``.  ``w_perp`` is the
    part of ``w`` orthogonal to ``wp`` and ``wp_perp`` the part of ``wp``
    orthogonal to ``w``; both have norm at least ``eps / 2``.
    """

    u: object
    xs: tuple
    lam: complex
    eps: float
    w: object
    wp: object
    w_perp: object
    wp_perp: object

    def z_solver(self, alpha, beta):
        """``z`` in ``span{w, wp}`` with ``<w, z> = alpha`` and ``<wp, z> = beta``."""
        alpha, beta = complex(alpha), complex(beta)
        z = self.w_perp * (alpha.conjugate() / self.w_perp.norm2)
        z = z + self.wp_perp * (beta.conjugate() / self.wp_perp.norm2)
        return z

    def z_bound(self, alpha, beta):
        return 2.0 * (abs(alpha) + abs(beta)) / self.eps


def defect_vectors(T, u):
    """``(Tu - <Tu,u> u, T*u - <T*u,u> u)``."""
    Tu, Tsu = T.apply(u), T.apply_adjoint(u)
    return Tu - u * Tu.inner(u), Tsu - u * Tsu.inner(u)


def _perp(a, b):
    nb2 = b.norm2
    if nb2 == 0.0:
        return a
    return a - b * (a.inner(b) / nb2)


def lemma2d_state(T, lam, eps, constraints, **window):
    """Unit ``u`` orthogonal to ``constraints`` (and their images) with ``<Tu,u> = lam``.

    Four states with values ``lam + eps``, ``lam + i eps``, ``lam - eps``,
    ``lam - i eps`` are placed in successive windows, each past the
    previous one and its images, and averaged: ``u = (x1 + x2 + x3 + x4) / 2``.

    Raises
    ------
    PreconditionError
        If ``lam`` is not deeper than ``eps`` in the essential range.
    ConstructionError
        If a defect norm falls below ``eps / 2``.
    """
    lam = complex(lam)
    we = T.we_region
    depth = we.interior_margin(lam)
    if not (eps > 0 and depth > eps):
        raise PreconditionError(f"lemma needs depth {depth:.3e} > eps = {eps:.3e} > 0")
    cons = list(constraints)
    xs = []
    for shift in (eps, 1j * eps, -eps, -1j * eps):
        target = lam + shift
        margin = 0.5 * we.interior_margin(target)
        x = find_state_in_complement(T, cons + xs, target, margin, protect_images=True, **window)
        xs.append(x)
    u = (xs[0] + xs[1] + xs[2] + xs[3]) * 0.5
    w, wp = defect_vectors(T, u)
    w_perp, wp_perp = _perp(w, wp), _perp(wp, w)
    floor = eps / 2 - LEMMA_TOL
    if w_perp.norm < floor or wp_perp.norm < floor:
        raise ConstructionError(
            "defect vectors are not separated as required",
            diagnostics={"w_perp": w_perp.norm, "wp_perp": wp_perp.norm, "floor": floor},
        )
    return Lemma2dState(u, tuple(xs), lam, float(eps), w, wp, w_perp, wp_perp)


@dataclass(frozen=True)
class PearcyState:
    """A unit ``u`` with large value and large defects, plus its ingredients."""

    u: object
    x: object
    y: object
    lam: complex
    nu: complex
    mu: complex
    eps: float
    value: complex
    defect: float
    defect_adj: float


def pearcy_constants_ok(region, C, D, slack=1e-6):
    diam = region.diameter()
    return 0 < C <= diam / (4 * math.sqrt(2)) - slack and 0 < D <= diam / 4 - slack


def pearcy_state(T, constraints, C, D, **window):
    """Unit ``u`` past ``constraints`` with ``|<Tu,u>| >= D`` and both defects ``>= C``.

    ``x`` and ``y`` are states with values within ``eps`` of a diameter
    endpoint ``lam`` (the one of larger modulus) and of the midpoint ``mu``
    of the diameter; ``u = (x + y) / sqrt(2)``.
    """
    region = T.we_region
    if isinstance(region, Point) or region.diameter() == 0:
        raise PreconditionError("essential range is a single point; no such state exists")
    if not pearcy_constants_ok(region, C, D):
        diam = region.diameter()
        raise PreconditionError(
            f"constants C={C}, D={D} exceed the admissible bounds "
            f"{diam / (4 * math.sqrt(2)):.6g}, {diam / 4:.6g} (with slack 1e-6)"
        )
    lam, nu = region.diameter_pair()
    mu = 0.5 * (lam + nu)
    eps = 0.5 * min(abs(lam + mu) / 2 - D, abs(lam - mu) / 2 - C * math.sqrt(2))
    cons = list(constraints)
    x = find_state_in_complement(T, cons, lam, 0.0, protect_images=True, tol=eps, **window)
    y = find_state_in_complement(T, cons + [x], mu, 0.0, protect_images=True, tol=eps, **window)
    u = (x + y) * (1 / math.sqrt(2))
    u = u / u.norm
    value = T.apply(u).inner(u)
    w, wp = defect_vectors(T, u)
    st = PearcyState(u, x, y, lam, nu, mu, eps, value, w.norm, wp.norm)
    if abs(value) < D - 1e-9 or w.norm < C - 1e-9 or wp.norm < C - 1e-9:
        raise ConstructionError(
            "state misses the value/defect bounds",
            diagnostics={"value": abs(value), "defect": w.norm, "defect_adj": wp.norm},
        )
    return st
