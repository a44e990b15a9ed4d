"""Compact convex subsets of the complex plane.

Four shapes are supported: :class:`Disk`, :class:`Polygon`, :class:`Segment`
and :class:`Point`.  Segments and points have empty interior, so their
boundary is the set itself.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

_COLLINEAR = 1e-14


def _seg_dist(p, a, b):
    d = b - a
    L2 = (d.conjugate() * d).real
    if L2 == 0.0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


def _seg_closest(p, a, b):
    d = b - a
    L2 = (d.conjugate() * d).real
    if L2 == 0.0:
        return a, 0.0
    t = ((p - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return a + t * d, t


def _cross(o, a, b):
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def hull_indices(points, tol=_COLLINEAR):
    """Andrew's monotone chain; indices of hull vertices in counterclockwise order."""
    pts = [complex(p) for p in points]
    order = sorted(range(len(pts)), key=lambda i: (pts[i].real, pts[i].imag))
    uniq = []
    for i in order:
        if not uniq or abs(pts[i] - pts[uniq[-1]]) > tol:
            uniq.append(i)
    if len(uniq) <= 2:
        return uniq
    scale = max(abs(pts[i] - pts[uniq[0]]) for i in uniq)
    eps = tol * max(scale, 1.0) ** 2

    def chain(seq):
        out = []
        for i in seq:
            while len(out) >= 2 and _cross(pts[out[-2]], pts[out[-1]], pts[i]) <= eps:
                out.pop()
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    return lower[:-1] + upper[:-1]


def convex_hull(points):
    """Smallest region of the supported shapes containing ``points``."""
    pts = [complex(p) for p in points]
    if not pts:
        raise ValueError("convex hull of no points")
    idx = hull_indices(pts)
    if len(idx) == 1:
        return Point(pts[idx[0]])
    if len(idx) == 2:
        return Segment(pts[idx[0]], pts[idx[1]])
    return Polygon(tuple(pts[i] for i in idx))


class ConvexRegion:
    """Common interface; see the concrete shapes."""

    kind = "region"

    def dist_to_boundary(self, lam):
        raise NotImplementedError

    def contains(self, lam, tol=1e-12):
        raise NotImplementedError

    def interior_margin(self, lam):
        """Signed depth: distance to the boundary if ``lam`` is interior, else ``-dist(lam, R)``.

        Zero on the boundary and everywhere on shapes with empty interior.
        """
        raise NotImplementedError

    def extreme_points(self):
        raise NotImplementedError

    def diameter(self):
        p, q = self.diameter_pair()
        return abs(p - q)

    def diameter_pair(self):
        """A pair ``(lam, nu)`` with ``|lam - nu| = diam`` and ``|lam| >= |nu|``."""
        return _diameter_pair(self.extreme_points())

    def affine(self, alpha, beta):
        """Image under ``z -> alpha * z + beta``."""
        raise NotImplementedError

    def closest_point(self, lam):
        raise NotImplementedError

    def boundary_samples(self, n=256):
        return list(self.extreme_points())

    def to_json(self):
        raise NotImplementedError

    @staticmethod
    def from_json(doc):
        return region_from_json(doc)


def _diameter_pair(points, tol=1e-12):
    pts = [complex(p) for p in points]
    if len(pts) == 1:
        return pts[0], pts[0]
    arr = np.asarray(pts)
    dist = np.abs(arr[:, None] - arr[None, :])
    best = dist.max()
    cands = []
    for i, j in zip(*np.nonzero(dist >= best - tol * max(1.0, best))):
        p, q = pts[i], pts[j]
        if abs(p) < abs(q) - tol:
            continue
        cands.append((-abs(p), _arg0(p), -abs(q), _arg0(q), p, q))
    cands.sort(key=lambda c: c[:4])
    return cands[0][4], cands[0][5]


def _arg0(z):
    a = cmath.phase(z)
    return a + 2 * math.pi if a < -1e-15 else max(a, 0.0)


@dataclass(frozen=True)
class Disk(ConvexRegion):
    center: complex
    radius: float

    kind = "disk"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise ValueError("disk radius must be non-negative")

    def dist_to_boundary(self, lam):
        return abs(abs(complex(lam) - self.center) - self.radius)

    def contains(self, lam, tol=1e-12):
        return abs(complex(lam) - self.center) <= self.radius + tol

    def interior_margin(self, lam):
        return self.radius - abs(complex(lam) - self.center)

    def extreme_points(self):
        return self.boundary_samples(256)

    def boundary_samples(self, n=256):
        t = 2 * np.pi * np.arange(n) / n
        return list(self.center + self.radius * np.exp(1j * t))

    def diameter(self):
        return 2 * self.radius

    def diameter_pair(self):
        c = self.center
        direction = c / abs(c) if abs(c) > 0 else 1.0
        return c + self.radius * direction, c - self.radius * direction

    def affine(self, alpha, beta):
        return Disk(complex(alpha) * self.center + complex(beta), abs(alpha) * self.radius)

    def closest_point(self, lam):
        lam = complex(lam)
        d = lam - self.center
        if abs(d) <= self.radius:
            return lam
        return self.center + self.radius * d / abs(d)

    def to_json(self):
        return {"kind": "disk", "center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True)
class Polygon(ConvexRegion):
    """Convex polygon with counterclockwise vertices."""

    vertices: tuple

    kind = "polygon"

    def __post_init__(self):
        vs = tuple(complex(v) for v in self.vertices)
        if len(vs) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        area2 = sum(_cross(0j, vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))
        if area2 <= 0:
            raise ValueError("polygon vertices must be counterclockwise with positive area")
        object.__setattr__(self, "vertices", vs)

    def _edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def _arrays(self):
        a = np.asarray(self.vertices)
        return a, np.roll(a, -1) - a

    def dist_to_boundary(self, lam):
        lam = complex(lam)
        a, d = self._arrays()
        L2 = (d.real**2 + d.imag**2)
        t = np.clip(((lam - a) * d.conj()).real / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
        return float(np.min(np.abs(lam - (a + t * d))))

    def _inside(self, lam):
        a, d = self._arrays()
        r = lam - a
        return bool(np.all(d.real * r.imag - d.imag * r.real > 0))

    def contains(self, lam, tol=1e-12):
        lam = complex(lam)
        return self._inside(lam) or self.dist_to_boundary(lam) <= tol

    def interior_margin(self, lam):
        lam = complex(lam)
        d = self.dist_to_boundary(lam)
        return d if self._inside(lam) else -d

    def extreme_points(self):
        return list(self.vertices)

    def affine(self, alpha, beta):
        alpha, beta = complex(alpha), complex(beta)
        if alpha == 0:
            return Point(beta)
        return Polygon(tuple(alpha * v + beta for v in self.vertices))

    def closest_point(self, lam):
        lam = complex(lam)
        if self._inside(lam):
            return lam
        best = min((_seg_closest(lam, a, b)[0] for a, b in self._edges()), key=lambda p: abs(p - lam))
        return best

    def to_json(self):
        return {"kind": "polygon", "vertices": [[v.real, v.imag] for v in self.vertices]}


@dataclass(frozen=True)
class Segment(ConvexRegion):
    a: complex
    b: complex

    kind = "segment"

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def dist_to_boundary(self, lam):
        return _seg_dist(complex(lam), self.a, self.b)

    def contains(self, lam, tol=1e-12):
        return self.dist_to_boundary(lam) <= tol

    def interior_margin(self, lam):
        return -self.dist_to_boundary(lam)

    def extreme_points(self):
        return [self.a, self.b]

    def affine(self, alpha, beta):
        alpha, beta = complex(alpha), complex(beta)
        return Segment(alpha * self.a + beta, alpha * self.b + beta)

    def closest_point(self, lam):
        return _seg_closest(complex(lam), self.a, self.b)[0]

    def to_json(self):
        return {"kind": "segment", "endpoints": [[self.a.real, self.a.imag], [self.b.real, self.b.imag]]}


@dataclass(frozen=True)
class Point(ConvexRegion):
    value: complex

    kind = "point"

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    def dist_to_boundary(self, lam):
        return abs(complex(lam) - self.value)

    def contains(self, lam, tol=1e-12):
        return abs(complex(lam) - self.value) <= tol

    def interior_margin(self, lam):
        return -abs(complex(lam) - self.value)

    def extreme_points(self):
        return [self.value]

    def affine(self, alpha, beta):
        return Point(complex(alpha) * self.value + complex(beta))

    def closest_point(self, lam):
        return self.value

    def to_json(self):
        return {"kind": "point", "value": [self.value.real, self.value.imag]}


def hull_of_regions(regions, n=256):
    """Convex hull of several regions; disks are replaced by inscribed 256-gons."""
    pts = []
    for r in regions:
        pts.extend(r.boundary_samples(n) if isinstance(r, Disk) else r.extreme_points())
    return convex_hull(pts)


def parse_complex(x):
    """Accept a number or a ``[re, im]`` pair."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"complex value must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"expected a number or [re, im], got {x!r}")
    return complex(x)


def region_from_json(doc):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("region must be an object with a 'kind'")
    kind = doc["kind"]
    allowed = {
        "disk": {"kind", "center", "radius"},
        "polygon": {"kind", "vertices"},
        "segment": {"kind", "endpoints"},
        "point": {"kind", "value"},
    }
    if kind not in allowed:
        raise ConfigError(f"unknown region kind {kind!r}")
    extra = set(doc) - allowed[kind]
    if extra:
        raise ConfigError(f"unknown keys in {kind} region: {sorted(extra)}")
    try:
        if kind == "disk":
            return Disk(parse_complex(doc.get("center", 0.0)), float(doc["radius"]))
        if kind == "polygon":
            vs = [parse_complex(v) for v in doc["vertices"]]
            hull = convex_hull(vs)
            if len(hull.extreme_points()) != len(vs):
                raise ConfigError("polygon vertices must be in convex position")
            return hull
        if kind == "segment":
            a, b = (parse_complex(v) for v in doc["endpoints"])
            return Segment(a, b)
        return Point(parse_complex(doc["value"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid {kind} region: {exc}") from exc
