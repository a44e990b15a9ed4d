"""Target sequences indexed by n = 1, 2, ... built from small JSON specs.

Supported kinds::

    {"kind": "constant", "value": c}
    {"kind": "harmonic", "scale": s, "power": p, "shift": h}      s / (n + h)**p
    {"kind": "spiral", "center": c, "radius": r, "frequency": f, "phase": ph}
        c + r * (1 - 1/(n+1)) * exp(2 pi i (f n + ph))
    {"kind": "explicit", "values": [...], "periodic": bool}
    {"kind": "uniform_disk", "center": c, "radius": r}             i.i.d. uniform

Complex parameters are numbers or ``[re, im]`` pairs.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .numrange.region import parse_complex

_KEYS = {
    "constant": ({"value"}, set()),
    "harmonic": (set(), {"scale", "power", "shift"}),
    "spiral": ({"frequency"}, {"center", "radius", "phase"}),
    "explicit": ({"values"}, {"periodic"}),
    "uniform_disk": ({"radius"}, {"center"}),
}


class Sequence:
    """A complex sequence ``n -> value`` for ``n >= 1``.

    Random kinds draw from ``numpy.random.default_rng([seed, salt])`` in
    index order, so the same ``(spec, seed, salt)`` always yields the same
    values.
    """

    def __init__(self, spec, seed=0, salt=0):
        if not isinstance(spec, dict) or spec.get("kind") not in _KEYS:
            raise ConfigError(f"unknown sequence spec {spec!r}")
        required, optional = _KEYS[spec["kind"]]
        keys = set(spec) - {"kind"}
        missing = required - keys
        extra = keys - required - optional
        if missing:
            raise ConfigError(f"{spec['kind']} sequence missing {sorted(missing)}")
        if extra:
            raise ConfigError(f"unknown keys in {spec['kind']} sequence: {sorted(extra)}")
        self.spec = dict(spec)
        self.kind = spec["kind"]
        self._seed = int(seed)
        self._salt = int(salt)
        self._cache = np.zeros(0, dtype=np.complex128)
        try:
            self._parse()
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid {self.kind} sequence: {exc}") from exc

    def _parse(self):
        s = self.spec
        if self.kind == "constant":
            self._value = parse_complex(s["value"])
        elif self.kind == "harmonic":
            self._scale = parse_complex(s.get("scale", 1.0))
            self._power = float(s.get("power", 1.0))
            self._shift = float(s.get("shift", 0.0))
            if 1 + self._shift <= 0:
                raise ConfigError("harmonic shift must keep n + shift positive")
        elif self.kind == "spiral":
            self._center = parse_complex(s.get("center", 0.0))
            self._radius = float(s.get("radius", 1.0))
            self._freq = float(s["frequency"])
            self._phase = float(s.get("phase", 0.0))
        elif self.kind == "explicit":
            vals = [parse_complex(v) for v in s["values"]]
            if not vals:
                raise ConfigError("explicit sequence needs at least one value")
            self._values = np.asarray(vals, dtype=np.complex128)
            self._periodic = bool(s.get("periodic", False))
        else:
            self._center = parse_complex(s.get("center", 0.0))
            self._radius = float(s["radius"])
            self._rng = np.random.default_rng([self._seed, self._salt])

    def __call__(self, n):
        scalar = np.isscalar(n)
        n = np.atleast_1d(np.asarray(n, dtype=np.int64))
        if n.size and n.min() < 1:
            raise IndexError("sequences are indexed from 1")
        out = self._eval(n)
        return complex(out[0]) if scalar else out

    def _eval(self, n):
        k = self.kind
        if k == "constant":
            return np.full(n.shape, self._value, dtype=np.complex128)
        if k == "harmonic":
            return self._scale / (n + self._shift) ** self._power
        if k == "spiral":
            return self._center + self._radius * (1 - 1 / (n + 1)) * np.exp(
                2j * np.pi * (self._freq * n + self._phase)
            )
        if k == "explicit":
            if self._periodic:
                return self._values[(n - 1) % self._values.size]
            if n.max(initial=0) > self._values.size:
                raise IndexError(
                    f"explicit sequence has {self._values.size} values, index {int(n.max())} requested"
                )
            return self._values[n - 1]
        need = int(n.max(initial=0))
        if need > self._cache.size:
            extra = need - self._cache.size
            u = self._rng.random((extra, 2))
            pts = self._center + self._radius * np.sqrt(u[:, 0]) * np.exp(2j * np.pi * u[:, 1])
            self._cache = np.concatenate([self._cache, pts])
        return self._cache[n - 1]

    def values(self, count):
        """Values at ``n = 1 .. count``."""
        return self(np.arange(1, count + 1))

    def limit_points(self):
        """Limit points for deterministic kinds, or ``None`` when unknown."""
        k = self.kind
        if k == "constant":
            return [self._value]
        if k == "harmonic":
            return [0j] if self._power > 0 else None
        if k == "explicit" and self._periodic:
            return list(self._values)
        return None

    def to_json(self):
        return dict(self.spec)
