"""Run configuration: parse, validate and dispatch a construction."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .seqspace.operators import operator_from_json
from .sequences import Sequence

CONSTRUCTIONS = ("band", "tridiag", "small", "large")

# salts keep random sequences independent while sharing the single run seed
SALTS = {"lambda_spec": 1, "mu_spec": 2, "nu_spec": 3, "a_spec": 4}

_REQUIRED = {
    "band": {"lambda_spec", "K"},
    "tridiag": {"lambda_spec", "mu_spec", "nu_spec", "epsilon"},
    "small": {"a_spec"},
    "large": {"C", "D"},
}
_OPTIONAL = {
    "band": set(),
    "tridiag": set(),
    "small": {"strict_depth"},
    "large": set(),
}
_COMMON = {"construction", "operator", "steps", "seed", "window"}
_WINDOW_KEYS = {"initial_length", "max_length", "n_angles"}


def _number(doc, key, kind=float, positive=False):
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{key} must be a number")
    if kind is int and int(val) != val:
        raise ConfigError(f"{key} must be an integer")
    val = kind(val)
    if not math.isfinite(val):
        raise ConfigError(f"{key} must be finite")
    if positive and val <= 0:
        raise ConfigError(f"{key} must be positive")
    return val


@dataclass
class RunConfig:
    """A validated construction request.

    Attributes
    ----------
    construction : str
        One of ``band``, ``tridiag``, ``small``, ``large``.
    operator : dict
        Operator model document.
    steps : int
    seed : int
        The only source of randomness: random sequences and plank restarts.
    params : dict
        Construction-specific entries (``K``, ``epsilon``, ``C``, ``D``,
        sequence specs, ...).
    window : dict
        Options forwarded to the fresh-state search.
    """

    construction: str
    operator: dict
    steps: int
    seed: int = 0
    params: dict = field(default_factory=dict)
    window: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        kind = doc.get("construction")
        if kind not in CONSTRUCTIONS:
            raise ConfigError(f"construction must be one of {CONSTRUCTIONS}, got {kind!r}")
        allowed = _COMMON | _REQUIRED[kind] | _OPTIONAL[kind]
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"unknown keys for a {kind} run: {sorted(unknown)}")
        missing = ({"operator", "steps"} | _REQUIRED[kind]) - set(doc)
        if missing:
            raise ConfigError(f"missing keys for a {kind} run: {sorted(missing)}")
        steps = _number(doc, "steps", int, positive=True)
        seed = _number(doc, "seed", int) if "seed" in doc else 0
        window = doc.get("window", {})
        if not isinstance(window, dict) or set(window) - _WINDOW_KEYS:
            raise ConfigError(f"window accepts only {sorted(_WINDOW_KEYS)}")
        for k in window:
            _number(window, k, int, positive=True)
        params = {}
        for k in _REQUIRED[kind] | _OPTIONAL[kind]:
            if k not in doc:
                continue
            if k.endswith("_spec"):
                params[k] = doc[k]
            elif k == "K":
                params[k] = _number(doc, k, int)
                if params[k] < 0:
                    raise ConfigError("K must be non-negative")
            elif k == "strict_depth":
                if not isinstance(doc[k], bool):
                    raise ConfigError("strict_depth must be a boolean")
                params[k] = doc[k]
            else:
                params[k] = _number(doc, k, float, positive=True)
        cfg = cls(kind, doc["operator"], steps, seed, params, {k: int(v) for k, v in window.items()})
        cfg.operator_model()
        for k in params:
            if k.endswith("_spec"):
                cfg.sequence(k)
        return cfg

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self):
        doc = {"construction": self.construction, "operator": self.operator, "steps": self.steps, "seed": self.seed}
        doc.update(self.params)
        if self.window:
            doc["window"] = dict(self.window)
        return doc

    def operator_model(self):
        return operator_from_json(self.operator, seed=self.seed)

    def sequence(self, key):
        return Sequence(self.params[key], seed=self.seed, salt=SALTS[key])

    def run(self, on_step=None):
        """Execute the construction and return its :class:`BuildState`."""
        from . import forge

        T = self.operator_model()
        p = self.params
        common = {"window": self.window or None, "on_step": on_step}
        if self.construction == "band":
            return forge.build_banded_diagonal(T, self.sequence("lambda_spec"), p["K"], self.steps, **common)
        if self.construction == "tridiag":
            return forge.build_tridiagonal(
                T,
                self.sequence("lambda_spec"),
                self.sequence("mu_spec"),
                self.sequence("nu_spec"),
                p["epsilon"],
                self.steps,
                **common,
            )
        if self.construction == "small":
            return forge.build_small_entries(
                T, self.sequence("a_spec"), self.steps, strict_depth=p.get("strict_depth", False), **common
            )
        return forge.build_large_entries(T, p["C"], p["D"], self.steps, seed=self.seed, **common)
