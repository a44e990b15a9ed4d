"""Construction state and the per-step audit records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConstructionError
from ..seqspace.family import OrthoFamily
from ..seqspace.finvec import FinVec

# below this residual norm a seed counts as spanned; normalizing a smaller
# residual would amplify rounding past the orthonormality tolerance
MEMBERSHIP_TOL = 1e-8


def _jsonable(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _finite(x):
    if x is None or isinstance(x, (str, bool, np.bool_)):
        return True
    if isinstance(x, dict):
        return all(_finite(v) for v in x.values())
    if isinstance(x, (list, tuple)):
        return all(_finite(v) for v in x)
    arr = np.asarray(x)
    if arr.dtype.kind in "biufc":
        return bool(np.all(np.isfinite(arr)))
    return True


@dataclass(frozen=True)
class StepRecord:
    """Audit data for one step ``n``.

    ``values`` holds the construction-specific scalars (for example
    ``rho``, ``delta``, ``mu`` for the band construction); ``decrement``
    is the factor by which ``||(I - P_n) y_m(n)||**2`` shrank, or ``None``
    when no seed was touched.
    """

    n: int
    m: int | None
    kind: str
    values: dict = field(default_factory=dict)
    residual_before: float | None = None
    residual_after: float | None = None
    decrement: float | None = None

    def __post_init__(self):
        for k, v in self.values.items():
            if not _finite(v):
                raise ValueError(f"step {self.n}: recorded {k} is not finite")
        if self.decrement is not None and not (0.0 <= self.decrement <= 1.0 + 1e-12):
            raise ValueError(f"step {self.n}: decrement factor {self.decrement} outside [0, 1]")

    def to_json(self):
        return {
            "n": self.n,
            "m": self.m,
            "kind": self.kind,
            "values": _jsonable(self.values),
            "residual_before": self.residual_before,
            "residual_after": self.residual_after,
            "decrement": self.decrement,
        }

    @classmethod
    def from_json(cls, doc):
        return cls(
            n=int(doc["n"]),
            m=doc["m"],
            kind=doc["kind"],
            values=dict(doc.get("values", {})),
            residual_before=doc.get("residual_before"),
            residual_after=doc.get("residual_after"),
            decrement=doc.get("decrement"),
        )


class SeedFamily:
    """Seed vectors ``y_m = e_{m + offset}``: the standard basis, shifted."""

    def __init__(self, offset=0):
        self.offset = int(offset)

    def __call__(self, m):
        return FinVec.basis(int(m) + self.offset)

    def to_json(self):
        return {"kind": "standard", "offset": self.offset}


class BuildState:
    """Everything a construction has produced so far.

    Attributes
    ----------
    us : OrthoFamily
        The constructed vectors ``u_1 .. u_n``.
    seeds : SeedFamily
        The spanning sequence ``y_m`` driven to zero residual.
    residual_norms : dict
        ``m -> [(n, ||(I - P_n) y_m||), ...]`` recorded at steps that
        touched ``y_m``.
    aux : dict
        Construction-specific carry-over (``v``, ``z``, ``b``, ``w``, ...).
    records : list of StepRecord
    params : dict
        Derived constants of the construction.
    """

    def __init__(self, construction, operator, seeds=None, params=None):
        self.construction = construction
        self.operator = operator
        self.seeds = seeds or SeedFamily()
        self.us = OrthoFamily()
        self.residual_norms = {}
        self.aux = {}
        self.records = []
        self.params = dict(params or {})

    @property
    def n(self):
        return len(self.us)

    def seed_residual(self, m):
        return self.us.residual(self.seeds(m))

    def seed_direction(self, m):
        """``(||r||, b)`` with ``b`` the unit seed residual, re-projected after normalizing.

        ``b`` is ``None`` once ``||r|| <= MEMBERSHIP_TOL``.
        """
        r = self.seed_residual(m)
        rn = r.norm
        if rn <= MEMBERSHIP_TOL:
            return rn, None
        b = self.us.residual(r / rn)
        return rn, b / b.norm

    def seed_in_span(self, m):
        return self.seed_residual(m).norm <= MEMBERSHIP_TOL

    def append(self, u, record):
        if record.n != self.n + 1:
            raise ValueError(f"record for step {record.n} appended at step {self.n + 1}")
        try:
            self.us = self.us.extended(u)
        except ValueError as exc:
            err = ConstructionError(str(exc), step=record.n)
            err.partial = self
            raise err from exc
        if record.m is not None and record.residual_after is not None:
            self.residual_norms.setdefault(record.m, []).append((record.n, record.residual_after))
        self.records.append(record)

    def to_json(self):
        return {
            "construction": self.construction,
            "operator": self.operator.to_json(),
            "seeds": self.seeds.to_json(),
            "params": _jsonable(self.params),
            "basis": [u.to_json() for u in self.us],
            "residual_norms": {str(m): [[n, r] for n, r in v] for m, v in sorted(self.residual_norms.items())},
        }


class step_context:
    """Attach the step index (and the partial state, if given) to errors raised inside."""

    def __init__(self, n, state=None):
        self.n = n
        self.state = state

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and hasattr(exc, "step") and exc.step is None:
            exc.step = self.n
        if exc is not None and self.state is not None and getattr(exc, "partial", None) is None:
            try:
                exc.partial = self.state
            except AttributeError:
                pass
        return False

