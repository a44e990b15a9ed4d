"""Banded operators on l2(N) given by entry oracles.

An operator is described by its diagonals: ``diagonal(k, cols)`` returns
``<T e_n, e_{n+k}>`` for every ``n`` in ``cols``, for offsets
``|k| <= band_width``.  Entries whose row index would fall below 1 are
zero.  Everything else (``apply``, ``apply_adjoint``, compressions) is
derived from that one method.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..numrange.region import (
    ConvexRegion,
    Disk,
    Point,
    convex_hull,
    hull_of_regions,
    parse_complex,
    region_from_json,
)
from ..sequences import Sequence
from .finvec import FinVec, inner_product


class OperatorModel:
    """Base class for banded entry-oracle operators.

    Subclasses set ``band_width``, ``norm_bound`` and ``we_region`` and
    implement :meth:`diagonal`.
    """

    kind = "operator"
    band_width = 0
    norm_bound = 0.0
    we_region: ConvexRegion

    def diagonal(self, k, cols):
        raise NotImplementedError

    def entry(self, j, n):
        """``<T e_n, e_j>``."""
        k = j - n
        if abs(k) > self.band_width or j < 1 or n < 1:
            return 0j
        return complex(self.diagonal(k, np.array([n], dtype=np.int64))[0])

    def apply(self, x):
        if x.is_zero():
            return FinVec()
        idx, val = x.indices, x.values
        parts_i, parts_v = [], []
        for k in range(-self.band_width, self.band_width + 1):
            rows = idx + k
            ok = rows >= 1
            if not ok.any():
                continue
            d = self.diagonal(k, idx[ok])
            parts_i.append(rows[ok])
            parts_v.append(d * val[ok])
        if not parts_i:
            return FinVec()
        return FinVec.from_arrays(np.concatenate(parts_i), np.concatenate(parts_v))

    def apply_adjoint(self, x):
        if x.is_zero():
            return FinVec()
        idx, val = x.indices, x.values
        parts_i, parts_v = [], []
        for k in range(-self.band_width, self.band_width + 1):
            cols = idx - k
            ok = cols >= 1
            if not ok.any():
                continue
            d = self.diagonal(k, cols[ok])
            parts_i.append(cols[ok])
            parts_v.append(np.conj(d) * val[ok])
        if not parts_i:
            return FinVec()
        return FinVec.from_arrays(np.concatenate(parts_i), np.concatenate(parts_v))

    def compress(self, start, length):
        """Dense matrix ``A[r, c] = <T e_{start+c}, e_{start+r}>``."""
        if start < 1:
            raise ValueError("window must start at index >= 1")
        A = np.zeros((length, length), dtype=np.complex128)
        cols = np.arange(start, start + length, dtype=np.int64)
        for k in range(-self.band_width, self.band_width + 1):
            if abs(k) >= length:
                continue
            c = np.arange(max(0, -k), length - max(0, k))
            A[c + k, c] = self.diagonal(k, cols[c])
        return A

    def matrix_entry(self, u_col, u_row):
        return matrix_entry(self, u_col, u_row)

    def to_json(self):
        raise NotImplementedError


def apply(T, x):
    return T.apply(x)


def apply_adjoint(T, x):
    return T.apply_adjoint(x)


def matrix_entry(T, u_col, u_row):
    """``<T u_col, u_row>``: the (row, col) entry of the matrix of ``T``."""
    return inner_product(T.apply(u_col), u_row)


class WeightedShift(OperatorModel):
    """``e_n -> w_n e_{n+1}``; the unilateral shift has ``w_n = 1``."""

    kind = "weighted_shift"
    band_width = 1

    def __init__(self, weights=1.0, we_region=None):
        if isinstance(weights, Sequence):
            self.weights = weights
        else:
            self.weights = Sequence({"kind": "constant", "value": [complex(weights).real, complex(weights).imag]})
        lim = self.weights.limit_points()
        if self.weights.kind == "constant":
            w = abs(lim[0])
            self.norm_bound = w
            default = Disk(0, w) if w > 0 else Point(0)
        elif self.weights.kind == "explicit" and self.weights.spec.get("periodic"):
            self.norm_bound = float(np.max(np.abs(self.weights._values)))
            default = None
        else:
            raise ConfigError("weighted_shift weights must be constant or periodic explicit")
        if we_region is None and default is None:
            raise ConfigError("weighted_shift with non-constant weights needs an explicit we_region")
        self.we_region = we_region if we_region is not None else default

    def diagonal(self, k, cols):
        if k != 1:
            return np.zeros(cols.shape, dtype=np.complex128)
        return self.weights(cols)

    def to_json(self):
        doc = {"kind": "weighted_shift", "weights": self.weights.to_json()}
        doc["we_region"] = self.we_region.to_json()
        return doc


class Shift(WeightedShift):
    kind = "shift"

    def __init__(self, we_region=None):
        super().__init__(1.0, we_region=we_region)

    def to_json(self):
        return {"kind": "shift", "we_region": self.we_region.to_json()}


class Diagonal(OperatorModel):
    """``e_n -> d_n e_n``."""

    kind = "diagonal"
    band_width = 0

    def __init__(self, diag, we_region=None, norm_bound=None):
        self.diag = diag
        lim = diag.limit_points()
        if we_region is None:
            if lim is None:
                raise ConfigError("diagonal with this sequence kind needs an explicit we_region")
            we_region = convex_hull(lim)
        self.we_region = we_region
        if norm_bound is None:
            if diag.kind == "harmonic":
                norm_bound = float(np.max(np.abs(diag.values(1))))
                if diag._power < 0:
                    raise ConfigError("harmonic diagonal with negative power is unbounded")
            elif diag.kind == "constant":
                norm_bound = abs(diag._value)
            elif diag.kind == "explicit":
                norm_bound = float(np.max(np.abs(diag._values)))
            else:
                raise ConfigError("diagonal with this sequence kind needs an explicit norm_bound")
        self.norm_bound = float(norm_bound)

    def diagonal(self, k, cols):
        if k != 0:
            return np.zeros(cols.shape, dtype=np.complex128)
        return self.diag(cols)

    def to_json(self):
        return {
            "kind": "diagonal",
            "diag": self.diag.to_json(),
            "we_region": self.we_region.to_json(),
            "norm_bound": self.norm_bound,
        }


class ToeplitzBanded(OperatorModel):
    """``<T e_n, e_{n+k}> = c_k`` for finitely many offsets ``k``.

    The essential numerical range is the convex hull of the symbol curve
    ``sum_k c_k z^k`` on the unit circle.  A single off-diagonal gives an
    exact disk; otherwise an inscribed 512-gon is used, which is a subset
    of the true region.
    """

    kind = "toeplitz_banded"

    def __init__(self, coefficients, we_region=None):
        self.coefficients = {int(k): complex(v) for k, v in coefficients.items() if complex(v) != 0}
        self.band_width = max((abs(k) for k in self.coefficients), default=0)
        self.norm_bound = float(sum(abs(v) for v in self.coefficients.values()))
        if we_region is None:
            we_region = self._symbol_hull()
        self.we_region = we_region

    def _symbol_hull(self, n=512):
        c0 = self.coefficients.get(0, 0j)
        off = {k: v for k, v in self.coefficients.items() if k != 0}
        if not off:
            return Point(c0)
        if len(off) == 1:
            return Disk(c0, abs(next(iter(off.values()))))
        z = np.exp(2j * np.pi * np.arange(n) / n)
        sym = sum(v * z**k for k, v in self.coefficients.items())
        return convex_hull(sym)

    def diagonal(self, k, cols):
        return np.full(cols.shape, self.coefficients.get(k, 0j), dtype=np.complex128)

    def to_json(self):
        return {
            "kind": "toeplitz_banded",
            "coefficients": {str(k): [v.real, v.imag] for k, v in sorted(self.coefficients.items())},
            "we_region": self.we_region.to_json(),
        }


class Affine(OperatorModel):
    """``alpha * T + beta * I``."""

    kind = "affine"

    def __init__(self, base, alpha=1.0, beta=0.0, we_region=None):
        self.base = base
        self.alpha = complex(alpha)
        self.beta = complex(beta)
        self.band_width = base.band_width
        self.norm_bound = abs(self.alpha) * base.norm_bound + abs(self.beta)
        self.we_region = we_region if we_region is not None else base.we_region.affine(self.alpha, self.beta)

    def diagonal(self, k, cols):
        d = self.alpha * self.base.diagonal(k, cols)
        if k == 0:
            d = d + self.beta
        return d

    def to_json(self):
        return {
            "kind": "affine",
            "alpha": [self.alpha.real, self.alpha.imag],
            "beta": [self.beta.real, self.beta.imag],
            "base": self.base.to_json(),
            "we_region": self.we_region.to_json(),
        }


class DirectSum(OperatorModel):
    """``A (+) B`` on l2(N) by interleaving: ``e_{2n-1}`` carries A, ``e_{2n}`` carries B."""

    kind = "direct_sum"

    def __init__(self, left, right, we_region=None):
        self.left, self.right = left, right
        self.band_width = 2 * max(left.band_width, right.band_width)
        self.norm_bound = max(left.norm_bound, right.norm_bound)
        self.we_region = we_region if we_region is not None else hull_of_regions([left.we_region, right.we_region])

    def diagonal(self, k, cols):
        out = np.zeros(cols.shape, dtype=np.complex128)
        if k % 2:
            return out
        h = k // 2
        odd = cols % 2 == 1
        if odd.any() and abs(h) <= self.left.band_width:
            c = (cols[odd] + 1) // 2
            ok = c + h >= 1
            vals = np.zeros(c.shape, dtype=np.complex128)
            vals[ok] = self.left.diagonal(h, c[ok])
            out[odd] = vals
        even = ~odd
        if even.any() and abs(h) <= self.right.band_width:
            c = cols[even] // 2
            ok = c + h >= 1
            vals = np.zeros(c.shape, dtype=np.complex128)
            vals[ok] = self.right.diagonal(h, c[ok])
            out[even] = vals
        return out

    def to_json(self):
        return {
            "kind": "direct_sum",
            "summands": [self.left.to_json(), self.right.to_json()],
            "we_region": self.we_region.to_json(),
        }


class Perturbed(OperatorModel):
    """``T + F`` with ``F`` a finite matrix of explicit entries.

    ``F`` is compact, so the essential numerical range is that of ``T``.
    """

    kind = "perturbed"

    def __init__(self, base, entries, we_region=None):
        self.base = base
        self.entries = {(int(j), int(n)): complex(v) for (j, n), v in entries.items()}
        if any(j < 1 or n < 1 for j, n in self.entries):
            raise ConfigError("perturbation indices start at 1")
        self.band_width = max([base.band_width] + [abs(j - n) for j, n in self.entries])
        frob = float(np.sqrt(sum(abs(v) ** 2 for v in self.entries.values())))
        self.norm_bound = base.norm_bound + frob
        self.we_region = we_region if we_region is not None else base.we_region

    def diagonal(self, k, cols):
        if abs(k) <= self.base.band_width:
            out = np.array(self.base.diagonal(k, cols), dtype=np.complex128)
        else:
            out = np.zeros(cols.shape, dtype=np.complex128)
        for (j, n), v in self.entries.items():
            if j - n == k:
                out[cols == n] += v
        return out

    def to_json(self):
        return {
            "kind": "perturbed",
            "base": self.base.to_json(),
            "entries": [[j, n, v.real, v.imag] for (j, n), v in sorted(self.entries.items())],
            "we_region": self.we_region.to_json(),
        }


def scaled(T, factor):
    """``factor * T`` as an :class:`Affine` model."""
    return Affine(T, alpha=factor, beta=0.0)


_OP_KEYS = {
    "shift": set(),
    "weighted_shift": {"weights", "weight"},
    "diagonal": {"diag"},
    "toeplitz_banded": {"coefficients"},
    "affine": {"alpha", "beta", "base"},
    "direct_sum": {"summands"},
    "perturbed": {"base", "entries"},
}
_COMMON = {"kind", "we_region", "norm_bound"}


def operator_from_json(doc, seed=0):
    """Build an :class:`OperatorModel` from its JSON description."""
    if not isinstance(doc, dict) or doc.get("kind") not in _OP_KEYS:
        raise ConfigError(f"unknown operator document {doc!r}")
    kind = doc["kind"]
    extra = set(doc) - _COMMON - _OP_KEYS[kind]
    if extra:
        raise ConfigError(f"unknown keys in {kind} operator: {sorted(extra)}")
    region = region_from_json(doc["we_region"]) if "we_region" in doc else None
    try:
        if kind == "shift":
            op = Shift(we_region=region)
        elif kind == "weighted_shift":
            if "weights" in doc:
                w = Sequence(doc["weights"], seed=seed, salt=101)
            else:
                w = parse_complex(doc.get("weight", 1.0))
            op = WeightedShift(w, we_region=region)
        elif kind == "diagonal":
            op = Diagonal(Sequence(doc["diag"], seed=seed, salt=102), we_region=region,
                          norm_bound=doc.get("norm_bound"))
        elif kind == "toeplitz_banded":
            coefs = {int(k): parse_complex(v) for k, v in doc["coefficients"].items()}
            op = ToeplitzBanded(coefs, we_region=region)
        elif kind == "affine":
            op = Affine(
                operator_from_json(doc["base"], seed),
                parse_complex(doc.get("alpha", 1.0)),
                parse_complex(doc.get("beta", 0.0)),
                we_region=region,
            )
        elif kind == "direct_sum":
            summands = doc["summands"]
            if not isinstance(summands, list) or len(summands) != 2:
                raise ConfigError("direct_sum takes exactly two summands")
            op = DirectSum(*(operator_from_json(s, seed) for s in summands), we_region=region)
        else:
            entries = {(int(e[0]), int(e[1])): complex(float(e[2]), float(e[3])) for e in doc["entries"]}
            op = Perturbed(operator_from_json(doc["base"], seed), entries, we_region=region)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid {kind} operator: {exc}") from exc
    if "norm_bound" in doc and kind != "diagonal":
        nb = float(doc["norm_bound"])
        if nb < op.norm_bound - 1e-12:
            raise ConfigError(f"norm_bound {nb} is below the computed bound {op.norm_bound}")
        op.norm_bound = nb
    return op
