"""Finitely supported complex vectors over the standard basis of l2(N).

Indices start at 1, matching ``e_1, e_2, ...``.  A vector stores a sorted
array of indices and the matching complex coefficients; coefficients with
modulus below :data:`PRUNE` are dropped on construction.
"""

from __future__ import annotations

import numpy as np

PRUNE = 1e-15

_EMPTY_IDX = np.zeros(0, dtype=np.int64)
_EMPTY_VAL = np.zeros(0, dtype=np.complex128)


def _freeze(a):
    a.setflags(write=False)
    return a


class FinVec:
    """Immutable sparse complex vector.

    Parameters
    ----------
    entries : dict, optional
        Mapping ``index -> coefficient``.  Indices must be integers >= 1.

    Examples
    --------
    >>> v = FinVec({1: 1.0, 2: 1j})
    >>> v[2]
    1j
    >>> v.norm2
    2.0
    """

    __slots__ = ("_idx", "_val")

    def __init__(self, entries=None):
        if entries:
            idx = np.fromiter(entries.keys(), dtype=np.int64, count=len(entries))
            val = np.fromiter(
                (complex(v) for v in entries.values()), dtype=np.complex128, count=len(entries)
            )
            self._set(*_sum_duplicates(idx, val))
        else:
            self._idx = _EMPTY_IDX
            self._val = _EMPTY_VAL

    def _set(self, idx, val):
        if idx.size and idx[0] < 1:
            raise ValueError(f"basis indices start at 1, got {int(idx[0])}")
        keep = np.abs(val) >= PRUNE
        if not keep.all():
            idx, val = idx[keep], val[keep]
        self._idx = _freeze(np.ascontiguousarray(idx, dtype=np.int64))
        self._val = _freeze(np.ascontiguousarray(val, dtype=np.complex128))

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_arrays(cls, indices, values, *, assume_sorted=False):
        """Build from parallel arrays; duplicate indices are summed."""
        idx = np.asarray(indices, dtype=np.int64).ravel()
        val = np.asarray(values, dtype=np.complex128).ravel()
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        obj = cls.__new__(cls)
        if assume_sorted:
            obj._set(idx, val)
        else:
            obj._set(*_sum_duplicates(idx, val))
        return obj

    @classmethod
    def from_dense(cls, start, values):
        """Vector whose coefficients ``values[k]`` sit at index ``start + k``."""
        values = np.asarray(values, dtype=np.complex128).ravel()
        idx = np.arange(start, start + values.size, dtype=np.int64)
        return cls.from_arrays(idx, values, assume_sorted=True)

    @classmethod
    def basis(cls, k, coef=1.0):
        """The scaled standard basis vector ``coef * e_k``."""
        return cls.from_arrays([k], [coef], assume_sorted=True)

    @classmethod
    def zero(cls):
        return cls()

    # -- views --------------------------------------------------------------

    @property
    def indices(self):
        return self._idx

    @property
    def values(self):
        return self._val

    def entries(self):
        return {int(i): complex(v) for i, v in zip(self._idx, self._val)}

    def __getitem__(self, k):
        pos = np.searchsorted(self._idx, k)
        if pos < self._idx.size and self._idx[pos] == k:
            return complex(self._val[pos])
        return 0j

    def __len__(self):
        return int(self._idx.size)

    @property
    def support_size(self):
        return int(self._idx.size)

    @property
    def max_index(self):
        """Largest supported index, 0 for the zero vector."""
        return int(self._idx[-1]) if self._idx.size else 0

    @property
    def min_index(self):
        return int(self._idx[0]) if self._idx.size else 0

    def is_zero(self):
        return self._idx.size == 0

    @property
    def norm2(self):
        return float(np.vdot(self._val, self._val).real)

    @property
    def norm(self):
        return float(np.linalg.norm(self._val))

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, FinVec):
            return NotImplemented
        return combine([1.0, 1.0], [self, other])

    def __sub__(self, other):
        if not isinstance(other, FinVec):
            return NotImplemented
        return combine([1.0, -1.0], [self, other])

    def __neg__(self):
        return self.scaled(-1.0)

    def __mul__(self, c):
        if isinstance(c, FinVec):
            return NotImplemented
        return self.scaled(c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scaled(1.0 / c)

    def scaled(self, c):
        return FinVec.from_arrays(self._idx, self._val * complex(c), assume_sorted=True)

    def conj(self):
        return FinVec.from_arrays(self._idx, self._val.conj(), assume_sorted=True)

    def normalized(self):
        n = self.norm
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return self.scaled(1.0 / n)

    def inner(self, other):
        """``<self, other>``: linear in self, conjugate-linear in other."""
        return inner_product(self, other)

    def dense(self, start, length):
        """Coefficients on the window ``[start, start + length)``."""
        out = np.zeros(length, dtype=np.complex128)
        lo = np.searchsorted(self._idx, start)
        hi = np.searchsorted(self._idx, start + length)
        out[self._idx[lo:hi] - start] = self._val[lo:hi]
        return out

    def allclose(self, other, atol=1e-12):
        return (self - other).norm <= atol

    def __repr__(self):
        if self._idx.size > 6:
            return f"FinVec(<{self._idx.size} entries in [{self.min_index}, {self.max_index}]>)"
        return f"FinVec({self.entries()!r})"

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return {
            "indices": [int(i) for i in self._idx],
            "re": [float(v) for v in self._val.real],
            "im": [float(v) for v in self._val.imag],
        }

    @classmethod
    def from_json(cls, doc):
        idx = np.asarray(doc["indices"], dtype=np.int64)
        val = np.asarray(doc["re"], dtype=np.float64) + 1j * np.asarray(doc["im"], dtype=np.float64)
        return cls.from_arrays(idx, val)


def _sum_duplicates(idx, val):
    if idx.size == 0:
        return _EMPTY_IDX, _EMPTY_VAL
    if idx.size > 1 and np.all(idx[1:] > idx[:-1]):
        return idx, val
    uniq, inv = np.unique(idx, return_inverse=True)
    re = np.bincount(inv, weights=val.real, minlength=uniq.size)
    im = np.bincount(inv, weights=val.imag, minlength=uniq.size)
    return uniq, re + 1j * im


def inner_product(u, v):
    """Return ``sum_k u(k) * conj(v(k))``."""
    a, b = (u, v) if u.support_size <= v.support_size else (v, u)
    if a.support_size == 0:
        return 0j
    pos = np.searchsorted(b.indices, a.indices)
    pos[pos >= b.indices.size] = 0
    hit = b.indices[pos] == a.indices
    if not hit.any():
        return 0j
    av = a.values[hit]
    bv = b.values[pos[hit]]
    if a is u:
        return complex(np.dot(av, bv.conj()))
    return complex(np.dot(bv, av.conj()))


def combine(coeffs, vecs):
    """Linear combination ``sum_i coeffs[i] * vecs[i]``."""
    parts_i = [v.indices for v in vecs if v.support_size]
    if not parts_i:
        return FinVec()
    parts_v = [complex(c) * v.values for c, v in zip(coeffs, vecs) if v.support_size]
    idx = np.concatenate(parts_i)
    val = np.concatenate(parts_v)
    return FinVec.from_arrays(idx, val)


def stack_dense(vecs):
    """Stack vectors as rows of a dense matrix over their union support.

    Returns ``(columns, matrix)`` where ``columns`` are the global indices.
    """
    if not vecs:
        return _EMPTY_IDX, np.zeros((0, 0), dtype=np.complex128)
    cols = np.unique(np.concatenate([v.indices for v in vecs] + [_EMPTY_IDX]))
    mat = np.zeros((len(vecs), cols.size), dtype=np.complex128)
    for r, v in enumerate(vecs):
        mat[r, np.searchsorted(cols, v.indices)] = v.values
    return cols, mat


def unstack_dense(cols, row):
    """Inverse of :func:`stack_dense` for one row."""
    return FinVec.from_arrays(cols, row, assume_sorted=True)
