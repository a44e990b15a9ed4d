"""Finite orthonormal families and residuals against their span."""

from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .finvec import FinVec, inner_product, stack_dense


def _rows_to_csr(vecs, dim):
    indptr = np.zeros(len(vecs) + 1, dtype=np.int64)
    if vecs:
        indptr[1:] = np.cumsum([v.support_size for v in vecs])
        indices = np.concatenate([v.indices for v in vecs])
        data = np.concatenate([v.values for v in vecs])
    else:
        indices = np.zeros(0, dtype=np.int64)
        data = np.zeros(0, dtype=np.complex128)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vecs), dim))


def _csr_rows_to_finvecs(mat):
    mat = mat.tocsr()
    mat.sort_indices()
    out = []
    for r in range(mat.shape[0]):
        lo, hi = mat.indptr[r], mat.indptr[r + 1]
        out.append(FinVec.from_arrays(mat.indices[lo:hi], mat.data[lo:hi], assume_sorted=True))
    return out


class OrthoFamily:
    """An ordered, immutable orthonormal list of :class:`FinVec`.

    ``extended`` returns a new family; the Gram invariant
    ``|<u_i, u_j> - delta_ij| <= gram_tolerance`` is checked for the new row
    on every extension.
    """

    def __init__(self, vectors=(), gram_tolerance=1e-10, check=True):
        self._vectors = tuple(vectors)
        self.gram_tolerance = float(gram_tolerance)
        if check and self._vectors:
            err = self.gram_error()
            if err > self.gram_tolerance:
                raise ValueError(f"family is not orthonormal: Gram error {err:.3e}")

    @property
    def vectors(self):
        return self._vectors

    def __len__(self):
        return len(self._vectors)

    def __getitem__(self, i):
        return self._vectors[i]

    def __iter__(self):
        return iter(self._vectors)

    @cached_property
    def max_index(self):
        return max((v.max_index for v in self._vectors), default=0)

    @cached_property
    def _rows(self):
        return _rows_to_csr(list(self._vectors), self.max_index + 1)

    def _matrix(self, dim):
        rows = self._rows
        if rows.shape[1] == dim:
            return rows
        return sp.csr_matrix((rows.data, rows.indices, rows.indptr), shape=(len(self), dim))

    def prefix(self, k):
        return OrthoFamily(self._vectors[:k], self.gram_tolerance, check=False)

    def extended(self, u, check=True):
        """Family with ``u`` appended."""
        if check:
            err = abs(u.norm2 - 1.0)
            if self._vectors:
                err = max(err, float(np.max(np.abs(self.coefficients(u)))))
            if err > self.gram_tolerance:
                raise ValueError(f"appending breaks orthonormality: error {err:.3e}")
        return OrthoFamily(self._vectors + (u,), self.gram_tolerance, check=False)

    @cached_property
    def _adjoint(self):
        """``Q^H`` as CSC of shape ``(max_index + 1, len)``."""
        return self._rows.conj().T.tocsc()

    def _dense(self, vecs):
        dim = max(self.max_index, max(v.max_index for v in vecs)) + 1
        X = np.zeros((len(vecs), dim), dtype=np.complex128)
        for r, v in enumerate(vecs):
            X[r, v.indices] = v.values
        return X

    def coefficients(self, u):
        """``[<u, q_i>]`` for every member ``q_i``."""
        return self.coefficients_many([u])[:, 0]

    def coefficients_many(self, vecs):
        """Matrix ``C[i, k] = <vecs[k], q_i>``."""
        vecs = list(vecs)
        if not self._vectors or not vecs:
            return np.zeros((len(self), len(vecs)), dtype=np.complex128)
        D = self.max_index + 1
        X = self._dense(vecs)
        return np.asarray(X[:, :D] @ self._adjoint).T

    def residual(self, u, passes=2):
        """``(I - P) u`` with ``P`` the orthogonal projection onto the span."""
        return self.residual_many([u], passes=passes)[0]

    def residual_many(self, vecs, passes=2):
        """Residuals of several vectors, re-orthogonalized ``passes`` times."""
        vecs = list(vecs)
        if not self._vectors or not vecs:
            return vecs
        return [FinVec.from_dense(1, row[1:]) for row in self.residual_dense(self._dense(vecs), passes)]

    def residual_dense(self, X, passes=2):
        """Residuals of the rows of a dense array indexed from 0 (column ``k`` is ``e_k``)."""
        X = np.array(X, dtype=np.complex128, copy=True)
        if not self._vectors:
            return X
        D = self.max_index + 1
        if X.shape[1] < D:
            X = np.concatenate([X, np.zeros((X.shape[0], D - X.shape[1]), dtype=np.complex128)], axis=1)
        for _ in range(passes):
            C = np.asarray(X[:, :D] @ self._adjoint)
            X[:, :D] -= np.asarray(self._rows.T @ C.T).T
        return X

    def gram(self):
        """Dense Gram matrix ``G[i, j] = <q_j, q_i>``."""
        if not self._vectors:
            return np.zeros((0, 0), dtype=np.complex128)
        fam = self._rows
        return (fam.conj() @ fam.T).toarray()

    def gram_error(self):
        n = len(self)
        if n == 0:
            return 0.0
        return float(np.max(np.abs(self.gram() - np.eye(n))))


def residual(u, family, passes=2):
    """``(I - P) u`` where ``P`` projects onto ``span(family)``."""
    if not isinstance(family, OrthoFamily):
        family = OrthoFamily(family, check=False)
    return family.residual(u, passes=passes)


def orthonormalize(vecs, drop_tol=1e-12):
    """Gram-Schmidt (two passes) over ``vecs``; near-dependent vectors are dropped."""
    vecs = list(vecs)
    if not vecs:
        return OrthoFamily(check=False)
    cols, X = stack_dense(vecs)
    out = np.zeros_like(X)
    k = 0
    for r in range(X.shape[0]):
        x = X[r].copy()
        scale = np.linalg.norm(x)
        for _ in range(2):
            x -= out[:k].T @ (out[:k].conj() @ x)
        nx = np.linalg.norm(x)
        if nx > drop_tol * max(1.0, scale):
            out[k] = x / nx
            k += 1
    return OrthoFamily([FinVec.from_arrays(cols, row, assume_sorted=True) for row in out[:k]], check=False)


__all__ = ["OrthoFamily", "residual", "orthonormalize", "inner_product"]
