"""Index partitions ``n -> m(n)`` and weight sparsification used by the constructions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_BLOCK_EPS = 1e-12


def two_adic_valuation(n):
    """Largest ``m`` with ``2**m`` dividing ``n`` (``n >= 1``)."""
    n = int(n)
    if n < 1:
        raise ValueError("valuation is defined for n >= 1")
    return (n & -n).bit_length() - 1


def round_robin_labels():
    """Labels 1; 1, 2; 1, 2, 3; ... so every label recurs infinitely often."""
    top = 1
    while True:
        yield from range(1, top + 1)
        top += 1


@dataclass(frozen=True)
class Block:
    label: int
    members: tuple
    weight: float
    complete: bool


@dataclass(frozen=True)
class PartitionScheme:
    """A partition of a finite index set into classes ``A_m``.

    ``kind`` is ``"residue"`` (classes ``n mod modulus`` with a selected
    residue ``r0``), ``"greedy_blocks"`` (consecutive blocks of weight at
    least ``block_target`` labelled round-robin) or ``"dyadic"`` (``m(n)``
    is the 2-adic valuation).
    """

    kind: str
    horizon: int
    modulus: int = 0
    r0: int = 0
    blocks: tuple = field(default_factory=tuple)
    block_target: float = 1.0
    _assign: dict = field(default_factory=dict, repr=False, compare=False)

    def m(self, n):
        n = int(n)
        if self.kind == "dyadic":
            return two_adic_valuation(n)
        if self.kind == "residue":
            return n % self.modulus
        try:
            return self._assign[n]
        except KeyError:
            raise KeyError(f"index {n} is not covered by this partition") from None

    def __contains__(self, n):
        if self.kind == "greedy_blocks":
            return int(n) in self._assign
        return 1 <= int(n) <= self.horizon

    def successor(self, n):
        """Smallest covered index greater than ``n``."""
        if self.kind != "greedy_blocks":
            return int(n) + 1
        later = [k for k in self._assign if k > n]
        if not later:
            raise KeyError(f"no covered index after {n} within the horizon")
        return min(later)

    def members(self, m):
        """Enumeration of ``A_m`` up to the horizon."""
        if self.kind == "greedy_blocks":
            return sorted(n for n, lab in self._assign.items() if lab == m)
        return [n for n in range(1, self.horizon + 1) if self.m(n) == m]

    def labels(self):
        if self.kind == "greedy_blocks":
            return sorted(set(self._assign.values()))
        if self.kind == "residue":
            return list(range(self.modulus))
        return sorted({self.m(n) for n in range(1, self.horizon + 1)})

    def selected(self):
        """Members of the selected residue class ``B_{r0}``."""
        if self.kind != "residue":
            raise TypeError("only residue partitions have a selected class")
        return self.members(self.r0)


def residue_partition(K, horizon, r0=0):
    return PartitionScheme("residue", int(horizon), modulus=int(K) + 1, r0=int(r0))


def dyadic_partition(horizon):
    return PartitionScheme("dyadic", int(horizon))


def greedy_blocks(indices, weights, block_target=1.0):
    """Cut ``indices`` (in order) into consecutive blocks of weight ``>= block_target``.

    Blocks are labelled 1; 1, 2; 1, 2, 3; ...  The last block may be
    incomplete; it keeps its label and is flagged ``complete=False``.
    """
    indices = [int(i) for i in indices]
    weights = np.asarray(weights, dtype=float)
    if len(indices) != weights.size:
        raise ValueError("indices and weights differ in length")
    if np.any(weights < 0):
        raise ValueError("block weights must be non-negative")
    labels = round_robin_labels()
    blocks, assign = [], {}
    cur, acc = [], 0.0
    lab = next(labels)
    for n, w in zip(indices, weights):
        cur.append(n)
        assign[n] = lab
        acc += float(w)
        if acc >= block_target - _BLOCK_EPS:
            blocks.append(Block(lab, tuple(cur), acc, True))
            cur, acc = [], 0.0
            lab = next(labels)
    if cur:
        blocks.append(Block(lab, tuple(cur), acc, False))
    horizon = max(indices, default=0)
    return PartitionScheme(
        "greedy_blocks", horizon, blocks=tuple(blocks), block_target=float(block_target), _assign=assign
    )


def select_residue_class(lams, region, K):
    """Residue ``r0`` in ``0..K`` whose class carries the most interior depth.

    The depth of ``lam_n`` is its distance to the boundary of ``region``
    when it is interior and zero otherwise; ties go to the smallest ``r``.
    ``lams[0]`` is ``lam_1``.
    """
    lams = list(lams)
    if not lams:
        raise ValueError("need at least one value")
    sums = np.zeros(int(K) + 1)
    for n, lam in enumerate(lams, start=1):
        sums[n % (K + 1)] += max(region.interior_margin(lam), 0.0)
    best = sums.max()
    return int(np.nonzero(sums >= best)[0][0])


@dataclass(frozen=True)
class Sparsified:
    """Result of :func:`sparsify_weights`.

    ``blocks`` lists ``(k, first, last)`` (1-based, inclusive) for completed
    blocks.  ``remainder`` is ``(k, first)`` for a trailing block that did
    not reach weight ``k`` within the prefix, else ``None``; its entries
    still carry ``a'_n = min(1, a_n / k)``.
    """

    a_prime: np.ndarray
    blocks: tuple
    remainder: tuple | None

    def block_of(self, n):
        for k, lo, hi in self.blocks:
            if lo <= n <= hi:
                return k
        if self.remainder is not None and n >= self.remainder[1]:
            return self.remainder[0]
        raise IndexError(n)


def sparsify_weights(a):
    """Blockwise damping ``a'_n = min(1, a_n / k)`` on blocks of ``a``-weight ``>= k``.

    Parameters
    ----------
    a : array_like
        Positive weights ``a_1, a_2, ...``.

    Returns
    -------
    Sparsified
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise ValueError("weights must be finite and positive")
    out = np.empty_like(a)
    blocks = []
    k, first, acc = 1, 0, 0.0
    for i, x in enumerate(a):
        out[i] = min(1.0, x / k)
        acc += x
        if acc >= k:
            blocks.append((k, first + 1, i + 1))
            k, first, acc = k + 1, i + 1, 0.0
    rem = (k, first + 1) if first < a.size else None
    return Sparsified(out, tuple(blocks), rem)
