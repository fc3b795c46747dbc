"""Vertex sets as bitmasks, and exhaustive subset enumeration.

Every sweep in the package walks bitmasks in ascending order, so "first
best" always means "smallest bitmask", whatever the chunking.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import TooManyStates
from .kernel import MarkovKernel

MAX_STATES = 24
HALF_SLACK = 1e-12
CHUNK = 1 << 16


@dataclass(frozen=True)
class VertexSet:
    bits: int
    measure: float
    n: int

    @classmethod
    def of(cls, K: MarkovKernel, states: Iterable[int]) -> "VertexSet":
        bits = 0
        for s in states:
            if not 0 <= s < K.n:
                raise ValueError(f"state {s} out of range for n={K.n}")
            bits |= 1 << s
        return cls.from_bits(K, bits)

    @classmethod
    def from_bits(cls, K: MarkovKernel, bits: int) -> "VertexSet":
        if bits < 0 or bits >> K.n:
            raise ValueError(f"bitmask {bits} has bits outside 0..{K.n - 1}")
        return cls(bits, float(sum(K.pi[i] for i in iter_members(bits))), K.n)

    def complement(self, K: MarkovKernel) -> "VertexSet":
        return VertexSet.from_bits(K, self.bits ^ K.full_mask)

    def members(self) -> list[int]:
        return list(iter_members(self.bits))

    def indicator(self) -> np.ndarray:
        return indicator(self.n, self.bits)

    def __contains__(self, x: int) -> bool:
        return bool((self.bits >> x) & 1)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __iter__(self):
        return iter_members(self.bits)

    @property
    def is_proper(self) -> bool:
        return 0 < self.bits < (1 << self.n) - 1


def iter_members(bits: int) -> Iterator[int]:
    i = 0
    while bits:
        if bits & 1:
            yield i
        bits >>= 1
        i += 1


def indicator(n: int, bits: int) -> np.ndarray:
    return np.array([(bits >> i) & 1 for i in range(n)], dtype=float)


def check_size(n: int) -> None:
    if n > MAX_STATES:
        raise TooManyStates(f"exhaustive enumeration is capped at n={MAX_STATES}, got n={n}")


def bit_matrix(n: int, masks: np.ndarray) -> np.ndarray:
    """Boolean matrix with row ``i`` the membership vector of ``masks[i]``."""
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def all_measures(K: MarkovKernel) -> np.ndarray:
    """``pi(mask)`` for every mask in ``0 .. 2^n - 1``."""
    check_size(K.n)
    meas = np.zeros(1 << K.n)
    for i in range(K.n):
        lo = 1 << i
        meas[lo: 2 * lo] = meas[:lo] + K.pi[i]
    return meas


def mask_chunks(K: MarkovKernel, half_only: bool = False, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Proper-subset bitmasks in ascending order, as int64 arrays of at most ``chunk``."""
    check_size(K.n)
    full = K.full_mask
    for start in range(1, full, chunk):
        masks = np.arange(start, min(start + chunk, full), dtype=np.int64)
        if half_only:
            meas = bit_matrix(K.n, masks) @ K.pi
            masks = masks[meas <= 0.5 + HALF_SLACK]
        if masks.size:
            yield masks


def enumerate_proper_subsets(K: MarkovKernel, half_only: bool = False) -> Iterator[VertexSet]:
    """Every A with empty != A != V, optionally only those with pi(A) <= 1/2."""
    for masks in mask_chunks(K, half_only):
        meas = bit_matrix(K.n, masks) @ K.pi
        for m, w in zip(masks.tolist(), meas.tolist()):
            yield VertexSet(m, w, K.n)


def subsets_with_measure(K: MarkovKernel, target: float, tol: float = 1e-12) -> Iterator[VertexSet]:
    """All B (including empty set and V) with ``|pi(B) - target| <= tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    meas = all_measures(K)
    for m in np.flatnonzero(np.abs(meas - target) <= tol).tolist():
        yield VertexSet(m, float(meas[m]), K.n)


def first_best(values: np.ndarray, masks: np.ndarray, *, maximize: bool, tol: float = 1e-12) -> int:
    """Index of the smallest mask whose value is within ``tol`` of the optimum."""
    best = values.max() if maximize else values.min()
    near = np.abs(values - best) <= tol
    cand = np.flatnonzero(near)
    return int(cand[np.argmin(masks[cand])])


def best_over_subsets(
    K: MarkovKernel,
    fn,
    *,
    half_only: bool,
    maximize: bool,
    tol: float = 1e-12,
    keep: bool = False,
):
    """Optimise ``fn(masks) -> values`` over proper subsets.

    NaN values mark sets to skip. Returns ``(value, mask, masks, values)``;
    the last two are None unless ``keep``. The witness is the smallest mask
    within ``tol`` of the optimum, independent of the chunking.
    """
    all_masks, all_vals = [], []
    for masks in mask_chunks(K, half_only):
        vals = np.asarray(fn(masks), dtype=float)
        ok = ~np.isnan(vals)
        all_masks.append(masks[ok])
        all_vals.append(vals[ok])
    masks = np.concatenate(all_masks) if all_masks else np.zeros(0, dtype=np.int64)
    vals = np.concatenate(all_vals) if all_vals else np.zeros(0)
    if vals.size == 0:
        return None, None, (masks if keep else None), (vals if keep else None)
    i = first_best(vals, masks, maximize=maximize, tol=tol)
    best = float(vals.max() if maximize else vals.min())
    return best, int(masks[i]), (masks if keep else None), (vals if keep else None)
