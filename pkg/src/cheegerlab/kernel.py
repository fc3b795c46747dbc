"""Finite Markov kernels, their standard transforms, and ergodic flows."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import NegativeEntry, NoPositiveEntry, NotIrreducible, NotStochastic

STOCHASTIC_TOL = 1e-9
REVERSIBLE_TOL = 1e-9
STATIONARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """Row-stochastic matrix ``P`` on ``n`` states with stationary law ``pi``.

    Instances are immutable: both arrays are flagged read-only.
    """

    P: np.ndarray
    pi: np.ndarray
    labels: tuple[str, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def reversibility_defect(self) -> float:
        F = self.pi[:, None] * self.P
        return float(np.max(np.abs(F - F.T)))

    @property
    def is_reversible(self) -> bool:
        return self.reversibility_defect() <= REVERSIBLE_TOL

    @property
    def is_lazy(self) -> bool:
        return bool(np.all(np.diag(self.P) >= 0.5 - 1e-12))

    def flow_matrix(self) -> np.ndarray:
        """Edge measure ``pi(x) P(x, y)``."""
        return self.pi[:, None] * self.P

    def to_json(self) -> dict:
        out: dict = {}
        if self.labels:
            out["labels"] = list(self.labels)
        out["P"] = self.P.tolist()
        return out


def _stationary(P: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    # null space of (P^T - I) with a normalisation row appended
    A = np.vstack([P.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = pi @ P
    return pi / pi.sum()


def make_kernel(P, labels: Optional[Sequence[str]] = None) -> MarkovKernel:
    """Validate ``P`` and build a kernel with its stationary distribution.

    Raises NegativeEntry, NotStochastic or NotIrreducible on bad input.
    """
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 2:
        raise NotStochastic(f"expected a square matrix with n >= 2, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise NotStochastic("matrix contains non-finite entries")
    if np.any(P < 0):
        i, j = np.argwhere(P < 0)[0]
        raise NegativeEntry(f"P[{i},{j}] = {P[i, j]!r} is negative")
    rows = P.sum(axis=1)
    dev = np.abs(rows - 1.0)
    if np.any(dev > STOCHASTIC_TOL):
        i = int(np.argmax(dev))
        raise NotStochastic(f"row {i} sums to {rows[i]!r}")
    # only touch rows that are off by more than rounding dust, so that
    # normalisation is idempotent and file round-trips stay bit-identical
    if np.any(dev > 1e-12):
        P = P / rows[:, None]
    ncomp, _ = connected_components(P > 0, directed=True, connection="strong")
    if ncomp != 1:
        raise NotIrreducible(f"support graph has {ncomp} strongly connected components")
    pi = _stationary(P)
    resid = float(np.max(np.abs(pi @ P - pi)))
    if np.any(pi <= 0) or resid > STATIONARY_TOL:
        raise NotIrreducible(f"stationary solve failed (residual {resid:.3g})")
    P.setflags(write=False)
    pi.setflags(write=False)
    labs = tuple(str(s) for s in labels) if labels is not None else ()
    if labs and len(labs) != P.shape[0]:
        raise NotStochastic(f"{len(labs)} labels for {P.shape[0]} states")
    return MarkovKernel(P=P, pi=pi, labels=labs)


def _with_matrix(K: MarkovKernel, P: np.ndarray) -> MarkovKernel:
    # transforms preserve pi exactly; rebuild without re-solving
    P = np.array(P, dtype=float)
    P.setflags(write=False)
    return MarkovKernel(P=P, pi=K.pi, labels=K.labels)


def time_reversal(K: MarkovKernel) -> MarkovKernel:
    """``P*(x,y) = pi(y) P(y,x) / pi(x)``."""
    return _with_matrix(K, K.P.T * K.pi[None, :] / K.pi[:, None])


def additive_symmetrization(K: MarkovKernel) -> MarkovKernel:
    return _with_matrix(K, 0.5 * (K.P + time_reversal(K).P))


def lazify(K: MarkovKernel) -> MarkovKernel:
    """``P' = (I + (P + P*)/2) / 2``, reversible and lazy with the same pi."""
    S = additive_symmetrization(K).P
    return _with_matrix(K, 0.5 * (np.eye(K.n) + S))


def holding_lazify(K: MarkovKernel) -> MarkovKernel:
    """``(I + P)/2`` without symmetrizing."""
    return _with_matrix(K, 0.5 * (np.eye(K.n) + K.P))


def _indicator(n: int, bits: int) -> np.ndarray:
    return np.array([(bits >> i) & 1 for i in range(n)], dtype=float)


def _bits(S) -> int:
    return S if isinstance(S, int) else S.bits


def ergodic_flow(K: MarkovKernel, A, B) -> float:
    """``Q(A,B) = sum_{x in A, y in B} pi(x) P(x,y)``; sets as VertexSet or bitmask."""
    a = _indicator(K.n, _bits(A))
    b = _indicator(K.n, _bits(B))
    return float((a * K.pi) @ K.P @ b)


def min_transition_prob(K: MarkovKernel, include_diagonal: bool = False) -> float:
    """Smallest positive entry of P, off-diagonal only unless ``include_diagonal``."""
    mask = K.P > 0
    if not include_diagonal:
        mask &= ~np.eye(K.n, dtype=bool)
    if not mask.any():
        raise NoPositiveEntry("no positive transition probability in the selected entries")
    return float(K.P[mask].min())


def tv_distance(K: MarkovKernel, x: int, n: int) -> float:
    """Total variation distance between ``P^n(x, .)`` and ``pi``."""
    if n < 0:
        raise ValueError("step count must be non-negative")
    row = np.linalg.matrix_power(K.P, n)[x]
    return 0.5 * float(np.abs(row - K.pi).sum())


def load_kernel(path) -> MarkovKernel:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict) or "P" not in data:
        raise NotStochastic(f"{path}: expected a JSON object with key 'P'")
    return make_kernel(data["P"], data.get("labels"))


def dump_kernel(K: MarkovKernel) -> str:
    # json uses repr for floats, which round-trips exactly
    return json.dumps(K.to_json(), indent=1) + "\n"
