"""Edge, vertex and modified expansion constants by exhaustive enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoFeasibleB
from .evolving import batch_psi, psi
from .kernel import MarkovKernel, ergodic_flow
from .setops import VertexSet, all_measures, best_over_subsets, bit_matrix, check_size

MEASURE_TOL = 1e-12


@dataclass(frozen=True)
class ExpansionProfile:
    """Global minimum of a per-set quantity, with its argmin.

    ``masks``/``values`` hold the whole per-set table when requested.
    """

    name: str
    global_value: float
    witness: VertexSet
    masks: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    @property
    def per_set(self) -> dict[int, float]:
        if self.masks is None:
            return {}
        return dict(zip(self.masks.tolist(), self.values.tolist()))


def _profile(K, name, fn, half_only, keep) -> ExpansionProfile:
    value, mask, masks, values = best_over_subsets(K, fn, half_only=half_only,
                                                   maximize=False, keep=keep)
    return ExpansionProfile(name, value, VertexSet.from_bits(K, mask), masks, values)


# -- per-set helpers shared by global sweeps and bound formulas -----------------

def batch_measures(K: MarkovKernel, masks: np.ndarray) -> np.ndarray:
    return bit_matrix(K.n, masks) @ K.pi


def batch_flows(K: MarkovKernel, masks: np.ndarray) -> np.ndarray:
    """Q(A, A^c) for each mask."""
    M = bit_matrix(K.n, masks)
    return np.sum(((M * K.pi) @ K.P) * ~M, axis=1)


def batch_boundaries(K: MarkovKernel, masks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """pi of the internal and external vertex boundaries for each mask.

    Membership uses the exact support of P (entries > 0), no tolerance.
    """
    M = bit_matrix(K.n, masks)
    adj = (K.P > 0).astype(np.int64)
    # x has a transition into A^c / into A
    out_links = (~M).astype(np.int64) @ adj.T
    in_links = M.astype(np.int64) @ adj.T
    d_in = M & (out_links > 0)
    d_out = ~M & (in_links > 0)
    return d_in @ K.pi, d_out @ K.pi


# -- per-set values ------------------------------------------------------------

def conductance(K: MarkovKernel, A: VertexSet) -> float:
    """h(A) = Q(A, A^c) / pi(A)."""
    return ergodic_flow(K, A, A.complement(K)) / A.measure


def sym_conductance(K: MarkovKernel, A: VertexSet) -> float:
    """h~(A) = Q(A, A^c) / (pi(A) pi(A^c))."""
    return ergodic_flow(K, A, A.complement(K)) / (A.measure * (1.0 - A.measure))


def boundaries(K: MarkovKernel, A: VertexSet) -> tuple[VertexSet, VertexSet]:
    """Internal boundary ``{x in A : P(x, A^c) > 0}`` and external ``{x notin A : P(x, A) > 0}``."""
    d_in = d_out = 0
    for x in range(K.n):
        row = K.P[x] > 0
        into_a = any(row[y] for y in A)
        into_c = any(row[y] for y in range(K.n) if y not in A)
        if x in A and into_c:
            d_in |= 1 << x
        elif x not in A and into_a:
            d_out |= 1 << x
    return VertexSet.from_bits(K, d_in), VertexSet.from_bits(K, d_out)


def modified_cheeger_set(K: MarkovKernel, A: VertexSet) -> float:
    """Psi(A) / (pi(A) pi(A^c))."""
    return psi(K, A) / (A.measure * (1.0 - A.measure))


# -- global constants --------------------------------------------------------

def conductance_global(K: MarkovKernel, keep: bool = False) -> ExpansionProfile:
    """h = min over pi(A) <= 1/2 of Q(A, A^c)/pi(A)."""
    return _profile(K, "h", lambda m: batch_flows(K, m) / batch_measures(K, m), True, keep)


def sym_conductance_global(K: MarkovKernel, keep: bool = False) -> ExpansionProfile:
    def fn(m):
        w = batch_measures(K, m)
        return batch_flows(K, m) / (w * (1 - w))
    return _profile(K, "h_tilde", fn, False, keep)


@dataclass(frozen=True)
class VertexExpansions:
    h_in: ExpansionProfile
    h_out: ExpansionProfile
    h_in_tilde: ExpansionProfile


def vertex_expansions(K: MarkovKernel, keep: bool = False) -> VertexExpansions:
    """Internal, external and symmetrized internal vertex expansion over pi(A) <= 1/2."""
    def h_in(m):
        return batch_boundaries(K, m)[0] / batch_measures(K, m)

    def h_out(m):
        return batch_boundaries(K, m)[1] / batch_measures(K, m)

    def h_in_t(m):
        w = batch_measures(K, m)
        return batch_boundaries(K, m)[0] / (w * (1 - w))

    return VertexExpansions(_profile(K, "h_in", h_in, True, keep),
                            _profile(K, "h_out", h_out, True, keep),
                            _profile(K, "h_in_tilde", h_in_t, True, keep))


def modified_cheeger(K: MarkovKernel, keep: bool = False) -> ExpansionProfile:
    """hbar~ = min over proper A of Psi(A)/(pi(A) pi(A^c))."""
    def fn(m):
        w = batch_measures(K, m)
        return batch_psi(K, m) / (w * (1 - w))
    return _profile(K, "hbar_tilde", fn, False, keep)


@dataclass(frozen=True)
class HbarOut:
    value: float
    witness_a: VertexSet
    witness_b: VertexSet
    skipped: int  # sets A with no B of matching measure
    considered: int


def hbar_out(K: MarkovKernel) -> HbarOut:
    """min over pi(A) <= 1/2 and pi(B) = pi(A^c) of pi({x in B : Q(A,x) > 0}) / pi(A).

    B = A^c always matches in exact arithmetic; sets A for which no B lands
    within the measure tolerance are skipped and counted.
    """
    check_size(K.n)
    n = K.n
    full = K.full_mask
    meas = all_measures(K)
    order = np.argsort(meas, kind="stable")
    sorted_meas = meas[order]
    adj = (K.P > 0).astype(np.int64)
    weights = np.int64(1) << np.arange(n, dtype=np.int64)

    A_masks = np.arange(1, full, dtype=np.int64)
    A_masks = A_masks[meas[A_masks] <= 0.5 + 1e-12]
    reach = (bit_matrix(n, A_masks).astype(np.int64) @ adj) > 0
    nbr = reach.astype(np.int64) @ weights

    best, best_a, best_b, skipped = np.inf, None, None, 0
    for a, nb in zip(A_masks.tolist(), nbr.tolist()):
        target = meas[full ^ a]
        lo = np.searchsorted(sorted_meas, target - MEASURE_TOL, side="left")
        hi = np.searchsorted(sorted_meas, target + MEASURE_TOL, side="right")
        if lo == hi:
            skipped += 1
            continue
        Bs = np.sort(order[lo:hi])
        vals = meas[Bs & nb] / meas[a]
        i = int(np.argmin(vals))
        if vals[i] < best - 1e-12:
            best, best_a, best_b = float(vals[i]), a, int(Bs[i])
    if best_a is None:
        raise NoFeasibleB("no set A admits a B with pi(B) = pi(A^c)")
    return HbarOut(best, VertexSet.from_bits(K, best_a), VertexSet.from_bits(K, best_b),
                   skipped, int(A_masks.size))
