"""The evolving set process: exact step profiles, their integrals, and sampling.

For a set A the process moves to ``A_u = {y : Q(A,y) >= u pi(y)}`` with u
uniform. Writing ``t_y = Q(A,y)/pi(y)`` the map ``u -> pi(A_u)`` is a
non-increasing step function with jumps at the distinct ``t_y``, so every
integral over u reduces to a finite sum over the sorted thresholds.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NotLazy
from .kernel import MarkovKernel
from .setops import VertexSet, all_measures, bit_matrix, check_size, indicator

SAMPLE_BLOCK = 4096
ONE_SNAP = 1e-12
TIE_TOL = 1e-14


@dataclass(frozen=True)
class StepFunction:
    """Piecewise constant function on (0, 1].

    ``values[i]`` holds on the half-open interval ``(edges[i], edges[i+1]]``;
    ``edges`` runs from 0 to 1 strictly increasing.
    """

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if e.ndim != 1 or v.shape != (e.size - 1,):
            raise ValueError("need len(values) == len(edges) - 1")
        if abs(e[0]) > 1e-15 or abs(e[-1] - 1.0) > 1e-15 or np.any(np.diff(e) <= 0):
            raise ValueError("edges must increase strictly from 0 to 1")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls(np.array([0.0, 1.0]), np.array([value]))

    @classmethod
    def from_pieces(cls, pieces) -> "StepFunction":
        """Build from ``[(right_end, value), ...]`` with right ends increasing to 1.

        Zero-length pieces are dropped.
        """
        edges = [0.0]
        values = []
        for right, value in pieces:
            if right > edges[-1]:
                edges.append(float(right))
                values.append(float(value))
        return cls(np.array(edges), np.array(values))

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.edges)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.edges, u, side="left") - 1
        return self.values[np.clip(idx, 0, self.values.size - 1)]

    def integral(self, f: Optional[Callable] = None) -> float:
        vals = self.values if f is None else np.asarray(f(self.values), dtype=float)
        return float(np.dot(self.lengths, vals))

    def cumulative(self, t: float) -> float:
        """``int_0^t`` of the function."""
        clipped = np.clip(self.edges, 0.0, t)
        return float(np.dot(np.diff(clipped), self.values))

    def is_nonincreasing(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values) <= tol))

    def refine(self, edges: np.ndarray) -> "StepFunction":
        """Same function on a superset of breakpoints."""
        e = np.union1d(self.edges, edges)
        mids = 0.5 * (e[:-1] + e[1:])
        return StepFunction(e, self(mids))


@dataclass(frozen=True)
class StepProfile(StepFunction):
    """Exact profile ``u -> pi(A_u)`` for one set ``A``."""

    thresholds: np.ndarray = None
    base: float = 0.0
    bits: int = 0


def _clean(T: np.ndarray) -> np.ndarray:
    # values a rounding step below 1 would leave slivers of length ~1e-16
    T = np.clip(T, 0.0, 1.0)
    T[T > 1.0 - ONE_SNAP] = 1.0
    return T


def thresholds(K: MarkovKernel, bits: int) -> np.ndarray:
    """``t_y = Q(A,y)/pi(y) = P*(y,A)`` for every state y, clipped to [0, 1]."""
    a = indicator(K.n, bits)
    return _clean((a * K.pi) @ K.P / K.pi)


def _measure(inside: np.ndarray, outside: np.ndarray) -> float:
    # large sets via their complement, so the full space is exactly 1 and
    # f(1 - eps) never leaks sqrt(eps)-sized noise into the integrals
    m = float(inside.sum())
    return m if m <= 0.5 else 1.0 - float(outside.sum())


def profile(K: MarkovKernel, A: VertexSet) -> StepProfile:
    """Exact step function of ``u -> pi(A_u)`` on (0, 1]."""
    t = thresholds(K, A.bits)
    levels = np.unique(t[t > 0])[::-1]  # u_1 > u_2 > ... > 0
    if levels.size > 1:
        # rounding-level ties would leave slivers of width ~1e-17
        keep = np.concatenate([[True], -np.diff(levels) > TIE_TOL])
        levels = levels[np.roll(keep, -1) | (np.arange(levels.size) == levels.size - 1)]
    pieces = []
    # ascending u: on (u_{k+1}, u_k] the set is {y : t_y >= u_k}
    for k in range(levels.size - 1, -1, -1):
        inside = t >= levels[k]
        pieces.append((levels[k], _measure(K.pi[inside], K.pi[~inside])))
    pieces.append((1.0, 0.0))
    sf = StepFunction.from_pieces(pieces)
    return StepProfile(sf.edges, sf.values, thresholds=t, base=A.measure, bits=A.bits)


def integrate_f(p: StepFunction, f: Callable) -> float:
    """``int_0^1 f(p(u)) du`` as an exact piecewise sum."""
    return p.integral(f)


def ergodic_flow_identity(K: MarkovKernel, A: VertexSet) -> tuple[float, float]:
    """Areas of the profile above pi(A) on (0,1/2] and below it on (1/2,1].

    On a lazy chain both equal Q(A, A^c).
    """
    if not K.is_lazy:
        raise NotLazy("ergodic flow identity needs P(x,x) >= 1/2 for all x")
    p = profile(K, A)
    upper = p.cumulative(0.5) - 0.5 * A.measure
    lower = 0.5 * A.measure - (p.integral() - p.cumulative(0.5))
    return upper, lower


def psi(K: MarkovKernel, A: VertexSet) -> float:
    """Modified ergodic flow ``(1/2) int_0^1 |pi(A_u) - pi(A)| du``."""
    p = profile(K, A)
    return 0.5 * p.integral(lambda v: np.abs(v - A.measure))


def psi_minflow(K: MarkovKernel, A: VertexSet) -> float:
    """Psi(A) by brute force as a minimum flow into sets of measure pi(A^c).

    Minimises ``Q(A,B) + (pi(A^c) - pi(B))/pi(v) * Q(A,v)`` over B and v with
    ``pi(B) <= pi(A^c) < pi(B + v)``. The objective is continuous across the
    boundary cases, so the comparisons only need a small slack.
    """
    check_size(K.n)
    meas = all_measures(K)
    target = 1.0 - A.measure
    q = (indicator(K.n, A.bits) * K.pi) @ K.P  # Q(A, y)
    masks = np.arange(1 << K.n, dtype=np.int64)
    flow = bit_matrix(K.n, masks) @ q
    best = np.inf
    for v in range(K.n):
        ok = ((masks >> v) & 1) == 0
        ok &= meas <= target + 1e-12
        ok &= meas + K.pi[v] > target - 1e-12
        if not ok.any():
            continue
        frac = np.clip((target - meas[ok]) / K.pi[v], 0.0, 1.0)
        best = min(best, float(np.min(flow[ok] + frac * q[v])))
    return best


def crossing_point(p: StepProfile) -> float:
    """A point where the profile crosses its base level pi(A).

    The admissible points form an interval; 1/2 is returned when it lies in
    it (always so for lazy chains, and for flat profiles), otherwise the
    nearest end.
    """
    base = p.base
    above = p.values > base + 1e-12
    at_least = p.values >= base - 1e-12
    lo = float(p.edges[1:][above].max()) if above.any() else 0.0
    hi = float(p.edges[1:][at_least].max()) if at_least.any() else 0.0
    return float(np.clip(0.5, lo, hi))


def sample_step(K: MarkovKernel, A: VertexSet, rng: np.random.Generator) -> VertexSet:
    """One step ``A -> A_u`` with u uniform on (0, 1]."""
    u = 1.0 - rng.random()
    t = thresholds(K, A.bits)
    bits = 0
    for y in np.flatnonzero(t >= u).tolist():
        bits |= 1 << y
    return VertexSet.from_bits(K, bits)


@dataclass(frozen=True)
class MixingBoundEstimate:
    mean: float
    stderr: float
    samples: int
    steps: int


def _run_block(K: MarkovKernel, x: int, steps: int, size: int, seed_seq) -> np.ndarray:
    """Weighted statistic ``w sqrt(min(pi(S), 1 - pi(S)))`` after each step, shape (steps + 1, size).

    The statistic vanishes once S is empty or V, so u is drawn from a
    defensive mixture: uniform on (0, 1] half the time, otherwise uniform on
    the range ``(min t, max t]`` where A_u stays proper. The likelihood
    ratio ``w`` keeps the estimate unbiased; on surviving paths w <= 1, so
    the second moment never exceeds that of plain sampling.
    """
    rng = np.random.default_rng(seed_seq)
    S = np.zeros((size, K.n), dtype=bool)
    S[:, x] = True
    weight = np.ones(size)
    pi = K.pi
    out = np.empty((steps + 1, size))
    for k in range(steps + 1):
        m = S @ pi
        out[k] = weight * np.sqrt(np.clip(np.minimum(m, 1.0 - m), 0.0, None))
        if k == steps:
            break
        T = _clean((S * pi) @ K.P / pi)
        lo, hi = T.min(axis=1), T.max(axis=1)
        span = hi - lo
        pick, r = rng.random(size), rng.random(size)
        inner = (pick < 0.5) & (span > 0)
        u = np.where(inner, hi - r * span, 1.0 - r)
        density = np.where(span > 0, 0.5, 1.0)
        hit = (u > lo) & (u <= hi) & (span > 0)
        density = density + np.where(hit, 0.5 / np.where(span > 0, span, 1.0), 0.0)
        weight = weight / density
        S = T >= u[:, None]
    return out


def mp_mixing_curve(
    K: MarkovKernel,
    x: int,
    steps: int,
    samples: int,
    seed: int = 0,
    workers: int = 1,
) -> list[MixingBoundEstimate]:
    """Estimates for every step count ``0..steps`` from one batch of sample paths.

    Samples are grouped in fixed blocks of global sample indices and each
    block gets its own child seed, so results depend on neither ``workers``
    nor ``steps`` (a path's first k steps are the same for any horizon).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    scale = 1.0 / (2.0 * K.pi[x])
    nblocks = -(-samples // SAMPLE_BLOCK)
    jobs = [(min(SAMPLE_BLOCK, samples - b * SAMPLE_BLOCK), np.random.SeedSequence(seed, spawn_key=(b,)))
            for b in range(nblocks)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda j: _run_block(K, x, steps, *j), jobs))
    else:
        parts = [_run_block(K, x, steps, *j) for j in jobs]
    vals = np.concatenate(parts, axis=1) * scale
    out = []
    for k in range(steps + 1):
        row = vals[k]
        if samples > 1 and row.min() != row.max():
            err = float(row.std(ddof=1) / np.sqrt(samples))
        else:
            err = 0.0
        out.append(MixingBoundEstimate(float(row.mean()), err, samples, k))
    return out


def mp_mixing_bound(
    K: MarkovKernel,
    x: int,
    n: int,
    samples: int,
    seed: int = 0,
    workers: int = 1,
) -> MixingBoundEstimate:
    """Monte-Carlo estimate of ``E_n sqrt(min(pi(S_n), 1 - pi(S_n))) / (2 pi(x))`` from S_0 = {x}."""
    return mp_mixing_curve(K, x, n, samples, seed, workers)[-1]


# -- batched sweeps ---------------------------------------------------------

def threshold_matrix(K: MarkovKernel, masks: np.ndarray) -> np.ndarray:
    """Rows of ``t_y`` for each bitmask."""
    M = bit_matrix(K.n, masks)
    return _clean((M * K.pi) @ K.P / K.pi)


def sorted_profiles(K: MarkovKernel, masks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Piece lengths and levels for a batch of profiles.

    Returns ``(lengths, levels)`` each of shape ``(m, n + 1)``; column 0 is
    the top piece ``(t_max, 1]`` where the set is empty. Tied thresholds give
    zero-length pieces, so no merging is needed.
    """
    T = threshold_matrix(K, masks)
    order = np.argsort(-T, axis=1, kind="stable")
    ts = np.take_along_axis(T, order, axis=1)
    w = K.pi[order]
    cum = np.cumsum(w, axis=1)
    # suffix mass of the states not yet included; see _measure
    rest = np.cumsum(w[:, ::-1], axis=1)[:, ::-1]
    rest = np.concatenate([rest[:, 1:], np.zeros((w.shape[0], 1))], axis=1)
    cum = np.where(cum <= 0.5, cum, 1.0 - rest)
    upper = np.concatenate([np.ones((ts.shape[0], 1)), ts], axis=1)
    lower = np.concatenate([ts, np.zeros((ts.shape[0], 1))], axis=1)
    levels = np.concatenate([np.zeros((ts.shape[0], 1)), cum], axis=1)
    return upper - lower, levels


def batch_integrals(K: MarkovKernel, masks: np.ndarray, f: Callable) -> np.ndarray:
    lengths, levels = sorted_profiles(K, masks)
    return np.sum(lengths * f(np.clip(levels, 0.0, 1.0)), axis=1)


def batch_psi(K: MarkovKernel, masks: np.ndarray) -> np.ndarray:
    lengths, levels = sorted_profiles(K, masks)
    base = bit_matrix(K.n, masks) @ K.pi
    return 0.5 * np.sum(lengths * np.abs(levels - base[:, None]), axis=1)
