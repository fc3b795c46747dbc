"""Lower bounds on spectral gaps from edge, vertex and evolving-set expansion.

Every function returns a :class:`BoundEntry` carrying the exact target it
bounds. Non-reversible kernels are handled the way the proofs reduce them:
edge quantities are unchanged under additive symmetrization, and vertex
bounds use half the minimal transition probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .congestion import (SIN_PI_A, SQRT_A, SQRT_A_ONE_MINUS_A, ShapeFunction,
                         f_congestion, generalized_cheeger_bound)
from .errors import CheegerLabError, ConcavityRequired, InconsistentParams
from .expansion import (batch_boundaries, batch_flows, batch_measures, conductance_global,
                        hbar_out, modified_cheeger, sym_conductance_global,
                        vertex_expansions)
from .kernel import MarkovKernel, lazify, min_transition_prob
from .report import (GAP, BoundEntry, BoundReport, eigen_target, exact_targets,
                     make_entry)
from .setops import first_best, mask_chunks

RADICAND_DUST = 1e-12


def _sqrt(x):
    """Square root that forgives rounding dust just below zero."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -RADICAND_DUST):
        raise InconsistentParams(f"negative radicand {float(np.min(x))!r}")
    out = np.sqrt(np.clip(x, 0.0, None))
    return float(out) if out.ndim == 0 else out


def _route(K: MarkovKernel) -> str:
    return "direct" if K.is_reversible else "symmetrized"


def effective_p0(K: MarkovKernel) -> float:
    """P0 for reversible kernels, P0/2 otherwise."""
    p0 = min_transition_prob(K)
    return p0 if K.is_reversible else 0.5 * p0


@dataclass(frozen=True)
class SetTable:
    masks: np.ndarray
    measure: np.ndarray
    flow: np.ndarray
    d_in: np.ndarray
    d_out: np.ndarray


@lru_cache(maxsize=64)
def set_table(K: MarkovKernel, half_only: bool) -> SetTable:
    parts = []
    for m in mask_chunks(K, half_only):
        d_in, d_out = batch_boundaries(K, m)
        parts.append((m, batch_measures(K, m), batch_flows(K, m), d_in, d_out))
    cols = [np.concatenate(c) for c in zip(*parts)]
    return SetTable(*cols)


# -- edge expansion ------------------------------------------------------------

def classic_cheeger(K: MarkovKernel) -> BoundEntry:
    """``lambda >= 1 - sqrt(1 - h^2) >= h^2/2``."""
    h = conductance_global(K)
    v = h.global_value
    return make_entry(K, "classic_cheeger", 1.0 - _sqrt(1.0 - v * v), GAP,
                      witness=h.witness.bits, forms={"h^2/2": v * v / 2}, route=_route(K))


def chi_cheeger(K: MarkovKernel) -> BoundEntry:
    """``h~ >= lambda >= 2(1 - sqrt(1 - h~^2/4)) >= h~^2/4``."""
    ht = sym_conductance_global(K)
    v = ht.global_value
    return make_entry(K, "chi_cheeger", 2.0 * (1.0 - _sqrt(1.0 - v * v / 4)), GAP,
                      witness=ht.witness.bits, forms={"h~^2/4": v * v / 4}, upper=v,
                      route=_route(K))


def _clamp_unit(x: np.ndarray) -> np.ndarray:
    if np.any(x < -RADICAND_DUST) or np.any(x > 1 + RADICAND_DUST):
        raise InconsistentParams("shape function argument outside [0, 1]")
    return np.clip(x, 0.0, 1.0)


def strong_cheeger(K: MarkovKernel, f: ShapeFunction) -> BoundEntry:
    """``lambda >= 2(1 - max_A [f(pi+Q) + f(pi-Q)] / (2 f(pi)))`` over all proper A."""
    t = set_table(K, False)
    den = np.asarray(f(t.measure), dtype=float)
    ok = den > 0
    num = f(_clamp_unit(t.measure + t.flow)) + f(_clamp_unit(t.measure - t.flow))
    ratio = np.asarray(num, dtype=float)[ok] / (2 * den[ok])
    i = first_best(ratio, t.masks[ok], maximize=True)
    return make_entry(K, f"strong_cheeger[{f.family}]", 2.0 * (1.0 - ratio.max()), GAP,
                      witness=int(t.masks[ok][i]), route=_route(K))


def diffiQ(K: MarkovKernel, f: ShapeFunction) -> BoundEntry:
    """``lambda >= min_A Q(A,A^c)^2 / (-f(pi(A)) / f''(pi(A)))`` for f, f'' concave."""
    if not (f.concave and f.second_concave and f.second_derivative is not None):
        raise ConcavityRequired(f"{f.family}: needs f and f'' concave with closed-form f''")
    t = set_table(K, f.symmetric)
    fv = np.asarray(f(t.measure), dtype=float)
    fpp = np.asarray(f.second_derivative(t.measure), dtype=float)
    vals = t.flow ** 2 * (-fpp) / fv
    i = first_best(vals, t.masks, maximize=False)
    return make_entry(K, f"diffiQ[{f.family}]", vals.min(), GAP,
                      witness=int(t.masks[i]), route=_route(K))


# -- vertex expansion -----------------------------------------------------------

def vertex_bounds(K: MarkovKernel) -> list[BoundEntry]:
    """The three vertex-expansion gap bounds with their simplified forms."""
    p0 = effective_p0(K)
    ve = vertex_expansions(K)
    ho, hi, ht = ve.h_out.global_value, ve.h_in.global_value, ve.h_in_tilde.global_value
    route = "P0" if K.is_reversible else "P0/2"
    out = 1 - _sqrt(1 - ho * p0) - p0 * (_sqrt(1 + ho) - 1)
    inn = 1 - _sqrt(1 + hi * p0) - p0 * (_sqrt(1 - hi) - 1)
    til = 1 - _sqrt(1 - (ht * p0 / 2) ** 2) - p0 * (_sqrt(1 - (ht / 2) ** 2) - 1)
    return [
        make_entry(K, "vertex_h_out", out, GAP, witness=ve.h_out.witness.bits, route=route,
                   forms={"P0/12*min(h_out^2,h_out)": p0 / 12 * min(ho * ho, ho)}),
        make_entry(K, "vertex_h_in", inn, GAP, witness=ve.h_in.witness.bits, route=route,
                   forms={"P0/8*h_in^2": p0 / 8 * hi * hi}),
        make_entry(K, "vertex_h_in_tilde", til, GAP, witness=ve.h_in_tilde.witness.bits,
                   route=route, forms={"P0(1+P0)/8*h~_in^2": p0 * (1 + p0) / 8 * ht * ht}),
    ]


def reversible_vertex_bound(K: MarkovKernel) -> BoundEntry:
    """``(P0/2) max{1 - sqrt(1-h_in), sqrt(1+h_out) - 1}^2`` and its weak form."""
    p0 = effective_p0(K)
    ve = vertex_expansions(K)
    ho, hi, ht = ve.h_out.global_value, ve.h_in.global_value, ve.h_in_tilde.global_value
    value = p0 / 2 * max(1 - _sqrt(1 - hi), _sqrt(1 + ho) - 1) ** 2
    weak = max(p0 / 8 * ht * ht, p0 / 12 * min(ho * ho, ho))
    return make_entry(K, "vertex_combined", value, GAP, forms={"weak": weak},
                      route="P0" if K.is_reversible else "P0/2")


def stoyanov_baseline(K: MarkovKernel) -> list[BoundEntry]:
    """Earlier vertex-expansion bounds kept for comparison (reversible kernels)."""
    if not K.is_reversible:
        raise CheegerLabError("baseline is stated for reversible kernels only")
    p0 = min_transition_prob(K)
    ve = vertex_expansions(K)
    ho, hi = ve.h_out.global_value, ve.h_in.global_value
    strong = max(p0 / 2 * (1 - _sqrt(1 - hi)) ** 2, p0 / 4 * (_sqrt(1 + ho) - 1) ** 2)
    weak = max(p0 / 8 * hi * hi, p0 / 24 * min(ho * ho, ho))
    return [make_entry(K, "stoyanov", strong, GAP, route="baseline"),
            make_entry(K, "stoyanov_weak", weak, GAP, route="baseline")]


# -- mixed edge/vertex -----------------------------------------------------------

def _min_over_sets(K, name, t: SetTable, vals, **kw) -> BoundEntry:
    i = first_best(vals, t.masks, maximize=False)
    return make_entry(K, name, vals.min(), GAP, witness=int(t.masks[i]), **kw)


def mixed_bounds(K: MarkovKernel) -> list[BoundEntry]:
    """Per-set combinations of edge and vertex expansion, minimised over pi(A) <= 1/2.

    ``mixed_sqrt``: the C_{sqrt a} mixture of h, h_in, h_out.
    ``mixed_tilde``: the C_{sqrt(a(1-a))} mixture of h~ and h~_in.
    ``mixed_max``: the set-wise maximum of the three simplified bounds.
    """
    p0 = effective_p0(K)
    route = "P0" if K.is_reversible else "P0/2"
    t = set_table(K, True)
    w = t.measure
    h = t.flow / w
    h_in = t.d_in / w
    h_out = t.d_out / w
    ht = t.flow / (w * (1 - w))
    ht_in = t.d_in / (w * (1 - w))
    r = 1 - p0
    # (1-P0) sqrt(1 -+ c/(1-P0)) written as sqrt((1-P0)((1-P0) -+ c)) to survive P0 = 1
    first = (2 - p0 * _sqrt(1 - h_in) - p0 * _sqrt(1 + h_out)
             - _sqrt(r * (r - (h - p0 * h_in)))
             - _sqrt(r * (r + (h - p0 * h_out))))
    second = (2 - p0 * _sqrt(1 - (ht_in / 2) ** 2) - _sqrt(1 - (ht / 2) ** 2)
              - _sqrt(r * r - ((ht - p0 * ht_in) / 2) ** 2))
    combo = np.maximum.reduce([ht ** 2 / 4, p0 / 8 * ht_in ** 2,
                               p0 / 12 * np.minimum(h_out ** 2, h_out)])
    return [_min_over_sets(K, "mixed_sqrt", t, first, route=route),
            _min_over_sets(K, "mixed_tilde", t, second, route=route),
            _min_over_sets(K, "mixed_max", t, combo, route=route)]


# -- smallest eigenvalue ---------------------------------------------------------

def modified_cheeger_bound(K: MarkovKernel) -> BoundEntry:
    """``1 - lambda_* >= 1 - sqrt(1 - hbar~^2) >= hbar~^2 / 2``."""
    mc = modified_cheeger(K)
    v = mc.global_value
    return make_entry(K, "modified_cheeger", 1 - _sqrt(1 - v * v), eigen_target(K),
                      witness=mc.witness.bits, forms={"hbar~^2/2": v * v / 2})


def hbar_out_bound(K: MarkovKernel) -> BoundEntry:
    """``1 - lambda_* >= (P0^/12) min{hbar_out^2, hbar_out}``, diagonal entries allowed in P0^."""
    p0_hat = min_transition_prob(K, include_diagonal=True)
    res = hbar_out(K)
    v = res.value
    route = "direct" if res.skipped == 0 else f"skipped {res.skipped}/{res.considered} sets"
    return make_entry(K, "hbar_out", p0_hat / 12 * min(v * v, v), eigen_target(K),
                      witness=res.witness_a.bits, route=route)


def sin_congestion_gap(K: MarkovKernel) -> BoundEntry:
    """Gap bound through the lazy chain: ``lambda = 2 lambda' >= 2(1 - C_sin(P'))``."""
    res = f_congestion(lazify(K), SIN_PI_A)
    return make_entry(K, "sin_congestion_gap", 2.0 * (1.0 - res.value), GAP,
                      witness=res.witness.bits, route="lazified")


def sin_psi_eigen_bound(K: MarkovKernel) -> BoundEntry:
    """``1 - lambda_max >= 1 - C_sin(P)`` with the congestion taken on P itself."""
    res = f_congestion(K, SIN_PI_A)
    return make_entry(K, "sin_psi_eigen", 1.0 - res.value, eigen_target(K),
                      witness=res.witness.bits)


# -- report ------------------------------------------------------------------------

SHAPES = (SQRT_A, SQRT_A_ONE_MINUS_A, SIN_PI_A)


def _jobs(K: MarkovKernel) -> list[tuple[str, Callable]]:
    jobs: list[tuple[str, Callable]] = [
        ("classic_cheeger", lambda: classic_cheeger(K)),
        ("chi_cheeger", lambda: chi_cheeger(K)),
    ]
    for f in SHAPES:
        jobs.append((f"strong_cheeger[{f.family}]", lambda f=f: strong_cheeger(K, f)))
    for f in SHAPES:
        if f.second_concave:
            jobs.append((f"diffiQ[{f.family}]", lambda f=f: diffiQ(K, f)))
    for f in SHAPES:
        jobs.append((f"generalized_cheeger[{f.family}]",
                     lambda f=f: generalized_cheeger_bound(K, f)))
    jobs += [
        ("vertex", lambda: vertex_bounds(K)),
        ("vertex_combined", lambda: reversible_vertex_bound(K)),
    ]
    if K.is_reversible:
        jobs.append(("stoyanov", lambda: stoyanov_baseline(K)))
    jobs += [
        ("mixed", lambda: mixed_bounds(K)),
        ("modified_cheeger", lambda: modified_cheeger_bound(K)),
        ("hbar_out", lambda: hbar_out_bound(K)),
        ("sin_congestion_gap", lambda: sin_congestion_gap(K)),
        ("sin_psi_eigen", lambda: sin_psi_eigen_bound(K)),
    ]
    return jobs


def full_report(K: MarkovKernel) -> BoundReport:
    """Every applicable bound with exact targets attached; deterministic order."""
    tg = exact_targets(K)
    entries: list[BoundEntry] = []
    for name, job in _jobs(K):
        try:
            res = job()
        except CheegerLabError as exc:
            entries.append(BoundEntry(name, math.nan, GAP, tg[GAP],
                                      error=f"{type(exc).__name__}: {exc}"))
            continue
        entries.extend(res if isinstance(res, list) else [res])
    lmax = tg["1-lambda_max"]
    return BoundReport(
        n=K.n, reversible=K.is_reversible, lazy=K.is_lazy,
        p0=min_transition_prob(K), p0_hat=min_transition_prob(K, include_diagonal=True),
        gap=tg[GAP], lambda_max=None if lmax is None else 1 - lmax,
        lambda_star=1 - tg["1-lambda_star"], entries=entries)
