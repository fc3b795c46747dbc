"""Seeded invariant suites run by ``cheegerlab verify``.

Each suite returns a :class:`SuiteResult`; failures carry enough context
(kernel seed, set bitmask, numbers) to reproduce them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import chains
from .bounds import full_report
from .congestion import (SIN_PI_A, SQRT_A, SQRT_A_ONE_MINUS_A, appendix_slack,
                         check_rearrangement, worst_profile)
from .errors import PreconditionViolated
from .evolving import StepFunction, crossing_point, ergodic_flow_identity, profile, psi, psi_minflow
from .expansion import boundaries
from .kernel import MarkovKernel, ergodic_flow, lazify, min_transition_prob
from .setops import enumerate_proper_subsets

TIGHT = 1e-12


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def check(self, ok: bool, context: Callable[[], str]) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 20:
                self.failures.append(context())

    @property
    def ok(self) -> bool:
        return self.failed == 0


def random_kernels(seed: int, count: int, n_min: int = 3, n_max: int = 8) -> Iterator[tuple[int, MarkovKernel]]:
    """Alternating reversible and general kernels with sizes cycling over [n_min, n_max]."""
    span = n_max - n_min + 1
    for i in range(count):
        s = seed * 100003 + i
        n = n_min + i % span
        if i % 2 == 0:
            yield s, chains.random_reversible(n, s)
        else:
            yield s, chains.random_general(n, s)


def martingale_suite(seed: int = 0, count: int = 20, n_max: int = 10) -> SuiteResult:
    res = SuiteResult("martingale")
    for s, K in random_kernels(seed, count, 2, n_max):
        for A in enumerate_proper_subsets(K):
            mass = profile(K, A).integral()
            res.check(abs(mass - A.measure) <= TIGHT,
                      lambda: f"seed={s} A={A.bits}: int pi(A_u) = {mass!r} vs pi(A) = {A.measure!r}")
    return res


def flow_suite(seed: int = 0, count: int = 20, n_max: int = 10) -> SuiteResult:
    res = SuiteResult("flow")
    for s, K in random_kernels(seed, count, 2, n_max):
        L = lazify(K)
        for A in enumerate_proper_subsets(L):
            q = ergodic_flow(L, A, A.complement(L))
            up, lo = ergodic_flow_identity(L, A)
            res.check(abs(up - q) <= TIGHT and abs(lo - q) <= TIGHT,
                      lambda: f"seed={s} A={A.bits}: areas {up!r}, {lo!r} vs Q {q!r}")
    return res


def psi_suite(seed: int = 0, count: int = 50, n_max: int = 8) -> SuiteResult:
    res = SuiteResult("psi")
    for s, K in random_kernels(seed, count, 2, n_max):
        for A in enumerate_proper_subsets(K):
            a, b = psi(K, A), psi_minflow(K, A)
            res.check(abs(a - b) <= TIGHT, lambda: f"seed={s} A={A.bits}: psi {a!r} vs minflow {b!r}")
    return res


# -- rearrangement fixtures -----------------------------------------------------

def random_concave(rng: np.random.Generator) -> Callable:
    kind = rng.integers(6)
    if kind == 0:
        return SQRT_A
    if kind == 1:
        return SQRT_A_ONE_MINUS_A
    if kind == 2:
        return SIN_PI_A
    if kind == 3:
        p = rng.uniform(0.05, 1.0)
        return lambda a: np.power(np.clip(a, 0, None), p)
    if kind == 4:
        k = int(rng.integers(1, 6))
        slopes, icpts = rng.normal(size=k) * 3, rng.normal(size=k)
        return lambda a: np.min(np.multiply.outer(a, slopes) + icpts, axis=-1)
    c = rng.uniform(0.1, 10)
    return lambda a: np.log1p(c * a)


def random_fixture(rng: np.random.Generator) -> tuple[StepFunction, StepFunction]:
    """A non-increasing g and a block-averaged flattening g_hat of it."""
    m = int(rng.integers(1, 12))
    inner = np.sort(rng.uniform(0, 1, m - 1))
    edges = np.unique(np.concatenate([[0.0], inner, [1.0]]))
    vals = np.sort(rng.uniform(0, 1, edges.size - 1))[::-1]
    g = StepFunction(edges, vals)
    cuts = np.unique(np.concatenate([[0], np.sort(rng.integers(0, vals.size + 1, rng.integers(0, 4))), [vals.size]]))
    lens = g.lengths
    flat = vals.copy()
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            flat[a:b] = np.dot(lens[a:b], vals[a:b]) / lens[a:b].sum()
    return g, StepFunction(edges, flat)


def rearrangement_suite(seed: int = 0, count: int = 1000, kernels: int = 30) -> SuiteResult:
    res = SuiteResult("rearrangement")
    rng = np.random.default_rng(seed)
    for i in range(count):
        f = random_concave(rng)
        g, gh = random_fixture(rng)
        r = check_rearrangement(f, g, gh)
        res.check(r.holds, lambda: f"fixture {i}: {r.lhs!r} > {r.rhs!r}")
    for s, K in random_kernels(seed, kernels, 2, 7):
        for label, true, worst in true_vs_worst(K):
            for f in (SQRT_A, SQRT_A_ONE_MINUS_A, SIN_PI_A):
                try:
                    r = check_rearrangement(f, true, worst)
                except PreconditionViolated as exc:
                    res.check(False, lambda: f"seed={s} {label}: {exc}")
                    continue
                res.check(r.holds, lambda: f"seed={s} {label} {f.family}: {r.lhs!r} > {r.rhs!r}")
    return res


def true_vs_worst(K: MarkovKernel) -> Iterator[tuple[str, StepFunction, StepFunction]]:
    """True profiles paired with their extremal comparison profiles.

    Two-step profiles on K itself; edge and boundary profiles on its
    lazy reversible version.
    """
    for A in enumerate_proper_subsets(K):
        p = profile(K, A)
        yield (f"twostep A={A.bits}", p,
               worst_profile("nonlazy_twostep", measure=A.measure, psi=psi(K, A), cross=crossing_point(p)))
    L = lazify(K)
    p0 = min_transition_prob(L)
    for A in enumerate_proper_subsets(L):
        p = profile(L, A)
        q = ergodic_flow(L, A, A.complement(L))
        d_in, d_out = boundaries(L, A)
        yield f"lazy_edge A={A.bits}", p, worst_profile("lazy_edge", measure=A.measure, flow=q)
        yield (f"lazy_in A={A.bits}", p,
               worst_profile("lazy_in_boundary", measure=A.measure, boundary=d_in.measure, p0=p0))
        yield (f"lazy_out A={A.bits}", p,
               worst_profile("lazy_out_boundary", measure=A.measure, boundary=d_out.measure, p0=p0))


def appendix_suite(points: int = 201) -> SuiteResult:
    res = SuiteResult("appendix")
    grid = np.linspace(0.0, 1.0, points)
    X, Y = np.meshgrid(grid, grid)
    slack = appendix_slack(X, Y)
    for x, y, s in zip(X.ravel(), Y.ravel(), slack.ravel()):
        res.check(s >= -TIGHT, lambda: f"X={x!r} Y={y!r}: slack {s!r}")
    return res


def soundness_suite(seed: int = 0, count: int = 100, n_max: int = 8) -> SuiteResult:
    res = SuiteResult("soundness")
    for s, K in random_kernels(seed, count, 3, n_max):
        for e in full_report(K).entries:
            if e.error:
                res.check(False, lambda: f"seed={s} {e.name}: {e.error}")
            else:
                res.check(e.valid, lambda: f"seed={s} {e.name}: {e.value!r} vs {e.target} {e.exact!r}")
    return res


def half_restriction_suite(seed: int = 0, count: int = 30, n_max: int = 8) -> SuiteResult:
    """For reflection-symmetric f the half-measure sweep loses nothing."""
    from .congestion import f_congestion
    res = SuiteResult("half_restriction")
    for s, K in random_kernels(seed, count, 2, n_max):
        for f in (SQRT_A_ONE_MINUS_A, SIN_PI_A):
            a = f_congestion(K, f, restrict=True).value
            b = f_congestion(K, f, restrict=False).value
            res.check(abs(a - b) <= TIGHT, lambda: f"seed={s} {f.family}: half {a!r} vs all {b!r}")
    return res


SUITES = ("martingale", "flow", "psi", "rearrangement", "appendix", "soundness", "half_restriction")


def run_suites(names, seed: int = 0, count: int | None = None, n_max: int | None = None) -> list[SuiteResult]:
    out = []
    for name in names:
        kw = {}
        if count is not None and name != "appendix":
            kw["count"] = count
        if n_max is not None and name not in ("appendix", "rearrangement"):
            kw["n_max"] = n_max
        if name == "appendix":
            out.append(appendix_suite())
        else:
            out.append(globals()[f"{name}_suite"](seed=seed, **kw))
    return out
