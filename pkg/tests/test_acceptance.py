"""Acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py -s`` to see a PASS/FAIL line per
criterion.
"""
import math
import time

import numpy as np
import pytest

from cheegerlab import chains
from cheegerlab.bounds import (chi_cheeger, classic_cheeger, full_report, reversible_vertex_bound,
                               sin_congestion_gap, sin_psi_eigen_bound, stoyanov_baseline,
                               strong_cheeger)
from cheegerlab.congestion import SIN_PI_A, appendix_slack
from cheegerlab.evolving import ergodic_flow_identity, mp_mixing_curve, profile, psi, psi_minflow
from cheegerlab.expansion import conductance_global, modified_cheeger, sym_conductance_global
from cheegerlab.kernel import ergodic_flow, lazify, tv_distance
from cheegerlab.setops import enumerate_proper_subsets
from cheegerlab.spectra import lambda_max, spectral_gap
from cheegerlab.verify import random_kernels, rearrangement_suite


def verdict(number, title, ok, detail=""):
    print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
    assert ok, f"criterion {number}: {title} {detail}"


@pytest.fixture(scope="module")
def sweep():
    """250 reversible and 250 general kernels with n cycling over 3..8, plus their reports."""
    t0 = time.perf_counter()
    rev = [(s, chains.random_reversible(3 + i % 6, s)) for i, s in enumerate(range(1000, 1250))]
    gen = [(s, chains.random_general(3 + i % 6, s)) for i, s in enumerate(range(2000, 2250))]
    reports = [(s, K, full_report(K)) for s, K in rev + gen]
    return reports, time.perf_counter() - t0


def test_01_two_point_sharp():
    e = chi_cheeger(chains.two_point())
    err = max(abs(e.value - 2), abs(e.exact - 2), abs(e.value - e.exact))
    verdict(1, "two-point chi_cheeger = lambda = 2", err <= 1e-12, f"max error {err:.2e}")


def test_02_cycle_exactness():
    worst = 0.0
    for n in range(3, 9):
        e = sin_congestion_gap(chains.cycle(n))
        want = 1 - math.cos(2 * math.pi / n)
        worst = max(worst, abs(e.value - want), abs(e.value - e.exact), abs(e.exact - want))
    verdict(2, "sin congestion gap on C_3..C_8", worst <= 1e-9, f"max error {worst:.2e}")


def test_03_cycle_intermediate_bounds():
    tight, loose = 0.0, 0.0
    for n in (4, 6, 8):
        K = chains.cycle(n)
        h = conductance_global(K).global_value
        ht = sym_conductance_global(K).global_value
        tight = max(tight, abs(h * h / 2 - 2 / n**2), abs(ht * ht / 4 - 4 / n**2),
                    abs(classic_cheeger(K).forms["h^2/2"] - 2 / n**2),
                    abs(chi_cheeger(K).forms["h~^2/4"] - 4 / n**2))
    for n in range(3, 9):
        v = strong_cheeger(chains.cycle(n), SIN_PI_A).value
        loose = max(loose, abs(v - 2 * (1 - math.cos(math.pi / n))))
    verdict(3, "cycle h^2/2, h~^2/4 and strong sin bound", tight <= 1e-12 and loose <= 1e-9,
            f"closed forms {tight:.2e}, strong sin {loose:.2e}")


def test_04_odd_cycle_modified_constants():
    err_h, err_eig = 0.0, 0.0
    for n in (3, 5, 7):
        K = chains.cycle(n)
        err_h = max(err_h, abs(modified_cheeger(K).global_value - 2 * n / (n * n - 1)))
        e = sin_psi_eigen_bound(K)
        want = 1 - math.cos(math.pi / n)
        err_eig = max(err_eig, abs(e.value - want), abs(e.exact - want),
                      abs(1 - lambda_max(K) - want))
    for n in (4, 6):
        err_h = max(err_h, abs(modified_cheeger(chains.cycle(n)).global_value))
    verdict(4, "modified constant 2n/(n^2-1), sin psi eigen bound", err_h <= 1e-12 and err_eig <= 1e-9,
            f"constant {err_h:.2e}, eigen {err_eig:.2e}")


def test_05_soundness_sweep(sweep):
    reports, elapsed = sweep
    bad = []
    for s, K, r in reports:
        for e in r.entries:
            if e.error or not e.valid:
                bad.append(f"seed {s} {e.name}: {e.value!r} vs {e.exact!r} {e.error or ''}")
        ht = sym_conductance_global(K).global_value
        if spectral_gap(K) > ht + 1e-9:
            bad.append(f"seed {s}: gap {spectral_gap(K)!r} > h~ {ht!r}")
    nrev = sum(K.is_reversible for _, K, _ in reports)
    ok = not bad and len(reports) == 500 and nrev >= 250 and elapsed <= 120
    verdict(5, "soundness sweep over 500 kernels", ok,
            f"{len(bad)} violations, {elapsed:.1f}s" + (f"; first: {bad[0]}" if bad else ""))


def _identity_kernels():
    named = [chains.two_point(), chains.cycle(10), chains.cycle(7, 0.5), chains.complete(6),
             chains.hypercube(3), chains.rotation(5)]
    return named + [K for _, K in random_kernels(6, 18, 2, 10)]


def test_06_evolving_set_identities():
    mart, flow, sets = 0.0, 0.0, 0
    for K in _identity_kernels():
        for A in enumerate_proper_subsets(K):
            mart = max(mart, abs(profile(K, A).integral() - A.measure))
            sets += 1
        L = lazify(K)
        for A in enumerate_proper_subsets(L):
            q = ergodic_flow(L, A, A.complement(L))
            up, lo = ergodic_flow_identity(L, A)
            flow = max(flow, abs(up - q), abs(lo - q))
    verdict(6, "martingale and lazy flow identities", mart <= 1e-12 and flow <= 1e-12,
            f"{sets} sets, martingale {mart:.2e}, flow {flow:.2e}")


def test_07_psi_duality():
    worst, sets = 0.0, 0
    for _, K in random_kernels(7, 50, 2, 8):
        for A in enumerate_proper_subsets(K):
            worst = max(worst, abs(psi(K, A) - psi_minflow(K, A)))
            sets += 1
    verdict(7, "psi equals min flow", worst <= 1e-12, f"{sets} sets over 50 kernels, {worst:.2e}")


def test_08_rearrangement_oracle():
    res = rearrangement_suite(seed=8, count=1000, kernels=30)
    verdict(8, "rearrangement lemma on 1000 fixtures and true profiles", res.ok,
            f"passed {res.passed} failed {res.failed}" + (f"; {res.failures[0]}" if res.failures else ""))


def test_09_appendix_grid():
    g = np.linspace(0.0, 1.0, 201)
    X, Y = np.meshgrid(g, g)
    s = appendix_slack(X, Y)
    verdict(9, "appendix inequality on a 201x201 grid", s.min() >= -1e-12, f"min slack {s.min():.2e}")


def test_10_morris_peres():
    fams = [(f"lazy C_{n}", chains.cycle(n, 0.5)) for n in range(3, 17)]
    fams += [(f"lazy Q_{d}", chains.hypercube(d)) for d in range(1, 5)]
    bad = []
    for name, K in fams:
        curve = mp_mixing_curve(K, 0, 10, 100_000, seed=10)
        for k, est in enumerate(curve):
            tv = tv_distance(K, 0, k)
            if est.mean < tv - 3 * est.stderr:
                bad.append(f"{name} step {k}: {est.mean!r} +- {est.stderr!r} < {tv!r}")
    verdict(10, "Monte Carlo evolving-set bound dominates TV", not bad,
            f"{len(fams)} chains x 11 steps" + (f"; first: {bad[0]}" if bad else ""))


def test_11_reversible_strengthening(sweep):
    reports, _ = sweep
    worst, count = math.inf, 0
    for _, K, _ in reports:
        if not K.is_reversible:
            continue
        new = reversible_vertex_bound(K).value
        old, _ = stoyanov_baseline(K)
        worst = min(worst, new - old.value)
        count += 1
    verdict(11, "reversible vertex bound beats the baseline", worst >= -1e-12,
            f"{count} kernels, min margin {worst:.2e}")
