import json

import numpy as np
import pytest
from hypothesis import given

from cheegerlab import chains
from cheegerlab.errors import NegativeEntry, NoPositiveEntry, NotIrreducible, NotStochastic
from cheegerlab.kernel import (MarkovKernel, additive_symmetrization, dump_kernel, ergodic_flow,
                               holding_lazify,
                               lazify, load_kernel, make_kernel, min_transition_prob,
                               time_reversal, tv_distance)
from cheegerlab.setops import VertexSet

import oracles
from strategies import kernels


def test_two_point_stationary(two_point):
    assert np.allclose(two_point.pi, [0.5, 0.5], atol=1e-15)
    assert two_point.labels == ("u", "v")


def test_cycle_uniform():
    K = chains.cycle(5)
    assert np.allclose(K.pi, 0.2, atol=1e-14)


def test_identity_reducible():
    with pytest.raises(NotIrreducible):
        make_kernel(np.eye(2))


def test_bad_rows():
    with pytest.raises(NotStochastic):
        make_kernel([[0.5, 0.6], [1.0, 0.0]])
    with pytest.raises(NegativeEntry):
        make_kernel([[1.5, -0.5], [1.0, 0.0]])
    with pytest.raises(NotStochastic):
        make_kernel([[1.0]])
    with pytest.raises(NotStochastic):
        make_kernel([[0.0, 1.0], [1.0, 0.0]], labels=["a"])


def test_kernel_errors_are_value_errors():
    with pytest.raises(ValueError):
        make_kernel([[0.0, 2.0], [1.0, 0.0]])


def test_small_row_drift_normalised():
    K = make_kernel([[0.0, 1.0 + 1e-10], [1.0, 0.0]])
    assert abs(K.P.sum(axis=1) - 1).max() < 1e-15


def test_arrays_read_only(c3):
    with pytest.raises(ValueError):
        c3.P[0, 0] = 1.0


def test_reversal_examples(two_point):
    assert np.array_equal(time_reversal(two_point).P, two_point.P)
    R = chains.rotation(3)
    Rs = time_reversal(R).P
    for i in range(3):
        assert Rs[i, (i - 1) % 3] == pytest.approx(1.0, abs=1e-14)
    S = additive_symmetrization(R).P
    assert np.allclose(S, chains.cycle(3).P, atol=1e-14)


def test_lazify_examples(two_point, c3):
    assert np.allclose(lazify(two_point).P, 0.5)
    L = lazify(c3).P
    assert np.allclose(np.diag(L), 0.5)
    assert L[0, 1] == pytest.approx(0.25) and L[0, 2] == pytest.approx(0.25)
    lazy = chains.cycle(4, laziness=0.5)
    assert np.all(np.diag(lazify(lazy).P) >= 0.75 - 1e-15)
    assert np.allclose(holding_lazify(chains.rotation(3)).P[0], [0.5, 0.5, 0.0])


@given(kernels())
def test_transforms_preserve_pi(K):
    for T in (time_reversal(K), additive_symmetrization(K), lazify(K)):
        assert np.abs(K.pi @ T.P - K.pi).max() < 1e-12
        assert np.abs(T.P.sum(axis=1) - 1).max() < 1e-12
    assert lazify(K).is_reversible and lazify(K).is_lazy
    if K.is_reversible:
        assert np.allclose(time_reversal(K).P, K.P, atol=1e-12)


@given(kernels())
def test_stationary_vs_eigenvector(K):
    w, V = np.linalg.eig(K.P.T)
    v = np.real(V[:, np.argmin(np.abs(w - 1))])
    v = v / v.sum()
    assert np.abs(v - K.pi).max() < 1e-9
    assert np.abs(K.pi @ K.P - K.pi).max() <= 1e-10


def test_flow_examples():
    C5 = chains.cycle(5)
    for start in range(5):
        A = VertexSet.of(C5, [(start + k) % 5 for k in range(2)])
        assert ergodic_flow(C5, A, A.complement(C5)) == pytest.approx(0.2, abs=1e-15)
    assert ergodic_flow(C5, C5.full_mask, C5.full_mask) == pytest.approx(1.0, abs=1e-15)
    C4 = chains.cycle(4)
    assert ergodic_flow(C4, 0b0011, 0b1100) == pytest.approx(0.25, abs=1e-15)


@given(kernels())
def test_flow_balance(K):
    # Q(A, A^c) = Q(A^c, A) for every kernel
    for A in oracles.proper_subsets(K.n):
        bits = sum(1 << i for i in A)
        comp = bits ^ K.full_mask
        q = ergodic_flow(K, bits, comp)
        assert q == pytest.approx(oracles.flow(K, A, oracles.complement(K.n, A)), abs=1e-14)
        assert q == pytest.approx(ergodic_flow(K, comp, bits), abs=1e-14)


def test_min_transition(c3, lazy_c3, two_point):
    assert min_transition_prob(chains.cycle(6)) == 0.5
    assert min_transition_prob(lazify(c3), include_diagonal=True) == 0.25
    assert min_transition_prob(lazy_c3) == 0.25
    assert min_transition_prob(two_point) == 1.0
    # bypass validation to get a kernel with no off-diagonal support
    frozen = MarkovKernel(np.eye(2), np.array([0.5, 0.5]))
    with pytest.raises(NoPositiveEntry):
        min_transition_prob(frozen)


def test_tv_examples(two_point, lazy_c3):
    assert tv_distance(two_point, 0, 0) == pytest.approx(0.5)
    for n in range(6):
        assert tv_distance(two_point, 0, n) == pytest.approx(0.5, abs=1e-15)
    assert tv_distance(lazy_c3, 0, 0) == pytest.approx(2 / 3)
    seq = [tv_distance(lazy_c3, 0, n) for n in range(30)]
    assert all(a >= b - 1e-15 for a, b in zip(seq, seq[1:]))
    assert seq[-1] < 1e-8
    with pytest.raises(ValueError):
        tv_distance(lazy_c3, 0, -1)


@given(kernels())
def test_tv_matches_oracle(K):
    for n in (0, 1, 3):
        assert tv_distance(K, 0, n) == pytest.approx(oracles.tv(K, 0, n), abs=1e-12)


def test_json_round_trip(tmp_path):
    for K in (chains.hypercube(2), chains.random_general(5, 3), chains.random_reversible(6, 1)):
        path = tmp_path / "k.json"
        path.write_text(dump_kernel(K))
        K2 = load_kernel(path)
        assert np.array_equal(K.P, K2.P)
        assert np.array_equal(K.pi, K2.pi)
        assert K.labels == K2.labels


def test_load_rejects_bad_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps([[1, 0], [0, 1]]))
    with pytest.raises(NotStochastic):
        load_kernel(p)
