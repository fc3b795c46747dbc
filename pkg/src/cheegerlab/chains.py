"""Kernel generators: the worked examples plus seeded random fixtures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .kernel import MarkovKernel, make_kernel

FAMILIES = ("two_point", "cycle", "lazy_cycle", "complete", "hypercube",
            "rotation", "random_reversible", "random_general")


@dataclass(frozen=True)
class ChainSpec:
    family: str
    n: int = 2
    d: int = 1
    seed: int = 0
    laziness: float | None = None
    density: float = 0.6  # edge keep-probability for random families

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown chain family {self.family!r}")
        if self.family == "hypercube":
            if self.d < 1:
                raise InvalidSpec("hypercube needs d >= 1")
        elif self.n < 2:
            raise InvalidSpec("need n >= 2")
        if self.family == "cycle" and self.n < 3:
            raise InvalidSpec("cycle needs n >= 3; use two_point for n = 2")
        if self.laziness is not None and not 0 <= self.laziness < 1:
            raise InvalidSpec("laziness must lie in [0, 1)")
        if not 0 < self.density <= 1:
            raise InvalidSpec("density must lie in (0, 1]")


def _hold(P: np.ndarray, laziness: float | None) -> np.ndarray:
    if not laziness:
        return P
    return laziness * np.eye(P.shape[0]) + (1 - laziness) * P


def two_point() -> MarkovKernel:
    return make_kernel([[0.0, 1.0], [1.0, 0.0]], ["u", "v"])


def cycle(n: int, laziness: float | None = None) -> MarkovKernel:
    """Simple random walk on Z/nZ, ``P(i, i +- 1) = 1/2``."""
    P = np.zeros((n, n))
    for i in range(n):
        P[i, (i + 1) % n] += 0.5
        P[i, (i - 1) % n] += 0.5
    return make_kernel(_hold(P, laziness))


def complete(n: int, laziness: float | None = None) -> MarkovKernel:
    P = (np.ones((n, n)) - np.eye(n)) / (n - 1)
    return make_kernel(_hold(P, laziness))


def hypercube(d: int, laziness: float | None = 0.5) -> MarkovKernel:
    """Walk on {0,1}^d flipping a uniform coordinate; lazy by default."""
    n = 1 << d
    P = np.zeros((n, n))
    for x in range(n):
        for i in range(d):
            P[x, x ^ (1 << i)] = 1.0 / d
    labels = [format(x, f"0{d}b") for x in range(n)]
    return make_kernel(_hold(P, laziness), labels)


def rotation(n: int) -> MarkovKernel:
    """Deterministic ``i -> i+1 mod n``; non-reversible for n >= 3."""
    P = np.zeros((n, n))
    for i in range(n):
        P[i, (i + 1) % n] = 1.0
    return make_kernel(P)


def random_reversible(n: int, seed: int, density: float = 0.6) -> MarkovKernel:
    """Random walk on a random connected weighted graph.

    Weights are symmetric, so the kernel is reversible by construction with
    pi proportional to vertex weight.
    """
    rng = np.random.default_rng(seed)
    W = rng.exponential(size=(n, n))
    W = np.triu(W * (rng.random((n, n)) < density), 1)
    perm = rng.permutation(n)
    for a, b in zip(perm[:-1], perm[1:]):  # spanning path keeps it connected
        if W[min(a, b), max(a, b)] == 0:
            W[min(a, b), max(a, b)] = rng.exponential()
    W = W + W.T
    W[np.diag_indices(n)] = rng.exponential(size=n) * (rng.random(n) < 0.5)
    return make_kernel(W / W.sum(axis=1, keepdims=True))


def random_general(n: int, seed: int, density: float = 0.6) -> MarkovKernel:
    """Random sparse kernel with a Hamiltonian cycle for irreducibility."""
    rng = np.random.default_rng(seed)
    W = rng.exponential(size=(n, n)) * (rng.random((n, n)) < density)
    perm = rng.permutation(n)
    for a, b in zip(perm, np.roll(perm, -1)):
        if W[a, b] == 0:
            W[a, b] = rng.exponential()
    return make_kernel(W / W.sum(axis=1, keepdims=True))


def generate(spec: ChainSpec) -> MarkovKernel:
    spec.validate()
    f = spec.family
    if f == "two_point":
        K = two_point()
        return make_kernel(_hold(K.P, spec.laziness), K.labels) if spec.laziness else K
    if f == "cycle":
        return cycle(spec.n, spec.laziness)
    if f == "lazy_cycle":
        return cycle(spec.n, 0.5 if spec.laziness is None else spec.laziness)
    if f == "complete":
        return complete(spec.n, spec.laziness)
    if f == "hypercube":
        return hypercube(spec.d, 0.5 if spec.laziness is None else spec.laziness)
    if f == "rotation":
        return rotation(spec.n)
    if f == "random_reversible":
        K = random_reversible(spec.n, spec.seed, spec.density)
    else:
        K = random_general(spec.n, spec.seed, spec.density)
    return make_kernel(_hold(K.P, spec.laziness)) if spec.laziness else K
