"""Slow, direct implementations used as test oracles.

Nothing here shares code with the package beyond reading ``K.P`` and
``K.pi``: sets are tuples, flows are double loops, profiles are evaluated
pointwise from the definition of A_u.
"""
from itertools import combinations

import numpy as np


def proper_subsets(n, half_pi=None):
    for r in range(1, n):
        for A in combinations(range(n), r):
            if half_pi is None or sum(half_pi[i] for i in A) <= 0.5 + 1e-12:
                yield A


def measure(pi, A):
    if len(A) == len(pi):
        return 1.0  # pi(V) = 1 by definition, not by rounding
    return sum(pi[i] for i in A)


def complement(n, A):
    return tuple(i for i in range(n) if i not in A)


def flow(K, A, B):
    return sum(K.pi[x] * K.P[x, y] for x in A for y in B)


def evolved(K, A, u):
    """A_u straight from the definition."""
    return tuple(y for y in range(K.n) if flow(K, A, [y]) >= u * K.pi[y])


def profile_pieces(K, A):
    """(length, pi(A_u)) on each maximal interval where A_u is constant."""
    cuts = sorted({0.0, 1.0} | {min(1.0, flow(K, A, [y]) / K.pi[y]) for y in range(K.n)})
    cuts = [c for c in cuts if 0.0 <= c <= 1.0]
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi > lo:
            out.append((hi - lo, measure(K.pi, evolved(K, A, 0.5 * (lo + hi)))))
    return out


def integral(K, A, f=lambda a: a):
    return sum(L * f(v) for L, v in profile_pieces(K, A))


def psi(K, A):
    m = measure(K.pi, A)
    return 0.5 * integral(K, A, lambda a: abs(a - m))


def conductance(K):
    return min(flow(K, A, complement(K.n, A)) / measure(K.pi, A)
               for A in proper_subsets(K.n, K.pi))


def sym_conductance(K):
    return min(flow(K, A, complement(K.n, A)) / (measure(K.pi, A) * (1 - measure(K.pi, A)))
               for A in proper_subsets(K.n))


def inner_boundary(K, A):
    Ac = complement(K.n, A)
    return tuple(x for x in A if any(K.P[x, y] > 0 for y in Ac))


def outer_boundary(K, A):
    """States outside A that can step into A, i.e. the inner boundary of A^c."""
    return tuple(y for y in complement(K.n, A) if any(K.P[y, x] > 0 for x in A))


def vertex_expansions(K):
    h_in = h_out = h_in_t = np.inf
    for A in proper_subsets(K.n, K.pi):
        m = measure(K.pi, A)
        h_in = min(h_in, measure(K.pi, inner_boundary(K, A)) / m)
        h_out = min(h_out, measure(K.pi, outer_boundary(K, A)) / m)
        h_in_t = min(h_in_t, measure(K.pi, inner_boundary(K, A)) / (m * (1 - m)))
    return h_in, h_out, h_in_t


def hbar_tilde(K):
    return min(psi(K, A) / (measure(K.pi, A) * (1 - measure(K.pi, A)))
               for A in proper_subsets(K.n))


def hbar_out(K):
    best = np.inf
    for A in proper_subsets(K.n, K.pi):
        target = 1 - measure(K.pi, A)
        for r in range(K.n + 1):
            for B in combinations(range(K.n), r):
                if abs(measure(K.pi, B) - target) <= 1e-12:
                    hit = [x for x in B if flow(K, A, [x]) > 0]
                    best = min(best, measure(K.pi, hit) / measure(K.pi, A))
    return best


def psi_minflow(K, A):
    """min Q(A,B) + fractional share of one more state, B of measure just below pi(A^c)."""
    target = 1 - measure(K.pi, A)
    best = np.inf
    for r in range(K.n):
        for B in combinations(range(K.n), r):
            mB = measure(K.pi, B)
            if mB > target + 1e-12:
                continue
            for v in range(K.n):
                if v in B or mB + K.pi[v] <= target - 1e-12:
                    continue
                frac = min(1.0, max(0.0, (target - mB) / K.pi[v]))
                best = min(best, flow(K, A, B) + frac * flow(K, A, [v]))
    return best


def eigenvalues(K):
    """All eigenvalues of P, general solver, sorted by descending real part."""
    ev = np.linalg.eigvals(K.P)
    return ev[np.argsort(-ev.real)]


def gap(K):
    R = K.P.T * K.pi[None, :] / K.pi[:, None]
    S = 0.5 * (K.P + R)
    ev = np.sort(np.linalg.eigvals(S).real)[::-1]
    return 1 - ev[1]


def lambda_max(K):
    ev = np.sort(np.linalg.eigvals(K.P).real)
    return max(ev[-2], abs(ev[0]))


def lambda_star(K):
    ev = np.linalg.eigvals(K.P)
    # drop one eigenvalue at 1
    i = int(np.argmin(np.abs(ev - 1)))
    return float(np.max(np.abs(np.delete(ev, i))))


def tv(K, x, n):
    row = np.linalg.matrix_power(K.P, n)[x]
    return 0.5 * np.abs(row - K.pi).sum()


def mp_curve(K, x, steps):
    """Exact E sqrt(min(pi(S_k), 1 - pi(S_k))) / (2 pi(x)) by propagating the law of S_k."""
    dist = {(x,): 1.0}
    out = []
    for _ in range(steps + 1):
        total = 0.0
        for S, p in dist.items():
            m = measure(K.pi, S)
            total += p * np.sqrt(max(0.0, min(m, 1 - m)))
        out.append(total / (2 * K.pi[x]))
        nxt = {}
        for S, p in dist.items():
            cuts = sorted({0.0, 1.0} | {min(1.0, flow(K, S, [y]) / K.pi[y]) for y in range(K.n)})
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                if hi > lo:
                    T = evolved(K, S, 0.5 * (lo + hi)) if 0 < len(S) < K.n else S
                    nxt[T] = nxt.get(T, 0.0) + p * (hi - lo)
        dist = nxt
    return out
