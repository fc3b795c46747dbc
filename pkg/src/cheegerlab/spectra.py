"""Exact eigenvalue computations used as ground truth for every bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigensolveFailed, NotReversible
from .kernel import MarkovKernel, additive_symmetrization

EQUAL_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # descending reals, or complex sorted by modulus
    gap: float
    lambda_max: float | None
    lambda_star: float
    reversible: bool

    def multiplicities(self) -> list[tuple[complex | float, int]]:
        out: list[tuple] = []
        for ev in self.eigenvalues:
            if out and abs(out[-1][0] - ev) <= EQUAL_TOL:
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((ev, 1))
        return out


def _require_reversible(K: MarkovKernel) -> None:
    if not K.is_reversible:
        raise NotReversible(f"reversibility defect {K.reversibility_defect():.3g} exceeds 1e-9")


def real_eigenvalues(K: MarkovKernel) -> np.ndarray:
    """Eigenvalues of a reversible P, descending, via D^{1/2} P D^{-1/2}."""
    _require_reversible(K)
    s = np.sqrt(K.pi)
    S = s[:, None] * K.P / s[None, :]
    S = 0.5 * (S + S.T)
    return np.linalg.eigvalsh(S)[::-1]


def real_spectrum(K: MarkovKernel) -> Spectrum:
    ev = real_eigenvalues(K)
    if abs(ev[0] - 1.0) > 1e-9:
        raise EigensolveFailed(f"top eigenvalue {ev[0]!r} is not 1")
    lmax = max(ev[1], abs(ev[-1]))
    return Spectrum(ev, 1.0 - ev[1], lmax, lmax, True)


def spectral_gap(K: MarkovKernel) -> float:
    """``1 - lambda_1((P + P*)/2)``."""
    S = K if K.is_reversible else additive_symmetrization(K)
    return 1.0 - real_eigenvalues(S)[1]


def lambda_max(K: MarkovKernel) -> float:
    ev = real_eigenvalues(K)
    return float(max(ev[1], abs(ev[-1])))


def complex_eigenvalues(K: MarkovKernel) -> np.ndarray:
    """All eigenvalues of P with the Perron root first, the rest by decreasing modulus."""
    ev, vecs = np.linalg.eig(K.P)
    resid = float(np.abs(K.P @ vecs - vecs * ev[None, :]).max())
    if not np.isfinite(resid) or resid > 1e-10:
        raise EigensolveFailed(f"eigenpair residual {resid:.3g} exceeds 1e-10")
    k = int(np.argmin(np.abs(ev - 1.0)))
    if abs(ev[k] - 1.0) > 1e-9:
        raise EigensolveFailed(f"no eigenvalue within 1e-9 of 1 (closest {ev[k]!r})")
    rest = np.delete(ev, k)
    rest = rest[np.argsort(-np.abs(rest), kind="stable")]
    return np.concatenate([[ev[k]], rest])


def lambda_star(K: MarkovKernel) -> float:
    """Largest modulus among the non-Perron eigenvalues."""
    if K.is_reversible:
        return lambda_max(K)
    ev = complex_eigenvalues(K)
    return float(np.abs(ev[1:]).max())


def spectrum(K: MarkovKernel) -> Spectrum:
    if K.is_reversible:
        return real_spectrum(K)
    ev = complex_eigenvalues(K)
    return Spectrum(ev, spectral_gap(K), None, float(np.abs(ev[1:]).max()), False)
