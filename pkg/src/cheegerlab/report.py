"""Report rows for lower bounds and the exact targets they are checked against."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .kernel import MarkovKernel
from .spectra import lambda_star, real_eigenvalues, spectral_gap

VALID_SLACK = 1e-9

GAP = "gap"
ONE_MINUS_LMAX = "1-lambda_max"
ONE_MINUS_LSTAR = "1-lambda_star"


@lru_cache(maxsize=1024)
def exact_targets(K: MarkovKernel) -> dict[str, Optional[float]]:
    """Exact values of the three quantities bounds can target.

    Keyed on the kernel object itself, which is immutable.
    """
    out = {GAP: spectral_gap(K), ONE_MINUS_LSTAR: 1.0 - lambda_star(K), ONE_MINUS_LMAX: None}
    if K.is_reversible:
        ev = real_eigenvalues(K)
        out[ONE_MINUS_LMAX] = 1.0 - max(ev[1], abs(ev[-1]))
    return out


def eigen_target(K: MarkovKernel) -> str:
    return ONE_MINUS_LMAX if K.is_reversible else ONE_MINUS_LSTAR


@dataclass
class BoundEntry:
    """One lower bound with the exact value it must not exceed.

    ``forms`` holds weaker relaxations printed alongside the main value;
    ``upper`` is an optional upper bound on the same target.
    """

    name: str
    value: float
    target: str
    exact: float
    witness: Optional[int] = None
    forms: dict[str, float] = field(default_factory=dict)
    upper: Optional[float] = None
    route: str = "direct"
    error: Optional[str] = None

    @property
    def valid(self) -> bool:
        if self.error is not None:
            return True  # not evaluated; reported separately
        ok = self.value <= self.exact + VALID_SLACK
        ok &= all(v <= self.exact + VALID_SLACK for v in self.forms.values())
        if self.upper is not None:
            ok &= self.exact <= self.upper + VALID_SLACK
        return bool(ok)

    @property
    def slack(self) -> float:
        return self.exact - self.value


def make_entry(K: MarkovKernel, name: str, value: float, target: str, **kw) -> BoundEntry:
    return BoundEntry(name=name, value=float(value), target=target,
                      exact=float(exact_targets(K)[target]), **kw)


@dataclass
class BoundReport:
    n: int
    reversible: bool
    lazy: bool
    p0: float
    p0_hat: float
    gap: float
    lambda_max: Optional[float]
    lambda_star: float
    entries: list[BoundEntry]

    @property
    def all_valid(self) -> bool:
        return all(e.valid for e in self.entries)

    def get(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)
