"""Shape functions, f-congestion, and the rearrangement inequality for profiles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InconsistentParams, PreconditionViolated, ZeroDenominator
from .evolving import StepFunction, batch_integrals, integrate_f, profile
from .kernel import MarkovKernel
from .report import BoundEntry, eigen_target, make_entry
from .setops import VertexSet, all_measures, best_over_subsets

TABLE_STEP = 1e-4


@dataclass(frozen=True)
class ShapeFunction:
    """A nonnegative function on [0, 1] used to weigh evolving-set sizes.

    ``symmetric`` means ``f(a) <= f(1-a)`` on (0, 1/2), which lets global
    sweeps stop at pi(A) <= 1/2. ``reflective`` is the stronger
    ``f(a) == f(1-a)``.
    """

    family: str
    func: Callable
    symmetric: bool
    reflective: bool = False
    concave: bool = False
    second_concave: bool = False
    second_derivative: Optional[Callable] = None

    def __call__(self, a):
        return self.func(a)

    @classmethod
    def tabulated(cls, values, family: str = "custom") -> "ShapeFunction":
        """Linear interpolation of a table on the uniform grid of [0, 1].

        ``values`` is either an array of samples on the grid or a callable
        sampled at spacing ``TABLE_STEP``.
        """
        if callable(values):
            grid = np.linspace(0.0, 1.0, int(round(1 / TABLE_STEP)) + 1)
            table = np.asarray(values(grid), dtype=float)
        else:
            table = np.asarray(values, dtype=float)
            grid = np.linspace(0.0, 1.0, table.size)
        if table.ndim != 1 or table.size < 2:
            raise InconsistentParams("need at least two table entries")
        if np.any(table < 0):
            raise InconsistentParams("shape functions must be nonnegative")
        half = grid < 0.5
        sym = bool(np.all(table[half] <= table[::-1][half] + 1e-12))
        refl = bool(np.allclose(table, table[::-1], atol=1e-12, rtol=0))
        concave = bool(np.all(np.diff(table, 2) <= 1e-12))
        return cls(family, lambda a: np.interp(a, grid, table), sym, refl, concave)


def _sqrt_a_pp(a):
    return -0.25 * np.power(a, -1.5)


def _sqrt_aa_pp(a):
    return -0.25 * np.power(a * (1.0 - a), -1.5)


SQRT_A = ShapeFunction("sqrt_a", lambda a: np.sqrt(np.clip(a, 0.0, None)),
                       symmetric=True, concave=True, second_concave=True,
                       second_derivative=_sqrt_a_pp)
SQRT_A_ONE_MINUS_A = ShapeFunction(
    "sqrt_a_one_minus_a", lambda a: np.sqrt(np.clip(a * (1.0 - a), 0.0, None)),
    symmetric=True, reflective=True, concave=True, second_concave=True,
    second_derivative=_sqrt_aa_pp)
SIN_PI_A = ShapeFunction("sin_pi_a", lambda a: np.clip(np.sin(np.pi * a), 0.0, None),
                         symmetric=True, reflective=True, concave=True,
                         second_concave=False,
                         second_derivative=lambda a: -np.pi ** 2 * np.sin(np.pi * a))

FAMILIES = {f.family: f for f in (SQRT_A, SQRT_A_ONE_MINUS_A, SIN_PI_A)}


def constant_shape(c: float = 1.0) -> ShapeFunction:
    return ShapeFunction("constant", lambda a: np.full(np.shape(a), float(c)),
                         symmetric=True, reflective=True, concave=True)


@dataclass(frozen=True)
class CongestionResult:
    value: float
    witness: Optional[VertexSet]
    restricted: bool


def f_congestion_set(K: MarkovKernel, A: VertexSet, f: ShapeFunction) -> float:
    """``int_0^1 f(pi(A_u)) du / f(pi(A))``."""
    den = float(f(A.measure))
    if den <= 0:
        raise ZeroDenominator(f"f(pi(A)) = {den} for A = {A.members()}")
    return integrate_f(profile(K, A), f) / den


def f_congestion(K: MarkovKernel, f: ShapeFunction, restrict: Optional[bool] = None) -> CongestionResult:
    """Maximum of the set congestion over proper subsets.

    When ``f`` is symmetric the sweep is limited to pi(A) <= 1/2 unless
    ``restrict`` says otherwise. Sets with f(pi(A)) = 0 are skipped.
    """
    restricted = f.symmetric if restrict is None else restrict
    meas = all_measures(K)

    def fn(masks):
        den = np.asarray(f(meas[masks]), dtype=float)
        num = batch_integrals(K, masks, f)
        out = np.full(masks.shape, np.nan)
        ok = den > 0
        out[ok] = num[ok] / den[ok]
        return out

    value, mask, _, _ = best_over_subsets(K, fn, half_only=restricted, maximize=True)
    if value is None:
        raise ZeroDenominator("f vanishes on every candidate set")
    return CongestionResult(value, VertexSet.from_bits(K, mask), restricted)


def generalized_cheeger_bound(K: MarkovKernel, f: ShapeFunction) -> BoundEntry:
    """``1 - C_f`` as a lower bound on 1 - lambda_max (1 - lambda_* if non-reversible)."""
    res = f_congestion(K, f)
    return make_entry(K, f"generalized_cheeger[{f.family}]", 1.0 - res.value,
                      eigen_target(K), witness=res.witness.bits)


# -- rearrangement ----------------------------------------------------------

@dataclass(frozen=True)
class RearrangementResult:
    lhs: float  # int f(g)
    rhs: float  # int f(g_hat)

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-12


def check_rearrangement(f: Callable, g: StepFunction, g_hat: StepFunction,
                        tol: float = 1e-12) -> RearrangementResult:
    """Compare ``int f(g)`` against ``int f(g_hat)`` when g majorises g_hat.

    Both must be non-increasing with values in [0, 1], equal total mass,
    and ``int_0^t g >= int_0^t g_hat`` for every t. Partial integrals are
    piecewise linear, so checking the joint breakpoints suffices.
    """
    for name, h in (("g", g), ("g_hat", g_hat)):
        if not h.is_nonincreasing(tol):
            raise PreconditionViolated(f"{name} is not non-increasing")
        if h.values.min() < -tol or h.values.max() > 1 + tol:
            raise PreconditionViolated(f"{name} leaves [0, 1]")
    if abs(g.integral() - g_hat.integral()) > tol:
        raise PreconditionViolated(
            f"total masses differ: {g.integral()!r} vs {g_hat.integral()!r}")
    for t in np.union1d(g.edges, g_hat.edges):
        if g.cumulative(t) < g_hat.cumulative(t) - tol:
            raise PreconditionViolated(f"dominance fails at t={t!r}")
    clip = lambda v: np.clip(v, 0.0, 1.0)
    return RearrangementResult(g.integral(lambda v: f(clip(v))), g_hat.integral(lambda v: f(clip(v))))


def _level(x: float, tol: float = 1e-12) -> float:
    if x < -tol or x > 1 + tol:
        raise InconsistentParams(f"profile level {x!r} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def worst_profile(kind: str, **params) -> StepFunction:
    """Extremal step profile with the same mass as a set's true profile.

    kinds and parameters:
      lazy_edge(measure, flow)
      nonlazy_twostep(measure, psi, cross)
      lazy_in_boundary(measure, boundary, p0)
      lazy_out_boundary(measure, boundary, p0)
    ``flow`` is Q(A, A^c) and ``p0`` the chain's minimal off-diagonal
    transition; ``boundary`` is pi of the relevant vertex boundary.
    """
    m = params["measure"]
    if kind == "lazy_edge":
        q = params["flow"]
        if q < 0:
            raise InconsistentParams(f"negative flow {q!r}")
        return StepFunction.from_pieces([(0.5, _level(m + 2 * q)), (1.0, _level(m - 2 * q))])
    if kind == "nonlazy_twostep":
        psi, cross = params["psi"], params["cross"]
        if psi < 0:
            raise InconsistentParams("psi must be nonnegative")
        if psi <= 1e-15:
            return StepFunction.constant(_level(m))
        if not 0 < cross < 1:
            raise InconsistentParams(f"crossing point {cross!r} must lie in (0, 1)")
        return StepFunction.from_pieces(
            [(cross, _level(m + psi / cross)), (1.0, _level(m - psi / (1 - cross)))])
    if kind in ("lazy_in_boundary", "lazy_out_boundary"):
        b, p0 = params["boundary"], params["p0"]
        if not 0 < p0 <= 0.5 or b < 0:
            raise InconsistentParams(f"bad boundary parameters boundary={b!r}, p0={p0!r}")
        if kind == "lazy_in_boundary":
            return StepFunction.from_pieces([
                (0.5, _level(m + 2 * p0 * b)), (1 - p0, _level(m)), (1.0, _level(m - b))])
        return StepFunction.from_pieces([
            (p0, _level(m + b)), (0.5, _level(m)), (1.0, _level(m - 2 * p0 * b))])
    raise InconsistentParams(f"unknown worst-case profile kind {kind!r}")


def appendix_slack(X, Y):
    """``sqrt(1-(X-Y)^2) - sqrt(XY) - sqrt((1-X)(1-Y))``; nonnegative on [0,1]^2."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return np.sqrt(1 - (X - Y) ** 2) - np.sqrt(X * Y) - np.sqrt((1 - X) * (1 - Y))
