"""Robust-positive-expectation (RPE) feasibility analysis.

Answers, for a feedback parameter K > 0 and trader-known uncertainty bounds,
whether the two-stock SLS controller's expected gain is positive for every
admissible market — and solves for the set of all such K. The machinery:

* ``gain_polynomial`` — the normalized expected-gain polynomial in theta=k*mu_1,
* ``critical_uncertainty`` — the smallest uncertainty at which positivity fails,
* ``critical_slope_numerator`` (+ derivative) — monotonicity/maximality helpers,
* ``rpe_holds`` — the necessary-and-sufficient decision rule (odd/even n),
* ``worst_case_gain_grid`` — brute-force oracle over the admissible set,
* ``admissible_k_region`` — parameter sweep with bisection-refined boundaries,
* ``max_feasible_eps`` — largest uncertainty bound a given K can tolerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DomainError,
    GainOverflowError,
    SingularityError,
    ValidationError,
)
from .gains import _pow_checked, expected_gain_two
from .model import UncertaintySet, derive_controller, periods, validate_uncertainty

# evaluations of the slope helpers closer than this to 2**(1/n) - 1 are
# rejected as singular rather than returned as huge finite numbers
SINGULARITY_GUARD = 1e-9


def gain_polynomial(theta: float, eps: float, n) -> float:
    """Normalized expected-gain polynomial (1+theta)**n + (1-theta*(1+eps))**n - 2.

    For theta = k*mu_1 its sign equals the sign of expected_gain_two for any
    i0, k > 0 (they differ by the positive prefactor i0/k).
    """
    n = periods(n)
    if not eps >= 0.0:
        raise ValidationError("eps_negative", f"eps must be >= 0, got {eps}")
    return (
        _pow_checked(1.0 + theta, n)
        + _pow_checked(1.0 - theta * (1.0 + eps), n)
        - 2.0
    )


def nth_root(x: float, n) -> float:
    """Sign-correct real n-th root.

    Unique positive root for x > 0; for x < 0 and odd n the root is
    -(|x| ** (1/n)); x < 0 with even n has no real root and raises
    DomainError.
    """
    n = periods(n)
    if n < 1:
        raise ValidationError("root_degree_invalid", f"degree must be >= 1, got {n}")
    if x < 0.0:
        if n % 2 == 0:
            raise DomainError(f"no real even-degree root of negative value {x}")
        return -((-x) ** (1.0 / n))
    return x ** (1.0 / n)


def singularity_threshold(n) -> float:
    """The excluded point 2**(1/n) - 1 of the slope helpers.

    For even n it also separates finite from infinite critical uncertainty.
    """
    return 2.0 ** (1.0 / periods(n)) - 1.0


@dataclass(frozen=True)
class CriticalBound:
    """Critical uncertainty level; ``value`` may be math.inf.

    Infinity is always set explicitly from the case analysis, never produced
    by a floating-point overflow.
    """

    value: float

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def critical_uncertainty(theta: float, n) -> CriticalBound:
    """Smallest eps > 0 at which gain_polynomial(theta, eps, n) stops being positive.

    Case analysis:

    * theta < 0: the polynomial is positive for all eps >= 0, so inf.
    * theta = 0: the polynomial is identically zero, so 0.
    * theta > 0, even n with (1+theta)**n > 2: the first term alone keeps the
      polynomial positive, so inf.
    * otherwise the finite root (1 - nth_root(2 - (1+theta)**n, n)) / theta - 1.
    """
    n = periods(n)
    if theta < 0.0:
        return CriticalBound(math.inf)
    if theta == 0.0:
        return CriticalBound(0.0)
    x = 2.0 - _pow_checked(1.0 + theta, n)
    if n % 2 == 0 and x < 0.0:
        return CriticalBound(math.inf)
    return CriticalBound((1.0 - nth_root(x, n)) / theta - 1.0)


def _slope_core(theta: float, n: int) -> tuple[float, float]:
    """Common setup of the slope helpers: returns (x, nth_root(x, n)) with
    singularity and domain guards applied."""
    if not theta > 0.0:
        raise ValidationError(
            "theta_nonpositive", f"theta must be > 0, got {theta}"
        )
    if abs(theta - singularity_threshold(n)) <= SINGULARITY_GUARD:
        raise SingularityError(
            f"theta={theta} is within {SINGULARITY_GUARD} of 2**(1/{n}) - 1"
        )
    x = 2.0 - _pow_checked(1.0 + theta, n)
    return x, nth_root(x, n)


def critical_slope_numerator(theta: float, n) -> float:
    """Numerator f of the critical-uncertainty slope f(theta)/theta**2.

    With x = 2 - (1+theta)**n and r = nth_root(x, n):

        f(theta) = r - 1 + theta * (1+theta)**(n-1) * r / x

    where r/x realizes the fractional power x**(1/n - 1) under the sign
    convention of nth_root. Defined for theta > 0 away from the excluded
    point 2**(1/n) - 1 (where x = 0); for even n beyond that point x < 0 and
    no real root exists (DomainError) — that branch is never needed because
    the critical uncertainty is infinite there.
    """
    n = periods(n)
    x, r = _slope_core(theta, n)
    return r - 1.0 + theta * _pow_checked(1.0 + theta, n - 1) * (r / x)


def critical_slope_numerator_derivative(theta: float, n) -> float:
    """Derivative f' of critical_slope_numerator:

        f'(theta) = 2 * (n-1) * theta * (1+theta)**(n-2) * r / x**2

    with r/x**2 realizing x**(1/n - 2) under the nth_root sign convention.
    Positive on (0, 2**(1/n) - 1); negative beyond it for odd n.
    """
    n = periods(n)
    x, r = _slope_core(theta, n)
    return 2.0 * (n - 1) * theta * _pow_checked(1.0 + theta, n - 2) * (r / (x * x))


def critical_uncertainty_derivative(theta: float, n) -> float:
    """Slope of the finite branch of critical_uncertainty: f(theta) / theta**2."""
    return critical_slope_numerator(theta, n) / (theta * theta)


@dataclass(frozen=True)
class RpeDecision:
    """Outcome of the feasibility test plus the inequality that decided it."""

    holds: bool
    reason: str

    def __bool__(self) -> bool:
        return self.holds


def rpe_holds(k: float, uset: UncertaintySet, i0: float, n) -> RpeDecision:
    """Necessary-and-sufficient test that the two-stock expected gain is
    positive for every admissible (mu_1, eps).

    Odd n: the gain must be positive at both momentum endpoints with the
    uncertainty at its bound. Even n: either k exceeds
    (2**(1/n) - 1)/mu_min (the long arm's compounding alone clears the
    break-even level), or k is at most 1/(mu_min*(1 + eps_max)) and the gain
    at (mu_min, eps_max) is positive. Between those two thresholds the
    witness eps = 1/(k*mu_min) - 1 is admissible and drives the gain to
    (i0/k)*((1 + k*mu_min)**n - 2) <= 0.
    """
    n = periods(n)
    params = derive_controller(i0, k, uset)
    g_lo = expected_gain_two(params, uset.mu_min, uset.eps_max, n)
    if n % 2 == 1:
        if not g_lo > 0.0:
            return RpeDecision(
                False, f"odd n: gain at (mu_min, eps_max) is {g_lo:.6g} <= 0"
            )
        g_hi = expected_gain_two(params, uset.mu_max, uset.eps_max, n)
        if not g_hi > 0.0:
            return RpeDecision(
                False, f"odd n: gain at (mu_max, eps_max) is {g_hi:.6g} <= 0"
            )
        return RpeDecision(
            True, "odd n: gain positive at (mu_min, eps_max) and (mu_max, eps_max)"
        )
    threshold = singularity_threshold(n) / uset.mu_min
    if k > threshold:
        return RpeDecision(True, f"even n: k > (2**(1/n) - 1)/mu_min = {threshold:.6g}")
    cap = 1.0 / (uset.mu_min * (1.0 + uset.eps_max))
    if k > cap:
        return RpeDecision(
            False,
            f"even n: k in ({cap:.6g}, {threshold:.6g}], where the admissible "
            f"witness eps = 1/(k*mu_min) - 1 makes the gain non-positive",
        )
    if not g_lo > 0.0:
        return RpeDecision(
            False, f"even n: gain at (mu_min, eps_max) is {g_lo:.6g} <= 0"
        )
    return RpeDecision(
        True,
        f"even n: k <= 1/(mu_min*(1 + eps_max)) = {cap:.6g} and gain at "
        f"(mu_min, eps_max) positive",
    )


class WorstCase(NamedTuple):
    value: float
    mu_1: float
    eps: float


def worst_case_gain_grid(
    k: float,
    uset: UncertaintySet,
    i0: float,
    n,
    grid: tuple[int, int] = (200, 200),
) -> WorstCase:
    """Brute-force minimum of expected_gain_two over a discretized admissible set.

    The momentum axis covers BOTH sign intervals [-mu_max, -mu_min] and
    [mu_min, mu_max] with grid[0] points in total (half per sign, endpoints
    included); eps covers [0, eps_max] with grid[1] points. Completely
    independent of the rpe_holds case analysis, so it serves as its oracle.
    """
    n = periods(n)
    params = derive_controller(i0, k, uset)
    n_mu, n_eps = int(grid[0]), int(grid[1])
    if n_mu < 2 or n_eps < 1:
        raise ValidationError(
            "grid_too_coarse", f"grid must be at least (2, 1), got {grid}"
        )
    half = n_mu // 2
    mu = np.concatenate(
        [
            np.linspace(-uset.mu_max, -uset.mu_min, half),
            np.linspace(uset.mu_min, uset.mu_max, n_mu - half),
        ]
    )
    eps = np.linspace(0.0, uset.eps_max, n_eps)
    km = k * mu
    with np.errstate(over="ignore"):
        term1 = np.power(1.0 + km, n)
        term2 = np.power(1.0 - np.outer(km, 1.0 + eps), n)
        gains = (i0 / k) * (term1[:, None] + term2 - 2.0)
    i, j = np.unravel_index(int(np.argmin(gains)), gains.shape)
    return WorstCase(float(gains[i, j]), float(mu[i]), float(eps[j]))


@dataclass(frozen=True)
class KRegion:
    """Feedback-parameter values passing rpe_holds, as disjoint open intervals.

    Open endpoints: the feasibility inequalities are strict, and the gain is
    exactly break-even on a boundary. An upper endpoint of math.inf marks a
    region proven unbounded (even n past the long-arm threshold); otherwise
    the last interval is truncated at the scanned range.
    """

    intervals: tuple[tuple[float, float], ...]
    sweep_step: float
    refined: bool = True

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, k: float) -> bool:
        return any(lo < k < hi for lo, hi in self.intervals)


def _refine_boundary(
    lo: float, hi: float, feasible, rel_tol: float, max_iter: int = 200
) -> float:
    """Bisect a feasibility transition bracketed by (lo, hi); ``lo`` may be 0
    (treated as infeasible: the gain vanishes in the k -> 0 limit)."""
    lo_feasible = feasible(lo) if lo > 0.0 else False
    for _ in range(max_iter):
        if hi - lo <= rel_tol * max(abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if feasible(mid) == lo_feasible:
            lo = mid
        else:
            hi = mid
    boundary = 0.5 * (lo + hi)
    return 0.0 if lo == 0.0 else boundary


def admissible_k_region(
    uset: UncertaintySet,
    i0: float,
    n,
    k_max_scan: float | None = None,
    step: float | None = None,
    refine_rel_tol: float = 1e-4,
) -> KRegion:
    """Sweep rpe_holds over (0, k_max_scan] and refine every feasibility
    transition by bisection to a relative width of ``refine_rel_tol``.

    Defaults: k_max_scan = 10/mu_min (comfortably past any practical upper
    boundary) and a step giving at least 10_000 scan points. The result may
    be empty when the uncertainty bounds are too large — the pair is then
    deemed not tradable.
    """
    n = periods(n)
    validate_uncertainty(uset)
    if k_max_scan is None:
        k_max_scan = 10.0 / uset.mu_min
    if step is None:
        step = k_max_scan / 10_000.0
    if not (k_max_scan > step > 0.0):
        raise ValidationError(
            "scan_degenerate",
            f"need k_max_scan > step > 0, got k_max_scan={k_max_scan}, step={step}",
        )

    def feasible(k: float) -> bool:
        return rpe_holds(k, uset, i0, n).holds

    ks = np.arange(step, k_max_scan + 0.5 * step, step)
    flags = [feasible(float(k)) for k in ks]

    intervals: list[tuple[float, float]] = []
    refined = False
    open_lo: float | None = None
    prev_k = 0.0
    for k, ok in zip(ks, flags):
        k = float(k)
        if ok and open_lo is None:
            open_lo = _refine_boundary(prev_k, k, feasible, refine_rel_tol)
            refined = True
        elif not ok and open_lo is not None:
            hi = _refine_boundary(prev_k, k, feasible, refine_rel_tol)
            intervals.append((open_lo, hi))
            open_lo = None
            refined = True
        prev_k = k
    if open_lo is not None:
        # feasible through the end of the scan; for even n past the long-arm
        # threshold the decision rule is k-independent, so the region is
        # provably unbounded
        last_k = float(ks[-1])
        if n % 2 == 0 and last_k > singularity_threshold(n) / uset.mu_min:
            intervals.append((open_lo, math.inf))
        else:
            intervals.append((open_lo, last_k))
    return KRegion(tuple(intervals), sweep_step=float(step), refined=refined)


def max_feasible_eps(
    k: float,
    mu_min: float,
    mu_max: float,
    beta_0: float,
    i0: float,
    n,
    tol: float = 1e-12,
) -> float:
    """Supremum of eps_max for which rpe_holds stays true at this k.

    Always positive for k > 0: with zero uncertainty the single-stock
    positivity fact applies, and the decision rule is monotone in eps_max.
    Returns math.inf for even n when k clears (2**(1/n) - 1)/mu_min, where
    the rule is eps-independent. The returned value is the last bracket
    point verified feasible, so every eps_max strictly below it passes.
    """
    n = periods(n)

    def ok(eps_max: float) -> bool:
        return rpe_holds(
            k, UncertaintySet(mu_min, mu_max, eps_max, beta_0), i0, n
        ).holds

    if not ok(0.0):
        # mathematically impossible for k > 0; reachable only when k*mu is so
        # tiny that the gain rounds to zero in double precision
        raise ValidationError(
            "eps_threshold_undefined",
            f"gain at eps_max = 0 is not resolvably positive for k={k}",
        )
    if n % 2 == 0 and k > singularity_threshold(n) / mu_min:
        return math.inf
    lo, hi = 0.0, 1.0
    while ok(hi):
        lo = hi
        hi *= 2.0
    while hi - lo > max(tol, 1e-10 * hi):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
