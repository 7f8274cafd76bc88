"""Closed-form expected gain-loss functions for SLS controllers.

The single-stock and two-stock closed forms are evaluated exactly on double
floats; the stage recursion is an independent numerical oracle for both
(deliberately sharing no helper with them). Magnitudes beyond the double
range raise GainOverflowError instead of returning inf.
"""

from __future__ import annotations

import math

from .errors import GainOverflowError, ValidationError
from .model import ControllerParams, periods


def _pow_checked(base: float, n: int) -> float:
    # float ** int raises OverflowError once the result leaves double range
    try:
        return base**n
    except OverflowError:
        raise GainOverflowError(
            f"({base:g})**{n} exceeds the double-precision range"
        ) from None


def _require_positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise ValidationError(f"{name}_nonpositive", f"{name} must be > 0, got {value}")


def expected_gain_single(i0: float, k: float, mu: float, n) -> float:
    """Expected cumulative gain-loss of the single-stock SLS controller.

        (i0 / k) * ((1 + k*mu)**n + (1 - k*mu)**n - 2)

    Positive for every mu != 0 when n >= 2 (since (1+x)**n + (1-x)**n > 2 for
    x != 0), and exactly zero in the break-even case mu = 0.
    """
    n = periods(n)
    _require_positive("i0", i0)
    _require_positive("k", k)
    if n < 2:
        raise ValidationError("horizon_too_short", f"n must be >= 2, got {n}")
    x = k * mu
    value = (i0 / k) * (_pow_checked(1.0 + x, n) + _pow_checked(1.0 - x, n) - 2.0)
    if not math.isfinite(value):
        raise GainOverflowError("expected gain exceeds the double-precision range")
    return value


def expected_gain_two(params: ControllerParams, mu_1: float, eps: float, n) -> float:
    """Expected cumulative gain-loss of the two-stock SLS controller.

        (i0 / k) * ((1 + k*mu_1)**n + (1 - k*mu_1*(1 + eps))**n - 2)

    The beta_0 scaling of the short arm cancels, so only the user-level
    (i0, k) appear. At eps = 0 this reduces pointwise to the single-stock
    formula with mu = mu_1.
    """
    n = periods(n)
    if n < 2:
        raise ValidationError("horizon_too_short", f"n must be >= 2, got {n}")
    x = params.k * mu_1
    value = (params.i0 / params.k) * (
        _pow_checked(1.0 + x, n) + _pow_checked(1.0 - x * (1.0 + eps), n) - 2.0
    )
    if not math.isfinite(value):
        raise GainOverflowError("expected gain exceeds the double-precision range")
    return value


def expected_gain_two_eps_derivative(
    params: ControllerParams, mu_1: float, eps: float, n
) -> float:
    """Analytic d/d(eps) of expected_gain_two:

        -i0 * n * mu_1 * (1 - k*mu_1*(1 + eps))**(n - 1)

    Strictly negative whenever mu_1 > 0 (and the base stays positive),
    strictly positive whenever mu_1 < 0.
    """
    n = periods(n)
    base = 1.0 - params.k * mu_1 * (1.0 + eps)
    return -params.i0 * n * mu_1 * _pow_checked(base, n - 1)


def expected_gain_recursion(
    i0: float, k: float, mu_long: float, mu_short: float, n
) -> float:
    """Expected gain-loss via the stage-by-stage recursion of the two arms.

        long arm:  g1 <- (1 + k*mu_long)  * g1 + i0*mu_long
        short arm: g2 <- (1 - k*mu_short) * g2 - i0*mu_short

    starting from g1 = g2 = 0 and iterated n times (n >= 1). This is the
    independent oracle for the closed forms: use mu_long = mu_short = mu for
    the single-stock controller, and mu_long = mu_1, mu_short = mu_1*(1+eps)
    for the two-stock controller (the short arm's own beta_0 scaling cancels
    against the second stock's momentum).
    """
    n = periods(n)
    _require_positive("i0", i0)
    _require_positive("k", k)
    if n < 1:
        raise ValidationError("horizon_too_short", f"n must be >= 1, got {n}")
    a1 = 1.0 + k * mu_long
    a2 = 1.0 - k * mu_short
    u1 = i0 * mu_long
    u2 = i0 * mu_short
    g1 = 0.0
    g2 = 0.0
    for _ in range(n):
        g1 = a1 * g1 + u1
        g2 = a2 * g2 - u2
    value = g1 + g2
    if not math.isfinite(value):
        raise GainOverflowError("recursion gain exceeds the double-precision range")
    return value
