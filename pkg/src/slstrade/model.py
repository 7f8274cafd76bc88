"""Domain types for two-stock simultaneous long-short (SLS) trading.

Holds the trader-known uncertainty bounds, concrete market realizations,
the per-arm controller parameters, and the trading horizon. All types are
immutable value objects; validation is explicit so raw inputs can be checked
with a distinct error kind per violated rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class UncertaintySet:
    """Bounds known to the trader before trading starts.

    The first stock's per-period mean return satisfies
    ``mu_min <= |mu_1| <= mu_max`` (sign unknown), and the second stock's mean
    return is ``(1 + eps) * beta_0 * mu_1`` with ``0 <= eps <= eps_max`` and
    nominal correlation coefficient ``beta_0 != 0``.
    """

    mu_min: float
    mu_max: float
    eps_max: float
    beta_0: float


def validate_uncertainty(uset: UncertaintySet) -> UncertaintySet:
    """Check the invariants of an UncertaintySet and return it unchanged.

    Error kinds: ``mu_min_nonpositive``, ``mu_bounds_inverted``,
    ``eps_max_negative``, ``beta_0_zero``.
    """
    if not uset.mu_min > 0.0:
        raise ValidationError(
            "mu_min_nonpositive", f"mu_min must be > 0, got {uset.mu_min}"
        )
    if not uset.mu_max >= uset.mu_min:
        raise ValidationError(
            "mu_bounds_inverted",
            f"mu_min={uset.mu_min} must not exceed mu_max={uset.mu_max}",
        )
    if not uset.eps_max >= 0.0:
        raise ValidationError(
            "eps_max_negative", f"eps_max must be >= 0, got {uset.eps_max}"
        )
    if not uset.beta_0 != 0.0:
        raise ValidationError("beta_0_zero", "beta_0 must be nonzero")
    return uset


@dataclass(frozen=True)
class MarketRealization:
    """A concrete (mu_1, eps) pair drawn from an admissible family.

    Only (mu_1, eps) are stored; the second stock's mean return is derived on
    demand so the triple can never fall out of sync.
    """

    mu_1: float
    eps: float

    def mu_2(self, beta_0: float) -> float:
        """Mean return of the second stock: (1 + eps) * beta_0 * mu_1."""
        return (1.0 + self.eps) * beta_0 * self.mu_1


def validate_realization(
    real: MarketRealization, uset: UncertaintySet
) -> MarketRealization:
    """Check admissibility of a realization w.r.t. ``uset``.

    Interval endpoints are admissible (closed bounds): the feasibility
    conditions are evaluated exactly at ``(mu_min, eps_max)``.
    """
    validate_uncertainty(uset)
    mag = abs(real.mu_1)
    if not (uset.mu_min <= mag <= uset.mu_max):
        raise ValidationError(
            "mu_1_inadmissible",
            f"|mu_1|={mag} outside [{uset.mu_min}, {uset.mu_max}]",
        )
    if not (0.0 <= real.eps <= uset.eps_max):
        raise ValidationError(
            "eps_inadmissible", f"eps={real.eps} outside [0, {uset.eps_max}]"
        )
    return real


@dataclass(frozen=True)
class ControllerParams:
    """User-level (i0, k) plus the derived per-arm parameters.

    The long arm trades stock 1 with (i0_1, k1) = (i0, k); the short arm
    trades stock 2 with (i0_2, k2) = (i0, k) / beta_0, compensating for the
    differing momenta of the two stocks. By construction
    ``i0_1 * k2 == i0_2 * k1`` and both arms share the prefactor ``i0 / k``.
    """

    i0: float
    k: float
    beta_0: float

    @property
    def i0_1(self) -> float:
        return self.i0

    @property
    def i0_2(self) -> float:
        return self.i0 / self.beta_0

    @property
    def k1(self) -> float:
        return self.k

    @property
    def k2(self) -> float:
        return self.k / self.beta_0


def derive_controller(i0: float, k: float, uset: UncertaintySet) -> ControllerParams:
    """Build the per-arm controller parameters from the user's (i0, k)."""
    validate_uncertainty(uset)
    if not i0 > 0.0:
        raise ValidationError("i0_nonpositive", f"i0 must be > 0, got {i0}")
    if not k > 0.0:
        raise ValidationError("k_nonpositive", f"k must be > 0, got {k}")
    return ControllerParams(i0=float(i0), k=float(k), beta_0=float(uset.beta_0))


@dataclass(frozen=True)
class Horizon:
    """Number of trading periods; the positivity results need n >= 2."""

    n: int

    def __post_init__(self):
        n = self.n
        if n != int(n) or int(n) < 2:
            raise ValidationError(
                "horizon_too_short", f"n must be an integer >= 2, got {n!r}"
            )
        object.__setattr__(self, "n", int(n))

    @property
    def is_odd(self) -> bool:
        return self.n % 2 == 1

    @property
    def parity(self) -> str:
        return "odd" if self.is_odd else "even"


def periods(n) -> int:
    """Coerce a Horizon or plain integer stage count to int."""
    if isinstance(n, Horizon):
        return n.n
    if n != int(n):
        raise ValidationError("horizon_not_integer", f"n must be an integer, got {n!r}")
    return int(n)
