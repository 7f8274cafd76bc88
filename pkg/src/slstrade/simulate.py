"""Discrete-time GBM price paths and the stage-by-stage SLS controller.

Price updates are multiplicative, S(k+1) = S(k) * (1 + mu + sigma*w), with
one independent standard-normal draw per stock per stage. The controller
holds feedback-law investments in both arms, optionally scaled back onto a
broker leverage budget, and accrues each arm's gain at the realized returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GainOverflowError, ValidationError
from .model import ControllerParams, MarketRealization, periods

# multiplicative price factors are floored here so a pathological draw
# (|sigma*w| > 1 + mu) cannot push a price to zero or below; paths record
# when the floor engages
PRICE_FLOOR = 1e-6


@dataclass(frozen=True)
class GbmParams:
    """Per-period drift/volatility pair and initial price for each stock."""

    mu_1: float
    mu_2: float
    sigma_1: float
    sigma_2: float
    s1_0: float = 100.0
    s2_0: float = 100.0

    def __post_init__(self):
        if self.sigma_1 < 0.0 or self.sigma_2 < 0.0:
            raise ValidationError(
                "sigma_negative",
                f"volatilities must be >= 0, got ({self.sigma_1}, {self.sigma_2})",
            )
        if not (self.s1_0 > 0.0 and self.s2_0 > 0.0):
            raise ValidationError(
                "price_nonpositive",
                f"initial prices must be > 0, got ({self.s1_0}, {self.s2_0})",
            )

    @classmethod
    def from_realization(
        cls,
        real: MarketRealization,
        beta_0: float,
        sigma_1: float,
        sigma_2: float,
        s1_0: float = 100.0,
        s2_0: float = 100.0,
    ) -> "GbmParams":
        """Drift pair implied by a (mu_1, eps) draw: mu_2 = (1+eps)*beta_0*mu_1."""
        return cls(real.mu_1, real.mu_2(beta_0), sigma_1, sigma_2, s1_0, s2_0)


@dataclass(frozen=True)
class LeverageConfig:
    """Broker constraint |i1| + |i2| <= gamma * v; gamma=None disables the cap.

    v0 is the initial account value; the account tracks v = v0 + g1 + g2
    (trading gains only — no interest, fees, or slippage).
    """

    gamma: float | None
    v0: float

    def __post_init__(self):
        if self.gamma is not None and not self.gamma >= 1.0:
            raise ValidationError(
                "gamma_below_one", f"gamma must be >= 1 when enabled, got {self.gamma}"
            )
        if not self.v0 > 0.0:
            raise ValidationError("v0_nonpositive", f"v0 must be > 0, got {self.v0}")


def apply_leverage_cap(
    i1: float, i2: float, gamma: float, v: float
) -> tuple[float, float]:
    """Scale both investments onto the leverage budget when it binds.

    Unchanged when |i1| + |i2| <= gamma*v; otherwise both are multiplied by
    gamma*v / (|i1| + |i2|), preserving signs and the |i1|/|i2| ratio. A
    non-positive account value zeroes both positions: a bankrupt account
    stops trading (the idealized theory never reaches this state, but the
    simulator must stay total).
    """
    if not gamma >= 1.0:
        raise ValidationError("gamma_below_one", f"gamma must be >= 1, got {gamma}")
    if v <= 0.0:
        return (0.0, 0.0)
    total = abs(i1) + abs(i2)
    limit = gamma * v
    if total > limit:
        scale = limit / total
        return (i1 * scale, i2 * scale)
    return (i1, i2)


@dataclass(frozen=True)
class ControllerState:
    """Snapshot at one stage.

    g1/g2 are the arms' cumulative gains, v = v0 + g1 + g2 the account value,
    and i1/i2 the (already capped) investment levels held from this stage to
    the next — so the leverage invariant |i1| + |i2| <= gamma*v pairs
    investments with the account value of the same stage.
    """

    stage: int
    g1: float
    g2: float
    v: float
    i1: float
    i2: float


def _decide_investments(
    g1: float, g2: float, v: float, params: ControllerParams, lev: LeverageConfig
) -> tuple[float, float]:
    i1 = params.i0_1 + params.k1 * g1
    i2 = -params.i0_2 - params.k2 * g2
    if lev.gamma is not None:
        i1, i2 = apply_leverage_cap(i1, i2, lev.gamma, v)
    return i1, i2


def initial_state(params: ControllerParams, lev: LeverageConfig) -> ControllerState:
    """Stage-0 state: zero gains, full account, first capped investments."""
    i1, i2 = _decide_investments(0.0, 0.0, lev.v0, params, lev)
    return ControllerState(stage=0, g1=0.0, g2=0.0, v=lev.v0, i1=i1, i2=i2)


def controller_step(
    state: ControllerState,
    rho_1: float,
    rho_2: float,
    params: ControllerParams,
    lev: LeverageConfig,
) -> ControllerState:
    """Advance one stage at realized returns (rho_1, rho_2).

    Accrues each arm's gain from the held positions, updates the account
    value, then sets the next positions from the feedback laws (capped
    against the new account value).
    """
    g1 = state.g1 + state.i1 * rho_1
    g2 = state.g2 + state.i2 * rho_2
    v = lev.v0 + g1 + g2
    i1, i2 = _decide_investments(g1, g2, v, params, lev)
    return ControllerState(stage=state.stage + 1, g1=g1, g2=g2, v=v, i1=i1, i2=i2)


def gbm_step(price: float, mu: float, sigma: float, w: float) -> float:
    """One multiplicative price update: price * max(1 + mu + sigma*w, floor)."""
    if not price > 0.0:
        raise ValidationError("price_nonpositive", f"price must be > 0, got {price}")
    return price * max(1.0 + mu + sigma * w, PRICE_FLOOR)


@dataclass(frozen=True)
class PathResult:
    """One simulated trajectory; every series has length n + 1 (stages 0..n)."""

    s1: np.ndarray
    s2: np.ndarray
    i1: np.ndarray
    i2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    v: np.ndarray
    floored: bool

    @property
    def gain_series(self) -> np.ndarray:
        return self.g1 + self.g2

    @property
    def value_series(self) -> np.ndarray:
        return self.v

    @property
    def final_return(self) -> float:
        return float((self.v[-1] - self.v[0]) / self.v[0])

    def write_csv(self, path) -> None:
        """Columns k, S1, S2, I1, I2, g1, g2, g, V at 12 significant digits."""
        g = self.gain_series
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("k,S1,S2,I1,I2,g1,g2,g,V\n")
            for k in range(len(self.v)):
                row = (
                    self.s1[k], self.s2[k], self.i1[k], self.i2[k],
                    self.g1[k], self.g2[k], g[k], self.v[k],
                )
                fh.write(f"{k}," + ",".join(f"{x:.12g}" for x in row) + "\n")


def run_path(
    gbm: GbmParams,
    params: ControllerParams,
    lev: LeverageConfig,
    n,
    seed: int,
) -> PathResult:
    """Simulate n stages; a pure deterministic function of (inputs, seed).

    Per stage the two noise draws are taken in stock order (w1 then w2).
    Raises GainOverflowError if the account value leaves the double range.
    """
    n = periods(n)
    rng = np.random.default_rng(seed)
    state = initial_state(params, lev)

    s1 = np.empty(n + 1)
    s2 = np.empty(n + 1)
    i1 = np.empty(n + 1)
    i2 = np.empty(n + 1)
    g1 = np.empty(n + 1)
    g2 = np.empty(n + 1)
    v = np.empty(n + 1)
    s1[0], s2[0] = gbm.s1_0, gbm.s2_0
    floored = False

    def record(st: ControllerState) -> None:
        i1[st.stage], i2[st.stage] = st.i1, st.i2
        g1[st.stage], g2[st.stage] = st.g1, st.g2
        v[st.stage] = st.v

    record(state)
    for k in range(n):
        w1 = rng.standard_normal()
        w2 = rng.standard_normal()
        f1 = 1.0 + gbm.mu_1 + gbm.sigma_1 * w1
        f2 = 1.0 + gbm.mu_2 + gbm.sigma_2 * w2
        if f1 < PRICE_FLOOR or f2 < PRICE_FLOOR:
            floored = True
            f1 = max(f1, PRICE_FLOOR)
            f2 = max(f2, PRICE_FLOOR)
        s1[k + 1] = s1[k] * f1
        s2[k + 1] = s2[k] * f2
        state = controller_step(state, f1 - 1.0, f2 - 1.0, params, lev)
        if not (math.isfinite(state.g1) and math.isfinite(state.g2)):
            raise GainOverflowError(
                f"account value overflowed at stage {state.stage}"
            )
        record(state)
    return PathResult(s1=s1, s2=s2, i1=i1, i2=i2, g1=g1, g2=g2, v=v, floored=floored)
