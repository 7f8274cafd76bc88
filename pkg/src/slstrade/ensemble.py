"""Monte-Carlo campaigns over the admissible (mu_1, eps) family.

Paths are simulated in fixed-size chunks, each driven by its own generator
spawned from the master seed and the chunk index; every per-path draw is a
function of (master_seed, path index) alone. Draws are always taken at full
chunk width (a final partial chunk slices afterwards), so results are
bit-identical for any path count extension, worker count, or scheduling
order. Aggregation happens once over the assembled returns array.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GainOverflowError, ValidationError
from .model import (
    ControllerParams,
    Horizon,
    MarketRealization,
    UncertaintySet,
    validate_uncertainty,
)
from .simulate import PRICE_FLOOR, LeverageConfig

# fixed chunk width; independent of worker count by design
CHUNK = 8192

_MU_SIGNS = ("both", "positive", "negative")


def sample_realization(
    uset: UncertaintySet, rng: np.random.Generator, mu_sign: str = "both"
) -> MarketRealization:
    """Draw one (mu_1, eps) uniformly over the admissible family.

    eps ~ U[0, eps_max] and |mu_1| ~ U[mu_min, mu_max]. The two admissible
    momentum intervals [-mu_max, -mu_min] and [mu_min, mu_max] have equal
    length, so by default the sign is equally likely; 'positive'/'negative'
    restrict to one interval.
    """
    validate_uncertainty(uset)
    if mu_sign not in _MU_SIGNS:
        raise ValidationError(
            "mu_sign_invalid", f"mu_sign must be one of {_MU_SIGNS}, got {mu_sign!r}"
        )
    mag = float(rng.uniform(uset.mu_min, uset.mu_max))
    eps = float(rng.uniform(0.0, uset.eps_max))
    if mu_sign == "both":
        mu_1 = mag if int(rng.integers(0, 2)) == 1 else -mag
    elif mu_sign == "positive":
        mu_1 = mag
    else:
        mu_1 = -mag
    return MarketRealization(mu_1=mu_1, eps=eps)


@dataclass(frozen=True)
class EnsembleConfig:
    """Everything a campaign needs; immutable so runs are reproducible."""

    uncertainty: UncertaintySet
    controller: ControllerParams
    leverage: LeverageConfig
    horizon: Horizon
    sigma_1: float
    sigma_2: float
    n_paths: int
    master_seed: int
    mu_sign: str = "both"
    quantiles: tuple[float, ...] = (0.05, 0.25, 0.5, 0.75, 0.95)
    bins: int = 200

    def __post_init__(self):
        validate_uncertainty(self.uncertainty)
        if self.sigma_1 < 0.0 or self.sigma_2 < 0.0:
            raise ValidationError(
                "sigma_negative",
                f"volatilities must be >= 0, got ({self.sigma_1}, {self.sigma_2})",
            )
        if self.n_paths < 1:
            raise ValidationError(
                "n_paths_invalid", f"n_paths must be >= 1, got {self.n_paths}"
            )
        if self.master_seed != int(self.master_seed) or int(self.master_seed) < 0:
            raise ValidationError(
                "seed_invalid", f"master_seed must be a non-negative integer, "
                f"got {self.master_seed!r}"
            )
        if self.mu_sign not in _MU_SIGNS:
            raise ValidationError(
                "mu_sign_invalid",
                f"mu_sign must be one of {_MU_SIGNS}, got {self.mu_sign!r}",
            )
        if any(not 0.0 <= q <= 1.0 for q in self.quantiles):
            raise ValidationError(
                "quantiles_invalid", f"quantiles must lie in [0, 1], got {self.quantiles}"
            )
        if self.bins < 1:
            raise ValidationError("bins_invalid", f"bins must be >= 1, got {self.bins}")


class HistogramData(NamedTuple):
    counts: np.ndarray
    edges: np.ndarray
    density: np.ndarray


def histogram(returns, bins=200) -> HistogramData:
    """Bin final returns; ``bins`` is a count (uniform bins spanning the
    observed min/max) or explicit edges.

    density = counts / (n * bin_width), so it integrates to 1 whenever the
    edges cover all values.
    """
    x = np.asarray(returns, dtype=float)
    if x.size == 0:
        raise ValidationError("no_returns", "histogram needs at least one return")
    counts, edges = np.histogram(x, bins=bins)
    widths = np.diff(edges)
    density = counts / (x.size * widths)
    return HistogramData(counts=counts, edges=edges, density=density)


@dataclass(frozen=True)
class EnsembleStats:
    """Aggregate results of one campaign.

    loss_tail is the fraction of unprofitable paths (return <= 0) whose loss
    stays below 10% of the initial account value; 1.0 when no path lost.
    """

    mean_return: float
    median_return: float
    prob_profit: float
    quantiles: dict[float, float]
    loss_tail: float
    hist_counts: np.ndarray
    hist_edges: np.ndarray
    n_paths: int
    master_seed: int


def _chunk_returns(config: EnsembleConfig, chunk_index: int) -> np.ndarray:
    """Final returns for one chunk, always computed at full CHUNK width.

    Draw order per chunk: sign integers, |mu_1| uniforms, eps uniforms, then
    per stage one w1 vector and one w2 vector. The controller arithmetic
    mirrors simulate.controller_step expression for expression, so a scalar
    replay of the same draws reproduces these paths bit for bit.
    """
    uset = config.uncertainty
    params = config.controller
    lev = config.leverage
    rng = np.random.default_rng(
        np.random.SeedSequence(int(config.master_seed), spawn_key=(chunk_index,))
    )

    sign = rng.integers(0, 2, size=CHUNK)
    mag = rng.uniform(uset.mu_min, uset.mu_max, size=CHUNK)
    eps = rng.uniform(0.0, uset.eps_max, size=CHUNK)
    if config.mu_sign == "both":
        mu_1 = np.where(sign == 1, mag, -mag)
    elif config.mu_sign == "positive":
        mu_1 = mag
    else:
        mu_1 = -mag
    mu_2 = (1.0 + eps) * uset.beta_0 * mu_1

    i0_1, i0_2 = params.i0_1, params.i0_2
    k1, k2 = params.k1, params.k2
    v0 = lev.v0
    gamma = lev.gamma

    g1 = np.zeros(CHUNK)
    g2 = np.zeros(CHUNK)
    v = np.full(CHUNK, v0)
    for _ in range(config.horizon.n):
        i1 = i0_1 + k1 * g1
        i2 = -i0_2 - k2 * g2
        if gamma is not None:
            total = np.abs(i1) + np.abs(i2)
            limit = gamma * v
            alive = v > 0.0
            binding = alive & (total > limit)
            scale = np.divide(limit, total, out=np.ones(CHUNK), where=binding)
            i1 = np.where(alive, i1 * scale, 0.0)
            i2 = np.where(alive, i2 * scale, 0.0)
        w1 = rng.standard_normal(CHUNK)
        w2 = rng.standard_normal(CHUNK)
        f1 = np.maximum(1.0 + mu_1 + config.sigma_1 * w1, PRICE_FLOOR)
        f2 = np.maximum(1.0 + mu_2 + config.sigma_2 * w2, PRICE_FLOOR)
        g1 = g1 + i1 * (f1 - 1.0)
        g2 = g2 + i2 * (f2 - 1.0)
        v = v0 + g1 + g2
    if not np.all(np.isfinite(v)):
        raise GainOverflowError(
            f"account value overflowed in chunk {chunk_index}"
        )
    return (v - v0) / v0


def ensemble_returns(config: EnsembleConfig, workers: int = 1) -> np.ndarray:
    """Final return of every path, indexed by path; identical for any
    worker count."""
    n = config.n_paths
    out = np.empty(n)
    n_chunks = (n + CHUNK - 1) // CHUNK

    def fill(c: int) -> None:
        lo = c * CHUNK
        hi = min(lo + CHUNK, n)
        out[lo:hi] = _chunk_returns(config, c)[: hi - lo]

    if workers <= 1 or n_chunks == 1:
        for c in range(n_chunks):
            fill(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(n_chunks)))
    return out


def run_ensemble(config: EnsembleConfig, workers: int = 1) -> EnsembleStats:
    """Run the campaign and aggregate.

    The returns array is assembled in path order and reduced exactly once,
    so the statistics are bit-identical regardless of worker count.
    """
    x = ensemble_returns(config, workers=workers)
    hist = histogram(x, config.bins)
    unprofitable = x[x <= 0.0]
    loss_tail = (
        float(np.mean(unprofitable > -0.10)) if unprofitable.size else 1.0
    )
    return EnsembleStats(
        mean_return=float(np.mean(x)),
        median_return=float(np.median(x)),
        prob_profit=float(np.mean(x > 0.0)),
        quantiles={float(q): float(np.quantile(x, q)) for q in config.quantiles},
        loss_tail=loss_tail,
        hist_counts=hist.counts,
        hist_edges=hist.edges,
        n_paths=config.n_paths,
        master_seed=int(config.master_seed),
    )
