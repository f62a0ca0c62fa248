"""Spatial decorrelation via random per-antenna phases.

Conditioned on the receiver phases, the correlation coefficient between the
two equivalent power gains is a pairwise cosine sum over the per-antenna
phase differences; across fresh receiver phases it has mean zero and
variance 1/(N(N-1)), so the gains decorrelate as the antenna count grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from arqkey.capacity import RateResult, key_rate_general
from arqkey.channel import AntennaMagnitude, DumbAntennaComposite, Los, substream


@dataclass(frozen=True)
class CorrelationStats:
    n: int
    trials: int
    rho_mean: float
    rho_var: float
    predicted_var: float


def rho_of_phases(theta_b, theta_e) -> float:
    """Correlation of the two equivalent power gains at fixed receiver phases.

    (2 / (N(N-1))) * sum_{i<j} cos(delta_i - delta_j) with
    delta_i = theta_b[i] - theta_e[i]; the randomness left is the
    transmitter phases only.
    """
    tb = np.asarray(theta_b, dtype=float)
    te = np.asarray(theta_e, dtype=float)
    if tb.shape != te.shape or tb.ndim != 1:
        raise ValueError("phase arrays must be 1-D with one entry per antenna")
    n = tb.size
    if n < 2:
        raise ValueError("correlation needs at least 2 antennas")
    delta = tb - te
    total = 0.0
    for i in range(n - 1):
        total += float(np.cos(delta[i] - delta[i + 1 :]).sum())
    return 2.0 * total / (n * (n - 1))


def rho_statistics(n: int, trials: int, rng: Generator | None = None, seed: int = 0) -> CorrelationStats:
    """Sample mean and variance of the phase correlation over fresh phases.

    Uses |sum_i exp(j delta_i)|^2 = N + 2 sum_{i<j} cos(delta_i - delta_j)
    to evaluate the pairwise sum for every trial at once.
    """
    if n < 2:
        raise ValueError("correlation needs at least 2 antennas")
    if trials < 10_000:
        raise ValueError("need at least 10000 trials for stable variance estimates")
    if rng is None:
        rng = substream(seed, 31)
    delta = rng.uniform(-math.pi, math.pi, (trials, n)) - rng.uniform(-math.pi, math.pi, (trials, n))
    z = np.exp(1j * delta).sum(axis=1)
    rho = (np.abs(z) ** 2 - n) / (n * (n - 1))
    return CorrelationStats(
        n=n,
        trials=trials,
        rho_mean=float(rho.mean()),
        rho_var=float(rho.var(ddof=1)),
        predicted_var=1.0 / (n * (n - 1)),
    )


def dumb_key_rate(
    n: int,
    magnitude: AntennaMagnitude = Los(),
    tx_rate: float = 1.0,
    power: float = 10.0,
    samples: int = 100_000,
    rng: Generator | None = None,
    seed: int = 0,
) -> RateResult:
    """Monte Carlo key rate under random-phase transmission.

    A single antenna leaves the two equivalent gains identical, so the
    estimate is exactly zero there; the rate climbs toward the independent
    Rayleigh value as antennas are added.
    """
    if rng is None:
        rng = substream(seed, 37)
    spec = DumbAntennaComposite(n=n, magnitude=magnitude)
    return key_rate_general(tx_rate, power, spec, samples=samples, rng=rng)
