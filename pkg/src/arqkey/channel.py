"""Fading models for the Alice/Bob/Eve block-fading wiretap setup.

All gains here are power gains (squared magnitudes of the complex channel
gain). Built-in marginals are normalized to unit mean so that the transmit
power doubles as the average SNR; ``IndependentRayleigh`` additionally
accepts per-receiver means for asymmetric scenarios.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.random import Generator

_TWO_PI = 2.0 * math.pi


class ModelMismatchError(ValueError):
    """An operation was handed a fading model it cannot handle."""


def substream(master_seed: int, *key: int) -> Generator:
    """Derive an independent generator from a master seed and an integer key.

    Counter-based derivation: the same (seed, key) always yields the same
    stream, and distinct keys yield statistically independent streams, so
    parallel and serial runs agree bit-exactly.
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def sample_cn(rng: Generator, size=None):
    """Standard circular complex Gaussian with E|g|^2 = 1."""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) / math.sqrt(2.0)


@dataclass(frozen=True)
class Rayleigh:
    """Exponential power gain (Rayleigh amplitude) with the given mean."""

    mean: float = 1.0

    def __post_init__(self):
        if not self.mean > 0:
            raise ValueError(f"mean power must be positive, got {self.mean}")

    def pdf(self, h):
        h = np.asarray(h, dtype=float)
        return np.where(h >= 0, np.exp(-h / self.mean) / self.mean, 0.0)

    def sample(self, rng: Generator, size=None):
        return rng.exponential(self.mean, size)


@dataclass(frozen=True)
class ChiSquare:
    """Chi-square power gain with ``dof`` degrees of freedom, scaled to unit mean.

    h = (1/V) * sum_{i=1..V} u_i^2 with u_i standard normal, giving E h = 1
    and var h = 2/V.
    """

    dof: int

    def __post_init__(self):
        if self.dof not in (2, 4, 6, 8):
            raise ValueError(f"dof must be one of 2, 4, 6, 8; got {self.dof}")

    def pdf(self, h):
        half = 0.5 * self.dof
        h = np.asarray(h, dtype=float)
        coef = half**half / math.gamma(half)
        hpos = np.where(h > 0, h, 1.0)
        out = coef * hpos ** (half - 1.0) * np.exp(-half * hpos)
        # Continuity at the origin only matters for dof == 2 (density 1 there).
        return np.where(h > 0, out, np.where(h == 0, coef if half == 1.0 else 0.0, 0.0))

    def sample(self, rng: Generator, size=None):
        return rng.chisquare(self.dof, size) / self.dof


@dataclass(frozen=True)
class Los:
    """Deterministic unit per-antenna amplitude (line of sight)."""


Marginal = Union[Rayleigh, ChiSquare]
AntennaMagnitude = Union[Los, ChiSquare]


@dataclass(frozen=True)
class IndependentRayleigh:
    """Bob and Eve fade independently with exponential power gains."""

    mean_b: float = 1.0
    mean_e: float = 1.0

    def __post_init__(self):
        if not (self.mean_b > 0 and self.mean_e > 0):
            raise ValueError("mean powers must be positive")


@dataclass(frozen=True)
class FullyCorrelated:
    """Bob and Eve see the exact same power gain in every block."""

    marginal: Marginal = Rayleigh()

    def __post_init__(self):
        if not isinstance(self.marginal, (Rayleigh, ChiSquare)):
            raise TypeError(f"unsupported marginal {type(self.marginal).__name__!r}")


@dataclass(frozen=True)
class GaussMarkovRayleigh:
    """First-order autoregressive complex gain; advance it with evolve_gain."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class DumbAntennaComposite:
    """Random per-antenna phases at the transmitter, fresh every block.

    The receiver-side equivalent gains share the per-antenna amplitudes
    (magnitudes are fully correlated between Bob and Eve) while the receiver
    phases are independent.
    """

    n: int
    magnitude: AntennaMagnitude = Los()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"antenna count must be >= 1, got {self.n}")
        if not isinstance(self.magnitude, (Los, ChiSquare)):
            raise TypeError(f"unsupported magnitude {type(self.magnitude).__name__!r}")


FadingSpec = Union[IndependentRayleigh, FullyCorrelated, GaussMarkovRayleigh, DumbAntennaComposite]


@dataclass(frozen=True)
class ChannelDraw:
    """One coherence interval: Bob/Eve power gains, complex gains when known."""

    h_b: float
    h_e: float
    g_b: complex | None = None
    g_e: complex | None = None

    def __post_init__(self):
        if self.h_b < 0 or self.h_e < 0:
            raise ValueError("power gains must be nonnegative")
        for g, h in ((self.g_b, self.h_b), (self.g_e, self.h_e)):
            if g is not None and abs(abs(g) ** 2 - h) > 1e-12 * max(1.0, h):
                raise ValueError("complex gain does not square to the power gain")


def sample_blocks(spec: FadingSpec, size, rng: Generator):
    """Draw ``size`` independent (h_b, h_e) pairs as arrays (or floats for size=None)."""
    if isinstance(spec, IndependentRayleigh):
        return rng.exponential(spec.mean_b, size), rng.exponential(spec.mean_e, size)
    if isinstance(spec, FullyCorrelated):
        h = spec.marginal.sample(rng, size)
        return h, h
    if isinstance(spec, DumbAntennaComposite):
        g_b, g_e = _sample_dumb_gains(spec.n, spec.magnitude, size, rng)
        return np.abs(g_b) ** 2, np.abs(g_e) ** 2
    if isinstance(spec, GaussMarkovRayleigh):
        raise ModelMismatchError(
            "GaussMarkovRayleigh is stateful; advance it with evolve_gain instead"
        )
    raise TypeError(f"unknown fading spec {type(spec).__name__!r}")


def sample_block(spec: FadingSpec, rng: Generator) -> ChannelDraw:
    """One independent draw of the joint (Bob, Eve) block gains."""
    if isinstance(spec, DumbAntennaComposite):
        return sample_dumb_antenna(spec.n, spec.magnitude, rng)
    h_b, h_e = sample_blocks(spec, None, rng)
    return ChannelDraw(h_b=float(h_b), h_e=float(h_e))


def evolve_gain(alpha: float, prev, rng: Generator):
    """One step of the first-order Markov gain.

    g(t) = (1 - alpha) g(t-1) + sqrt(2 alpha - alpha^2) w(t) with w circular
    complex Gaussian; the stationary law keeps E|g|^2 = 1 because
    (1 - alpha)^2 + (2 alpha - alpha^2) = 1.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    coef = math.sqrt(2.0 * alpha - alpha * alpha)
    if isinstance(prev, np.ndarray):
        w = sample_cn(rng, prev.shape)
        return (1.0 - alpha) * prev + coef * w
    w = complex(sample_cn(rng))
    return (1.0 - alpha) * complex(prev) + coef * w


def dumb_equivalent_gains(theta_r, theta_b, theta_e, amplitudes=None):
    """Equivalent Bob/Eve complex gains for given per-antenna phases.

    The antenna axis is the last one; ``amplitudes`` defaults to 1 (line of
    sight). Exposed so tests can pin the phases.
    """
    tr = np.asarray(theta_r, dtype=float)
    tb = np.asarray(theta_b, dtype=float)
    te = np.asarray(theta_e, dtype=float)
    if tr.shape != tb.shape or tr.shape != te.shape:
        raise ValueError("phase arrays must share one shape")
    n = tr.shape[-1]
    if n < 1:
        raise ValueError("need at least one antenna")
    amps = 1.0 if amplitudes is None else np.asarray(amplitudes, dtype=float)
    scale = 1.0 / math.sqrt(n)
    g_b = (amps * np.exp(1j * (tr + tb))).sum(axis=-1) * scale
    g_e = (amps * np.exp(1j * (tr + te))).sum(axis=-1) * scale
    return g_b, g_e


def _sample_dumb_gains(n: int, magnitude: AntennaMagnitude, size, rng: Generator):
    shape = (n,) if size is None else (int(size), n)
    theta_r = rng.uniform(-math.pi, math.pi, shape)
    theta_b = rng.uniform(-math.pi, math.pi, shape)
    theta_e = rng.uniform(-math.pi, math.pi, shape)
    if isinstance(magnitude, Los):
        amps = None
    else:
        amps = np.sqrt(magnitude.sample(rng, shape))
    return dumb_equivalent_gains(theta_r, theta_b, theta_e, amps)


def sample_dumb_antenna(n: int, magnitude: AntennaMagnitude = Los(), rng: Generator | None = None) -> ChannelDraw:
    """One random-phase transmission: equivalent gains for Bob and Eve.

    Per-antenna amplitudes are shared by both receivers; the three phase sets
    are i.i.d. uniform on [-pi, pi] and fresh on every call.
    """
    if rng is None:
        raise ValueError("an explicit Generator is required")
    if n < 1:
        raise ValueError(f"antenna count must be >= 1, got {n}")
    g_b, g_e = _sample_dumb_gains(n, magnitude, None, rng)
    g_b = complex(g_b)
    g_e = complex(g_e)
    return ChannelDraw(h_b=abs(g_b) ** 2, h_e=abs(g_e) ** 2, g_b=g_b, g_e=g_e)
