"""Monte Carlo simulation of the ACK/NACK key-sharing protocol.

Decoding is abstracted by the capacity threshold: a frame is ACKed exactly
when the transmission rate is at most Bob's instantaneous capacity, and
Eve's copy of an ACKed frame is erased exactly when her capacity plus genie
side information falls strictly short of the rate. NACKed frames are
discarded and contribute nothing to either party. The distilled key is the
bitwise XOR of the fresh uniform blocks carried by the ACKed frames, so Eve
learns nothing unless she intercepts all of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator
from scipy.stats import chi2

from arqkey.capacity import RateQuery
from arqkey.channel import FadingSpec, IndependentRayleigh, sample_block, sample_blocks, substream

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ProtocolConfig:
    rate_query: RateQuery
    spec: FadingSpec = IndependentRayleigh()
    block_bits: int = 8
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.block_bits < 1:
            raise ValueError("block_bits must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class EpochOutcome:
    ack: bool
    eve_erased: bool
    h_b: float
    h_e: float


@dataclass(frozen=True)
class ExchangeOutcome:
    epochs_used: int
    eve_known_blocks: int
    key: int
    eve_guess_basis: int
    outage: bool
    blocks: tuple[int, ...]
    eve_known_mask: tuple[bool, ...]


@dataclass(frozen=True)
class ProtocolMetrics:
    key_rate: float
    key_rate_half_width: float
    outage_probability: float
    outage_half_width: float
    mean_epochs: float
    mean_epochs_half_width: float
    trials: int


@dataclass(frozen=True)
class BlindnessResult:
    p_value: float
    statistic: float
    dof: int
    qualifying: int
    inconclusive: bool


def run_epoch(config: ProtocolConfig, rng: Generator) -> EpochOutcome:
    """One coherence interval: draw the channels and threshold the decoders."""
    q = config.rate_query
    draw = sample_block(config.spec, rng)
    cap_b = math.log1p(draw.h_b * q.power) / _LN2
    cap_e = math.log1p(draw.h_e * q.power) / _LN2
    return EpochOutcome(
        ack=q.tx_rate <= cap_b,
        eve_erased=q.tx_rate - q.side_info_rate > cap_e,
        h_b=draw.h_b,
        h_e=draw.h_e,
    )


def _draw_block(bits: int, rng: Generator) -> int:
    value = 0
    for b in rng.integers(0, 2, size=bits):
        value = (value << 1) | int(b)
    return value


def run_key_exchange(config: ProtocolConfig, rng: Generator) -> ExchangeOutcome:
    """Repeat epochs until frames_per_key ACKs, then distill the XOR key.

    Reference implementation, one exchange at a time; the estimators below
    use a vectorized equivalent.
    """
    k = config.rate_query.frames_per_key
    blocks: list[int] = []
    known: list[bool] = []
    epochs = 0
    while len(blocks) < k:
        epoch = run_epoch(config, rng)
        epochs += 1
        if epoch.ack:
            blocks.append(_draw_block(config.block_bits, rng))
            known.append(not epoch.eve_erased)
    key = 0
    basis = 0
    for block, seen in zip(blocks, known):
        key ^= block
        if seen:
            basis ^= block
    eve_known = sum(known)
    return ExchangeOutcome(
        epochs_used=epochs,
        eve_known_blocks=eve_known,
        key=key,
        eve_guess_basis=basis,
        outage=eve_known == k,
        blocks=tuple(blocks),
        eve_known_mask=tuple(known),
    )


def _exchange_batch(config: ProtocolConfig):
    """Vectorized exchanges: per-trial epochs used and Eve's known-block mask.

    Runs one long epoch stream and slices it at every k-th ACK, which is
    distributionally identical to running the exchanges back to back.
    """
    q = config.rate_query
    needed = config.trials * q.frames_per_key
    rng = substream(config.seed, 11)
    acks: list[np.ndarray] = []
    knowns: list[np.ndarray] = []
    got = 0
    drawn = 0
    chunk = int(min(max(65536, needed * 2), 1 << 23))
    while got < needed:
        h_b, h_e = sample_blocks(config.spec, chunk, rng)
        cap_b = np.log1p(h_b * q.power) / _LN2
        cap_e = np.log1p(h_e * q.power) / _LN2
        ack = q.tx_rate <= cap_b
        acks.append(ack)
        knowns.append(ack & ~(q.tx_rate - q.side_info_rate > cap_e))
        got += int(ack.sum())
        drawn += chunk
        if got == 0 and drawn >= 1 << 23:
            raise RuntimeError(
                "ACK probability is too small to simulate at this operating point"
            )
        if got:
            remaining = needed - got
            chunk = int(min(max(65536, remaining * drawn / got * 1.2), 1 << 23))
    ack = np.concatenate(acks)
    known = np.concatenate(knowns)
    pos = np.flatnonzero(ack)[:needed]
    known_blocks = known[pos].reshape(config.trials, q.frames_per_key)
    last = pos[q.frames_per_key - 1 :: q.frames_per_key]
    epochs_used = np.diff(np.concatenate(([-1], last)))
    return epochs_used.astype(np.int64), known_blocks


def estimate_metrics(config: ProtocolConfig) -> ProtocolMetrics:
    """Empirical key rate, outage probability, and mean epochs with 95% CIs.

    The key rate uses one frame = one channel-use unit at the transmission
    rate, i.e. tx_rate divided by the mean epochs per exchange, so it is
    directly comparable to the finite-key closed form.
    """
    if config.trials < 100:
        raise ValueError(
            "trials must be >= 100 so the normal-approximation intervals mean anything"
        )
    q = config.rate_query
    epochs_used, known_blocks = _exchange_batch(config)
    trials = config.trials
    mean_epochs = float(epochs_used.mean())
    se_epochs = float(epochs_used.std(ddof=1) / math.sqrt(trials))
    outage = known_blocks.sum(axis=1) == q.frames_per_key
    out_frac = float(outage.mean())
    se_out = math.sqrt(out_frac * (1.0 - out_frac) / trials)
    key_rate = q.tx_rate / mean_epochs
    se_rate = q.tx_rate * se_epochs / mean_epochs**2
    z = 1.959963984540054
    return ProtocolMetrics(
        key_rate=key_rate,
        key_rate_half_width=z * se_rate,
        outage_probability=out_frac,
        outage_half_width=z * se_out,
        mean_epochs=mean_epochs,
        mean_epochs_half_width=z * se_epochs,
        trials=trials,
    )


def empirical_secrecy_rate(config: ProtocolConfig, epochs: int) -> tuple[float, float]:
    """Per-epoch secrecy accrual (mean, stderr) over `epochs` simulated epochs.

    Averages [tx_rate - log2(1+h_e p)]^+ over ACKed epochs and zero over
    NACKed ones, the empirical counterpart of the asymptotic key rate.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    q = config.rate_query
    rng = substream(config.seed, 19)
    total = 0.0
    total_sq = 0.0
    left = epochs
    while left > 0:
        n = min(left, 1 << 22)
        h_b, h_e = sample_blocks(config.spec, n, rng)
        cap_b = np.log1p(h_b * q.power) / _LN2
        gap = np.maximum(q.tx_rate - np.log1p(h_e * q.power) / _LN2, 0.0)
        vals = np.where(q.tx_rate <= cap_b, gap, 0.0)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        left -= n
    mean = total / epochs
    var = max(total_sq / epochs - mean * mean, 0.0)
    return mean, math.sqrt(var / epochs)


def empirical_ack_fraction(config: ProtocolConfig, epochs: int) -> tuple[float, float]:
    """Fraction of ACKed epochs and its binomial standard error."""
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    q = config.rate_query
    rng = substream(config.seed, 29)
    acked = 0
    left = epochs
    while left > 0:
        n = min(left, 1 << 22)
        h_b, _ = sample_blocks(config.spec, n, rng)
        acked += int((q.tx_rate <= np.log1p(h_b * q.power) / _LN2).sum())
        left -= n
    frac = acked / epochs
    return frac, math.sqrt(max(frac * (1.0 - frac), 1e-300) / epochs)


def secrecy_blindness_test(config: ProtocolConfig) -> BlindnessResult:
    """Chi-square uniformity of the key XOR Eve's best guess.

    Scores only exchanges in which Eve misses at least one block; there the
    distilled key should be uniform on block_bits bits no matter what she
    holds. Requires block_bits <= 16 so every cell stays populated.
    """
    bits = config.block_bits
    if bits > 16:
        raise ValueError("block_bits must be <= 16 for a well-powered cell test")
    k = config.rate_query.frames_per_key
    _, known_blocks = _exchange_batch(config)
    rng = substream(config.seed, 13)
    blocks = rng.integers(0, 1 << bits, size=known_blocks.shape, dtype=np.uint32)
    key = np.bitwise_xor.reduce(blocks, axis=1)
    basis = np.bitwise_xor.reduce(np.where(known_blocks, blocks, 0), axis=1)
    residual = key ^ basis
    qualifying = known_blocks.sum(axis=1) < k
    n_q = int(qualifying.sum())
    cells = 1 << bits
    if n_q == 0:
        return BlindnessResult(
            p_value=float("nan"), statistic=float("nan"), dof=cells - 1, qualifying=0, inconclusive=True
        )
    counts = np.bincount(residual[qualifying], minlength=cells)
    expected = n_q / cells
    statistic = float(((counts - expected) ** 2 / expected).sum())
    p_value = float(chi2.sf(statistic, cells - 1))
    return BlindnessResult(
        p_value=p_value, statistic=statistic, dof=cells - 1, qualifying=n_q, inconclusive=False
    )
