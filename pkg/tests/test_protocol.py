import math

import numpy as np
import pytest

from arqkey.capacity import (
    RateQuery,
    expected_transmissions,
    finite_key_rate,
    key_rate_independent,
    outage_probability,
)
from arqkey.channel import FullyCorrelated, IndependentRayleigh, Rayleigh, substream
from arqkey.protocol import (
    ProtocolConfig,
    empirical_ack_fraction,
    empirical_secrecy_rate,
    estimate_metrics,
    run_epoch,
    run_key_exchange,
    secrecy_blindness_test,
)


def _config(tx_rate=2.0, power=10.0, side_info=0.0, k=2, bits=8, trials=10_000, seed=0):
    return ProtocolConfig(
        rate_query=RateQuery(tx_rate=tx_rate, power=power, side_info_rate=side_info, frames_per_key=k),
        block_bits=bits,
        trials=trials,
        seed=seed,
    )


class TestEpoch:
    def test_zero_rate_always_acks(self):
        rng = substream(1, 0)
        cfg = _config(tx_rate=0.0)
        assert all(run_epoch(cfg, rng).ack for _ in range(200))

    def test_side_info_above_rate_never_erases(self):
        rng = substream(2, 0)
        cfg = _config(tx_rate=2.0, side_info=2.0)
        assert not any(run_epoch(cfg, rng).eve_erased for _ in range(200))

    def test_thresholds_match_draw(self):
        rng = substream(3, 0)
        cfg = _config(tx_rate=2.0, power=10.0, side_info=1.0)
        q = cfg.rate_query
        for _ in range(500):
            ep = run_epoch(cfg, rng)
            assert ep.ack == (q.tx_rate <= math.log2(1 + ep.h_b * q.power))
            assert ep.eve_erased == (q.tx_rate - q.side_info_rate > math.log2(1 + ep.h_e * q.power))

    def test_ack_fraction_matches_closed_form(self):
        cfg = _config(tx_rate=2.0, power=10.0, seed=4)
        frac, se = empirical_ack_fraction(cfg, 1_000_000)
        assert abs(frac - math.exp(-0.3)) <= 3.0 * se


class TestKeyExchange:
    def test_single_frame_semantics(self):
        rng = substream(5, 0)
        cfg = _config(k=1)
        for _ in range(100):
            out = run_key_exchange(cfg, rng)
            assert out.key == out.blocks[0]
            assert out.outage == out.eve_known_mask[0]
            assert out.epochs_used >= 1

    def test_outage_reconstructs_key(self):
        rng = substream(6, 0)
        cfg = _config(k=3)
        seen_outage = 0
        for _ in range(500):
            out = run_key_exchange(cfg, rng)
            assert out.epochs_used >= 3
            assert 0 <= out.eve_known_blocks <= 3
            assert out.outage == (out.eve_known_blocks == 3)
            if out.outage:
                seen_outage += 1
                assert out.eve_guess_basis == out.key
        assert seen_outage > 0

    def test_side_info_covering_rate_gives_eve_everything(self):
        # With the whole rate gap closed, no frame is ever erased for Eve, so
        # every exchange is an outage (the closed form says probability 1).
        rng = substream(7, 0)
        cfg = _config(tx_rate=2.0, side_info=2.0, k=2)
        for _ in range(100):
            out = run_key_exchange(cfg, rng)
            assert out.eve_known_blocks == 2
            assert out.outage

    def test_missing_one_block_leaves_that_block(self):
        rng = substream(8, 0)
        cfg = _config(k=4)
        checked = 0
        for _ in range(800):
            out = run_key_exchange(cfg, rng)
            if out.eve_known_blocks == 3:
                missing = [b for b, seen in zip(out.blocks, out.eve_known_mask) if not seen]
                assert (out.key ^ out.eve_guess_basis) == missing[0]
                checked += 1
        assert checked > 10

    def test_seed_determinism(self):
        cfg = _config(k=2, seed=9)
        out_a = [run_key_exchange(cfg, substream(9, 1)) for _ in range(1)]
        rng_a = substream(9, 1)
        rng_b = substream(9, 1)
        for _ in range(50):
            assert run_key_exchange(cfg, rng_a) == run_key_exchange(cfg, rng_b)
        del out_a

    def test_key_stays_within_block_bits(self):
        rng = substream(10, 0)
        cfg = _config(k=2, bits=5)
        for _ in range(100):
            out = run_key_exchange(cfg, rng)
            assert 0 <= out.key < 32
            assert 0 <= out.eve_guess_basis < 32


class TestMetrics:
    def test_outage_epochs_rate_match_closed_forms(self):
        power = 1e3
        for tx_rate, side_info, k in ((4.0, 2.0, 2), (6.0, 2.0, 4)):
            cfg = _config(tx_rate=tx_rate, power=power, side_info=side_info, k=k, trials=400_000, seed=11)
            metrics = estimate_metrics(cfg)
            z = 1.959963984540054
            p_ref = outage_probability(k, tx_rate, side_info, power)
            assert abs(metrics.outage_probability - p_ref) <= 3.0 / z * metrics.outage_half_width
            n_ref = expected_transmissions(k, tx_rate, power)
            assert abs(metrics.mean_epochs - n_ref) <= 3.0 / z * metrics.mean_epochs_half_width
            r_ref = finite_key_rate(k, tx_rate, power)
            assert abs(metrics.key_rate - r_ref) <= 3.0 / z * metrics.key_rate_half_width

    def test_zero_rate_metrics(self):
        cfg = _config(tx_rate=0.0, k=3, trials=500)
        metrics = estimate_metrics(cfg)
        assert metrics.key_rate == 0.0
        assert metrics.mean_epochs == 3.0
        assert metrics.mean_epochs_half_width == 0.0

    def test_refuses_tiny_runs(self):
        with pytest.raises(ValueError, match="trials"):
            estimate_metrics(_config(trials=50))

    def test_works_for_correlated_specs(self):
        cfg = ProtocolConfig(
            rate_query=RateQuery(tx_rate=1.0, power=10.0, frames_per_key=2),
            spec=FullyCorrelated(Rayleigh()),
            trials=5_000,
            seed=12,
        )
        metrics = estimate_metrics(cfg)
        assert metrics.mean_epochs >= 2.0


class TestSecrecyRateAccrual:
    def test_matches_independent_closed_form(self):
        cfg = _config(tx_rate=4.0, power=10.0, seed=13)
        mean, se = empirical_secrecy_rate(cfg, 1_000_000)
        assert abs(mean - key_rate_independent(4.0, 10.0)) <= 3.0 * se

    def test_fully_correlated_accrues_nothing(self):
        cfg = ProtocolConfig(
            rate_query=RateQuery(tx_rate=3.0, power=10.0),
            spec=FullyCorrelated(Rayleigh()),
            seed=14,
        )
        mean, se = empirical_secrecy_rate(cfg, 50_000)
        assert mean == 0.0 and se == 0.0


class TestBlindness:
    def test_uniform_when_blocks_missing(self):
        cfg = _config(tx_rate=2.0, power=10.0, side_info=0.0, k=2, bits=8, trials=60_000, seed=15)
        res = secrecy_blindness_test(cfg)
        assert not res.inconclusive
        assert res.qualifying > 20_000
        assert res.p_value > 0.01

    def test_inconclusive_without_qualifying_exchanges(self):
        cfg = _config(tx_rate=2.0, side_info=2.0, k=2, trials=500, seed=16)
        res = secrecy_blindness_test(cfg)
        assert res.inconclusive
        assert math.isnan(res.p_value)

    def test_rejects_wide_blocks(self):
        with pytest.raises(ValueError, match="block_bits"):
            secrecy_blindness_test(_config(bits=17, trials=200))

    def test_passes_across_independent_repetitions(self):
        # Under the null the p-value is uniform, so p > 0.01 should hold in
        # at least 95% of repetitions; with ten seeded runs allow one miss.
        passes = 0
        for rep in range(10):
            cfg = _config(
                tx_rate=2.0, power=10.0, side_info=0.0, k=2, bits=8, trials=60_000, seed=100 + rep
            )
            if secrecy_blindness_test(cfg).p_value > 0.01:
                passes += 1
        assert passes >= 9

    def test_single_frame_key_uniform_when_erased(self):
        # k=1 and Eve erased: the residual is the key itself and must spread
        # over all cells.
        cfg = _config(tx_rate=3.0, power=5.0, side_info=0.0, k=1, bits=4, trials=40_000, seed=17)
        res = secrecy_blindness_test(cfg)
        assert not res.inconclusive
        assert res.p_value > 0.01


class TestConfigValidation:
    def test_block_bits_bounds(self):
        with pytest.raises(ValueError):
            _config(bits=0)

    def test_trials_bounds(self):
        with pytest.raises(ValueError):
            _config(trials=0)

    def test_independent_spec_is_default(self):
        assert _config().spec == IndependentRayleigh()
