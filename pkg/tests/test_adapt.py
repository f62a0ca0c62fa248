import math

import numpy as np
import pytest

from arqkey.adapt import (
    AdaptConfig,
    BeliefState,
    greedy_rate,
    init_belief,
    make_gap_table,
    propagate,
    reweight,
    simulate_adaptive,
    update_belief,
)
from arqkey.capacity import _eve_gap_rayleigh, ergodic_upper_bound, maximize_key_rate
from arqkey.channel import substream

_LN2 = math.log(2.0)


def _point_mass(gain: complex, count: int = 100) -> BeliefState:
    return BeliefState(
        particles=np.full(count, gain, dtype=complex),
        weights=np.full(count, 1.0 / count),
    )


def _dense_grid_argmax(belief: BeliefState, power: float, resolution: float = 1e-4) -> float:
    """Exhaustive search oracle, written independently of greedy_rate."""
    caps = np.log1p(np.abs(belief.particles) ** 2 * power) / _LN2
    top = float(caps.max())
    if top <= 0:
        return 0.0
    grid = np.arange(resolution, top + resolution, resolution)
    order = np.argsort(caps)
    cum = np.concatenate(([0.0], np.cumsum(belief.weights[order])))
    success = 1.0 - cum[np.searchsorted(caps[order], grid, side="left")]
    objective = success * _eve_gap_rayleigh(grid, power)
    best = len(objective) - 1 - int(np.argmax(objective[::-1]))
    return float(grid[best])


class TestBelief:
    def test_init_uniform(self):
        belief = init_belief(10_000, substream(50, 0))
        assert np.all(belief.weights == 1.0 / 10_000)
        assert belief.ess == pytest.approx(10_000)
        power = np.abs(belief.particles) ** 2
        assert abs(power.mean() - 1.0) <= 3.0 * power.std(ddof=1) / math.sqrt(power.size)

    def test_init_needs_enough_particles(self):
        with pytest.raises(ValueError):
            init_belief(50, substream(50, 0))

    def test_state_validation(self):
        with pytest.raises(ValueError):
            BeliefState(particles=np.zeros(3, dtype=complex), weights=np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            BeliefState(particles=np.zeros(2, dtype=complex), weights=np.array([0.9, 0.3]))
        with pytest.raises(ValueError):
            BeliefState(particles=np.zeros(2, dtype=complex), weights=np.array([-0.1, 1.1]))


class TestReweight:
    def test_zero_rate_ack_keeps_weights(self):
        belief = init_belief(500, substream(51, 0))
        out = reweight(belief, 0.0, True, 10.0, substream(51, 1))
        np.testing.assert_allclose(out.weights, belief.weights)

    def test_ack_support(self):
        belief = init_belief(500, substream(52, 0))
        rate = 1.5
        power = 10.0
        out = reweight(belief, rate, True, power, substream(52, 1))
        thr = (2.0**rate - 1.0) / power
        live = out.weights > 0
        assert np.all(np.abs(out.particles[live]) ** 2 >= thr)
        assert out.weights.sum() == pytest.approx(1.0)

    def test_nack_support(self):
        belief = init_belief(500, substream(53, 0))
        rate = 1.5
        power = 10.0
        out = reweight(belief, rate, False, power, substream(53, 1))
        thr = (2.0**rate - 1.0) / power
        live = out.weights > 0
        assert np.all(np.abs(out.particles[live]) ** 2 < thr)

    def test_impossible_observation_rejuvenates(self):
        belief = _point_mass(0.1 + 0.0j)
        # ACK at a rate far above the point mass capacity kills every weight.
        out = reweight(belief, 30.0, True, 1.0, substream(54, 0))
        assert out.rejuvenated
        assert out.weights.sum() == pytest.approx(1.0)
        assert out.ess == pytest.approx(out.weights.size)


class TestUpdate:
    def test_alpha_one_restores_stationarity(self):
        rng = substream(55, 0)
        belief = init_belief(5_000, rng)
        belief = update_belief(belief, 2.0, True, 1.0, 10.0, rng)
        power = np.abs(belief.particles) ** 2
        weighted_mean = float((belief.weights * power).sum())
        se = power.std(ddof=1) / math.sqrt(power.size)
        assert abs(weighted_mean - 1.0) <= 4.0 * se

    def test_weights_stay_normalized_through_a_run(self):
        rng = substream(56, 0)
        belief = init_belief(300, rng)
        count = belief.particles.size
        for t in range(200):
            rate = 0.5 + 0.01 * t
            ack = bool(t % 3)
            belief = update_belief(belief, rate, ack, 0.2, 10.0, rng)
            assert belief.particles.size == count
            assert belief.weights.sum() == pytest.approx(1.0, abs=1e-9)
            assert math.isfinite(belief.ess)
            assert 0.0 < belief.ess <= count + 1e-9

    def test_resampling_triggers_on_low_ess(self):
        rng = substream(57, 0)
        belief = init_belief(500, rng)
        # An extreme ACK keeps only the far tail alive, forcing a resample.
        out = update_belief(belief, 4.5, True, 0.0, 10.0, rng, resample_fraction=0.99)
        assert out.ess == pytest.approx(out.weights.size)


class TestGreedyRate:
    def test_point_mass_returns_capacity(self):
        gain = 1.3 - 0.4j
        power = 10.0
        belief = _point_mass(gain)
        cap = math.log2(1 + abs(gain) ** 2 * power)
        assert greedy_rate(belief, power) == pytest.approx(cap, abs=1e-12)

    def test_dead_channel_returns_zero(self):
        belief = _point_mass(0.0 + 0.0j)
        assert greedy_rate(belief, 10.0) == 0.0

    def test_matches_dense_grid_oracle_on_randomized_beliefs(self):
        rng = substream(58, 0)
        resolution = 1e-4
        for case in range(1_000):
            count = 10
            particles = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / math.sqrt(2)
            weights = rng.random(count)
            weights /= weights.sum()
            belief = BeliefState(particles=particles, weights=weights)
            power = float(rng.uniform(0.5, 50.0))
            got = greedy_rate(belief, power)
            want = _dense_grid_argmax(belief, power, resolution)
            assert abs(got - want) <= resolution, f"case {case}: {got} vs {want}"

    def test_gap_table_matches_exact_search(self):
        rng = substream(59, 0)
        for _ in range(50):
            belief = init_belief(200, rng)
            power = float(rng.uniform(1.0, 30.0))
            exact = greedy_rate(belief, power)
            fast = greedy_rate(belief, power, gap_fn=make_gap_table(power))
            assert abs(exact - fast) <= 1e-3


class TestSimulation:
    def test_alpha_one_matches_memoryless_optimum(self):
        cfg = AdaptConfig(alpha=1.0, power=10.0, horizon=20_000)
        res = simulate_adaptive(cfg, seed=60)
        optimum = maximize_key_rate(10.0)
        assert abs(res.rate - optimum.value) <= 3.0 * res.stderr

    def test_never_beats_ergodic_bound(self):
        bound = ergodic_upper_bound(10.0, samples=200_000, seed=61)
        for alpha in (0.05, 1.0):
            cfg = AdaptConfig(alpha=alpha, power=10.0, horizon=10_000)
            res = simulate_adaptive(cfg, seed=62)
            assert res.rate <= bound.value + 3.0 * (res.stderr + bound.stderr)

    def test_trace_shapes(self):
        cfg = AdaptConfig(alpha=0.2, power=5.0, horizon=500)
        res = simulate_adaptive(cfg, seed=63)
        assert res.rates.shape == (500,)
        assert res.acks.dtype == bool
        assert np.all(res.payoffs >= 0.0)
        assert np.all(np.isfinite(res.ess_trace))
        assert res.stderr > 0.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AdaptConfig(alpha=1.5, power=10.0, horizon=100)
        with pytest.raises(ValueError):
            AdaptConfig(alpha=0.5, power=0.0, horizon=100)
        with pytest.raises(ValueError):
            AdaptConfig(alpha=0.5, power=1.0, horizon=0)
        with pytest.raises(ValueError):
            AdaptConfig(alpha=0.5, power=1.0, horizon=100, particles=10)
