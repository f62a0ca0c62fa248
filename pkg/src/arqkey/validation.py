"""Analytic-vs-simulation acceptance grid.

Each check compares a closed form with its independent Monte Carlo
counterpart (or verifies a stated trend) and reports a discrepancy, the
reference value, and a tolerance. Statistical tolerances are 3-sigma bands
computed from the run itself, with a model-based floor so starved cells
(expected hit counts below one) stay well posed.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from arqkey import adapt, capacity, dumbant, linklevel, protocol
from arqkey.capacity import RateQuery, _eve_gap_rayleigh
from arqkey.channel import ChiSquare, Los, substream
from arqkey.protocol import ProtocolConfig

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CheckResult:
    """One acceptance check: passes when measured <= tolerance * scale."""

    name: str
    measured: float
    reference: float
    tolerance: float
    passed: bool
    detail: str = ""


def _result(name, discrepancy, reference, tolerance, tol_scale, detail=""):
    tol = tolerance * tol_scale
    return CheckResult(
        name=name,
        measured=discrepancy,
        reference=reference,
        tolerance=tol,
        passed=discrepancy <= tol,
        detail=detail,
    )


def _n(base: int, scale: float, floor: int) -> int:
    return max(int(base * scale), floor)


def check_theorem_rate(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Closed-form key rate vs per-epoch protocol accrual on the SNR x rate grid."""
    epochs = _n(1_000_000, trials_scale, 20_000)
    out = []
    start = time.perf_counter()
    for snr_db in (0, 10, 20, 30):
        power = 10.0 ** (snr_db / 10.0)
        for tx_rate in (1, 2, 4, 6):
            cfg = ProtocolConfig(
                rate_query=RateQuery(tx_rate=tx_rate, power=power),
                seed=seed + snr_db * 100 + tx_rate,
            )
            mean, se = protocol.empirical_secrecy_rate(cfg, epochs)
            ref = capacity.key_rate_independent(tx_rate, power)
            # Var(X) <= tx_rate * E X gives a floor when no epoch scores.
            se_floor = math.sqrt(tx_rate * ref / epochs)
            out.append(
                _result(
                    f"theorem-rate snr={snr_db}dB r0={tx_rate}",
                    abs(mean - ref),
                    ref,
                    3.0 * max(se, se_floor),
                    tol_scale,
                    f"empirical={mean:.6g} epochs={epochs}",
                )
            )
    elapsed = time.perf_counter() - start
    out.append(
        _result("theorem-rate wall-time", elapsed, 60.0, 60.0, 1.0, "seconds for the 16-point grid")
    )
    return out


def check_ack_probability(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Empirical ACK fraction vs the exponential closed form, binomial bands."""
    epochs = _n(1_000_000, trials_scale, 20_000)
    out = []
    for snr_db in (0, 10, 20, 30):
        power = 10.0 ** (snr_db / 10.0)
        for tx_rate in (1, 2, 4, 6):
            cfg = ProtocolConfig(
                rate_query=RateQuery(tx_rate=tx_rate, power=power),
                seed=seed + snr_db * 100 + tx_rate,
            )
            frac, _ = protocol.empirical_ack_fraction(cfg, epochs)
            ref = math.exp(-(2.0**tx_rate - 1.0) / power)
            sigma = math.sqrt(ref * (1.0 - ref) / epochs)
            out.append(
                _result(
                    f"ack-probability snr={snr_db}dB r0={tx_rate}",
                    abs(frac - ref),
                    ref,
                    3.0 * max(sigma, 1e-12),
                    tol_scale,
                    f"empirical={frac:.6g}",
                )
            )
    return out


def check_finite_key_laws(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Outage, mean epochs, and key rate of full exchanges vs the closed laws."""
    trials = _n(1_000_000, trials_scale, 10_000)
    power = 1e3
    out = []
    for tx_rate, side_info in ((4, 2), (6, 2), (10, 5)):
        for k in (1, 2, 4):
            cfg = ProtocolConfig(
                rate_query=RateQuery(
                    tx_rate=tx_rate, power=power, side_info_rate=side_info, frames_per_key=k
                ),
                trials=trials,
                seed=seed + 1000 * k + tx_rate,
            )
            metrics = protocol.estimate_metrics(cfg)
            z = 1.959963984540054
            tag = f"r0={tx_rate} rc={side_info} k={k}"
            p_ref = capacity.outage_probability(k, tx_rate, side_info, power)
            sigma = math.sqrt(p_ref * (1.0 - p_ref) / trials)
            out.append(
                _result(
                    f"outage-law {tag}",
                    abs(metrics.outage_probability - p_ref),
                    p_ref,
                    3.0 * max(sigma, 1e-12),
                    tol_scale,
                    f"empirical={metrics.outage_probability:.6g} trials={trials}",
                )
            )
            n_ref = capacity.expected_transmissions(k, tx_rate, power)
            out.append(
                _result(
                    f"mean-epochs {tag}",
                    abs(metrics.mean_epochs - n_ref),
                    n_ref,
                    3.0 * max(metrics.mean_epochs_half_width / z, 1e-12),
                    tol_scale,
                    f"empirical={metrics.mean_epochs:.6g}",
                )
            )
            r_ref = capacity.finite_key_rate(k, tx_rate, power)
            out.append(
                _result(
                    f"finite-key-rate {tag}",
                    abs(metrics.key_rate - r_ref),
                    r_ref,
                    3.0 * max(metrics.key_rate_half_width / z, 1e-12),
                    tol_scale,
                    f"empirical={metrics.key_rate:.6g}",
                )
            )
    return out


def check_optimized_rate_ordering(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Erasure-model capacity dominates the key rate at zero side information.

    Also checks both optimized curves are nondecreasing in SNR.
    """
    del seed, trials_scale
    snr_grid = range(0, 31)
    cs_vals = []
    ce_vals = []
    for snr_db in snr_grid:
        budget = 10.0 ** (snr_db / 10.0)
        cs = capacity.maximize_key_rate(budget, objective="key-rate")
        ce = capacity.maximize_key_rate(budget, objective="erasure-capacity", side_info_rate=0.0)
        # The erasure value at the key-rate argmax is a feasible lower bound.
        ce_val = max(
            ce.value,
            capacity.erasure_secrecy_capacity(cs.argmax_tx_rate, 0.0, cs.argmax_power),
        )
        cs_vals.append(cs.value)
        ce_vals.append(ce_val)
    cs_vals = np.array(cs_vals)
    ce_vals = np.array(ce_vals)
    dominance_gap = float(np.max(cs_vals - ce_vals))
    out = [
        _result(
            "erasure-dominates-key-rate rc=0",
            max(dominance_gap, 0.0),
            0.0,
            1e-9,
            tol_scale,
            f"min margin={float(np.min(ce_vals - cs_vals)):.4g}",
        )
    ]
    for name, vals in (("key-rate", cs_vals), ("erasure-capacity", ce_vals)):
        worst = float(np.max(np.maximum(vals[:-1] - vals[1:], 0.0)))
        out.append(
            _result(
                f"{name} nondecreasing in snr",
                worst,
                0.0,
                1e-9,
                tol_scale,
                "max single-step decrease",
            )
        )
    return out


def check_tradeoff_trends(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Finite-key tradeoff shapes: monotone curves and side-information cost."""
    del seed, trials_scale
    power = 1e3
    out = []
    ks = np.unique(np.geomspace(1, 2000, 60).astype(int))
    for tx_rate in (4, 6, 7, 8):
        rates = np.array([capacity.finite_key_rate(int(k), tx_rate, power) for k in ks])
        pouts = np.array([capacity.outage_probability(int(k), tx_rate, 2.0, power) for k in ks])
        worst = float(np.max(np.maximum(np.diff(rates), 0.0)))
        worst = max(worst, float(np.max(np.maximum(np.diff(pouts), 0.0))))
        out.append(
            _result(
                f"tradeoff monotone r0={tx_rate} rc=2",
                worst,
                0.0,
                1e-15,
                tol_scale,
                "rate and outage both decrease along k",
            )
        )
    # Interpolated frame count hitting outage 1e-6 at each side-information level.
    tx_rate = 10.0
    target = 1e-6
    rates_at_target = []
    for side_info in (3, 4, 5, 7):
        k_star = power * math.log(1.0 / target) / (2.0 ** (tx_rate - side_info) - 1.0)
        rates_at_target.append(
            (tx_rate / k_star) * math.exp(-(2.0**tx_rate - 1.0) / power)
        )
    worst = float(np.max(np.maximum(np.diff(rates_at_target), 0.0)))
    out.append(
        _result(
            "key-rate falls with side info at outage 1e-6",
            worst,
            0.0,
            1e-15,
            tol_scale,
            f"rates={['%.4g' % r for r in rates_at_target]}",
        )
    )
    return out


def check_phase_correlation(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Mean and variance of the dumb-antenna correlation coefficient."""
    trials = _n(100_000, trials_scale, 10_000)
    out = []
    variances = []
    for n in (2, 3, 4, 8):
        stats = dumbant.rho_statistics(n, trials, seed=seed + n)
        sigma_mean = math.sqrt(stats.predicted_var / trials)
        out.append(
            _result(
                f"rho mean n={n}",
                abs(stats.rho_mean),
                0.0,
                3.0 * sigma_mean,
                tol_scale,
                f"mean={stats.rho_mean:.5g} trials={trials}",
            )
        )
        out.append(
            _result(
                f"rho variance n={n}",
                abs(stats.rho_var - stats.predicted_var),
                stats.predicted_var,
                0.10 * stats.predicted_var,
                tol_scale,
                f"var={stats.rho_var:.5g}",
            )
        )
        variances.append(stats.rho_var)
    worst = float(np.max(np.maximum(np.diff(variances), 0.0)))
    out.append(
        _result("rho variance strictly decreasing in n", worst, 0.0, 1e-12, tol_scale)
    )
    return out


def check_dumb_antenna_rates(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Single antenna gives zero; rate climbs with N toward the Rayleigh value.

    The N sweep uses fully correlated exponential per-antenna gains (the
    phase randomization is what decorrelates them); the closeness checks use
    the line-of-sight variant, whose equivalent marginal converges faster.
    """
    samples = _n(400_000, trials_scale, 10_000)
    out = []
    values = []
    errs = []
    anchor = capacity.maximize_key_rate(10.0)
    for n in (1, 2, 3, 4, 8):
        res = dumbant.dumb_key_rate(
            n,
            ChiSquare(2),
            tx_rate=anchor.argmax_tx_rate,
            power=anchor.argmax_power,
            samples=samples,
            seed=seed + 10 * n,
        )
        values.append(res.value)
        errs.append(res.stderr if res.stderr else 0.0)
    out.append(
        _result("dumb-antenna rate n=1", values[0], 0.0, 0.0, 1.0, "exactly zero by construction")
    )
    worst = 0.0
    for i in range(len(values) - 1):
        allowance = 3.0 * (errs[i] + errs[i + 1])
        worst = max(worst, values[i] - values[i + 1] - allowance)
    out.append(
        _result(
            "dumb-antenna rate nondecreasing in n",
            max(worst, 0.0),
            0.0,
            1e-9,
            tol_scale,
            f"values={['%.4g' % v for v in values]}",
        )
    )
    for snr_db in (5, 10, 15):
        budget = 10.0 ** (snr_db / 10.0)
        ref = capacity.maximize_key_rate(budget)
        res = dumbant.dumb_key_rate(
            8,
            Los(),
            tx_rate=ref.argmax_tx_rate,
            power=ref.argmax_power,
            samples=samples,
            seed=seed + snr_db,
        )
        out.append(
            _result(
                f"dumb n=8 near independent bound snr={snr_db}dB",
                abs(res.value - ref.value),
                ref.value,
                0.10 * ref.value,
                tol_scale,
                f"dumb={res.value:.5g}+-{res.stderr:.2g}",
            )
        )
    return out


def check_rate_adaptation(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Greedy adaptation endpoints and ordering across the memory parameter."""
    frames = _n(100_000, trials_scale, 2_000)
    power = 10.0
    start = time.perf_counter()
    results = {}
    for alpha in (0.01, 0.1, 0.5, 1.0):
        cfg = adapt.AdaptConfig(alpha=alpha, power=power, horizon=frames)
        results[alpha] = adapt.simulate_adaptive(cfg, seed=seed + int(alpha * 100))
    elapsed = time.perf_counter() - start
    optimum = capacity.maximize_key_rate(power)
    ergodic = capacity.ergodic_upper_bound(power, samples=max(200_000, frames))
    out = []
    res1 = results[1.0]
    out.append(
        _result(
            "adaptive alpha=1 matches memoryless optimum",
            abs(res1.rate - optimum.value),
            optimum.value,
            3.0 * res1.stderr,
            tol_scale,
            f"achieved={res1.rate:.5g}+-{res1.stderr:.2g} frames={frames}",
        )
    )
    alphas = (0.01, 0.1, 0.5, 1.0)
    worst = 0.0
    for lo, hi in zip(alphas[:-1], alphas[1:]):
        allowance = 3.0 * (results[lo].stderr + results[hi].stderr)
        worst = max(worst, results[hi].rate - results[lo].rate - allowance)
    out.append(
        _result(
            "adaptive rate nonincreasing in alpha",
            max(worst, 0.0),
            0.0,
            1e-9,
            tol_scale,
            f"rates={['%.4g' % results[a].rate for a in alphas]}",
        )
    )
    worst = 0.0
    for alpha in alphas:
        res = results[alpha]
        bound = ergodic.value + 3.0 * (res.stderr + ergodic.stderr)
        worst = max(worst, res.rate - bound)
    out.append(
        _result(
            "adaptive rate below ergodic bound",
            max(worst, 0.0),
            ergodic.value,
            1e-9,
            tol_scale,
        )
    )
    out.append(
        _result("adaptive wall-time", elapsed, 300.0, 300.0, 1.0, "seconds for four runs")
    )
    return out


def check_distillation(seed=0, trials_scale=1.0, tol_scale=1.0):
    """XOR distillation: uniformity given a missed block, exactness given none."""
    trials = _n(240_000, trials_scale, 20_000)
    cfg = ProtocolConfig(
        rate_query=RateQuery(tx_rate=2.0, power=10.0, side_info_rate=0.0, frames_per_key=2),
        block_bits=8,
        trials=trials,
        seed=seed + 77,
    )
    blind = protocol.secrecy_blindness_test(cfg)
    out = [
        _result(
            "distilled key uniform when Eve misses a block",
            max(0.0, 0.01 - blind.p_value),
            0.01,
            0.0,
            1.0,
            f"p={blind.p_value:.4g} qualifying={blind.qualifying}",
        )
    ]
    rng = substream(seed, 99)
    mismatches = 0
    outages = 0
    for _ in range(2_000):
        exch = protocol.run_key_exchange(cfg, rng)
        if exch.outage:
            outages += 1
            if exch.eve_guess_basis != exch.key:
                mismatches += 1
    out.append(
        _result(
            "full interception reconstructs the key",
            float(mismatches),
            0.0,
            0.0,
            1.0,
            f"outage exchanges={outages}",
        )
    )
    return out


def check_link_level_trends(seed=0, trials_scale=1.0, tol_scale=1.0):
    """Interior key-rate peak in SNR and the packet-size ordering."""
    draws = _n(100_000, trials_scale, 10_000)
    grid = list(range(0, 31))
    out = []
    by_payload = {}
    for modulation in linklevel.MODULATIONS:
        for payload in (240, 480):
            cfg = linklevel.LinkConfig(modulation=modulation, payload_bits=payload)
            pts = linklevel.sweep_key_rates(cfg, grid, fading_draws=draws, seed=seed + 3)
            rates = np.array([p.key_rate for p in pts])
            by_payload[(modulation, payload)] = rates
            peak = int(np.argmax(rates))
            interior = 0 < peak < len(grid) - 1 and rates[peak] > rates[0] and rates[peak] > rates[-1]
            out.append(
                _result(
                    f"interior peak {modulation} kb={payload}",
                    0.0 if interior else 1.0,
                    0.0,
                    0.0,
                    1.0,
                    f"peak at {grid[peak]} dB, rate={rates[peak]:.4g}",
                )
            )
    for modulation in linklevel.MODULATIONS:
        gap = by_payload[(modulation, 240)] - by_payload[(modulation, 480)]
        out.append(
            _result(
                f"smaller packets never beat larger {modulation}",
                max(float(gap.max()), 0.0),
                0.0,
                1e-12,
                tol_scale,
                "kb=240 rate minus kb=480 rate, max over grid",
            )
        )
    return out


def _dense_grid_rate_oracle(belief, power: float, resolution: float = 1e-4) -> float:
    """Exhaustive rate search on a uniform grid; independent of greedy_rate."""
    caps = np.log1p(np.abs(belief.particles) ** 2 * power) / _LN2
    top = float(caps.max())
    if top <= 0.0:
        return 0.0
    grid = np.arange(resolution, top + resolution, resolution)
    order = np.argsort(caps, kind="stable")
    cum = np.concatenate(([0.0], np.cumsum(belief.weights[order])))
    success = 1.0 - cum[np.searchsorted(caps[order], grid, side="left")]
    objective = success * _eve_gap_rayleigh(grid, power)
    best = len(objective) - 1 - int(np.argmax(objective[::-1]))
    return float(grid[best])


def check_property_samples(seed=0, trials_scale=1.0, tol_scale=1.0, cases: int = 200):
    """Spot checks of the two numeric property suites for the CLI report.

    The full randomized suites live in the test battery; this reruns the
    greedy-vs-dense-grid comparison and the E1 quadrature comparison at a
    size that keeps the report quick.
    """
    from scipy.integrate import quad

    rng = substream(seed, 55)
    resolution = 1e-4
    worst_shortfall = 0.0
    displaced = 0

    def objective(belief, power, rate):
        caps = np.log1p(np.abs(belief.particles) ** 2 * power) / _LN2
        success = float(belief.weights[caps >= rate].sum())
        return success * float(_eve_gap_rayleigh(np.array([rate]), power)[0])

    for _ in range(cases):
        count = 100
        particles = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / math.sqrt(2)
        weights = rng.random(count)
        weights /= weights.sum()
        belief = adapt.BeliefState(particles=particles, weights=weights)
        power = float(rng.uniform(0.5, 50.0))
        got = adapt.greedy_rate(belief, power)
        want = _dense_grid_rate_oracle(belief, power, resolution)
        if abs(got - want) > resolution:
            # Distinct local peaks the grid cannot tell apart: the greedy
            # answer must then be at least as good as the grid's.
            displaced += 1
            worst_shortfall = max(
                worst_shortfall, objective(belief, power, want) - objective(belief, power, got)
            )
    out = [
        _result(
            "greedy rate matches dense-grid search",
            worst_shortfall,
            0.0,
            1e-9,
            tol_scale,
            f"{cases} randomized beliefs, grid step {resolution:g}, "
            f"{displaced} grid-level ties",
        )
    ]
    worst = 0.0
    for x in np.geomspace(1e-6, 300.0, 25):
        ref, _ = quad(lambda t: math.exp(-t) / t, x, np.inf, epsabs=1e-14, epsrel=1e-12)
        worst = max(worst, abs(capacity.exp_integral_e1(float(x)) - ref))
    out.append(
        _result(
            "exponential integral matches quadrature",
            worst,
            0.0,
            1e-10,
            tol_scale,
            "25 log-spaced arguments",
        )
    )
    return out


ALL_CHECKS = {
    "theorem-rate": check_theorem_rate,
    "ack-probability": check_ack_probability,
    "finite-key-laws": check_finite_key_laws,
    "optimized-ordering": check_optimized_rate_ordering,
    "tradeoff-trends": check_tradeoff_trends,
    "phase-correlation": check_phase_correlation,
    "dumb-antenna": check_dumb_antenna_rates,
    "rate-adaptation": check_rate_adaptation,
    "distillation": check_distillation,
    "link-level": check_link_level_trends,
    "properties": check_property_samples,
}


def run_checks(names=None, seed=0, trials_scale=1.0, tol_scale=1.0):
    """Run the named checks (all by default) and return their results."""
    selected = list(ALL_CHECKS) if names is None else list(names)
    results = []
    for name in selected:
        if name not in ALL_CHECKS:
            raise KeyError(f"unknown check {name!r}; known: {', '.join(ALL_CHECKS)}")
        results.extend(ALL_CHECKS[name](seed=seed, trials_scale=trials_scale, tol_scale=tol_scale))
    return results
