"""Experiment runner: figure sweeps written as CSV, plus a validation report.

Every sweep is reproducible: the master seed is recorded in the CSV metadata
line and per-point substreams are derived from it, so reruns are
byte-identical regardless of the worker-pool size.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from arqkey import __version__, adapt, capacity, dumbant, linklevel, validation
from arqkey.channel import ChiSquare, DumbAntennaComposite

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9")


@dataclass
class ExperimentRequest:
    name: str
    snr_min: float = 0.0
    snr_max: float = 30.0
    snr_step: float = 1.0
    trials: int = 100_000
    seed: int = 0
    out: str | None = None
    threads: int = 1
    frames: int = 30_000
    alphas: tuple[float, ...] = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)

    def snr_grid(self):
        count = int(round((self.snr_max - self.snr_min) / self.snr_step)) + 1
        return [self.snr_min + i * self.snr_step for i in range(count)]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".10g")


def _write_csv(path: Path, header: list[str], rows: list[list], request: ExperimentRequest) -> None:
    lines = [",".join(header)]
    lines.append(f"# seed={request.seed} trials={request.trials} version={__version__}")
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _parallel(fn, items, threads: int, label: str = ""):
    """Map with optional workers plus progress lines for long sweeps."""
    total = len(items)
    chatty = label and total >= 8
    results = []
    if threads <= 1:
        for i, item in enumerate(items, 1):
            results.append(fn(item))
            if chatty and (i % max(1, total // 10) == 0 or i == total):
                print(f"{label}: {i}/{total} points", flush=True)
        return results
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for i, result in enumerate(pool.map(fn, items), 1):
            results.append(result)
            if chatty and (i % max(1, total // 10) == 0 or i == total):
                print(f"{label}: {i}/{total} points", flush=True)
    return results


def _fig1(request: ExperimentRequest):
    header = ["snr_db", "cs", "ce_rc0", "ce_rc3", "ce_rc7"]
    rows = []
    for snr_db in request.snr_grid():
        budget = 10.0 ** (snr_db / 10.0)
        cs = capacity.maximize_key_rate(budget, objective="key-rate")
        row = [snr_db, cs.value]
        for side_info in (0.0, 3.0, 7.0):
            ce = capacity.maximize_key_rate(
                budget, objective="erasure-capacity", side_info_rate=side_info
            )
            row.append(ce.value)
        rows.append(row)
    return header, rows


_TRADEOFF_KS = np.unique(np.geomspace(1, 20_000, 90).astype(int))


def _fig2(request: ExperimentRequest):
    del request
    power = 1e3
    header = ["frames_per_key"]
    for tx_rate in (4, 6, 7, 8):
        header += [f"key_rate_r0_{tx_rate}", f"outage_r0_{tx_rate}"]
    rows = []
    for k in _TRADEOFF_KS:
        row = [int(k)]
        for tx_rate in (4, 6, 7, 8):
            row.append(capacity.finite_key_rate(int(k), tx_rate, power))
            row.append(capacity.outage_probability(int(k), tx_rate, 2.0, power))
        rows.append(row)
    return header, rows


def _fig3(request: ExperimentRequest):
    del request
    power = 1e3
    tx_rate = 10.0
    header = ["frames_per_key", "key_rate", "outage_rc_3", "outage_rc_4", "outage_rc_5", "outage_rc_7"]
    rows = []
    for k in _TRADEOFF_KS:
        row = [int(k), capacity.finite_key_rate(int(k), tx_rate, power)]
        for side_info in (3.0, 4.0, 5.0, 7.0):
            row.append(capacity.outage_probability(int(k), tx_rate, side_info, power))
        rows.append(row)
    return header, rows


def _fig4(request: ExperimentRequest):
    header = ["snr_db", "modulation", "payload_bits", "key_rate", "frames_per_key"]
    grid = request.snr_grid()
    combos = [(m, kb) for m in linklevel.MODULATIONS for kb in (240, 480)]

    def run(combo):
        modulation, payload = combo
        cfg = linklevel.LinkConfig(modulation=modulation, payload_bits=payload)
        return linklevel.sweep_key_rates(
            cfg, grid, fading_draws=request.trials, seed=request.seed
        )

    sweeps = _parallel(run, combos, request.threads, request.name)
    rows = []
    for snr_idx, snr_db in enumerate(grid):
        for (modulation, payload), points in zip(combos, sweeps):
            point = points[snr_idx]
            rows.append(
                [snr_db, modulation, payload, point.key_rate, point.frames_per_key or 0]
            )
    return header, rows


def _dumb_rows(request: ExperimentRequest, variants, spec_of, label: str):
    grid = request.snr_grid()
    points = [(variant, snr_db) for variant in variants for snr_db in grid]

    def run(item):
        variant, snr_db = item
        budget = 10.0 ** (snr_db / 10.0)
        res = capacity.maximize_key_rate(
            budget,
            spec=spec_of(variant),
            samples=request.trials,
            seed=request.seed + 1000 * variant + int(round(10 * snr_db)),
            power_points=4,
        )
        return [variant, snr_db, res.value, res.stderr if res.stderr else 0.0]

    rows = _parallel(run, points, request.threads, request.name)
    return [label, "snr_db", "key_rate", "stderr"], rows


def _fig5(request: ExperimentRequest):
    # Fully correlated exponential per-antenna gains, decorrelated by the
    # random phases; unit-mean exponential power is chi-square with dof 2.
    return _dumb_rows(
        request, (2, 3, 4, 8), lambda n: DumbAntennaComposite(n, ChiSquare(2)), "n_antennas"
    )


def _chi_fig(request: ExperimentRequest, n_antennas: int):
    return _dumb_rows(
        request,
        (2, 4, 6, 8),
        lambda dof: DumbAntennaComposite(n_antennas, ChiSquare(dof)),
        "chi_square_dof",
    )


def _fig9(request: ExperimentRequest):
    header = ["alpha", "key_rate", "stderr", "upper_bound", "lower_bound"]
    power = 10.0
    upper = capacity.ergodic_upper_bound(power, samples=max(request.trials, 200_000), seed=request.seed)
    lower = capacity.maximize_key_rate(power)

    def run(alpha):
        cfg = adapt.AdaptConfig(alpha=alpha, power=power, horizon=request.frames)
        res = adapt.simulate_adaptive(cfg, seed=request.seed + int(alpha * 1000))
        return [alpha, res.rate, res.stderr, upper.value, lower.value]

    rows = _parallel(run, list(request.alphas), request.threads, request.name)
    return header, rows


_BUILDERS = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": lambda request: _chi_fig(request, 3),
    "fig7": lambda request: _chi_fig(request, 4),
    "fig8": lambda request: _chi_fig(request, 8),
    "fig9": _fig9,
}


def run_figure(name: str, request: ExperimentRequest) -> Path:
    """Compute one figure sweep and write its CSV; returns the output path."""
    if name not in _BUILDERS:
        raise ValueError(f"unknown figure {name!r}; expected one of {', '.join(FIGURES)}")
    header, rows = _BUILDERS[name](request)
    path = Path(request.out if request.out else f"{name}.csv")
    _write_csv(path, header, rows, request)
    return path


_FLOAT_FLAGS = ("snr_min", "snr_max", "snr_step", "trials_scale", "tolerance_scale")
_INT_FLAGS = ("trials", "seed", "threads", "frames")


def _load_config(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config lines must look like 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args: argparse.Namespace, config: dict) -> None:
    """Fill flags that were not given on the command line from the config file."""
    for key, value in config.items():
        if getattr(args, key, None) is not None:
            continue
        if not hasattr(args, key):
            continue
        if key in _FLOAT_FLAGS:
            setattr(args, key, float(value))
        elif key in _INT_FLAGS:
            setattr(args, key, int(value))
        else:
            setattr(args, key, value)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arqkey", description="Figure sweeps and validation for the ARQ key-sharing models"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in FIGURES:
        fig = sub.add_parser(name, help=f"write the {name} sweep as CSV")
        fig.add_argument("--snr-min", type=float, default=None)
        fig.add_argument("--snr-max", type=float, default=None)
        fig.add_argument("--snr-step", type=float, default=None)
        fig.add_argument("--trials", type=int, default=None, help="Monte Carlo samples per point")
        fig.add_argument("--seed", type=int, default=None)
        fig.add_argument("--out", type=str, default=None)
        fig.add_argument("--threads", type=int, default=None)
        fig.add_argument("--config", type=str, default=None, help="key = value defaults file")
        if name == "fig9":
            fig.add_argument("--frames", type=int, default=None, help="frames per adaptation run")
    val = sub.add_parser("validate", help="run the analytic-vs-simulation acceptance grid")
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--trials-scale", type=float, default=None, help="scale every trial count")
    val.add_argument(
        "--tolerance-scale",
        type=float,
        default=None,
        help="scale every tolerance (testing aid; <1 tightens the gate)",
    )
    val.add_argument("--only", type=str, default=None, help="comma-separated check groups")
    val.add_argument("--config", type=str, default=None)
    return parser


def _run_validate(args: argparse.Namespace) -> int:
    names = args.only.split(",") if args.only else None
    try:
        results = validation.run_checks(
            names=names,
            seed=args.seed if args.seed is not None else 0,
            trials_scale=args.trials_scale if args.trials_scale is not None else 1.0,
            tol_scale=args.tolerance_scale if args.tolerance_scale is not None else 1.0,
        )
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    failed = []
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        line = (
            f"[{tag}] {res.name}: measured={res.measured:.6g} "
            f"reference={res.reference:.6g} tolerance={res.tolerance:.6g}"
        )
        if res.detail:
            line += f" ({res.detail})"
        print(line)
        if not res.passed:
            failed.append(res.name)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failed checks: " + "; ".join(failed), file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            config = _load_config(args.config)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 3
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        _resolve(args, config)
    if args.command == "validate":
        return _run_validate(args)
    request = ExperimentRequest(
        name=args.command,
        snr_min=args.snr_min if args.snr_min is not None else 0.0,
        snr_max=args.snr_max if args.snr_max is not None else 30.0,
        snr_step=args.snr_step if args.snr_step is not None else 1.0,
        trials=args.trials if args.trials is not None else 100_000,
        seed=args.seed if args.seed is not None else 0,
        out=args.out,
        threads=args.threads if args.threads is not None else 1,
        frames=getattr(args, "frames", None) or 30_000,
    )
    try:
        path = run_figure(args.command, request)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
