#!/usr/bin/env python3
"""Run every figure sweep into one output directory.

Example:
    python scripts/run_all_figures.py --out-dir out --seed 0 --threads 4
    (cd frontend && npm run build) && node frontend/dist/main.js out plots
"""
from __future__ import annotations

import argparse
import sys
import time

from arqkey.cli import main as arqkey_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--frames", type=int, default=30_000, help="frames per fig9 run")
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--snr-step", type=float, default=1.0)
    args = parser.parse_args()

    from pathlib import Path

    Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    common = [
        "--seed", str(args.seed),
        "--trials", str(args.trials),
        "--threads", str(args.threads),
    ]
    for name in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"):
        argv = [name, "--out", f"{args.out_dir}/{name}.csv", *common]
        if name in ("fig4", "fig5", "fig6", "fig7", "fig8"):
            argv += ["--snr-step", str(args.snr_step)]
        if name == "fig9":
            argv += ["--frames", str(args.frames)]
        start = time.perf_counter()
        code = arqkey_main(argv)
        if code != 0:
            print(f"{name} failed with exit code {code}", file=sys.stderr)
            return code
        print(f"{name} done in {time.perf_counter() - start:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
