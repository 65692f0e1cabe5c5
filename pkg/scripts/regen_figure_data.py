#!/usr/bin/env python3
"""Regenerate every preset dataset.

Writes one file per preset into the output directory.  All presets are
deterministic, so a rerun reproduces the files byte for byte.  The fig15
preset runs a POVM search per cell and takes a few minutes at its default
9x9 grid; pass --preset to regenerate a subset.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from dampdisc.sweep import PRESETS, emit, run_sweep


def main(argv: "list[str] | None" = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data", help="output directory (default: data)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument(
        "--preset",
        action="append",
        choices=sorted(PRESETS),
        help="regenerate only this preset (repeatable; default: all)",
    )
    parser.add_argument("--grid", type=int, help="override the per-preset grid size")
    parser.add_argument("--workers", type=int, default=1, help="parallel cells (same output)")
    args = parser.parse_args(argv)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in args.preset or list(PRESETS):
        preset = PRESETS[name]
        started = time.perf_counter()
        grid = run_sweep(preset.config(grid_n=args.grid), workers=args.workers)
        path = outdir / f"{name}.{args.format}"
        emit(grid, args.format, str(path))
        print(f"{name}: {preset.description} -> {path} ({time.perf_counter() - started:.1f} s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
