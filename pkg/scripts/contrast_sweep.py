"""Contrast against coupling time for the accelerated-detector preset.

Runs the preset's sweep, or a denser grid with --points, and writes the CSV
report plus an SVG plot.

    python scripts/contrast_sweep.py --out results/ [--points 41] [--workers 2]
"""

import argparse
from dataclasses import replace

import numpy as np

from udwghost.runner import emit_report, run_sweep
from udwghost.scenario import load_scenario


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="table3")
    ap.add_argument("--points", type=int, help="evenly spaced tau values in [--tmin, --tmax]")
    ap.add_argument("--tmin", type=float, default=-1.0)
    ap.add_argument("--tmax", type=float, default=1.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args(argv)

    s = load_scenario(args.preset)
    stem = s.name
    if args.points:
        taus = tuple(round(float(t), 12) for t in np.linspace(args.tmin, args.tmax, args.points))
        s = replace(s, sweep=taus)
        stem = f"{s.name}_dense{args.points}"
    rows = run_sweep(s, workers=args.workers)
    for r in rows:
        print(f"tau={r.tau:+.3f}  I_g={r.intensity_gprep:.10f}  I_e={r.intensity_eprep:.10f}  contrast={r.contrast:.4e}")
    for p in emit_report(rows, s, args.out, stem=stem, plot=True):
        print(p)


if __name__ == "__main__":
    main()
