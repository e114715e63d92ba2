"""Quadrature convergence of I(c) for the table1 pair as node counts grow.

    python scripts/convergence_study.py [--preset table1] [--out results/]
"""

import argparse
import csv
import sys
import time
from dataclasses import replace
from pathlib import Path

from udwghost.quadrature import QuadratureSpec
from udwghost.scenario import load_scenario
from udwghost.spdc import canonical_diff_vectors, integrate_beta_norms

LEVELS = [(48, 20), (96, 40), (192, 80), (288, 120)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="table1")
    ap.add_argument("--out", help="directory for convergence.csv (default: stdout)")
    args = ap.parse_args(argv)

    s = load_scenario(args.preset)
    cs = canonical_diff_vectors(s.n)
    rows = []
    for radial, polar in LEVELS:
        quad = replace(QuadratureSpec(), radial_nodes=radial, angular_nodes=polar, error_estimate=False)
        t0 = time.perf_counter()
        vals, _ = integrate_beta_norms(s.model, s.spdc, s.detectors, s.tau, cs, quad)
        rows.append((radial, polar, time.perf_counter() - t0, vals))
        print(f"radial={radial:4d} polar={polar:4d}  {rows[-1][2]:6.1f}s", file=sys.stderr)

    ref = rows[-1][3]
    header = ["radial_nodes", "polar_nodes", "seconds"] + [f"relerr_{''.join('+0-'[1 - v // 2] for v in c)}" for c in cs]
    out = open(Path(args.out) / "convergence.csv", "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for radial, polar, secs, vals in rows:
        w.writerow([radial, polar, f"{secs:.2f}", *(f"{abs(v - r) / r:.3e}" for v, r in zip(vals, ref))])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
