"""Differential noise against the length of an exposed conductor near the body.

The environment-body capacitance grows as length * cap_per_meter; the
script fits a straight line to |v_cd| and reports R^2.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from bodyemi.coupling import default_scenario, oracle_v_cd, v_cd
from bodyemi.geometry import exposure_capacitance
from bodyemi.scenario import write_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--from", dest="x_from", type=float, default=0.5)
    ap.add_argument("--to", dest="x_to", type=float, default=2.0)
    ap.add_argument("--steps", type=int, default=16)
    ap.add_argument("--cap-per-meter", type=float, default=0.5e-12)
    ap.add_argument("--c-hg", type=float, default=200e-12, help="body-ground capacitance, farads")
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    p = replace(default_scenario(), c_hg_direct=args.c_hg, c_hn=0.0, c_ng=0.0)
    lengths = np.linspace(args.x_from, args.x_to, args.steps)
    rows = []
    for length in lengths:
        q = replace(p, c_eh=exposure_capacitance(float(length), args.cap_per_meter))
        rows.append((float(length), q.c_eh, abs(v_cd(q)), abs(oracle_v_cd(q))))
    text = write_csv(["length", "c_eh", "v_cd_abs", "oracle_abs"], rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    y = np.array([r[2] for r in rows])
    slope, intercept = np.polyfit(lengths, y, 1)
    fit = slope * lengths + intercept
    r2 = 1 - np.sum((y - fit) ** 2) / np.sum((y - y.mean()) ** 2)
    print(f"slope = {slope:.4e} V/m, R^2 = {r2:.7f}", file=sys.stderr)


if __name__ == "__main__":
    main()
