"""Noise suppression from a grounding blanket as its capacitance grows.

Sweeps c_blanket in multiples of (c_eh + c_hg) and prints the closed-form
and network-solved suppression ratios.
"""

import argparse
import sys

import numpy as np

from bodyemi.coupling import body_ground_capacitance, default_scenario, suppression_ratio
from bodyemi.scenario import write_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-multiple", type=float, default=10.0)
    ap.add_argument("--steps", type=int, default=21)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    p = default_scenario()
    unit = p.c_eh + body_ground_capacitance(p)
    rows = []
    for m in np.linspace(0.0, args.max_multiple, args.steps):
        c = float(m) * unit
        rows.append((float(m), c, suppression_ratio(p, c), suppression_ratio(p, c, oracle=True)))
    text = write_csv(["multiple", "c_blanket", "ratio", "oracle_ratio"], rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"at 4x (c_eh + c_hg) = {4 * unit:.3e} F: ratio {suppression_ratio(p, 4 * unit):.6f}, "
          f"network {suppression_ratio(p, 4 * unit, oracle=True):.6f}", file=sys.stderr)


if __name__ == "__main__":
    main()
