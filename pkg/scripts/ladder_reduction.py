"""How well the two-terminal reduction tracks a solved distributed ladder.

Scales a uniform ladder's partial capacitances down decade by decade and
reports the terminal-current mismatch for a low-impedance and a
capacitive terminal load.
"""

import argparse
import math
import sys
import warnings

from bodyemi.peec import LadderModel, WeakCouplingWarning, validate_reduction
from bodyemi.scenario import write_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--elements", type=int, default=64)
    ap.add_argument("--unit-cap", type=float, default=0.05e-12)
    ap.add_argument("--decades", type=int, default=5)
    args = ap.parse_args(argv)

    omega = 2 * math.pi * 2.23e6
    z_coil = 0.5 + 1j * omega * 10e-6
    loads = {"low_z": 1e4, "cap_60p": 1j * omega * 60e-12}
    rows = []
    warnings.simplefilter("ignore", WeakCouplingWarning)
    for k in range(args.decades):
        unit = args.unit_cap * 10.0**-k
        ladder = LadderModel.uniform(args.elements, unit, z_coil)
        errs = [validate_reduction(ladder, 0.01, omega, y).rel_error for y in loads.values()]
        rows.append((unit, *errs))
    sys.stdout.write(write_csv(["unit_cap", *(f"rel_error_{k}" for k in loads)], rows))


if __name__ == "__main__":
    main()
