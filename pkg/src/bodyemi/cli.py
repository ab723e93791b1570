"""Command-line front end.

Exit codes: 0 success, 2 scenario parse/validation error, 3 numeric or
model failure, 4 invalid arguments.  Output files are written atomically;
a failing run leaves nothing behind.
"""

from __future__ import annotations

import argparse
import cmath
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import coupling, geometry, peec
from .errors import ModelError, ParseError
from .scenario import parse_scenario, split_path, to_geometry, to_parameters, write_csv

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_USAGE = 0, 2, 3, 4
VERBS = ("solve", "sweep", "geometry", "reduce", "sensitivity", "suppress")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class Command:
    verb: str
    scenario_path: str
    options: dict = field(default_factory=dict)
    output_path: str | None = None


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bodyemi", description="Body-coupled electric-field interference model")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("scenario", help="scenario file")
        p.add_argument("-o", "--output", help="write to this file instead of standard output")
        return p

    def span(p, required, defaults=(None, None, None)):
        p.add_argument("--from", dest="x_from", type=float, required=required, default=defaults[0])
        p.add_argument("--to", dest="x_to", type=float, required=required, default=defaults[1])
        p.add_argument("--steps", type=int, required=required, default=defaults[2])

    p = verb("solve", "closed forms, exact two-terminal solution and full-network oracle")
    p.add_argument("--legacy-matching", action="store_true",
                   help="also report the simplified forms with a 1 + jwC_m Z_L matching denominator")

    p = verb("sweep", "sweep one scenario key")
    p.add_argument("--param", required=True, help="section.key, e.g. body.c_eh")
    span(p, required=True)

    p = verb("geometry", "head displacement sweep")
    span(p, required=False, defaults=(geometry.CENTERED_APEX, geometry.EXIT_APEX, 100))
    p.add_argument("--slices", type=int, default=256)

    p = verb("reduce", "distributed ladder to lumped terminal pair")
    p.add_argument("--elements", type=int, default=64)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--unit-cap", type=float, help="uniform per-element capacitance [F]")
    group.add_argument("--cluster", nargs=2, type=float, metavar=("FRONT_UNIT", "REAR_UNIT"),
                       help="two-cluster ladder unit capacitances [F]")
    p.add_argument("--terminal-cap", type=float, help="terminal-to-ground capacitance [F] (default c_ag)")
    p.add_argument("--terminal-conductance", type=float, default=0.0, help="terminal-to-ground conductance [S]")

    p = verb("sensitivity", "normalised sensitivities of |v_cd|")
    p.add_argument("--rel-step", type=float, default=1e-6)

    p = verb("suppress", "grounding-blanket suppression ratio")
    p.add_argument("--blanket", type=float, help="blanket capacitance [F]")
    span(p, required=False)
    return parser


def parse_args(argv) -> Command:
    args = _build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(args).items() if k not in ("verb", "scenario", "output")}
    cmd = Command(args.verb, args.scenario, opts, args.output)
    _validate(cmd)
    return cmd


def _validate(cmd: Command):
    o = cmd.options
    if o.get("steps") is not None and o["steps"] < 2:
        raise UsageError(f"--steps must be at least 2, got {o['steps']}")
    if o.get("x_from") is not None and o.get("x_to") is not None and not o["x_from"] < o["x_to"]:
        raise UsageError("--from must be less than --to")
    if cmd.verb == "sweep":
        try:
            split_path(o["param"])
        except KeyError:
            raise UsageError(f"--param: unknown scenario parameter {o['param']!r}") from None
    if cmd.verb == "sensitivity" and not 1e-8 <= o["rel_step"] <= 1e-2:
        raise UsageError("--rel-step must lie in [1e-8, 1e-2]")
    if cmd.verb == "geometry" and o["slices"] < 16:
        raise UsageError("--slices must be at least 16")
    if cmd.verb == "reduce":
        if o["elements"] < 2:
            raise UsageError("--elements must be at least 2")
        if o["cluster"] is not None and o["elements"] % 2:
            raise UsageError("--cluster needs an even --elements")
        for name in ("unit_cap", "terminal_cap", "terminal_conductance"):
            if o.get(name) is not None and o[name] < 0:
                raise UsageError(f"--{name.replace('_', '-')} must be non-negative")
        if o["cluster"] is not None and min(o["cluster"]) < 0:
            raise UsageError("--cluster values must be non-negative")
    if cmd.verb == "suppress":
        spans = [o.get(k) is not None for k in ("x_from", "x_to", "steps")]
        if o["blanket"] is not None:
            if any(spans):
                raise UsageError("give either --blanket or --from/--to/--steps, not both")
            if o["blanket"] < 0:
                raise UsageError("--blanket must be non-negative")
        elif not all(spans):
            raise UsageError("suppress needs --blanket or all of --from/--to/--steps")
        elif o["x_from"] < 0:
            raise UsageError("blanket sweep must start at a non-negative capacitance")


# --- formatting --------------------------------------------------------------


def eng(value: float, unit: str = "") -> str:
    """Engineering notation with three decimals, e.g. ``500.000e-15 F``."""
    suffix = f" {unit}" if unit else ""
    if value == 0:
        return f"0.000e0{suffix}"
    if not math.isfinite(value):
        return f"{value}{suffix}"
    exp = 3 * math.floor(math.log10(abs(value)) / 3)
    mant = value / 10.0**exp
    if abs(round(mant, 3)) >= 1000:
        exp += 3
        mant /= 1000
    return f"{mant:.3f}e{exp}{suffix}"


def eng_phasor(z: complex, unit: str) -> str:
    phase = math.degrees(cmath.phase(z)) if z != 0 else 0.0
    return f"{eng(abs(z), unit)} @ {phase:.3f} deg"


def _deviation(value: complex, reference: complex, floor: float) -> str:
    if abs(reference) <= floor:
        return "n/a (reference below floor)"
    return eng(abs(value - reference) / abs(reference))


def render_report(report: coupling.CouplingReport) -> str:
    floor = 1e-12 * abs(report.v_h)
    lines = [
        "[source]",
        f"c_hg_total = {eng(report.c_hg_total, 'F')}",
        f"v_h = {eng_phasor(report.v_h, 'V')}",
        "[conversion]",
        f"delta_c = {eng(report.delta_c, 'F')}",
        f"v_ab_exact = {eng_phasor(report.v_ab_exact, 'V')}",
        f"v_ab_simplified = {eng_phasor(report.v_ab_simplified, 'V')}",
        f"v_ab_simplified_deviation = {_deviation(report.v_ab_simplified, report.v_ab_exact, floor)}",
        "[gain]",
        f"y_x = {eng_phasor(report.y_x, 'S')}",
        f"z_total = {eng_phasor(report.z_total, 'ohm')}",
        "[output]",
        f"v_cd = {eng_phasor(report.v_cd, 'V')}",
        f"v_cd_oracle = {eng_phasor(report.v_cd_oracle, 'V')}",
        f"v_cd_oracle_deviation = {_deviation(report.v_cd, report.v_cd_oracle, floor)}",
    ]
    return "\n".join(lines) + "\n"


# --- verbs -------------------------------------------------------------------


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read scenario {path!r}: {exc.strerror}") from None
    return parse_scenario(text)


def _run_solve(doc, o) -> str:
    p = to_parameters(doc)
    out = render_report(coupling.evaluate(p))
    if o.get("legacy_matching"):
        out += "[legacy]\n"
        out += f"v_ab_simplified_legacy = {eng_phasor(coupling.v_ab_simplified(p, legacy_matching=True), 'V')}\n"
        out += f"v_cd_legacy = {eng_phasor(coupling.v_cd(p, legacy_matching=True), 'V')}\n"
    return out


def _params_or_usage(build):
    try:
        return build()
    except ValueError as exc:
        raise UsageError(f"sweep point gives an invalid scenario: {exc}") from None


def _run_sweep(doc, o) -> str:
    values = np.linspace(o["x_from"], o["x_to"], o["steps"])
    points = [_params_or_usage(lambda v=v: to_parameters(doc.with_value(o["param"], v))) for v in values]
    rows = []
    for v, p in zip(values, points):
        rows.append((float(v), coupling.body_potential(p), coupling.v_cd(p), abs(coupling.v_cd(p)),
                     abs(coupling.oracle_v_cd(p))))
    return write_csv(["param", "v_h", "v_cd", "v_cd_abs", "oracle_abs"], rows)


def _run_geometry(doc, o) -> str:
    geom = to_geometry(doc)
    head, coil = (geom[0], geom[1]) if geom else (geometry.HeadModel(), geometry.CoilBands())
    base = to_parameters(doc)
    sweep = geometry.delta_c_sweep(head, coil, o["x_from"], o["x_to"], o["steps"], o["slices"])
    rows = []
    for x, c_ha, c_hb, dc in sweep.rows:
        v = coupling.v_cd(replace(base, c_ha=c_ha, c_hb=c_hb))
        rows.append((x, c_ha, c_hb, dc, abs(v)))
    return write_csv(["x", "c_ha", "c_hb", "delta_c", "v_cd_abs"], rows)


def _run_reduce(doc, o) -> str:
    p = to_parameters(doc)
    Q = o["elements"]
    z_coil = p.r_coil + 1j * p.omega * p.l_coil
    if o["cluster"] is not None:
        front, rear = o["cluster"]
        ladder = peec.LadderModel.two_cluster(Q, front, rear, z_coil)
    else:
        unit = o["unit_cap"] if o["unit_cap"] is not None else (p.c_ha + p.c_hb) / Q
        ladder = peec.LadderModel.uniform(Q, unit, z_coil)
    c_term = p.c_ag if o["terminal_cap"] is None else o["terminal_cap"]
    load = o["terminal_conductance"] + 1j * p.omega * c_term
    v_h = coupling.body_potential(p)

    pair = peec.reduce_to_lumped(ladder)
    lines = [
        f"elements = {Q}",
        f"coil_impedance = {eng_phasor(z_coil, 'ohm')}",
        f"total_capacitance = {eng(ladder.total_capacitance, 'F')}",
        f"c_ha = {eng(pair.c_ha, 'F')}",
        f"c_hb = {eng(pair.c_hb, 'F')}",
        f"delta_c = {eng(pair.delta_c, 'F')}",
    ]
    if o["cluster"] is not None:
        closed = peec.two_cluster(front * Q / 2, rear * Q / 2)
        deviation = max(
            abs(pair.c_ha - closed.c_ha) / closed.c_ha if closed.c_ha else 0.0,
            abs(pair.c_hb - closed.c_hb) / closed.c_hb if closed.c_hb else 0.0,
        )
        lines += [
            f"closed_form_c_ha = {eng(closed.c_ha, 'F')}",
            f"closed_form_c_hb = {eng(closed.c_hb, 'F')}",
            f"closed_form_deviation = {eng(deviation)}",
        ]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", peec.WeakCouplingWarning)
        check = peec.validate_reduction(ladder, v_h, p.omega, load)
    lines += [
        f"i_a_distributed = {eng_phasor(check.i_a_distributed, 'A')}",
        f"i_b_distributed = {eng_phasor(check.i_b_distributed, 'A')}",
        f"i_a_lumped = {eng_phasor(check.i_a_lumped, 'A')}",
        f"i_b_lumped = {eng_phasor(check.i_b_lumped, 'A')}",
        f"rel_error = {eng(check.rel_error)}",
    ]
    lines += [f"# warning: {w.message}" for w in caught if issubclass(w.category, peec.WeakCouplingWarning)]
    return "\n".join(lines) + "\n"


def _run_sensitivity(doc, o) -> str:
    table = coupling.sensitivity(to_parameters(doc), o["rel_step"])
    return write_csv(["parameter", "sensitivity"], table)


def _run_suppress(doc, o) -> str:
    p = to_parameters(doc)
    if o["blanket"] is not None:
        c = o["blanket"]
        lines = [
            f"c_blanket = {eng(c, 'F')}",
            f"c_eh_plus_c_hg = {eng(p.c_eh + coupling.body_ground_capacitance(replace(p, c_blanket=0.0)), 'F')}",
            f"suppression_ratio = {coupling.suppression_ratio(p, c):.9f}",
            f"suppression_ratio_oracle = {coupling.suppression_ratio(p, c, oracle=True):.9f}",
        ]
        return "\n".join(lines) + "\n"
    rows = []
    for c in np.linspace(o["x_from"], o["x_to"], o["steps"]):
        c = float(c)
        rows.append((c, coupling.suppression_ratio(p, c), coupling.suppression_ratio(p, c, oracle=True)))
    return write_csv(["c_blanket", "ratio", "oracle_ratio"], rows)


RUNNERS = {
    "solve": _run_solve,
    "sweep": _run_sweep,
    "geometry": _run_geometry,
    "reduce": _run_reduce,
    "sensitivity": _run_sensitivity,
    "suppress": _run_suppress,
}


def _write_atomic(path: str, text: str):
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dispatch(cmd: Command, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        doc = _load(cmd.scenario_path)
        to_parameters(doc)  # surface scenario-level validation errors as parse failures
    except ParseError as exc:
        print(f"{cmd.scenario_path}:{exc.line}:{exc.column}: {exc.kind}: {exc.message}", file=stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"{cmd.scenario_path}: invalid scenario: {exc}", file=stderr)
        return EXIT_PARSE
    except ModelError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC

    try:
        text = RUNNERS[cmd.verb](doc, cmd.options)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC

    if cmd.output_path:
        try:
            _write_atomic(cmd.output_path, text)
        except OSError as exc:
            print(f"cannot write {cmd.output_path!r}: {exc.strerror}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cmd = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return dispatch(cmd)


if __name__ == "__main__":
    sys.exit(main())
