"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the summary block at the
end lists every criterion) or ``python3 tests/test_acceptance.py``.
"""

import io
import math
import time
from contextlib import contextmanager, redirect_stderr
from dataclasses import replace
from pathlib import Path

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from bodyemi.cli import EXIT_PARSE, main
from bodyemi.coupling import (
    body_ground_capacitance,
    body_potential,
    default_scenario,
    oracle_v_cd,
    sensitivity,
    solve_full,
    suppression_ratio,
    v_ab_exact,
    v_ab_simplified,
    v_cd,
)
from bodyemi.errors import ParseError
from bodyemi.geometry import CENTERED_APEX, EXIT_APEX, CoilBands, HeadModel, count_peaks, delta_c_sweep
from bodyemi.geometry import exposure_capacitance
from bodyemi.netsolve import relative_residual, solve_dense
from bodyemi.peec import LadderModel, reduce_to_lumped, two_cluster, validate_reduction
from bodyemi.scenario import SCHEMA, SIGNED_KEYS, ScenarioDocument, parse_scenario, serialize_scenario, write_csv

RESULTS: list[str] = []


class Gate:
    def __init__(self):
        self.checks = []
        self.elapsed = 0.0

    def check(self, ok, detail):
        self.checks.append((bool(ok), detail))


@contextmanager
def criterion(number, title, limit_s):
    gate = Gate()
    start = time.perf_counter()
    try:
        yield gate
    finally:
        gate.elapsed = time.perf_counter() - start
    gate.check(gate.elapsed < limit_s, f"runtime {gate.elapsed:.3f}s < {limit_s}s")
    ok = all(flag for flag, _ in gate.checks)
    detail = "; ".join(d for _, d in gate.checks)
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"
    RESULTS.append(line)
    print(line)
    failed = [d for flag, d in gate.checks if not flag]
    assert not failed, f"criterion {number} failed: {failed}"


def rel(a, b):
    return abs(a - b) / abs(b)


def scaled_coupling(p, factor):
    return replace(p, c_ha=p.c_ha * factor, c_hb=p.c_hb * factor)


def test_criterion_01_oracle_equivalence():
    with criterion(1, "closed form vs full network", 1.0) as g:
        p = default_scenario()
        err = rel(v_cd(p), oracle_v_cd(p))
        g.check(err <= 0.05, f"default error {err:.4f} <= 0.05")
        errors = [rel(v_cd(q), oracle_v_cd(q)) for q in (scaled_coupling(p, 10.0**-k) for k in range(4))]
        above_floor = [e for e in errors if e > 1e-12]
        monotone = all(b < a for a, b in zip(above_floor, above_floor[1:]))
        g.check(monotone, "error shrinks over 3 decades: " + ", ".join(f"{e:.2e}" for e in errors))


def test_criterion_02_simplification_validity():
    with criterion(2, "simplified vs exact two-terminal voltage", 1.0) as g:
        p = default_scenario()
        c_g = p.c_ag

        def error_at(ratio):
            c_max = c_g / ratio
            q = replace(p, c_ha=c_max, c_hb=c_max / 2)
            return rel(v_ab_simplified(q), v_ab_exact(q))

        e3 = error_at(1e3)
        g.check(e3 <= 1e-2, f"ratio 1e3 error {e3:.2e} <= 1e-2")
        ratios = np.logspace(1, 4, 13)
        errors = [error_at(r) for r in ratios]
        g.check(all(b < a for a, b in zip(errors, errors[1:])), f"monotone over [10, 1e4] ({errors[0]:.2e} -> {errors[-1]:.2e})")


def test_criterion_03_symmetry_null():
    with criterion(3, "balanced coupling gives no differential voltage", 1.0) as g:
        p = replace(default_scenario(), c_hb=default_scenario().c_ha)
        assert p.c_ag == p.c_bg
        v_ab = abs(v_ab_exact(p))
        g.check(v_ab <= 1e-15 * abs(body_potential(p)), f"|v_ab| {v_ab:.1e}")
        result = solve_full(p)
        diff = abs(result["a"] - result["b"])
        g.check(diff <= 1e-12 * abs(p.v_e), f"oracle |Va - Vb| {diff:.1e}")


def test_criterion_04_peec_conservation():
    with criterion(4, "lumped pair conserves total capacitance", 5.0) as g:
        rng = np.random.default_rng(20240521)
        worst = 0.0
        for _ in range(1000):
            q = int(rng.integers(2, 257))
            caps = rng.uniform(0.0, 5e-12, q)
            caps[rng.integers(q)] += 1e-13
            pair = reduce_to_lumped(LadderModel(q, 1.0 + 1j, tuple(caps)))
            total = math.fsum(caps)
            worst = max(worst, abs(pair.c_ha + pair.c_hb - total) / total)
        g.check(worst <= 1e-12, f"worst relative mismatch {worst:.1e}")


def test_criterion_05_two_cluster_closed_form():
    with criterion(5, "two-cluster closed form at Q = 1000", 1.0) as g:
        q, front, rear = 1000, 2e-12, 1e-12
        exact = reduce_to_lumped(LadderModel.two_cluster(q, front, rear, 1.0 + 1j))
        closed = two_cluster(front * q / 2, rear * q / 2)
        err = max(rel(exact.c_ha, closed.c_ha), rel(exact.c_hb, closed.c_hb))
        g.check(err <= 5e-3, f"max deviation {err:.2e} <= 5e-3")


def test_criterion_06_distributed_ladder_oracle():
    with criterion(6, "distributed ladder port currents vs lumped pair", 5.0) as g:
        omega = 2 * math.pi * 2.23e6
        z_coil = 0.5 + 1j * omega * 10e-6
        load = 1e4  # low-impedance ports, so current division follows path impedance
        v_h = body_potential(default_scenario())
        errors = []
        for k in range(4):
            ladder = LadderModel.uniform(64, 0.05e-12 * 10.0**-k, z_coil)
            errors.append(validate_reduction(ladder, v_h, omega, load).rel_error)
        g.check(errors[0] <= 0.02, f"Q=64 error {errors[0]:.2e} <= 0.02")
        g.check(all(b < a for a, b in zip(errors, errors[1:])), "shrinks with weaker coupling: "
                + ", ".join(f"{e:.1e}" for e in errors))


def test_criterion_07_displacement_profile():
    with criterion(7, "displacement sweep profile", 10.0) as g:
        sweep = delta_c_sweep(HeadModel(), CoilBands(), CENTERED_APEX, EXIT_APEX, 100, slices=256)
        dc = np.abs(sweep.column(3))
        g.check(dc[0] > 0, f"centered |dC| {dc[0]:.3e} F > 0")
        peaks = count_peaks(dc)
        g.check(peaks == 1, f"{peaks} interior maximum")
        base = default_scenario()
        noise = [abs(v_cd(replace(base, c_ha=a, c_hb=b))) for _, a, b, _ in sweep.rows]
        g.check(int(np.argmax(noise)) == int(np.argmax(dc)),
                f"|v_cd| peak index {int(np.argmax(noise))} == |dC| peak index {int(np.argmax(dc))}")


def test_criterion_08_exposure_linearity():
    with criterion(8, "output grows linearly with exposure length", 1.0) as g:
        p = replace(default_scenario(), c_hg_direct=200e-12, c_hn=0.0, c_ng=0.0)
        assert body_ground_capacitance(p) == 200e-12
        lengths = np.linspace(0.5, 2.0, 16)
        y = np.array([abs(v_cd(replace(p, c_eh=exposure_capacitance(x, 0.5e-12)))) for x in lengths])
        design = np.column_stack([lengths, np.ones_like(lengths)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        r2 = 1 - np.sum((y - design @ coef) ** 2) / np.sum((y - y.mean()) ** 2)
        g.check(r2 >= 0.999, f"R^2 {r2:.7f} >= 0.999")


def test_criterion_09_blanket_suppression():
    with criterion(9, "grounding blanket suppression", 1.0) as g:
        p = default_scenario()
        c_b = 4 * (p.c_eh + body_ground_capacitance(p))
        ratio = suppression_ratio(p, c_b)
        g.check(abs(ratio - 0.8) <= 1e-6, f"closed-form ratio {ratio:.9f}")
        oracle = suppression_ratio(p, c_b, oracle=True)
        g.check(oracle >= 0.78, f"oracle ratio {oracle:.4f} >= 0.78")


def test_criterion_10_sensitivity_sanity():
    with criterion(10, "normalised sensitivities", 2.0) as g:
        p = default_scenario()
        s_ve = dict(sensitivity(p))["v_e_abs"]
        g.check(abs(s_ve - 1) <= 1e-6, f"|V_E| sensitivity {s_ve:.9f}")
        s_blanket = dict(sensitivity(replace(p, c_blanket=100e-12)))["c_blanket"]
        g.check(s_blanket < 0, f"c_blanket sensitivity {s_blanket:.4f} < 0")
        weak = scaled_coupling(p, 0.1)
        s_ha = dict(sensitivity(weak))["c_ha"]
        predicted = weak.c_ha / (weak.c_ha - weak.c_hb)
        g.check(rel(s_ha, predicted) <= 0.01, f"c_ha sensitivity {s_ha:.5f} vs {predicted:.5f}")


def test_criterion_11_solver_floor():
    with criterion(11, "dense complex solver residual", 5.0) as g:
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(1000):
            n = int(rng.integers(1, 65))
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            a += np.diag(np.full(n, 2.0 * math.sqrt(n)))  # keeps the condition number modest
            b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            worst = max(worst, relative_residual(a, solve_dense(a, b), b))
        g.check(worst <= 1e-10, f"worst residual {worst:.1e} <= 1e-10")


MALFORMED = {
    "UnknownSection": lambda t: t.replace("[body]", "[bodies]"),
    "UnknownKey": lambda t: t.replace("c_eh =", "c_ehh ="),
    "DuplicateKey": lambda t: t.replace("c_eh = 2e-12", "c_eh = 2e-12\nc_eh = 3e-12"),
    "MissingKey": lambda t: t.replace("c_eh = 2e-12", ""),
    "BadNumber": lambda t: t.replace("c_eh = 2e-12", "c_eh = 2 pF"),
    "MissingSection": lambda t: t.split("[matching]")[0],
    "NegativeValue": lambda t: t.replace("c_eh = 2e-12", "c_eh = -2e-12"),
}


def _documents():
    value = st.floats(0.0, 1e6, allow_nan=False)
    signed = st.floats(-1e6, 1e6, allow_nan=False)
    optional = st.sampled_from([(), ("geometry",), ("suppression",), ("geometry", "suppression")])

    @st.composite
    def build(draw):
        names = ["source", "body", "coil", "terminals", "matching", *draw(optional)]
        sections = {}
        for name in names:
            required, extra = SCHEMA[name]
            keys = list(required) + [k for k in extra if draw(st.booleans())]
            if keys:
                sections[name] = {k: draw(signed if k in SIGNED_KEYS else value) for k in keys}
        return ScenarioDocument(sections)

    return build()


def test_criterion_12_parser_and_csv_contracts(tmp_path):
    with criterion(12, "scenario round trip, error kinds, CSV bytes", 5.0) as g:
        seen = []

        @settings(max_examples=100, deadline=None, database=None,
                  suppress_health_check=[HealthCheck.function_scoped_fixture])
        @given(_documents())
        def round_trip(doc):
            once = serialize_scenario(doc)
            again = serialize_scenario(parse_scenario(once))
            assert parse_scenario(once) == doc
            assert again == once
            seen.append(doc)

        try:
            round_trip()
            g.check(len(seen) >= 100, f"{len(seen)} generated documents round-trip")
        except AssertionError as exc:
            g.check(False, f"round trip broke: {exc}")

        template = (Path(__file__).resolve().parent.parent / "scenarios" / "default.scn").read_text()
        wrong = []
        for kind, mutate in MALFORMED.items():
            text = mutate(template)
            try:
                parse_scenario(text)
                wrong.append(f"{kind}: accepted")
                continue
            except ParseError as exc:
                if exc.kind != kind:
                    wrong.append(f"{kind}: got {exc.kind}")
            path = tmp_path / f"{kind}.scn"
            path.write_text(text)
            with redirect_stderr(io.StringIO()):
                code = main(["solve", str(path)])
            if code != EXIT_PARSE:
                wrong.append(f"{kind}: exit {code}")
        g.check(not wrong, f"{len(MALFORMED)} malformed kinds map to exit 2" + (f" ({wrong})" if wrong else ""))

        rows = [(0.1 * k, complex(math.sin(k), math.cos(k)), abs(math.sin(k))) for k in range(200)]
        first = write_csv(["x", "v", "m"], rows).encode()
        second = write_csv(["x", "v", "m"], list(rows)).encode()
        g.check(first == second and b"\r" not in first, "CSV bytes identical")


if __name__ == "__main__":
    import subprocess
    import sys

    # a fresh interpreter, so pytest sees hypothesis before anything imports it
    raise SystemExit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q"]))
