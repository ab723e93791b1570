"""Environment-body-receive-coil coupling network.

The body is a floating conductor driven by an ambient source ``v_e`` through
``c_eh`` and returned to ground through ``c_hg_total``.  Its common-mode
potential reaches the two coil terminals a and b through ``c_ha`` and
``c_hb``; any imbalance between the two shows up as a differential voltage
across the coil and, after the C_m - Z_L - C_m matching chain, across the
preamplifier input (nodes c, d).

Closed forms assume the coil does not load the body node and, for the
simplified expressions, equal terminal parasitics ``c_ag == c_bg``.  The
full network solve in :func:`build_full_network` makes neither assumption
and is the reference every closed form is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import AsymmetricTerminals, DegenerateDenominator, DegenerateDivider, ZeroBaseline
from .netsolve import GROUND, NodalNetwork, solve_network

LARMOR_HZ = 2.23e6


@dataclass(frozen=True)
class ScenarioParameters:
    """Every lumped element of the coupling network, in SI units."""

    frequency: float
    v_e: complex
    c_eh: float
    c_hg_direct: float
    c_hn: float
    c_ng: float
    c_ha: float
    c_hb: float
    c_ag: float
    c_bg: float
    r_coil: float
    l_coil: float
    c_t: float
    c_m: float
    z_l: complex
    c_blanket: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "v_e", complex(self.v_e))
        object.__setattr__(self, "z_l", complex(self.z_l))
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ValueError(f"{f.name} must be finite")
        if self.frequency <= 0:
            raise ValueError("frequency must be positive")
        for name in CAPACITANCES + ("r_coil", "l_coil"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.r_coil == 0 and self.l_coil == 0:
            raise ValueError("coil needs a non-zero resistance or inductance")
        if abs(self.z_l) == 0:
            raise ValueError("z_l must be non-zero")

    @property
    def omega(self) -> float:
        return 2 * math.pi * self.frequency

    @property
    def symmetric_terminals(self) -> bool:
        return self.c_ag == self.c_bg

    def is_weakly_coupled(self) -> bool:
        limit = min(self.c_ag, self.c_bg, body_ground_capacitance(self)) / 10
        return self.c_ha < limit and self.c_hb < limit


CAPACITANCES = (
    "c_eh", "c_hg_direct", "c_hn", "c_ng", "c_ha", "c_hb",
    "c_ag", "c_bg", "c_t", "c_m", "c_blanket",
)


def tuning_capacitance(l_coil: float, frequency: float) -> float:
    """Capacitance resonating ``l_coil`` at ``frequency`` (loss ignored)."""
    omega = 2 * math.pi * frequency
    return 1.0 / (omega**2 * l_coil)


def default_scenario() -> ScenarioParameters:
    # Body-coil coupling kept at ~1 pF against a 100 pF body capacitance so
    # the loading error of the closed forms stays near 1 %.
    return ScenarioParameters(
        frequency=LARMOR_HZ,
        v_e=1.0,
        c_eh=2e-12,
        c_hg_direct=100e-12,
        c_hn=200e-12,
        c_ng=100e-12,
        c_ha=1.0e-12,
        c_hb=0.5e-12,
        c_ag=60e-12,
        c_bg=60e-12,
        r_coil=0.5,
        l_coil=10e-6,
        c_t=tuning_capacitance(10e-6, LARMOR_HZ),
        c_m=220e-12,
        z_l=50.0,
    )


@dataclass(frozen=True)
class CouplingReport:
    c_hg_total: float
    v_h: complex
    y_x: complex
    v_ab_exact: complex
    v_ab_simplified: complex
    z_total: complex
    v_cd: complex
    v_cd_oracle: complex
    delta_c: float


def _series(c1: float, c2: float) -> float:
    total = c1 + c2
    return 0.0 if total == 0 else c1 * c2 / total


def body_ground_capacitance(p: ScenarioParameters) -> float:
    """Direct body-ground capacitance, bed path in series, plus any blanket."""
    return p.c_hg_direct + _series(p.c_hn, p.c_ng) + p.c_blanket


def body_potential(p: ScenarioParameters) -> complex:
    c_hg = body_ground_capacitance(p)
    if p.c_eh + c_hg == 0:
        raise DegenerateDivider("c_eh + c_hg_total is zero; body potential undefined")
    return p.v_e * p.c_eh / (p.c_eh + c_hg)


def _matching_admittance(p: ScenarioParameters, legacy_matching: bool = False) -> complex:
    jwcm = 1j * p.omega * p.c_m
    if jwcm == 0:
        return 0j
    return jwcm / ((1 if legacy_matching else 2) + jwcm * p.z_l)


def shunt_admittance_yx(p: ScenarioParameters, legacy_matching: bool = False) -> complex:
    """Coil branch, tuning capacitor and matching chain in parallel across a-b.

    ``legacy_matching`` swaps the matching term's ``2 + jwC_m Z_L``
    denominator for ``1 + jwC_m Z_L``, for comparison against that printed
    variant only.
    """
    w = p.omega
    return (
        1 / (p.r_coil + 1j * w * p.l_coil)
        + 1j * w * p.c_t
        + _matching_admittance(p, legacy_matching)
    )


def _admittances(p: ScenarioParameters):
    w = p.omega
    return 1j * w * p.c_ha, 1j * w * p.c_hb, 1j * w * p.c_ag, 1j * w * p.c_bg


def _require_symmetric(p: ScenarioParameters):
    if not p.symmetric_terminals:
        raise AsymmetricTerminals(
            f"simplified forms need c_ag == c_bg (got {p.c_ag:g} and {p.c_bg:g})"
        )


def v_ab_exact(p: ScenarioParameters) -> complex:
    y_ha, y_hb, y_ag, y_bg = _admittances(p)
    y_x = shunt_admittance_yx(p)
    d = y_x * (y_ag + y_bg + y_ha + y_hb) + (y_ag + y_ha) * (y_bg + y_hb)
    if abs(d) < 1e-300:
        raise DegenerateDenominator("two-terminal determinant vanishes")
    return body_potential(p) * (y_ha * y_bg - y_hb * y_ag) / d


def _reduced_denominator(p: ScenarioParameters, legacy_matching: bool) -> complex:
    return 2 * shunt_admittance_yx(p, legacy_matching) + 1j * p.omega * p.c_ag


def v_ab_simplified(p: ScenarioParameters, legacy_matching: bool = False) -> complex:
    _require_symmetric(p)
    den = _reduced_denominator(p, legacy_matching)
    if abs(den) < 1e-300:
        raise DegenerateDenominator("2 Y_X + Y_g vanishes")
    return body_potential(p) * 1j * p.omega * (p.c_ha - p.c_hb) / den


def output_divider(p: ScenarioParameters) -> complex:
    """Fraction of V_ab that appears across Z_L in the C_m - Z_L - C_m chain."""
    x = 1j * p.omega * p.c_m * p.z_l
    return x / (2 + x)


def z_total(p: ScenarioParameters, legacy_matching: bool = False) -> complex:
    _require_symmetric(p)
    if p.c_m == 0:
        return 0j
    den = _reduced_denominator(p, legacy_matching)
    if abs(den) < 1e-300:
        raise DegenerateDenominator("2 Y_X + Y_g vanishes")
    return output_divider(p) / den


def v_cd(p: ScenarioParameters, legacy_matching: bool = False) -> complex:
    return body_potential(p) * z_total(p, legacy_matching) * 1j * p.omega * (p.c_ha - p.c_hb)


FULL_NODES = ("E", "h", "n", "a", "b", "c", "d")


def build_full_network(p: ScenarioParameters) -> NodalNetwork:
    """Full network with source node E clamped to ``v_e``.

    Zero-admittance branches are dropped, then any node with no path to
    ground or to E is pruned (for example c and d when ``c_m == 0``).
    """
    w = p.omega
    jw = 1j * w
    raw = [
        ("E", "h", jw * p.c_eh),
        ("h", "g", jw * p.c_hg_direct),
        ("h", "n", jw * p.c_hn),
        ("n", "g", jw * p.c_ng),
        ("h", "g", jw * p.c_blanket),
        ("h", "a", jw * p.c_ha),
        ("h", "b", jw * p.c_hb),
        ("a", "g", jw * p.c_ag),
        ("b", "g", jw * p.c_bg),
        ("a", "b", 1 / (p.r_coil + jw * p.l_coil)),
        ("a", "b", jw * p.c_t),
        ("a", "c", jw * p.c_m),
        ("c", "d", 1 / p.z_l),
        ("d", "b", jw * p.c_m),
    ]
    raw = [b for b in raw if b[2] != 0]

    # flood fill from ground and the source
    reached = {"g", "E"}
    grew = True
    while grew:
        grew = False
        for i, j, _ in raw:
            if (i in reached) != (j in reached):
                reached.update((i, j))
                grew = True
    names = [n for n in FULL_NODES if n in reached]
    index = {n: k for k, n in enumerate(names)}
    index["g"] = GROUND
    branches = [(index[i], index[j], y) for i, j, y in raw if i in reached and j in reached]
    return NodalNetwork(len(names), tuple(branches), ((index["E"], p.v_e),), tuple(names))


def solve_full(p: ScenarioParameters):
    return solve_network(build_full_network(p))


def oracle_v_cd(p: ScenarioParameters) -> complex:
    result = solve_full(p)
    labels = result.labels
    if "c" not in labels or "d" not in labels:
        return 0j
    return result["c"] - result["d"]


def evaluate(p: ScenarioParameters) -> CouplingReport:
    return CouplingReport(
        c_hg_total=body_ground_capacitance(p),
        v_h=body_potential(p),
        y_x=shunt_admittance_yx(p),
        v_ab_exact=v_ab_exact(p),
        v_ab_simplified=v_ab_simplified(p),
        z_total=z_total(p),
        v_cd=v_cd(p),
        v_cd_oracle=oracle_v_cd(p),
        delta_c=p.c_ha - p.c_hb,
    )


# Below this fraction of |v_e| a network-solved |V_cd| is round-off, not signal.
NULL_FLOOR = 1e-15


def _is_null(value: complex, p: ScenarioParameters) -> bool:
    return abs(value) <= NULL_FLOOR * abs(p.v_e)


def suppression_ratio(p: ScenarioParameters, c_blanket: float, oracle: bool = False) -> float:
    """Fractional drop of |V_cd| when a blanket capacitance is added.

    The baseline is ``p`` with no blanket.  With ``oracle=True`` both
    voltages come from the full network solve instead of the closed form.
    """
    if c_blanket < 0:
        raise ValueError("c_blanket must be non-negative")
    noise = oracle_v_cd if oracle else v_cd
    base = abs(noise(replace(p, c_blanket=0.0)))
    if _is_null(base, p):
        raise ZeroBaseline("baseline |v_cd| is zero (balanced coupling or no source)")
    return 1 - abs(noise(replace(p, c_blanket=c_blanket))) / base


SENSITIVITY_PARAMETERS = ("v_e_abs", "frequency", "r_coil", "l_coil") + CAPACITANCES


def _perturbed(p: ScenarioParameters, name: str, factor: float) -> ScenarioParameters:
    if name == "v_e_abs":
        return replace(p, v_e=p.v_e * factor)
    return replace(p, **{name: getattr(p, name) * factor})


def _value(p: ScenarioParameters, name: str) -> float:
    return abs(p.v_e) if name == "v_e_abs" else getattr(p, name)


def sensitivity(p: ScenarioParameters, rel_step: float = 1e-6) -> list[tuple[str, float]]:
    """Normalised sensitivities d ln|V_cd| / d ln x of the full-network |V_cd|.

    Central differences with step ``rel_step * x``.  Parameters whose
    baseline value is zero get sensitivity 0.
    """
    if not 1e-8 <= rel_step <= 1e-2:
        raise ValueError("rel_step must lie in [1e-8, 1e-2]")
    base = abs(oracle_v_cd(p))
    if _is_null(base, p):
        raise ZeroBaseline("baseline |v_cd| is zero (balanced coupling or no source)")
    table = []
    for name in SENSITIVITY_PARAMETERS:
        if _value(p, name) == 0:
            table.append((name, 0.0))
            continue
        up = abs(oracle_v_cd(_perturbed(p, name, 1 + rel_step)))
        down = abs(oracle_v_cd(_perturbed(p, name, 1 - rel_step)))
        table.append((name, (up - down) / (2 * rel_step * base)))
    return table
