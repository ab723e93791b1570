"""Lumped circuit model of body-coupled electric-field interference in unshielded low-field MRI."""

from .coupling import (
    CouplingReport,
    ScenarioParameters,
    body_ground_capacitance,
    body_potential,
    build_full_network,
    default_scenario,
    evaluate,
    sensitivity,
    shunt_admittance_yx,
    suppression_ratio,
    v_ab_exact,
    v_ab_simplified,
    v_cd,
    z_total,
)
from .geometry import CoilBands, HeadModel, delta_c_sweep, exposure_capacitance, head_capacitances
from .netsolve import GROUND, NodalNetwork, SolveResult, assemble, solve_dense, solve_network
from .peec import LadderModel, LumpedPair, reduce_to_lumped, two_cluster, validate_reduction
from .scenario import ScenarioDocument, parse_scenario, serialize_scenario, write_csv

__version__ = "0.1.0"
