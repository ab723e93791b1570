"""Distributed coil-to-body coupling and its two-terminal reduction.

The coil is a ladder of Q equal series elements between terminal a (node 0)
and terminal b (node Q).  Node q (1..Q) couples to the body through C_q.
In the weak-coupling limit each injected current jwC_q V_h splits between
the two terminals in inverse proportion to the path impedance, so a fraction
(Q - q)/Q returns through a and q/Q through b.  Summing over the ladder gives
the lumped pair

    c_ha = sum(C_q (Q - q)) / Q,    c_hb = sum(C_q q) / Q.

For a uniform ladder this is c_ha = C (Q - 1)/2, c_hb = C (Q + 1)/2: the
endpoint weighting leaves an O(1/Q) asymmetry that vanishes for large Q.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange
from .netsolve import GROUND, NodalNetwork, solve_network


class WeakCouplingWarning(UserWarning):
    """Ladder parameters are outside the regime the lumped reduction assumes."""


@dataclass(frozen=True)
class LadderModel:
    q_count: int
    element_impedance: complex
    partial_caps: tuple[float, ...]

    def __post_init__(self):
        caps = tuple(float(c) for c in self.partial_caps)
        object.__setattr__(self, "partial_caps", caps)
        object.__setattr__(self, "element_impedance", complex(self.element_impedance))
        if self.q_count < 2:
            raise ValueError("q_count must be at least 2")
        if len(caps) != self.q_count:
            raise ValueError(f"expected {self.q_count} partial capacitances, got {len(caps)}")
        if any(c < 0 or not math.isfinite(c) for c in caps):
            raise ValueError("partial capacitances must be finite and non-negative")
        if not any(c > 0 for c in caps):
            raise ValueError("at least one partial capacitance must be positive")
        if not np.isfinite(self.element_impedance) or self.element_impedance == 0:
            raise ValueError("element impedance must be finite and non-zero")

    @property
    def coil_impedance(self) -> complex:
        return self.q_count * self.element_impedance

    @property
    def total_capacitance(self) -> float:
        return math.fsum(self.partial_caps)

    @classmethod
    def uniform(cls, q_count: int, unit_cap: float, coil_impedance: complex) -> "LadderModel":
        return cls(q_count, coil_impedance / q_count, (unit_cap,) * q_count)

    @classmethod
    def two_cluster(
        cls, q_count: int, front_unit: float, rear_unit: float, coil_impedance: complex
    ) -> "LadderModel":
        """First half of the elements (nearer terminal a) at ``front_unit``, the rest at ``rear_unit``."""
        if q_count % 2:
            raise ValueError("two-cluster ladder needs an even element count")
        half = q_count // 2
        caps = (front_unit,) * half + (rear_unit,) * half
        return cls(q_count, coil_impedance / q_count, caps)


@dataclass(frozen=True)
class LumpedPair:
    c_ha: float
    c_hb: float

    @property
    def delta_c(self) -> float:
        return self.c_ha - self.c_hb


def element_current(c_q: float, v_h: complex, omega: float) -> complex:
    if c_q < 0:
        raise ValueError("c_q must be non-negative")
    if omega <= 0:
        raise ValueError("omega must be positive")
    return 1j * omega * c_q * v_h


def port_split(i_q: complex, q: int, q_count: int) -> tuple[complex, complex]:
    if not 1 <= q <= q_count:
        raise IndexOutOfRange(f"element index {q} outside 1..{q_count}")
    i_b = i_q * q / q_count
    return i_q - i_b, i_b


def reduce_to_lumped(ladder: LadderModel) -> LumpedPair:
    Q = ladder.q_count
    caps = ladder.partial_caps
    c_ha = math.fsum(c * (Q - q) for q, c in enumerate(caps, start=1)) / Q
    c_hb = math.fsum(c * q for q, c in enumerate(caps, start=1)) / Q
    return LumpedPair(c_ha, c_hb)


def two_cluster(c_tf: float, c_tr: float) -> LumpedPair:
    """Large-Q closed form for a ladder split into equal front and rear clusters."""
    if c_tf < 0 or c_tr < 0:
        raise ValueError("cluster capacitances must be non-negative")
    return LumpedPair(0.75 * c_tf + 0.25 * c_tr, 0.25 * c_tf + 0.75 * c_tr)


DEFAULT_TERMINAL_CAP = 60e-12


def build_distributed_network(
    ladder: LadderModel, v_h: complex, omega: float, terminal_load: complex | None = None
) -> NodalNetwork:
    """Q+1 ladder nodes (0 = terminal a, Q = terminal b) plus the clamped body node.

    Both terminals return to ground through ``terminal_load`` siemens, by
    default a 60 pF terminal parasitic.
    """
    if terminal_load is None:
        terminal_load = 1j * omega * DEFAULT_TERMINAL_CAP
    if terminal_load == 0:
        raise ValueError("terminal_load must be non-zero or the ladder floats")
    Q = ladder.q_count
    body = Q + 1
    y_el = 1 / ladder.element_impedance
    branches = [(k - 1, k, y_el) for k in range(1, Q + 1)]
    branches += [
        (body, q, 1j * omega * c) for q, c in enumerate(ladder.partial_caps, start=1) if c > 0
    ]
    branches += [(0, GROUND, terminal_load), (Q, GROUND, terminal_load)]
    labels = tuple(f"n{k}" for k in range(Q + 1)) + ("h",)
    return NodalNetwork(Q + 2, tuple(branches), ((body, v_h),), labels)


@dataclass(frozen=True)
class ReductionCheck:
    i_a_distributed: complex
    i_b_distributed: complex
    i_a_lumped: complex
    i_b_lumped: complex
    rel_error: float


def _check_regime(ladder: LadderModel, omega: float, terminal_load: complex):
    y_coupling = omega * ladder.total_capacitance
    z_coil = abs(ladder.coil_impedance)
    if y_coupling * 10 > abs(terminal_load):
        warnings.warn("coupling admittance is not small against the terminal load",
                      WeakCouplingWarning, stacklevel=3)
    if y_coupling * z_coil * 10 > 1:
        warnings.warn("coupling admittance times coil impedance is not small",
                      WeakCouplingWarning, stacklevel=3)
    if z_coil * abs(terminal_load) < 10:
        warnings.warn("terminal load is not low-impedance against the coil; "
                      "current division will not follow path impedance",
                      WeakCouplingWarning, stacklevel=3)


def validate_reduction(
    ladder: LadderModel, v_h: complex, omega: float, terminal_load: complex | None = None
) -> ReductionCheck:
    """Compare terminal currents of the solved ladder against the lumped pair.

    ``rel_error`` is the larger of the two per-terminal relative mismatches;
    a terminal whose lumped current is zero is measured against the total.
    The lumped split is only expected to hold when the terminal load is
    low-impedance against the coil path; a warning flags other regimes.
    """
    if terminal_load is None:
        terminal_load = 1j * omega * DEFAULT_TERMINAL_CAP
    _check_regime(ladder, omega, terminal_load)
    network = build_distributed_network(ladder, v_h, omega, terminal_load)
    result = solve_network(network)
    Q = ladder.q_count
    i_a = result.potentials[0] * terminal_load
    i_b = result.potentials[Q] * terminal_load

    pair = reduce_to_lumped(ladder)
    la = 1j * omega * pair.c_ha * v_h
    lb = 1j * omega * pair.c_hb * v_h
    total = abs(la + lb)
    if total == 0:
        return ReductionCheck(i_a, i_b, la, lb, 0.0)
    errs = [abs(d - l) / (abs(l) if l != 0 else total) for d, l in ((i_a, la), (i_b, lb))]
    return ReductionCheck(i_a, i_b, la, lb, max(errs))
