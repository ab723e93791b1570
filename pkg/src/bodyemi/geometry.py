"""Head-to-coil coupling capacitance from a hemisphere-cylinder head model.

The coil axis is x with its origin at the coil centre.  ``displacement`` is
the x position of the head apex; the hemispherical cap occupies
``[x, x + r_head]`` and the cylindrical section continues behind it, so
increasing x withdraws the head through the coil.  Each terminal of the
solenoid is replaced by a conducting ring band of radius ``r_coil``; the
head-band capacitance is the axial integral of the coaxial-capacitor
kernel ``2 pi eps0 eps_r / ln(r_coil / r(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0

from .errors import GeometryViolation

APEX_CUTOFF = 1e-6


@dataclass(frozen=True)
class HeadModel:
    r_head: float = 0.09
    l_cyl: float = 0.12
    eps_r: float = 1.0

    def __post_init__(self):
        if self.r_head <= 0:
            raise ValueError("r_head must be positive")
        if self.l_cyl < 0:
            raise ValueError("l_cyl must be non-negative")
        if self.eps_r < 1:
            raise ValueError("eps_r must be at least 1")

    @property
    def length(self) -> float:
        return self.r_head + self.l_cyl


@dataclass(frozen=True)
class CoilBands:
    r_coil: float = 0.10
    band_a: tuple[float, float] = (0.01, 0.07)
    band_b: tuple[float, float] = (-0.07, -0.01)

    def __post_init__(self):
        object.__setattr__(self, "band_a", tuple(map(float, self.band_a)))
        object.__setattr__(self, "band_b", tuple(map(float, self.band_b)))
        if self.r_coil <= 0:
            raise ValueError("r_coil must be positive")
        for name in ("band_a", "band_b"):
            start, end = getattr(self, name)
            if not end > start:
                raise ValueError(f"{name} must have end > start")
        (a0, a1), (b0, b1) = self.band_a, self.band_b
        if a0 < b1 and b0 < a1:
            raise ValueError("bands overlap")


# Apex one centimetre beyond the outer edge of band b: cap under band b,
# cylinder under band a.
CENTERED_APEX = -0.08
EXIT_APEX = 0.08


@dataclass(frozen=True)
class DisplacementSweep:
    rows: list[tuple[float, float, float, float]]

    def column(self, k: int) -> np.ndarray:
        return np.array([r[k] for r in self.rows])


def radius_profile(head: HeadModel, axial_offset):
    """Head radius at ``axial_offset`` metres behind the apex (0 outside the head)."""
    u = np.asarray(axial_offset, dtype=float)
    r = head.r_head
    depth = r - u  # height above the cap base
    cap = np.sqrt(np.clip(r * r - depth * depth, 0.0, None))
    out = np.where(u < r, cap, r)
    out = np.where((u < 0) | (u > head.length), 0.0, out)
    return out if out.ndim else float(out)


def _kernel(head: HeadModel, r_coil: float, radius: np.ndarray) -> np.ndarray:
    live = radius >= APEX_CUTOFF * head.r_head
    safe = np.where(live, radius, r_coil / 2)
    return np.where(live, 2 * math.pi * epsilon_0 * head.eps_r / np.log(r_coil / safe), 0.0)


def band_capacitance(
    head: HeadModel,
    r_coil: float,
    band: tuple[float, float],
    displacement: float,
    slices: int = 256,
) -> float:
    """Midpoint-rule capacitance between the head and one ring band.

    The band is cut into ``slices`` equal slices; slices straddling the apex,
    the cap-cylinder seam or the back of the head are split there so the
    result is continuous in ``displacement``.
    """
    if slices < 16:
        raise ValueError("slices must be at least 16")
    start, end = band
    lo = max(start, displacement)
    hi = min(end, displacement + head.length)
    if hi <= lo:
        return 0.0
    if head.r_head >= r_coil:
        raise GeometryViolation(f"head radius {head.r_head:g} m reaches the coil radius {r_coil:g} m")

    edges = np.linspace(start, end, slices + 1)
    seams = [displacement, displacement + head.r_head, displacement + head.length]
    edges = np.unique(np.concatenate([edges, [s for s in seams if start < s < end]]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    radius = radius_profile(head, mids - displacement)
    return float(np.sum(_kernel(head, r_coil, np.asarray(radius)) * widths))


def head_capacitances(
    head: HeadModel, coil: CoilBands, displacement: float, slices: int = 256
) -> tuple[float, float]:
    return (
        band_capacitance(head, coil.r_coil, coil.band_a, displacement, slices),
        band_capacitance(head, coil.r_coil, coil.band_b, displacement, slices),
    )


def delta_c_sweep(
    head: HeadModel,
    coil: CoilBands,
    x_from: float,
    x_to: float,
    steps: int,
    slices: int = 256,
) -> DisplacementSweep:
    if steps < 2:
        raise ValueError("steps must be at least 2")
    if not x_from < x_to:
        raise ValueError("x_from must be below x_to")
    rows = []
    for x in np.linspace(x_from, x_to, steps):
        c_ha, c_hb = head_capacitances(head, coil, float(x), slices)
        rows.append((float(x), c_ha, c_hb, c_ha - c_hb))
    return DisplacementSweep(rows)


def exposure_capacitance(length: float, cap_per_meter: float) -> float:
    """Environment-to-body capacitance of a conductor exposed over ``length`` metres."""
    if length < 0 or cap_per_meter < 0:
        raise ValueError("length and cap_per_meter must be non-negative")
    return length * cap_per_meter


def count_peaks(values) -> int:
    """Number of interior local maxima, treating flat runs as a single point."""
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    signs = np.sign(d[d != 0])
    return int(np.sum((signs[:-1] > 0) & (signs[1:] < 0)))
