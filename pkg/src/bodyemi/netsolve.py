"""Complex nodal analysis for small phasor networks.

Ground is an implicit reference (``GROUND``) and never an unknown.  Nodes
listed in ``sources`` are clamped to a fixed phasor; they are eliminated
from the unknown set and their branch currents move to the right-hand side,
which keeps the assembled matrix symmetric.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import EmptyNetwork, SingularMatrix

GROUND = -1
PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class NodalNetwork:
    """Branch-list description of a linear admittance network.

    ``branches`` holds ``(node_i, node_j, admittance)`` triples where either
    endpoint may be ``GROUND``.  ``sources`` holds ``(node, potential)``
    pairs.  ``labels`` optionally names each node index.
    """

    node_count: int
    branches: tuple[tuple[int, int, complex], ...]
    sources: tuple[tuple[int, complex], ...] = ()
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple((int(i), int(j), complex(y)) for i, j, y in self.branches))
        object.__setattr__(self, "sources", tuple((int(n), complex(v)) for n, v in self.sources))
        if self.node_count < 0:
            raise ValueError("node_count must be non-negative")
        for i, j, y in self.branches:
            for k in (i, j):
                if k != GROUND and not 0 <= k < self.node_count:
                    raise ValueError(f"branch endpoint {k} out of range")
            if i == j:
                raise ValueError(f"branch connects node {i} to itself")
            if not np.isfinite(y):
                raise ValueError(f"non-finite admittance on branch ({i}, {j})")
        seen = set()
        for n, v in self.sources:
            if not 0 <= n < self.node_count:
                raise ValueError(f"source node {n} out of range")
            if n in seen:
                raise ValueError(f"duplicate source node {n}")
            if not np.isfinite(v):
                raise ValueError(f"non-finite source potential at node {n}")
            seen.add(n)
        if self.labels is not None and len(self.labels) != self.node_count:
            raise ValueError("labels must name every node")

    def index(self, label: str) -> int:
        if self.labels is None:
            raise KeyError(label)
        return self.labels.index(label)


@dataclass(frozen=True)
class SolveResult:
    potentials: dict[int, complex]
    residual_norm: float
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __getitem__(self, key: int | str) -> complex:
        if isinstance(key, str):
            if self.labels is None:
                raise KeyError(key)
            key = self.labels.index(key)
        return self.potentials[key]


def unknown_nodes(network: NodalNetwork) -> list[int]:
    """Indices of the unknown (non-source) nodes, in matrix order."""
    clamped = {n for n, _ in network.sources}
    return [k for k in range(network.node_count) if k not in clamped]


def assemble(network: NodalNetwork) -> tuple[np.ndarray, np.ndarray]:
    unknown = unknown_nodes(network)
    if not unknown:
        raise EmptyNetwork("no unknown nodes remain after source clamping")
    row = {k: r for r, k in enumerate(unknown)}
    clamp = dict(network.sources)
    n = len(unknown)
    matrix = np.zeros((n, n), dtype=complex)
    rhs = np.zeros(n, dtype=complex)

    for i, j, y in network.branches:
        ri, rj = row.get(i), row.get(j)
        if ri is not None:
            matrix[ri, ri] += y
        if rj is not None:
            matrix[rj, rj] += y
        if ri is not None and rj is not None:
            matrix[ri, rj] -= y
            matrix[rj, ri] -= y
        elif ri is not None and j in clamp:
            rhs[ri] += y * clamp[j]
        elif rj is not None and i in clamp:
            rhs[rj] += y * clamp[i]
    return matrix, rhs


def solve_dense(matrix, rhs) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` by LU factorisation with row partial pivoting."""
    a = np.asarray(matrix, dtype=complex)
    b = np.asarray(rhs, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if b.shape != (a.shape[0],):
        raise ValueError(f"rhs shape {b.shape} does not match matrix {a.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite entries in linear system")
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_FLOOR:
        k = int(np.argmin(pivots))
        raise SingularMatrix(f"pivot {k} magnitude {pivots[k]:.3g} below {PIVOT_FLOOR:g}")
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("solution overflowed; matrix is numerically singular")
    return x


def relative_residual(matrix, x, rhs) -> float:
    r = np.asarray(matrix) @ x - rhs
    return float(np.linalg.norm(r) / max(np.linalg.norm(rhs), np.finfo(float).tiny))


def solve_network(network: NodalNetwork) -> SolveResult:
    matrix, rhs = assemble(network)
    x = solve_dense(matrix, rhs)
    potentials = {k: complex(v) for k, v in zip(unknown_nodes(network), x)}
    potentials.update(dict(network.sources))
    potentials = dict(sorted(potentials.items()))
    return SolveResult(potentials, relative_residual(matrix, x, rhs), network.labels)


def branch_currents(network: NodalNetwork, result: SolveResult) -> list[complex]:
    """Current flowing from ``node_i`` to ``node_j`` in each branch."""

    def v(k):
        return 0j if k == GROUND else result.potentials[k]

    return [(v(i) - v(j)) * y for i, j, y in network.branches]
