"""Direct-stiffness analysis of pin-jointed trusses.

Each member is a single axial bar element, which is exact for a pin-jointed
truss, so there is no meshing. A separate method-of-joints solver provides
an independent cross-check: the reference topology is statically
determinate, so member forces follow from equilibrium alone and must agree
with the stiffness solution regardless of E or area.

A failed solve never raises out of :func:`analyze`; degenerate or singular
configurations come back as infeasible results so an optimizer can penalize
them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .truss import (
    AL_6061_T6,
    DEFAULT_SECTION,
    DEFAULT_TOTAL_LOAD_N,
    MIN_MEMBER_LENGTH_MM,
    DegenerateGeometryError,
    DerivedDesign,
    Material,
    Section,
    TrussGeometry,
    build_geometry,
    build_load_case,
    mass,
)

#: A Cholesky pivot at or below this fraction of the largest stiffness
#: diagonal marks the structure as a mechanism.
PIVOT_RTOL = 1e-10

#: Largest accepted ||K u - f||_inf / max(1, ||f||_inf) after a solve.
RESIDUAL_RTOL = 1e-8


class SingularSystemError(ValueError):
    """The stiffness or equilibrium matrix is numerically singular
    (the configuration is a mechanism)."""


class FailureMode(str, enum.Enum):
    NONE = "none"
    YIELD_EXCEEDED = "yield_exceeded"
    SINGULAR_SYSTEM = "singular_system"
    DEGENERATE_GEOMETRY = "degenerate_geometry"


@dataclass(frozen=True)
class StiffnessSystem:
    """Reduced linear system over the free degrees of freedom."""

    matrix: np.ndarray                      # (n_free, n_free), N/mm
    load_vector: np.ndarray                 # (n_free,), N
    dof_map: dict[tuple[int, int], int]     # (node, axis) -> row index
    n_nodes: int


@dataclass(frozen=True)
class FEAResult:
    """Outcome of one truss analysis.

    Array fields are ``None`` when the solve did not complete
    (``failure_mode`` is SINGULAR_SYSTEM or DEGENERATE_GEOMETRY); mass is
    always defined by the member lengths. Tension is positive.
    """

    displacements: np.ndarray | None    # (n_nodes, 2), mm
    axial_forces: np.ndarray | None     # (n_members,), N
    axial_stresses: np.ndarray | None   # (n_members,), MPa
    max_abs_stress: float               # MPa; +inf when the solve failed
    mass: float                         # kg
    feasible: bool
    failure_mode: FailureMode


def element_stiffness(node_i, node_j, youngs_modulus: float, area: float) -> np.ndarray:
    """Global-coordinate 4x4 stiffness block of one axial bar.

    Rows/columns are (uxi, uyi, uxj, uyj). The block is symmetric and has
    rank one: (EA/L) * outer(t, t) with t = (-c, -s, c, s).
    """
    dx = node_j[0] - node_i[0]
    dy = node_j[1] - node_i[1]
    length = math.hypot(dx, dy)
    if length < MIN_MEMBER_LENGTH_MM:
        raise DegenerateGeometryError("bar element has (near-)zero length")
    c = dx / length
    s = dy / length
    t = np.array([-c, -s, c, s])
    return (youngs_modulus * area / length) * np.outer(t, t)


def assemble(geometry: TrussGeometry, material: Material, section: Section) -> StiffnessSystem:
    """Sum element blocks into the global matrix, drop fixed DOFs by
    row/column elimination and gather the load vector."""
    n_nodes = len(geometry.nodes)
    ndof = 2 * n_nodes
    K = np.zeros((ndof, ndof))
    for i, j in geometry.members:
        ke = element_stiffness(
            geometry.nodes[i], geometry.nodes[j], material.youngs_modulus, section.area
        )
        dofs = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
        K[np.ix_(dofs, dofs)] += ke

    f = np.zeros(ndof)
    for node, fx, fy in geometry.load_points:
        f[2 * node] += fx
        f[2 * node + 1] += fy

    fixed = set()
    for node, fix_x, fix_y in geometry.supports:
        if fix_x:
            fixed.add(2 * node)
        if fix_y:
            fixed.add(2 * node + 1)
    free = [d for d in range(ndof) if d not in fixed]
    dof_map = {(d // 2, d % 2): row for row, d in enumerate(free)}

    return StiffnessSystem(
        matrix=K[np.ix_(free, free)],
        load_vector=f[free],
        dof_map=dof_map,
        n_nodes=n_nodes,
    )


def solve_displacements(system: StiffnessSystem) -> np.ndarray:
    """Solve K u = f by Cholesky factorization.

    Raises :class:`SingularSystemError` when a pivot falls at or below
    ``PIVOT_RTOL`` times the largest diagonal entry, or when the verified
    residual exceeds ``RESIDUAL_RTOL`` -- both signal a mechanism rather
    than a well-posed structure.
    """
    K = system.matrix
    f = system.load_vector
    diag_max = float(K.diagonal().max(initial=0.0))
    try:
        chol = np.linalg.cholesky(K)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"stiffness factorization failed: {exc}") from exc
    pivots = np.diag(chol) ** 2
    if pivots.min(initial=np.inf) <= PIVOT_RTOL * diag_max:
        raise SingularSystemError("stiffness pivot below mechanism threshold")

    u = cho_solve((chol, True), f, check_finite=False)
    residual = np.abs(K @ u - f).max(initial=0.0) / max(1.0, np.abs(f).max(initial=0.0))
    if not np.isfinite(residual) or residual > RESIDUAL_RTOL:
        raise SingularSystemError(f"solve residual {residual:.3e} too large")
    return u


def expand_displacements(system: StiffnessSystem, u_free: np.ndarray) -> np.ndarray:
    """Scatter the free-DOF solution into a per-node (ux, uy) array with
    zeros at the supports."""
    full = np.zeros((system.n_nodes, 2))
    for (node, axis), row in system.dof_map.items():
        full[node, axis] = u_free[row]
    return full


def member_forces(
    geometry: TrussGeometry,
    displacements: np.ndarray,
    youngs_modulus: float,
    area: float,
) -> np.ndarray:
    """Axial force per member from nodal displacements, tension positive:
    (EA/L) * ((uj-ui) cos + (vj-vi) sin)."""
    forces = np.empty(len(geometry.members))
    for k, (i, j) in enumerate(geometry.members):
        dx = geometry.nodes[j][0] - geometry.nodes[i][0]
        dy = geometry.nodes[j][1] - geometry.nodes[i][1]
        length = math.hypot(dx, dy)
        c = dx / length
        s = dy / length
        du = displacements[j, 0] - displacements[i, 0]
        dv = displacements[j, 1] - displacements[i, 1]
        forces[k] = (youngs_modulus * area / length) * (du * c + dv * s)
    return forces


def method_of_joints(geometry: TrussGeometry, *, return_reactions: bool = False):
    """Member forces from joint equilibrium alone.

    Builds the 2m x (n + r) equilibrium system (m nodes, n members, r
    reaction components) and solves it directly; valid only for statically
    determinate trusses (n + r = 2m). The result is independent of material
    and section, which makes it an oracle for the stiffness path.

    Returns the member-force vector, or ``(forces, reactions)`` with one
    (rx, ry) row per support when ``return_reactions`` is set.
    """
    n_nodes = len(geometry.nodes)
    n_members = len(geometry.members)
    reaction_cols: list[tuple[int, int]] = []  # (node, axis)
    for node, fix_x, fix_y in geometry.supports:
        if fix_x:
            reaction_cols.append((node, 0))
        if fix_y:
            reaction_cols.append((node, 1))
    n_unknowns = n_members + len(reaction_cols)
    if n_unknowns != 2 * n_nodes:
        raise ValueError(
            f"truss is not statically determinate: {n_members} members + "
            f"{len(reaction_cols)} reactions != 2*{n_nodes} equations"
        )

    A = np.zeros((2 * n_nodes, n_unknowns))
    for k, (i, j) in enumerate(geometry.members):
        dx = geometry.nodes[j][0] - geometry.nodes[i][0]
        dy = geometry.nodes[j][1] - geometry.nodes[i][1]
        length = math.hypot(dx, dy)
        if length < MIN_MEMBER_LENGTH_MM:
            raise DegenerateGeometryError("member collapsed to zero length")
        c = dx / length
        s = dy / length
        # tension pulls each joint toward the member's other end
        A[2 * i, k] += c
        A[2 * i + 1, k] += s
        A[2 * j, k] -= c
        A[2 * j + 1, k] -= s
    for col, (node, axis) in enumerate(reaction_cols, start=n_members):
        A[2 * node + axis, col] = 1.0

    rhs = np.zeros(2 * n_nodes)
    for node, fx, fy in geometry.load_points:
        rhs[2 * node] -= fx
        rhs[2 * node + 1] -= fy

    try:
        q = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"equilibrium matrix singular: {exc}") from exc
    residual = np.abs(A @ q - rhs).max(initial=0.0) / max(1.0, np.abs(rhs).max(initial=0.0))
    if not np.isfinite(residual) or residual > RESIDUAL_RTOL:
        raise SingularSystemError(f"equilibrium residual {residual:.3e} too large")

    forces = q[:n_members]
    if not return_reactions:
        return forces
    reactions = np.zeros((len(geometry.supports), 2))
    col = n_members
    for idx, (node, fix_x, fix_y) in enumerate(geometry.supports):
        if fix_x:
            reactions[idx, 0] = q[col]
            col += 1
        if fix_y:
            reactions[idx, 1] = q[col]
            col += 1
    return forces, reactions


def support_reactions(geometry: TrussGeometry, axial_forces: np.ndarray) -> np.ndarray:
    """Reactions implied by member forces: one (rx, ry) row per support,
    from equilibrium of the support joint."""
    reactions = np.zeros((len(geometry.supports), 2))
    for idx, (node, _, _) in enumerate(geometry.supports):
        total = np.zeros(2)
        for k, (i, j) in enumerate(geometry.members):
            if node not in (i, j):
                continue
            other = j if node == i else i
            dx = geometry.nodes[other][0] - geometry.nodes[node][0]
            dy = geometry.nodes[other][1] - geometry.nodes[node][1]
            length = math.hypot(dx, dy)
            total += axial_forces[k] * np.array([dx, dy]) / length
        for load_node, fx, fy in geometry.load_points:
            if load_node == node:
                total += (fx, fy)
        reactions[idx] = -total
    return reactions


def _failed(mode: FailureMode, mass_kg: float) -> FEAResult:
    return FEAResult(
        displacements=None,
        axial_forces=None,
        axial_stresses=None,
        max_abs_stress=math.inf,
        mass=mass_kg,
        feasible=False,
        failure_mode=mode,
    )


def analyze(
    design: DerivedDesign,
    material: Material = AL_6061_T6,
    section: Section = DEFAULT_SECTION,
    total_load: float = DEFAULT_TOTAL_LOAD_N,
) -> FEAResult:
    """Full analysis of one design: geometry, loads, stiffness solve,
    member stresses, mass and the yield feasibility verdict.

    The equivalent (von Mises) stress of a uniaxial bar equals the absolute
    axial stress, so feasibility is max |stress| <= yield strength. Solver
    failures are captured in ``failure_mode`` instead of raised.
    """
    try:
        geometry = build_geometry(design)
    except DegenerateGeometryError:
        collapsed = build_load_case(build_geometry(design, validate=False), total_load)
        return _failed(FailureMode.DEGENERATE_GEOMETRY, mass(collapsed, section, material))

    loaded = build_load_case(geometry, total_load)
    mass_kg = mass(loaded, section, material)
    system = assemble(loaded, material, section)
    try:
        u_free = solve_displacements(system)
    except SingularSystemError:
        return _failed(FailureMode.SINGULAR_SYSTEM, mass_kg)

    displacements = expand_displacements(system, u_free)
    forces = member_forces(loaded, displacements, material.youngs_modulus, section.area)
    stresses = forces / section.area
    max_abs_stress = float(np.abs(stresses).max())
    feasible = max_abs_stress <= material.yield_strength
    return FEAResult(
        displacements=displacements,
        axial_forces=forces,
        axial_stresses=stresses,
        max_abs_stress=max_abs_stress,
        mass=mass_kg,
        feasible=feasible,
        failure_mode=FailureMode.NONE if feasible else FailureMode.YIELD_EXCEEDED,
    )
