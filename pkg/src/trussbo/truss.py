"""Parameterized planar truss: design box, topology, loading and mass.

Units are fixed across the whole package: lengths in mm, forces in N,
stresses in MPa (N/mm^2), mass in kg, densities in kg/mm^3. Angles are
degrees at every interface and become radians only inside
:func:`build_geometry`.

The truss spans 8000 mm between a pin and a roller. Three bottom-chord
section lengths (``a``, ``b``, ``c``) and two end angles (``theta1`` right,
``theta2`` left) are free; the fourth bottom section ``d`` is the remainder
of the span. The realized layout is a fixed 8-node / 13-member triangulated
topology (six triangles), statically determinate by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

SPAN_MM = 8000.0

#: (name, low, high) per design variable, in the order a, b, c, theta1, theta2.
PARAM_BOUNDS = (
    ("a", 500.0, 2500.0),
    ("b", 500.0, 2500.0),
    ("c", 500.0, 2500.0),
    ("theta1", 0.0, 60.0),
    ("theta2", 0.0, 60.0),
)

#: Members shorter than this are treated as collapsed.
MIN_MEMBER_LENGTH_MM = 1e-9

# Node indices of the fixed topology: five bottom-chord nodes, three top nodes.
B0, B1, B2, B3, B4, T1, T2, T3 = range(8)

MEMBER_PAIRS = (
    (B0, B1), (B1, B2), (B2, B3), (B3, B4),   # bottom chords
    (B0, T1), (B4, T3),                       # end rakers
    (B1, T1), (B2, T2), (B3, T3),             # verticals
    (T1, T2), (T2, T3),                       # top chords
    (T1, B2), (T3, B2),                       # diagonals
)

_NODE_NAMES = ("B0", "B1", "B2", "B3", "B4", "T1", "T2", "T3")
MEMBER_NAMES = tuple(f"{_NODE_NAMES[i]}-{_NODE_NAMES[j]}" for i, j in MEMBER_PAIRS)


class BoundsError(ValueError):
    """A design variable lies outside its allowed range."""

    def __init__(self, field: str, value: float, low: float, high: float):
        self.field = field
        self.value = value
        super().__init__(f"parameter {field}={value!r} outside [{low}, {high}]")


class DegenerateGeometryError(ValueError):
    """The realized truss contains a (near-)zero-length member."""


@dataclass(frozen=True)
class DesignParams:
    """The five free design variables; lengths in mm, angles in degrees."""

    a: float
    b: float
    c: float
    theta1: float  # right-side angle
    theta2: float  # left-side angle

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a, self.b, self.c, self.theta1, self.theta2)


@dataclass(frozen=True)
class DerivedDesign:
    """Validated design plus the dependent bottom section ``d``."""

    params: DesignParams
    d: float


@dataclass(frozen=True)
class Material:
    """Isotropic material. Poisson's ratio is carried for configuration
    fidelity but axial bar elements never use it."""

    density: float          # kg/mm^3
    youngs_modulus: float   # MPa
    poisson_ratio: float
    yield_strength: float   # MPa

    def __post_init__(self):
        for name in ("density", "youngs_modulus", "poisson_ratio", "yield_strength"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"material {name} must be strictly positive")
        if self.poisson_ratio >= 0.5:
            raise ValueError("material poisson_ratio must be < 0.5")


#: AL-6061-T6: density 2700 kg/m^3, E = 70 GPa, nu = 0.35, yield 276 MPa.
AL_6061_T6 = Material(
    density=2.7e-6,
    youngs_modulus=70000.0,
    poisson_ratio=0.35,
    yield_strength=276.0,
)


@dataclass(frozen=True)
class Section:
    """Uniform cross-section shared by all members."""

    area: float  # mm^2

    def __post_init__(self):
        if not self.area > 0.0:
            raise ValueError("section area must be strictly positive")


DEFAULT_SECTION = Section(area=500.0)

#: Total applied design load, split over the three top nodes.
DEFAULT_TOTAL_LOAD_N = 12000.0


@dataclass(frozen=True)
class TrussGeometry:
    """A realized pin-jointed truss.

    ``supports`` entries are (node, fix_x, fix_y); ``load_points`` entries
    are (node, fx, fy) in Newtons.
    """

    nodes: tuple[tuple[float, float], ...]
    members: tuple[tuple[int, int], ...]
    supports: tuple[tuple[int, bool, bool], ...]
    load_points: tuple[tuple[int, float, float], ...] = ()

    def member_length(self, k: int) -> float:
        (xi, yi), (xj, yj) = self.nodes[self.members[k][0]], self.nodes[self.members[k][1]]
        return math.hypot(xj - xi, yj - yi)

    def member_lengths(self) -> list[float]:
        return [self.member_length(k) for k in range(len(self.members))]

    def n_reactions(self) -> int:
        return sum(int(fx) + int(fy) for _, fx, fy in self.supports)


def validate_params(params: DesignParams) -> None:
    """Raise :class:`BoundsError` naming the first out-of-range field."""
    for (name, low, high), value in zip(PARAM_BOUNDS, params.as_tuple()):
        if not (math.isfinite(value) and low <= value <= high):
            raise BoundsError(name, value, low, high)


def derive_design(params: DesignParams) -> DerivedDesign:
    """Validate the design box and compute the dependent section
    d = 8000 - (a + b + c)."""
    validate_params(params)
    return DerivedDesign(params=params, d=SPAN_MM - (params.a + params.b + params.c))


def params_from_unit(x) -> DesignParams:
    """Map a point of the unit cube [0,1]^5 onto the design box."""
    values = [low + (high - low) * float(v) for (_, low, high), v in zip(PARAM_BOUNDS, x)]
    return DesignParams(*values)


def unit_from_params(params: DesignParams) -> tuple[float, ...]:
    """Inverse of :func:`params_from_unit`."""
    return tuple(
        (v - low) / (high - low) for (_, low, high), v in zip(PARAM_BOUNDS, params.as_tuple())
    )


def build_geometry(design: DerivedDesign, *, validate: bool = True) -> TrussGeometry:
    """Realize the fixed topology for a design.

    Bottom chord nodes sit at x = 0, a, a+b, a+b+c and 8000 on y = 0. The
    left apex T1 rises a*tan(theta2) above B1, the right apex T3 rises
    d*tan(theta1) above B3, and T2 lies on the straight line T1-T3 above B2.
    Pin at B0, roller at B4.

    With ``validate`` (the default), raises :class:`DegenerateGeometryError`
    when any member collapses below ``MIN_MEMBER_LENGTH_MM`` (e.g. both
    angles zero flatten the top nodes onto the chord).
    """
    p = design.params
    x1 = p.a
    x2 = p.a + p.b
    x3 = p.a + p.b + p.c
    h1 = p.a * math.tan(math.radians(p.theta2))
    h3 = design.d * math.tan(math.radians(p.theta1))
    h2 = h1 + (h3 - h1) * (x2 - x1) / (x3 - x1)

    geometry = TrussGeometry(
        nodes=(
            (0.0, 0.0), (x1, 0.0), (x2, 0.0), (x3, 0.0), (SPAN_MM, 0.0),
            (x1, h1), (x2, h2), (x3, h3),
        ),
        members=MEMBER_PAIRS,
        supports=((B0, True, True), (B4, False, True)),
    )
    if validate:
        for k in range(len(geometry.members)):
            if geometry.member_length(k) < MIN_MEMBER_LENGTH_MM:
                raise DegenerateGeometryError(
                    f"member {MEMBER_NAMES[k]} collapsed to zero length"
                )
    return geometry


def build_load_case(geometry: TrussGeometry, total_load: float) -> TrussGeometry:
    """Attach the design load split equally downward over the three top nodes."""
    share = total_load / 3.0
    return replace(
        geometry,
        load_points=((T1, 0.0, -share), (T2, 0.0, -share), (T3, 0.0, -share)),
    )


def mass(geometry: TrussGeometry, section: Section, material: Material) -> float:
    """Total member mass in kg: density * area * sum of member lengths."""
    return material.density * section.area * math.fsum(geometry.member_lengths())
