import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trussbo.truss import (
    AL_6061_T6,
    DEFAULT_SECTION,
    MEMBER_PAIRS,
    SPAN_MM,
    BoundsError,
    DegenerateGeometryError,
    DesignParams,
    Material,
    Section,
    TrussGeometry,
    build_geometry,
    build_load_case,
    derive_design,
    mass,
    params_from_unit,
    unit_from_params,
)

in_box = st.builds(
    DesignParams,
    a=st.floats(500, 2500),
    b=st.floats(500, 2500),
    c=st.floats(500, 2500),
    theta1=st.floats(0, 60),
    theta2=st.floats(0, 60),
)


class TestDeriveDesign:
    def test_reference_fixture(self):
        design = derive_design(DesignParams(1200.0, 2497.3, 2498.2, 42.0, 45.0))
        assert design.d == pytest.approx(1804.5, abs=1e-9)

    def test_upper_bounds(self):
        design = derive_design(DesignParams(2500, 2500, 2500, 30, 30))
        assert design.d == 500.0

    @pytest.mark.parametrize(
        "params, field",
        [
            (DesignParams(400, 1000, 1000, 30, 30), "a"),
            (DesignParams(2600, 1000, 1000, 30, 30), "a"),
            (DesignParams(1000, 499, 1000, 30, 30), "b"),
            (DesignParams(1000, 1000, 2500.5, 30, 30), "c"),
            (DesignParams(1000, 1000, 1000, -1, 30), "theta1"),
            (DesignParams(1000, 1000, 1000, 30, 61), "theta2"),
            (DesignParams(math.nan, 1000, 1000, 30, 30), "a"),
        ],
    )
    def test_bounds_violations_name_the_field(self, params, field):
        with pytest.raises(BoundsError) as excinfo:
            derive_design(params)
        assert excinfo.value.field == field
        assert field in str(excinfo.value)

    @given(in_box)
    @settings(max_examples=50, deadline=None)
    def test_sum_is_span_to_one_ulp(self, params):
        design = derive_design(params)
        total = design.d + (params.a + params.b + params.c)
        assert abs(total - SPAN_MM) <= math.ulp(SPAN_MM)
        assert 500.0 - 1e-9 <= design.d <= 6500.0 + 1e-9


class TestUnitCubeMapping:
    def test_corners(self):
        assert params_from_unit([0, 0, 0, 0, 0]) == DesignParams(500, 500, 500, 0, 0)
        assert params_from_unit([1, 1, 1, 1, 1]) == DesignParams(2500, 2500, 2500, 60, 60)

    @given(in_box)
    @settings(max_examples=25, deadline=None)
    def test_round_trip(self, params):
        back = params_from_unit(unit_from_params(params))
        for got, want in zip(back.as_tuple(), params.as_tuple()):
            assert got == pytest.approx(want, abs=1e-9)


class TestBuildGeometry:
    def test_square_layout(self):
        # a=b=c=d=2000 at 45 degrees puts all three top nodes at height 2000
        geometry = build_geometry(derive_design(DesignParams(2000, 2000, 2000, 45, 45)))
        assert len(geometry.nodes) == 8
        assert len(geometry.members) == 13
        assert geometry.nodes[5][0] == pytest.approx(2000)
        assert geometry.nodes[5][1] == pytest.approx(2000, rel=1e-12)
        assert geometry.nodes[6] == pytest.approx((4000, 2000), rel=1e-12)
        assert geometry.nodes[7] == pytest.approx((6000, 2000), rel=1e-12)

    def test_reference_fixture_layout(self):
        # independent recomputation of the node rule for the reported optimum
        a, b, c = 1200.0, 2497.3, 2498.2
        theta1, theta2 = 42.0, 45.0
        d = 8000.0 - (a + b + c)
        h1 = a * math.tan(math.radians(theta2))
        h3 = d * math.tan(math.radians(theta1))
        h2 = h1 + (h3 - h1) * b / (b + c)
        geometry = build_geometry(derive_design(DesignParams(a, b, c, theta1, theta2)))
        assert geometry.nodes[5] == pytest.approx((1200.0, h1))
        assert geometry.nodes[6] == pytest.approx((3697.3, h2))
        assert geometry.nodes[7] == pytest.approx((6195.5, h3))
        assert h3 == pytest.approx(1624.78, abs=0.01)

    @pytest.mark.parametrize(
        "params",
        [
            DesignParams(2000, 2000, 2000, 0, 0),
            DesignParams(800, 1500, 2200, 0, 30),   # right vertical collapses
            DesignParams(800, 1500, 2200, 30, 0),   # left vertical collapses
        ],
    )
    def test_zero_angles_degenerate(self, params):
        with pytest.raises(DegenerateGeometryError):
            build_geometry(derive_design(params))

    def test_validate_off_returns_collapsed_geometry(self):
        geometry = build_geometry(
            derive_design(DesignParams(2000, 2000, 2000, 0, 0)), validate=False
        )
        assert len(geometry.nodes) == 8
        assert min(geometry.member_lengths()) == 0.0

    @given(in_box)
    @settings(max_examples=50, deadline=None)
    def test_structural_invariants(self, params):
        try:
            geometry = build_geometry(derive_design(params))
        except DegenerateGeometryError:
            return
        n = len(geometry.members)
        r = geometry.n_reactions()
        m = len(geometry.nodes)
        assert (n, r, m) == (13, 3, 8)
        assert n + r == 2 * m
        xs = [geometry.nodes[i][0] for i in range(5)]
        assert xs == sorted(xs) and len(set(xs)) == 5
        for bottom, top in ((1, 5), (2, 6), (3, 7)):
            assert geometry.nodes[top][0] == geometry.nodes[bottom][0]
        assert all(length > 0 for length in geometry.member_lengths())
        assert len(set(geometry.members)) == len(geometry.members)


class TestBuildLoadCase:
    def test_default_split(self):
        geometry = build_geometry(derive_design(DesignParams(2000, 2000, 2000, 45, 45)))
        loaded = build_load_case(geometry, 12000.0)
        assert loaded.load_points == ((5, 0.0, -4000.0), (6, 0.0, -4000.0), (7, 0.0, -4000.0))

    def test_zero_and_small_loads(self):
        geometry = build_geometry(derive_design(DesignParams(2000, 2000, 2000, 45, 45)))
        assert all(fy == 0.0 for _, _, fy in build_load_case(geometry, 0.0).load_points)
        assert all(fy == -100.0 for _, _, fy in build_load_case(geometry, 300.0).load_points)

    def test_pure_annotation(self):
        geometry = build_geometry(derive_design(DesignParams(2000, 2000, 2000, 45, 45)))
        loaded = build_load_case(geometry, 12000.0)
        assert loaded.nodes == geometry.nodes
        assert geometry.load_points == ()


class TestMass:
    def test_single_member(self):
        geometry = TrussGeometry(
            nodes=((0.0, 0.0), (1000.0, 0.0)),
            members=((0, 1),),
            supports=((0, True, True),),
        )
        assert mass(geometry, Section(500.0), AL_6061_T6) == pytest.approx(1.35)

    def test_linear_in_area(self):
        geometry = build_geometry(derive_design(DesignParams(1700, 900, 1400, 25, 40)))
        m1 = mass(geometry, Section(250.0), AL_6061_T6)
        m2 = mass(geometry, Section(500.0), AL_6061_T6)
        assert m2 == pytest.approx(2 * m1, rel=1e-12)

    def test_square_layout_against_length_oracle(self):
        # 13 member lengths summed from explicit coordinates
        h = 2000.0 * math.tan(math.radians(45.0))
        pts = {
            0: (0.0, 0.0), 1: (2000.0, 0.0), 2: (4000.0, 0.0), 3: (6000.0, 0.0),
            4: (8000.0, 0.0), 5: (2000.0, h), 6: (4000.0, h), 7: (6000.0, h),
        }
        total = math.fsum(
            math.hypot(pts[j][0] - pts[i][0], pts[j][1] - pts[i][1])
            for i, j in MEMBER_PAIRS
        )
        expected = 2.7e-6 * 500.0 * total
        geometry = build_geometry(derive_design(DesignParams(2000, 2000, 2000, 45, 45)))
        assert mass(geometry, DEFAULT_SECTION, AL_6061_T6) == pytest.approx(expected, rel=1e-12)

    def test_translation_invariance(self):
        geometry = build_geometry(derive_design(DesignParams(1500, 2000, 2500, 33, 21)))
        shifted = TrussGeometry(
            nodes=tuple((x + 123.0, y - 45.0) for x, y in geometry.nodes),
            members=geometry.members,
            supports=geometry.supports,
        )
        assert mass(shifted, DEFAULT_SECTION, AL_6061_T6) == pytest.approx(
            mass(geometry, DEFAULT_SECTION, AL_6061_T6), rel=1e-12
        )


class TestMaterialValidation:
    def test_positive_fields_required(self):
        with pytest.raises(ValueError):
            Material(density=0.0, youngs_modulus=70000, poisson_ratio=0.35, yield_strength=276)
        with pytest.raises(ValueError):
            Material(density=2.7e-6, youngs_modulus=70000, poisson_ratio=0.6, yield_strength=276)
        with pytest.raises(ValueError):
            Section(area=0.0)
