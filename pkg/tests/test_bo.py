import math

import numpy as np
import pytest

from trussbo.bo import (
    BOConfig,
    NoFeasibleDesignError,
    Phase,
    latin_hypercube,
    random_search,
    run,
)
from trussbo.truss import Material, PARAM_BOUNDS


def small_config(**overrides):
    defaults = dict(budget=14, n_init=8, seed=3)
    defaults.update(overrides)
    return BOConfig(**defaults)


WEAK = Material(density=2.7e-6, youngs_modulus=70000.0, poisson_ratio=0.35, yield_strength=1e-6)


class TestLatinHypercube:
    def test_single_point(self):
        points = latin_hypercube(1, 5, seed=0)
        assert points.shape == (1, 5)
        assert ((points >= 0.0) & (points < 1.0)).all()

    def test_one_point_per_stratum(self):
        points = latin_hypercube(10, 5, seed=42)
        for j in range(5):
            strata = np.floor(points[:, j] * 10).astype(int)
            assert sorted(strata) == list(range(10))

    def test_deterministic_and_seed_sensitive(self):
        a = latin_hypercube(10, 5, seed=7)
        b = latin_hypercube(10, 5, seed=7)
        c = latin_hypercube(10, 5, seed=8)
        np.testing.assert_array_equal(a, b)
        assert (a != c).any()

    def test_rejects_zero_points(self):
        with pytest.raises(ValueError):
            latin_hypercube(0, 5, seed=1)


class TestBOConfig:
    def test_degenerate_equal_budget_allowed(self):
        BOConfig(budget=10, n_init=10)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(budget=5, n_init=10),
            dict(n_init=0),
            dict(total_load=-1.0),
            dict(gp_restarts=0),
            dict(stall_patience=-1),
            dict(min_improvement=-0.5),
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            BOConfig(**kwargs)


class TestRun:
    def test_pure_initial_design(self):
        trace, best = run(BOConfig(budget=10, n_init=10, seed=5))
        assert len(trace) == 10
        assert all(r.phase is Phase.INIT for r in trace)
        feasible_masses = [r.mass for r in trace if r.feasible]
        assert best.mass == min(feasible_masses)

    def test_trace_invariants(self):
        trace, best = run(small_config())
        assert len(trace) == 14
        assert [r.index for r in trace] == list(range(14))
        assert all(r.phase is Phase.INIT for r in trace[:8])
        assert all(r.phase is Phase.BO for r in trace[8:])
        best_curve = [r.best_so_far_mass for r in trace]
        assert all(b2 <= b1 for b1, b2 in zip(best_curve, best_curve[1:]))
        for r in trace:
            for (name, low, high), value in zip(PARAM_BOUNDS, r.params.as_tuple()):
                assert low - 1e-9 <= value <= high + 1e-9
            assert 500.0 - 1e-6 <= r.d <= 6500.0 + 1e-6
            if r.feasible:
                assert r.best_so_far_mass <= r.mass
        assert best.mass == best_curve[-1]
        assert best.evaluations_used == 14
        assert trace[best.found_at_index].mass == best.mass

    def test_deterministic(self):
        trace1, best1 = run(small_config())
        trace2, best2 = run(small_config())
        assert trace1.records == trace2.records
        assert best1 == best2

    def test_seed_changes_trace(self):
        trace1, _ = run(small_config(seed=1))
        trace2, _ = run(small_config(seed=2))
        assert trace1.records != trace2.records

    def test_no_feasible_design_raises_with_trace(self):
        config = BOConfig(budget=4, n_init=2, seed=0, material=WEAK)
        with pytest.raises(NoFeasibleDesignError) as excinfo:
            run(config)
        trace = excinfo.value.trace
        assert len(trace) == 4
        assert not any(r.feasible for r in trace)
        assert all(math.isinf(r.best_so_far_mass) for r in trace)

    def test_stall_stops_early(self):
        # an impossible improvement threshold stalls right after the
        # initial design: n_init + stall_patience evaluations total
        config = BOConfig(
            budget=40, n_init=6, seed=2, stall_patience=3, min_improvement=1e9
        )
        trace, best = run(config)
        assert len(trace) == 9

    def test_stall_disabled_runs_full_budget(self):
        trace, _ = run(small_config(stall_patience=0, min_improvement=1e9))
        assert len(trace) == 14

    def test_penalty_fallback_mode(self):
        trace, best = run(small_config(penalty_fallback=True))
        assert len(trace) == 14
        assert best.mass > 0.0

    def test_lcb_and_unweighted_modes_run(self):
        from trussbo.acquisition import AcquisitionConfig, AcquisitionKind

        config = small_config(
            budget=10,
            n_init=8,
            acquisition=AcquisitionConfig(kind=AcquisitionKind.LCB, feasibility_weighting=False),
        )
        trace, best = run(config)
        assert len(trace) == 10


class TestRandomSearch:
    def test_single_evaluation(self):
        trace, best = random_search(BOConfig(budget=1, n_init=1, seed=9))
        assert len(trace) == 1
        assert best.found_at_index == 0

    def test_matches_seeded_generator(self):
        config = BOConfig(budget=5, n_init=1, seed=123)
        trace, _ = random_search(config)
        expected = np.random.default_rng(123).random((5, 5))
        from trussbo.truss import params_from_unit

        for record, row in zip(trace, expected):
            assert record.params == params_from_unit(row)

    def test_deterministic(self):
        config = BOConfig(budget=20, n_init=5, seed=77)
        trace1, best1 = random_search(config)
        trace2, best2 = random_search(config)
        assert trace1.records == trace2.records
        assert best1 == best2

    def test_no_feasible_raises(self):
        with pytest.raises(NoFeasibleDesignError):
            random_search(BOConfig(budget=3, n_init=1, seed=1, material=WEAK))

    def test_best_matches_trace_minimum(self):
        trace, best = random_search(BOConfig(budget=40, n_init=5, seed=4))
        feasible = [r.mass for r in trace if r.feasible]
        assert best.mass == min(feasible)
        curve = [r.best_so_far_mass for r in trace]
        assert all(b2 <= b1 for b1, b2 in zip(curve, curve[1:]))
