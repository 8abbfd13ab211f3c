"""Sequential constrained Bayesian-optimization driver.

Minimizes truss mass under the yield constraint: a Latin-hypercube initial
design, then fit objective + constraint GPs, maximize the acquisition,
evaluate the suggested design, repeat until the evaluation budget (or an
optional stall criterion) is hit. The objective GP always trains on mass,
which is defined even for degenerate geometries; infeasibility is carried
by the constraint GP on g = max|stress| - yield, with failed solves pinned
at g = +2 * yield so the optimizer steers clear without distorting the
mass surface.

A uniform random-search baseline with the same trace contract is included
for benchmarking.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .acquisition import AcquisitionConfig, maximize_acquisition
from .fea import FailureMode, analyze
from .gp import Dataset, GPHyperparams, fit
from .truss import (
    AL_6061_T6,
    DEFAULT_SECTION,
    DEFAULT_TOTAL_LOAD_N,
    DesignParams,
    Material,
    Section,
    derive_design,
    params_from_unit,
)

N_DIMS = 5


class Phase(str, enum.Enum):
    INIT = "init"
    BO = "bo"


@dataclass(frozen=True)
class BOConfig:
    budget: int = 100
    n_init: int = 10
    seed: int = 0
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    gp_restarts: int = 5
    min_improvement: float = 0.0   # kg; improvement smaller than this doesn't reset the stall counter
    stall_patience: int = 0        # iterations without improvement before stopping; 0 disables
    penalty_fallback: bool = False # single GP on mass + 1e6*max(g,0) instead of a constraint GP
    material: Material = AL_6061_T6
    section: Section = DEFAULT_SECTION
    total_load: float = DEFAULT_TOTAL_LOAD_N

    def __post_init__(self):
        # n_init == budget is the degenerate pure-initial-design run
        if not 1 <= self.n_init <= self.budget:
            raise ValueError(
                f"need 1 <= n_init <= budget, got n_init={self.n_init} budget={self.budget}"
            )
        if self.total_load < 0.0:
            raise ValueError("total_load must be >= 0")
        if self.gp_restarts < 1:
            raise ValueError("gp_restarts must be >= 1")
        if self.min_improvement < 0.0 or self.stall_patience < 0:
            raise ValueError("min_improvement and stall_patience must be >= 0")


@dataclass(frozen=True)
class TraceRecord:
    index: int
    params: DesignParams
    d: float
    mass: float
    max_abs_stress: float
    feasible: bool
    failure_mode: FailureMode
    best_so_far_mass: float   # best feasible mass so far; +inf before any feasible point
    phase: Phase


@dataclass
class OptimizationTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def best_feasible(self) -> TraceRecord | None:
        best = None
        for record in self.records:
            if record.feasible and (best is None or record.mass < best.mass):
                best = record
        return best


@dataclass(frozen=True)
class BestResult:
    params: DesignParams
    d: float
    mass: float
    max_abs_stress: float
    evaluations_used: int
    found_at_index: int


class NoFeasibleDesignError(RuntimeError):
    """No evaluated design satisfied the yield constraint; the full trace
    is attached for inspection."""

    def __init__(self, trace: OptimizationTrace):
        self.trace = trace
        super().__init__(f"no feasible design in {len(trace)} evaluations")


def latin_hypercube(n: int, dims: int, seed: int) -> np.ndarray:
    """n stratified points in [0,1)^dims: per dimension, one point per
    stratum [k/n, (k+1)/n) with seeded jitter and a seeded permutation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    points = np.empty((n, dims))
    for j in range(dims):
        perm = rng.permutation(n)
        jitter = rng.random(n)
        points[:, j] = (perm + jitter) / n
    return points


class _Run:
    """Shared evaluation/trace bookkeeping for both drivers."""

    def __init__(self, config: BOConfig):
        self.config = config
        self.trace = OptimizationTrace()
        self.X: list[np.ndarray] = []          # unit-cube inputs, evaluation order
        self.masses: list[float] = []
        self.g_values: list[float] = []        # constraint value, yield-violation scale (MPa)
        self.any_feasible = False
        self.best_mass = math.inf

    def evaluate(self, x_unit: np.ndarray, phase: Phase) -> TraceRecord:
        params = params_from_unit(x_unit)
        design = derive_design(params)
        result = analyze(
            design, self.config.material, self.config.section, self.config.total_load
        )
        yield_strength = self.config.material.yield_strength
        if result.failure_mode in (FailureMode.SINGULAR_SYSTEM, FailureMode.DEGENERATE_GEOMETRY):
            g = 2.0 * yield_strength
        else:
            g = result.max_abs_stress - yield_strength
        if result.feasible:
            self.any_feasible = True
            self.best_mass = min(self.best_mass, result.mass)
        record = TraceRecord(
            index=len(self.trace),
            params=params,
            d=design.d,
            mass=result.mass,
            max_abs_stress=result.max_abs_stress,
            feasible=result.feasible,
            failure_mode=result.failure_mode,
            best_so_far_mass=self.best_mass,
            phase=phase,
        )
        self.trace.records.append(record)
        self.X.append(np.asarray(x_unit, dtype=float))
        self.masses.append(result.mass)
        self.g_values.append(g)
        return record

    def finish(self) -> tuple[OptimizationTrace, BestResult]:
        best = self.trace.best_feasible()
        if best is None:
            raise NoFeasibleDesignError(self.trace)
        return self.trace, BestResult(
            params=best.params,
            d=best.d,
            mass=best.mass,
            max_abs_stress=best.max_abs_stress,
            evaluations_used=len(self.trace),
            found_at_index=best.index,
        )


class _StallMonitor:
    """Improvement-based early stopping; inactive when patience is 0."""

    def __init__(self, patience: int, min_improvement: float, best_mass: float):
        self.patience = patience
        self.min_improvement = min_improvement
        self.reference = best_mass
        self.counter = 0

    def update(self, best_mass: float) -> bool:
        """Record one iteration's best-so-far; True means stop."""
        if self.patience <= 0:
            return False
        if best_mass < self.reference - self.min_improvement:
            self.reference = best_mass
            self.counter = 0
        else:
            self.counter += 1
        return self.counter >= self.patience


def run(config: BOConfig) -> tuple[OptimizationTrace, BestResult]:
    """Full optimization: LHS initialization then model-guided evaluations.

    Deterministic: (config, seed) fixes the trace bit for bit. FEA failures
    become infeasible records, never exceptions; raises
    :class:`NoFeasibleDesignError` only if the whole budget finds no
    feasible design.
    """
    seeder = np.random.default_rng(config.seed)

    def next_seed() -> int:
        return int(seeder.integers(0, 2**63 - 1))

    state = _Run(config)
    for x in latin_hypercube(config.n_init, N_DIMS, next_seed()):
        state.evaluate(x, Phase.INIT)

    stall = _StallMonitor(config.stall_patience, config.min_improvement, state.best_mass)
    penalty_scale = 1.0e6
    obj_warm: GPHyperparams | None = None
    con_warm: GPHyperparams | None = None

    while len(state.trace) < config.budget:
        X = np.vstack(state.X)
        masses = np.asarray(state.masses)
        g = np.asarray(state.g_values)

        if config.penalty_fallback:
            raw_targets = masses + penalty_scale * np.maximum(g, 0.0)
            constraint_model = None
        else:
            raw_targets = masses
            constraint_dataset = Dataset.from_raw(X, g)
            constraint_model = fit(
                constraint_dataset, config.gp_restarts, seed=next_seed(), warm_start=con_warm
            )
            con_warm = constraint_model.hyper
        objective_dataset = Dataset.from_raw(X, raw_targets)
        objective_model = fit(
            objective_dataset, config.gp_restarts, seed=next_seed(), warm_start=obj_warm
        )
        obj_warm = objective_model.hyper

        feasible_mask = np.array([r.feasible for r in state.trace])
        if state.any_feasible:
            incumbent_raw = raw_targets[feasible_mask].min()
        else:
            incumbent_raw = raw_targets.min()
        incumbent = (incumbent_raw - objective_dataset.raw_mean) / objective_dataset.raw_std

        x_next = maximize_acquisition(
            objective_model,
            constraint_model,
            config.acquisition,
            incumbent,
            seed=next_seed(),
            feasibility_only=(not state.any_feasible and constraint_model is not None),
        )
        state.evaluate(x_next, Phase.BO)
        if stall.update(state.best_mass):
            break

    return state.finish()


def random_search(config: BOConfig) -> tuple[OptimizationTrace, BestResult]:
    """Uniform-sampling baseline with the identical trace/result contract."""
    rng = np.random.default_rng(config.seed)
    state = _Run(config)
    stall = _StallMonitor(config.stall_patience, config.min_improvement, math.inf)
    for x in rng.random((config.budget, N_DIMS)):
        state.evaluate(x, Phase.INIT)
        if stall.update(state.best_mass):
            break
    return state.finish()
