"""Acquisition functions and their maximization over the unit design cube.

All acquisitions are written for minimization of the objective: expected
improvement and probability of improvement measure how far a candidate is
expected to fall below the incumbent, and the confidence-bound score is the
negated lower bound so that maximizing the score minimizes the bound.
Feasibility enters as a multiplicative probability-of-feasibility weight
from a second GP on the constraint value g (feasible iff g <= 0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr
from scipy.stats import qmc

from .gp import GPModel, predict_batch

_REFINE_SWEEPS = 2
_REFINE_LINE_ITERS = 10

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class AcquisitionKind(str, enum.Enum):
    EI = "EI"
    PI = "PI"
    LCB = "LCB"


@dataclass(frozen=True)
class AcquisitionConfig:
    kind: AcquisitionKind = AcquisitionKind.EI
    xi: float = 0.01               # exploration margin, standardized units
    beta: float = 2.0              # confidence weight for LCB
    feasibility_weighting: bool = True
    n_candidates: int = 2048
    n_refine_starts: int = 10

    def __post_init__(self):
        if self.xi < 0.0:
            raise ValueError("xi must be >= 0")
        if not self.beta > 0.0:
            raise ValueError("beta must be > 0")
        if self.n_candidates < 1 or self.n_refine_starts < 1:
            raise ValueError("candidate counts must be >= 1")


def _phi(z):
    return np.exp(-0.5 * z * z) / _SQRT_2PI


def _shaped(values, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(values)
    return values


def expected_improvement(mean, std, best, xi=0.0):
    """E[max(best - xi - Y, 0)] for Y ~ N(mean, std^2).

    Closed form (best - xi - mean) Phi(z) + std phi(z) with
    z = (best - xi - mean)/std; collapses to max(best - xi - mean, 0) at
    std = 0. Always >= 0.
    """
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    diff = best - xi - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std > 0.0, diff / np.where(std > 0.0, std, 1.0), 0.0)
    ei = np.where(std > 0.0, diff * ndtr(z) + std * _phi(z), np.maximum(diff, 0.0))
    return _shaped(np.maximum(ei, 0.0), mean, std)


def probability_of_improvement(mean, std, best, xi=0.0):
    """P(Y < best - xi) for Y ~ N(mean, std^2); an indicator at std = 0."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    diff = best - xi - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std > 0.0, diff / np.where(std > 0.0, std, 1.0), 0.0)
    pi = np.where(std > 0.0, ndtr(z), (diff > 0.0).astype(float))
    return _shaped(pi, mean, std)


def lower_confidence_bound(mean, std, beta=2.0):
    """Score -(mean - beta*std): maximizing it minimizes the optimistic
    lower bound of the objective."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    return _shaped(-mean + beta * std, mean, std)


def feasibility_probability(mean_g, std_g):
    """P(g <= 0) under g ~ N(mean_g, std_g^2); an indicator at std_g = 0."""
    mean_g = np.asarray(mean_g, dtype=float)
    std_g = np.asarray(std_g, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std_g > 0.0, -mean_g / np.where(std_g > 0.0, std_g, 1.0), 0.0)
    p = np.where(std_g > 0.0, ndtr(z), (mean_g <= 0.0).astype(float))
    return _shaped(p, mean_g, std_g)


def _constraint_stats_raw(constraint_model: GPModel, X: np.ndarray):
    """De-standardized constraint posterior: the feasibility threshold lives
    on the raw g scale, not the standardized one."""
    mean_s, var_s = predict_batch(constraint_model, X)
    ds = constraint_model.dataset
    mean_raw = ds.raw_mean + ds.raw_std * mean_s
    std_raw = ds.raw_std * np.sqrt(var_s)
    return mean_raw, std_raw


def acquisition_scores(
    X: np.ndarray,
    objective_model: GPModel,
    constraint_model: GPModel | None,
    config: AcquisitionConfig,
    incumbent: float,
    *,
    feasibility_only: bool = False,
) -> np.ndarray:
    """Score each row of X. ``incumbent`` is in standardized objective
    units. With ``feasibility_only`` the score is the probability of
    feasibility alone (used before any feasible point exists)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if feasibility_only:
        if constraint_model is None:
            raise ValueError("feasibility_only scoring requires a constraint model")
        mean_g, std_g = _constraint_stats_raw(constraint_model, X)
        return np.asarray(feasibility_probability(mean_g, std_g), dtype=float)

    mean, var = predict_batch(objective_model, X)
    std = np.sqrt(var)
    if config.kind is AcquisitionKind.EI:
        scores = expected_improvement(mean, std, incumbent, config.xi)
    elif config.kind is AcquisitionKind.PI:
        scores = probability_of_improvement(mean, std, incumbent, config.xi)
    else:
        scores = lower_confidence_bound(mean, std, config.beta)
    scores = np.asarray(scores, dtype=float)
    if config.feasibility_weighting and constraint_model is not None:
        mean_g, std_g = _constraint_stats_raw(constraint_model, X)
        scores = scores * np.asarray(feasibility_probability(mean_g, std_g), dtype=float)
    return scores


def _golden_line_batch(score_batch, points, coord, iters):
    """Golden-section maximization along one coordinate, batched over the
    rows of ``points``. Each row follows exactly the trajectory a scalar
    golden-section search would, but all rows evaluate together. Returns
    the best coordinate value and score seen per row."""
    n = points.shape[0]
    a = np.zeros(n)
    b = np.ones(n)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)

    def eval_at(values):
        trial = points.copy()
        trial[:, coord] = values
        return score_batch(trial)

    fc = eval_at(c)
    fd = eval_at(d)
    best_v = np.where(fc >= fd, c, d)
    best_f = np.maximum(fc, fd)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_old, d_old, fc_old, fd_old = c, d, fc, fd
        c = np.where(left, b - _INVPHI * (b - a), d_old)
        d = np.where(left, c_old, a + _INVPHI * (b - a))
        new_values = np.where(left, c, d)
        new_f = eval_at(new_values)
        fc = np.where(left, new_f, fd_old)
        fd = np.where(left, fc_old, new_f)
        better = new_f > best_f
        best_v = np.where(better, new_values, best_v)
        best_f = np.where(better, new_f, best_f)
    return best_v, best_f


def _refine_batch(score_batch, starts, sweeps, iters):
    """Coordinate-wise golden-section ascent of every start inside the unit
    cube; a coordinate moves only on strict per-row improvement, so no row
    ever scores below its starting point."""
    X = np.array(starts, dtype=float)
    fX = score_batch(X)
    for _ in range(sweeps):
        for coord in range(X.shape[1]):
            values, scores = _golden_line_batch(score_batch, X, coord, iters)
            improved = scores > fX
            X[improved, coord] = values[improved]
            fX = np.where(improved, scores, fX)
    return X, fX


def maximize_acquisition(
    objective_model: GPModel,
    constraint_model: GPModel | None,
    config: AcquisitionConfig,
    incumbent: float,
    seed: int,
    *,
    feasibility_only: bool = False,
) -> np.ndarray:
    """Pick the next point in [0,1]^d.

    Scores ``n_candidates`` seeded quasi-random (Halton) points, then
    refines the ``n_refine_starts`` best by coordinate-wise golden-section
    ascent inside the cube. Refinement only ever accepts improvements, so
    the returned point scores at least as high as every raw candidate.
    Ties are broken by the lowest candidate index; fully deterministic for
    a fixed seed.
    """
    dims = objective_model.dataset.dims

    def score_batch(X: np.ndarray) -> np.ndarray:
        return acquisition_scores(
            X,
            objective_model,
            constraint_model,
            config,
            incumbent,
            feasibility_only=feasibility_only,
        )

    candidates = qmc.Halton(d=dims, scramble=True, seed=seed).random(config.n_candidates)
    scores = score_batch(candidates)
    # descending by score, ascending by candidate index among ties
    order = np.argsort(-scores, kind="stable")[: config.n_refine_starts]

    refined, refined_scores = _refine_batch(
        score_batch, candidates[order], _REFINE_SWEEPS, _REFINE_LINE_ITERS
    )
    tied = np.flatnonzero(refined_scores == refined_scores.max())
    winner = tied[np.argmin(order[tied])]
    return np.clip(refined[winner], 0.0, 1.0)
