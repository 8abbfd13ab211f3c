"""Gaussian-process regression over the normalized design cube.

Squared-exponential kernel with one lengthscale per input dimension (ARD),
zero prior mean on standardized targets, and hyperparameters chosen by
maximizing the log marginal likelihood with a seeded multi-start
coordinate search in log space. Everything is deterministic given
(dataset, n_restarts, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.spatial.distance import cdist

from ._search import coordinate_ascent

#: Smallest permitted noise variance (jitter floor).
JITTER_FLOOR = 1e-10
#: Jitter escalation stops here; factorization still failing is an error.
JITTER_CEIL = 1e-2

#: Hyperparameter search box, suited to standardized targets on [0,1] inputs.
LENGTHSCALE_BOUNDS = (0.01, 10.0)
SIGNAL_VARIANCE_BOUNDS = (0.01, 100.0)
NOISE_VARIANCE_BOUNDS = (1e-8, 1.0)

_FIT_SWEEPS = 3
_FIT_LINE_ITERS = 10

_LOG_2PI = math.log(2.0 * math.pi)


class NumericalError(ArithmeticError):
    """Kernel matrix could not be factorized even after jitter escalation."""


@dataclass(frozen=True)
class Dataset:
    """Normalized inputs with standardized targets.

    ``raw_mean``/``raw_std`` de-standardize: raw = raw_mean + raw_std * y.
    """

    inputs: np.ndarray    # (t, d), every coordinate in [0, 1]
    targets: np.ndarray   # (t,), standardized
    raw_mean: float
    raw_std: float

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def dims(self) -> int:
        return self.inputs.shape[1]

    @classmethod
    def from_raw(cls, inputs, raw_targets) -> "Dataset":
        """Standardize raw target values to zero mean, unit variance.

        With fewer than two points, or all-equal targets, the scale is
        pinned to 1 so de-standardization stays well defined.
        """
        X = np.atleast_2d(np.asarray(inputs, dtype=float))
        y = np.asarray(raw_targets, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} inputs vs {y.shape[0]} targets")
        if X.size and (X.min() < -1e-9 or X.max() > 1.0 + 1e-9):
            raise ValueError("inputs must lie in the unit cube")
        X = np.clip(X, 0.0, 1.0)
        mean = float(y.mean()) if len(y) else 0.0
        std = float(y.std()) if len(y) >= 2 else 0.0
        if std <= 1e-12:
            std = 1.0
        return cls(inputs=X, targets=(y - mean) / std, raw_mean=mean, raw_std=std)


@dataclass(frozen=True)
class GPHyperparams:
    lengthscales: tuple[float, ...]
    signal_variance: float
    noise_variance: float

    def __post_init__(self):
        if any(not v > 0.0 for v in self.lengthscales) or not self.signal_variance > 0.0:
            raise ValueError("lengthscales and signal_variance must be positive")
        if self.noise_variance < JITTER_FLOOR:
            raise ValueError(f"noise_variance below the jitter floor {JITTER_FLOOR}")


def default_hyperparams(dims: int) -> GPHyperparams:
    return GPHyperparams(lengthscales=(1.0,) * dims, signal_variance=1.0, noise_variance=1e-6)


@dataclass(frozen=True)
class GPModel:
    """Fitted posterior state: Cholesky factor of K + noise*I and the
    solved weights alpha = (K + noise*I)^-1 y.

    ``chol``/``alpha`` are ``None`` for a prior-only model (fewer than two
    observations), in which case predictions fall back to the prior.
    """

    hyper: GPHyperparams
    dataset: Dataset
    chol: np.ndarray | None
    alpha: np.ndarray | None

    def predict(self, x) -> tuple[float, float]:
        mean, var = predict_batch(self, np.atleast_2d(np.asarray(x, dtype=float)))
        return float(mean[0]), float(var[0])

    def to_raw(self, mean: float, var: float) -> tuple[float, float]:
        """De-standardize a posterior (mean, variance) pair."""
        return (
            self.dataset.raw_mean + self.dataset.raw_std * mean,
            self.dataset.raw_std ** 2 * var,
        )


def kernel_matrix(hyper: GPHyperparams, X: np.ndarray, X2: np.ndarray | None = None) -> np.ndarray:
    """Squared-exponential ARD kernel:
    k(x, x') = signal_variance * exp(-1/2 sum_d ((x_d - x'_d) / l_d)^2)."""
    ell = np.asarray(hyper.lengthscales, dtype=float)
    A = np.atleast_2d(np.asarray(X, dtype=float)) / ell
    B = A if X2 is None else np.atleast_2d(np.asarray(X2, dtype=float)) / ell
    d2 = cdist(A, B, "sqeuclidean")
    return hyper.signal_variance * np.exp(-0.5 * d2)


def kernel_eval(hyper: GPHyperparams, x, x2) -> float:
    """Kernel value between two single points."""
    return float(kernel_matrix(hyper, np.atleast_2d(x), np.atleast_2d(x2))[0, 0])


def _chol_with_jitter(K: np.ndarray, noise_variance: float) -> tuple[np.ndarray, float]:
    """Cholesky of K + nv*I, escalating nv tenfold up to JITTER_CEIL on
    failure. Returns the factor and the noise actually used."""
    nv = max(noise_variance, JITTER_FLOOR)
    eye = np.eye(K.shape[0])
    while True:
        try:
            return np.linalg.cholesky(K + nv * eye), nv
        except np.linalg.LinAlgError:
            if nv >= JITTER_CEIL:
                raise NumericalError(
                    f"factorization failed with noise escalated to {nv:g}"
                ) from None
            nv = min(nv * 10.0, JITTER_CEIL)


def _pairwise_sqdiffs(X: np.ndarray) -> np.ndarray:
    """Per-dimension squared differences, shape (t, t, d); reused across
    many likelihood evaluations during fitting."""
    return (X[:, None, :] - X[None, :, :]) ** 2


def _lml_from_sqdiffs(
    sqdiffs: np.ndarray, targets: np.ndarray, hyper: GPHyperparams
) -> float:
    ell = np.asarray(hyper.lengthscales, dtype=float)
    K = hyper.signal_variance * np.exp(-0.5 * (sqdiffs @ (1.0 / ell**2)))
    chol, _ = _chol_with_jitter(K, hyper.noise_variance)
    alpha = cho_solve((chol, True), targets, check_finite=False)
    return float(
        -0.5 * targets @ alpha
        - np.log(np.diag(chol)).sum()
        - 0.5 * len(targets) * _LOG_2PI
    )


def log_marginal_likelihood(hyper: GPHyperparams, dataset: Dataset) -> float:
    """GP evidence on standardized targets:
    -1/2 y^T alpha - sum log diag(chol) - t/2 log 2pi."""
    t = len(dataset)
    if t < 1:
        raise ValueError("log marginal likelihood needs at least one observation")
    return _lml_from_sqdiffs(_pairwise_sqdiffs(dataset.inputs), dataset.targets, hyper)


def build_model(hyper: GPHyperparams, dataset: Dataset) -> GPModel:
    """Condition a GP with fixed hyperparameters on the dataset.

    If jitter escalation was needed, the stored hyperparameters carry the
    escalated noise so the model state is reproducible from them.
    """
    if len(dataset) == 0:
        return GPModel(hyper=hyper, dataset=dataset, chol=None, alpha=None)
    K = kernel_matrix(hyper, dataset.inputs)
    chol, nv = _chol_with_jitter(K, hyper.noise_variance)
    if nv != hyper.noise_variance:
        hyper = replace(hyper, noise_variance=nv)
    alpha = cho_solve((chol, True), dataset.targets, check_finite=False)
    return GPModel(hyper=hyper, dataset=dataset, chol=chol, alpha=alpha)


def predict_batch(model: GPModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance (standardized units) at each row of X.

    Variance is the latent-function variance, clamped at zero against
    factorization round-off.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    sv = model.hyper.signal_variance
    if model.chol is None:
        n = X.shape[0]
        return np.zeros(n), np.full(n, sv)
    k_star = kernel_matrix(model.hyper, model.dataset.inputs, X)   # (t, n)
    mean = k_star.T @ model.alpha
    v = solve_triangular(model.chol, k_star, lower=True, check_finite=False)
    var = np.maximum(sv - (v * v).sum(axis=0), 0.0)
    return mean, var


def predict(model: GPModel, x) -> tuple[float, float]:
    """Posterior (mean, variance) at a single point, standardized units."""
    return model.predict(x)


def _log_bounds(dims: int) -> tuple[np.ndarray, np.ndarray]:
    lo = np.log([LENGTHSCALE_BOUNDS[0]] * dims + [SIGNAL_VARIANCE_BOUNDS[0], NOISE_VARIANCE_BOUNDS[0]])
    hi = np.log([LENGTHSCALE_BOUNDS[1]] * dims + [SIGNAL_VARIANCE_BOUNDS[1], NOISE_VARIANCE_BOUNDS[1]])
    return lo, hi


def _hyper_from_log(theta: np.ndarray, dims: int) -> GPHyperparams:
    values = np.exp(theta)
    return GPHyperparams(
        lengthscales=tuple(float(v) for v in values[:dims]),
        signal_variance=float(values[dims]),
        noise_variance=max(float(values[dims + 1]), JITTER_FLOOR),
    )


def fit(
    dataset: Dataset,
    n_restarts: int = 5,
    seed: int = 0,
    warm_start: GPHyperparams | None = None,
) -> GPModel:
    """Maximize the log marginal likelihood over log-hyperparameters.

    Multi-start coordinate-wise golden-section ascent: ``n_restarts``
    starts drawn uniformly from the log search box, plus ``warm_start``
    (clipped into the box) prepended when given. Best evidence wins; exact
    ties go to the earliest start. With fewer than two observations the
    prior-only model with default hyperparameters is returned.
    """
    dims = dataset.dims
    if len(dataset) < 2:
        return GPModel(
            hyper=default_hyperparams(dims), dataset=dataset, chol=None, alpha=None
        )

    lo, hi = _log_bounds(dims)
    sqdiffs = _pairwise_sqdiffs(dataset.inputs)

    def objective(theta: np.ndarray) -> float:
        try:
            return _lml_from_sqdiffs(sqdiffs, dataset.targets, _hyper_from_log(theta, dims))
        except NumericalError:
            return -math.inf

    starts = []
    if warm_start is not None:
        logs = np.log(
            np.array(
                list(warm_start.lengthscales)
                + [warm_start.signal_variance, warm_start.noise_variance]
            )
        )
        starts.append(np.clip(logs, lo, hi))
    rng = np.random.default_rng(seed)
    starts.extend(rng.uniform(lo, hi, size=(n_restarts, dims + 2)))

    best_theta = None
    best_value = -math.inf
    for theta0 in starts:
        theta, value = coordinate_ascent(
            objective, theta0, lo, hi, sweeps=_FIT_SWEEPS, line_iters=_FIT_LINE_ITERS
        )
        if value > best_value:
            best_theta, best_value = theta, value
    if best_theta is None or not math.isfinite(best_value):
        raise NumericalError("all hyperparameter restarts failed to factorize")
    return build_model(_hyper_from_log(best_theta, dims), dataset)
