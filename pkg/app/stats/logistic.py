"""Deterministic L2-regularized logistic regression and coefficient comparison."""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import expit

from app.estimators.catalog import FeatureVector
from app.exceptions import MetricError, StatsError
from app.metrics.ranking import pearson

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-12


class LogisticFit(BaseModel):
    """Fitted weights, bias and optimizer diagnostics."""

    weights: List[float]
    bias: float
    converged: bool
    iterations: int
    loss_trace: List[float] = Field(default_factory=list)
    feature_names: Optional[List[str]] = None

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        """Log-odds of label 1 for each row of ``features``."""
        return np.asarray(features, dtype=np.float64) @ np.array(self.weights) + self.bias


def logistic_loss(
    weights: np.ndarray, bias: float, features: np.ndarray, labels: np.ndarray, l2: float
) -> float:
    """Mean negative log-likelihood plus ``l2 / 2 * ||weights||^2`` (bias unpenalized)."""
    z = features @ weights + bias
    nll = np.mean(np.logaddexp(0.0, z) - labels * z)
    return float(nll + 0.5 * l2 * np.dot(weights, weights))


def logistic_gradient(
    weights: np.ndarray, bias: float, features: np.ndarray, labels: np.ndarray, l2: float
) -> Tuple[np.ndarray, float]:
    """Gradient of ``logistic_loss`` with respect to (weights, bias)."""
    residual = expit(features @ weights + bias) - labels
    n = labels.shape[0]
    return features.T @ residual / n + l2 * weights, float(np.sum(residual) / n)


def _design(
    features: Union[np.ndarray, Sequence[FeatureVector]],
) -> Tuple[np.ndarray, Optional[List[str]]]:
    if isinstance(features, np.ndarray):
        return np.asarray(features, dtype=np.float64), None
    features = list(features)
    if not features:
        raise StatsError("no training rows")
    names = features[0].names
    if any(vector.names != names for vector in features):
        raise StatsError("feature vectors use inconsistent feature orderings")
    return np.array([vector.values for vector in features], dtype=np.float64), list(names)


def fit_logistic_regression(
    features: Union[np.ndarray, Sequence[FeatureVector]],
    labels: Sequence[float],
    l2: float = 1e-3,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> LogisticFit:
    """
    Fit by Newton's method with backtracking line search from a zero start.

    Args:
        features: (n, d) matrix or feature vectors sharing one ordering
        labels: 0/1 targets with both classes present
        l2: ridge penalty on the weights (>= 0)
        tol: convergence threshold on the gradient max-norm
        max_iter: Newton iteration cap

    Returns:
        LogisticFit; ``loss_trace`` is non-increasing and starts at the zero model
    """
    x, names = _design(features)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise StatsError(f"feature matrix shape {x.shape} does not match {y.shape[0]} labels")
    if not np.all(np.isfinite(x)):
        raise StatsError("non-finite feature values")
    if not np.all((y == 0.0) | (y == 1.0)):
        raise StatsError("labels must be 0 or 1")
    if np.all(y == y[0]):
        raise StatsError("labels contain a single class")
    if l2 < 0:
        raise StatsError(f"l2 must be >= 0, got {l2}")

    n, d = x.shape
    augmented = np.hstack([x, np.ones((n, 1))])
    penalty = np.diag(np.r_[np.full(d, l2), 0.0])
    theta = np.zeros(d + 1)

    def loss(params: np.ndarray) -> float:
        return logistic_loss(params[:d], params[d], x, y, l2)

    def gradient(params: np.ndarray) -> np.ndarray:
        grad_w, grad_b = logistic_gradient(params[:d], params[d], x, y, l2)
        return np.r_[grad_w, grad_b]

    trace = [loss(theta)]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        grad = gradient(theta)
        if np.max(np.abs(grad)) < tol:
            converged = True
            iterations -= 1
            break
        p = expit(augmented @ theta)
        hessian = (augmented.T * (p * (1.0 - p))) @ augmented / n + penalty
        hessian += 1e-10 * np.eye(d + 1)
        try:
            direction = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            direction = np.linalg.lstsq(hessian, grad, rcond=None)[0]

        step = 1.0
        slope = float(np.dot(grad, direction))
        while step > MIN_STEP:
            candidate = theta - step * direction
            candidate_loss = loss(candidate)
            if candidate_loss <= trace[-1] - ARMIJO * step * slope:
                break
            step *= 0.5
        else:
            logger.debug(f"Line search stalled at iteration {iterations}")
            converged = bool(np.max(np.abs(grad)) < tol)
            break
        theta = candidate
        trace.append(candidate_loss)
    else:
        converged = bool(np.max(np.abs(gradient(theta))) < tol)

    if not converged:
        logger.warning(
            f"Logistic regression stopped after {iterations} iterations without converging"
        )
    return LogisticFit(
        weights=[float(w) for w in theta[:d]],
        bias=float(theta[d]),
        converged=converged,
        iterations=iterations,
        loss_trace=trace,
        feature_names=names,
    )


ORIENTATIONS = ("uncertainty", "confidence")


def coefficient_correlation(
    w_evo: Sequence[float],
    w_logreg: Sequence[float],
    evo_orientation: str = "uncertainty",
    logreg_orientation: str = "uncertainty",
) -> float:
    """
    Pearson correlation of two coefficient vectors in the uncertainty orientation.

    A ``confidence`` vector (weights that predict correctness, as logistic regression on
    quality labels does) is negated first.
    """
    if len(w_evo) != len(w_logreg):
        raise StatsError(f"length mismatch: {len(w_evo)} vs {len(w_logreg)}")
    aligned = []
    for vector, orientation in ((w_evo, evo_orientation), (w_logreg, logreg_orientation)):
        if orientation not in ORIENTATIONS:
            raise StatsError(f"orientation must be one of {ORIENTATIONS}, got '{orientation}'")
        array = np.asarray(vector, dtype=np.float64)
        aligned.append(-array if orientation == "confidence" else array)
    try:
        return pearson(aligned[0], aligned[1])
    except MetricError as e:
        raise StatsError(f"coefficient correlation undefined: {e}") from e
