"""``logreg``: supervised logistic-regression reference over the feature catalog."""
import argparse
import logging
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from app.commands.common import load_inputs, require, write_json, write_manifest
from app.data.arrays import quality_array
from app.data.store import split_dataset
from app.estimators.catalog import feature_matrix
from app.estimators.spec import EstimatorKind, EstimatorSpec, load_estimator
from app.exceptions import EstimatorError, UsageError
from app.metrics.ranking import roc_auc_score
from app.models.dataset import TaskType
from app.stats.logistic import (
    ORIENTATIONS,
    LogisticFit,
    coefficient_correlation,
    fit_logistic_regression,
)

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("logreg", help="fit logistic regression on catalog features")
    parser.add_argument("--train", help="training dataset (binary)")
    parser.add_argument("--test", help="test dataset; default: split --train")
    parser.add_argument("--train-fraction", type=float, default=0.7)
    parser.add_argument("--seed", type=int, default=0, help="split seed")
    parser.add_argument("--feature", action="append", dest="features",
                        help="catalog feature (repeatable, default: all)")
    parser.add_argument("--l2", type=float, default=1e-3)
    parser.add_argument("--max-iter", type=int, default=100)
    parser.add_argument("--spec", help="linear EstimatorSpec JSON to correlate coefficients with")
    parser.add_argument("--spec-orientation", choices=list(ORIENTATIONS), default="uncertainty")
    parser.add_argument("-o", "--output", type=Path, help="JSON report")
    parser.set_defaults(func=run)
    return parser


def _spec_weights(spec: EstimatorSpec, names) -> np.ndarray:
    """Spec weights reordered to ``names``; features the spec omits weigh 0."""
    if spec.kind != EstimatorKind.LINEAR:
        raise UsageError(f"--spec must be a linear estimator, got {spec.kind.value}")
    weights = dict(zip(spec.params["feature_names"], spec.params["weights"]))
    extra = sorted(set(weights) - set(names))
    if extra:
        raise UsageError(f"--spec uses features outside the fitted set: {', '.join(extra)}")
    return np.array([weights.get(name, 0.0) for name in names], dtype=np.float64)


def _auc(fit: LogisticFit, matrix: np.ndarray, labels: np.ndarray) -> float:
    # the fit predicts correctness; uncertainty is its negation
    return roc_auc_score(-fit.decision_function(matrix), labels)


def run(args: argparse.Namespace) -> int:
    require(args, "train", "output")
    train, train_digest = load_inputs([args.train], TaskType.BINARY)[0]
    digests: Dict[str, str] = {Path(args.train).name: train_digest}
    if args.test:
        test, test_digest = load_inputs([args.test], TaskType.BINARY)[0]
        digests[Path(args.test).name] = test_digest
    else:
        train, test = split_dataset(train, args.train_fraction, args.seed)

    names, x_train = feature_matrix(train, args.features)
    _, x_test = feature_matrix(test, names)
    y_train = quality_array(train)
    y_test = quality_array(test)
    fit = fit_logistic_regression(x_train, y_train, l2=args.l2, max_iter=args.max_iter)
    if not fit.converged:
        logger.warning(f"Logistic regression stopped after {fit.iterations} iterations")

    correlation: Optional[float] = None
    if args.spec:
        try:
            spec = load_estimator(args.spec)
        except EstimatorError as e:
            raise UsageError(str(e)) from e
        correlation = coefficient_correlation(
            _spec_weights(spec, names),
            fit.weights,
            evo_orientation=args.spec_orientation,
            logreg_orientation="confidence",
        )

    report = {
        "feature_names": list(names),
        "weights": dict(zip(names, fit.weights)),
        "bias": fit.bias,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "train_roc_auc": _auc(fit, x_train, y_train),
        "test_roc_auc": _auc(fit, x_test, y_test),
        "coefficient_correlation": correlation,
        "dataset_digests": digests,
    }
    logger.info(
        f"Logistic regression: train ROC-AUC {report['train_roc_auc']:.4f}, "
        f"test ROC-AUC {report['test_roc_auc']:.4f}"
    )
    output = Path(args.output)
    write_json(output, report)
    write_manifest(output, args, digests)
    return 0
