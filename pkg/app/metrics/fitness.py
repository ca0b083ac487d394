"""Registry of array-level fitness metrics."""
from typing import Callable, Dict

import numpy as np

from app.exceptions import MetricError
from app.metrics.ranking import roc_auc_score
from app.metrics.rejection import prr_score
from app.models.dataset import Dataset, TaskType
from app.models.scores import MetricName

MetricFn = Callable[[np.ndarray, np.ndarray], float]

FITNESS_METRICS: Dict[MetricName, MetricFn] = {
    MetricName.ROC_AUC: roc_auc_score,
    MetricName.PRR: prr_score,
}


def metric_fn(name) -> MetricFn:
    """Metric ``f(uncertainty, quality)`` registered under ``name``."""
    try:
        return FITNESS_METRICS[MetricName(name)]
    except ValueError as e:
        raise MetricError(f"unknown metric '{name}'") from e


def check_metric_dataset(name, dataset: Dataset) -> None:
    """Raise unless ``dataset`` can be scored with metric ``name``."""
    if MetricName(name) == MetricName.ROC_AUC and dataset.task != TaskType.BINARY:
        raise MetricError(
            f"roc_auc needs a binary dataset, '{dataset.name}' is {dataset.task.value}"
        )
