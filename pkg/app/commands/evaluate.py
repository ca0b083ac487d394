"""``eval``: score estimators on datasets and report the metric per dataset."""
import argparse
import logging
from pathlib import Path
from typing import Dict, List

import numpy as np

from app.commands.common import (
    default_task,
    load_inputs,
    require,
    resolve_estimators,
    write_csv,
    write_json,
    write_manifest,
)
from app.config import settings
from app.data.arrays import quality_array
from app.estimators.spec import score_dataset
from app.metrics.fitness import check_metric_dataset, metric_fn
from app.models.dataset import TaskType
from app.models.scores import MetricName
from app.stats.bootstrap import bootstrap_interval

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("eval", help="evaluate estimators on datasets")
    parser.add_argument("--estimator", action="append", default=[], dest="estimators",
                        help="built-in name, .dsl/.uq program or .json spec (repeatable)")
    parser.add_argument("--data", action="append", default=[], help="dataset (repeatable)")
    parser.add_argument("--task", choices=[t.value for t in TaskType])
    parser.add_argument("--metric", choices=[m.value for m in MetricName], default="roc_auc")
    parser.add_argument("--ci", action="store_true", help="add bootstrap confidence intervals")
    parser.add_argument("--confidence", type=float, default=0.95)
    parser.add_argument("--resamples", type=int, default=settings.bootstrap_resamples)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-o", "--output", type=Path, help="report (.csv or .json)")
    parser.set_defaults(func=run)
    return parser


def run(args: argparse.Namespace) -> int:
    require(args, "estimators", "data", "output")
    estimators = resolve_estimators(args.estimators)
    inputs = load_inputs(args.data, default_task(args.metric, args.task))
    metric = MetricName(args.metric)
    for dataset, _ in inputs:
        check_metric_dataset(metric, dataset)
    fn = metric_fn(metric)

    names = [dataset.name for dataset, _ in inputs]
    digests = {dataset.name: digest for dataset, digest in inputs}
    report: List[Dict] = []
    for label, spec in estimators:
        values: Dict[str, float] = {}
        intervals: Dict[str, Dict[str, float]] = {}
        for dataset, _ in inputs:
            scores = score_dataset(spec, dataset)
            values[dataset.name] = float(fn(scores.as_array(), quality_array(dataset)))
            if args.ci:
                interval = bootstrap_interval(
                    metric, scores, dataset, n_resamples=args.resamples,
                    confidence=args.confidence, seed=args.seed,
                )
                intervals[dataset.name] = {"ci_low": interval.ci_low, "ci_high": interval.ci_high}
        mean = float(np.mean([values[name] for name in names]))
        report.append({"estimator": label, "values": values, "intervals": intervals, "mean": mean})
        logger.info(f"{label}: mean {metric.value} {mean:.4f} over {len(names)} datasets")

    output = Path(args.output)
    if output.suffix == ".json":
        write_json(output, {"metric": metric.value, "rows": report, "dataset_digests": digests})
    else:
        header = ["estimator", *names]
        if args.ci:
            header += [f"{name}_{bound}" for name in names for bound in ("ci_low", "ci_high")]
        header += ["mean", "dataset_digest"]
        rows = []
        for entry in report:
            row = [entry["estimator"], *(entry["values"][name] for name in names)]
            if args.ci:
                row += [entry["intervals"][name][bound]
                        for name in names for bound in ("ci_low", "ci_high")]
            row += [entry["mean"], ";".join(digests[name] for name in names)]
            rows.append(row)
        write_csv(output, header, rows)
    write_manifest(output, args, digests)
    return 0
