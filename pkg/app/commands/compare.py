"""``compare``: paired bootstrap comparison of two estimators across datasets."""
import argparse
import logging
from pathlib import Path

from app.commands.common import (
    default_task,
    load_inputs,
    require,
    resolve_estimators,
    write_json,
    write_manifest,
)
from app.config import settings
from app.estimators.spec import score_dataset
from app.metrics.fitness import check_metric_dataset
from app.models.dataset import TaskType
from app.models.scores import MetricName
from app.stats.bootstrap import paired_bootstrap, win_tie_loss

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("compare", help="significance test of A against B")
    parser.add_argument("--a", help="method A (built-in name or file)")
    parser.add_argument("--b", help="method B (built-in name or file)")
    parser.add_argument("--data", action="append", default=[], help="dataset (repeatable)")
    parser.add_argument("--task", choices=[t.value for t in TaskType])
    parser.add_argument("--metric", choices=[m.value for m in MetricName], default="roc_auc")
    parser.add_argument("--resamples", type=int, default=settings.bootstrap_resamples)
    parser.add_argument("--alpha", type=float, default=settings.bootstrap_alpha,
                        help="family-wise significance level")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-o", "--output", type=Path, help="report (.csv or .json)")
    parser.set_defaults(func=run)
    return parser


def run(args: argparse.Namespace) -> int:
    require(args, "a", "b", "data", "output")
    (label_a, spec_a), (label_b, spec_b) = resolve_estimators([args.a, args.b])
    inputs = load_inputs(args.data, default_task(args.metric, args.task))
    metric = MetricName(args.metric)

    results = []
    for dataset, _ in inputs:
        check_metric_dataset(metric, dataset)
        results.append(
            paired_bootstrap(
                metric,
                score_dataset(spec_a, dataset),
                score_dataset(spec_b, dataset),
                dataset,
                n_resamples=args.resamples,
                alpha=args.alpha,
                seed=args.seed,
            )
        )
    names = [dataset.name for dataset, _ in inputs]
    digests = {dataset.name: digest for dataset, digest in inputs}
    summary = win_tie_loss(results, names, alpha=args.alpha)
    logger.info(
        f"{label_a} vs {label_b}: {summary.wins} wins, {summary.ties} ties, "
        f"{summary.losses} losses at threshold {summary.threshold:.4g}"
    )

    output = Path(args.output)
    if output.suffix == ".json":
        write_json(
            output,
            {"a": label_a, "b": label_b, "metric": metric.value,
             **summary.model_dump(mode="json"), "dataset_digests": digests},
        )
    else:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(summary.to_csv(digests), encoding="utf-8")
        logger.info(f"Wrote {output}")
    write_manifest(
        output,
        args,
        digests,
        results={"wins": summary.wins, "ties": summary.ties, "losses": summary.losses},
    )
    return 0
