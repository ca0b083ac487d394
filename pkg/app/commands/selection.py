"""``select``: pick a run's top candidates by a validation metric."""
import argparse
import logging
from pathlib import Path

from app.commands.common import default_task, load_inputs, require, write_csv, write_manifest
from app.graph.evaluation import rank_by_validation
from app.metrics.fitness import check_metric_dataset
from app.models.dataset import TaskType
from app.models.evolution import ValidationRow
from app.models.scores import MetricName
from app.storage.run_store import load_run

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("select", help="rank run candidates on validation data")
    parser.add_argument("--run", help="run directory")
    parser.add_argument("--data", help="validation dataset")
    parser.add_argument("--task", choices=[t.value for t in TaskType])
    parser.add_argument("--metric", choices=[m.value for m in MetricName],
                        help="default: the run's fitness metric")
    parser.add_argument("--top-k", type=int, default=3)
    parser.add_argument("-o", "--output", type=Path, help="CSV report")
    parser.set_defaults(func=run)
    return parser


def run(args: argparse.Namespace) -> int:
    require(args, "run", "data", "output")
    stored = load_run(args.run)
    metric = MetricName(args.metric) if args.metric else stored.config.fitness_metric
    validation, digest = load_inputs([args.data], default_task(metric.value, args.task))[0]
    check_metric_dataset(metric, validation)

    ranked = rank_by_validation(stored, validation, metric, args.top_k)
    for row in ranked:
        logger.info(
            f"#{row.rank}: candidate {row.candidate_id} validation {row.validation_score:.4f} "
            f"(train {row.train_fitness:.4f})"
        )
    output = Path(args.output)
    columns = list(ValidationRow.model_fields)
    write_csv(
        output,
        [*columns, "dataset_digest"],
        ([*(getattr(row, name) for name in columns), digest] for row in ranked),
    )
    write_manifest(output, args, {Path(args.data).name: digest})
    return 0
