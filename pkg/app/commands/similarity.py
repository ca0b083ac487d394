"""``similarity``: Spearman similarity of methods to a reference, with performance."""
import argparse
import logging
from pathlib import Path
from typing import List, Optional, Tuple

from app.commands.common import (
    default_task,
    load_inputs,
    require,
    resolve_estimators,
    write_csv,
    write_manifest,
)
from app.data.arrays import quality_array
from app.dsl.program import parse
from app.estimators.spec import score_dataset
from app.exceptions import MetricError, UQEvoError, UsageError
from app.metrics.fitness import check_metric_dataset, metric_fn
from app.metrics.ranking import spearman
from app.models.dataset import TaskType
from app.models.scores import MetricName, ScoreVector
from app.storage.run_store import load_run

logger = logging.getLogger(__name__)

ROW_COLUMNS = ("method", "source", "similarity", "performance", "dataset_digest")


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("similarity", help="rank similarity to a reference method")
    parser.add_argument("--reference", default="seq_log_prob")
    parser.add_argument("--estimator", action="append", default=[], dest="estimators")
    parser.add_argument("--run", action="append", default=[], dest="runs",
                        help="run directory whose valid candidates are compared (repeatable)")
    parser.add_argument("--data", help="dataset the methods are scored on")
    parser.add_argument("--task", choices=[t.value for t in TaskType])
    parser.add_argument("--metric", choices=[m.value for m in MetricName], default="roc_auc")
    parser.add_argument("-o", "--output", type=Path, help="CSV rows; the matrix goes beside it")
    parser.set_defaults(func=run)
    return parser


def similarity_or_none(a: ScoreVector, b: ScoreVector) -> Optional[float]:
    try:
        return spearman(a, b)
    except MetricError:
        return None


def _methods(args: argparse.Namespace, dataset) -> List[Tuple[str, str, ScoreVector]]:
    """(name, source, scores) for every compared method except the reference."""
    methods = []
    for label, spec in resolve_estimators(args.estimators):
        source = spec.params.get("source", spec.kind.value)
        methods.append((label, source, score_dataset(spec, dataset)))
    for run_dir in args.runs:
        run = load_run(run_dir)
        prefix = Path(run_dir).name
        for candidate in run.valid_candidates:
            try:
                scores = score_dataset(parse(candidate.source), dataset)
            except UQEvoError as e:
                logger.warning(f"Candidate {candidate.id} of {run_dir} skipped: {e}")
                continue
            methods.append((f"{prefix}/candidate-{candidate.id}", candidate.source, scores))
    return methods


def run(args: argparse.Namespace) -> int:
    require(args, "data", "output")
    if not args.estimators and not args.runs:
        raise UsageError("give at least one --estimator or --run")
    dataset, digest = load_inputs([args.data], default_task(args.metric, args.task))[0]
    metric = MetricName(args.metric)
    check_metric_dataset(metric, dataset)
    fn = metric_fn(metric)
    quality = quality_array(dataset)

    reference_label, reference_spec = resolve_estimators([args.reference])[0]
    reference = score_dataset(reference_spec, dataset)
    methods = _methods(args, dataset)

    rows = [
        (name, source, similarity_or_none(scores, reference),
         float(fn(scores.as_array(), quality)), digest)
        for name, source, scores in methods
    ]
    rows.sort(key=lambda row: -row[3])

    output = Path(args.output)
    write_csv(output, ROW_COLUMNS, rows)

    everything = [(reference_label, reference)] + [(name, scores) for name, _, scores in methods]
    matrix = [
        [name, *(similarity_or_none(a, b) for _, b in everything)] for name, a in everything
    ]
    write_csv(
        output.with_name(f"{output.stem}.matrix.csv"),
        ["method", *(name for name, _ in everything)],
        matrix,
    )
    write_manifest(output, args, {Path(args.data).name: digest})
    return 0
