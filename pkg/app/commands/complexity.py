"""``complexity``: per-candidate complexity/fitness table and its rank correlation."""
import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from app.commands.common import require, write_csv, write_json, write_manifest
from app.exceptions import MetricError
from app.metrics.ranking import spearman_arrays
from app.models.complexity import ComplexityReport
from app.models.evolution import EvolutionRun
from app.storage.run_store import load_run

logger = logging.getLogger(__name__)

ROW_COLUMNS = ("run", "candidate_id", "round", *ComplexityReport.FIELDS, "fitness",
               "dataset_digest")


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("complexity", help="complexity versus fitness of run candidates")
    parser.add_argument("--run", action="append", default=[], dest="runs",
                        help="run directory (repeatable)")
    parser.add_argument("-o", "--output", type=Path, help="CSV rows; the summary goes beside it")
    parser.set_defaults(func=run)
    return parser


def complexity_summary(run: EvolutionRun) -> Dict[str, Optional[float]]:
    """Spearman correlation of each complexity proxy with fitness; None when undefined."""
    scored = [c for c in run.valid_candidates if c.complexity is not None]
    fitness = np.array([c.fitness for c in scored], dtype=np.float64)
    summary: Dict[str, Optional[float]] = {}
    for field in ComplexityReport.FIELDS:
        values = np.array([getattr(c.complexity, field) for c in scored], dtype=np.float64)
        try:
            summary[field] = spearman_arrays(values, fitness)
        except MetricError:
            summary[field] = None
    return summary


def run(args: argparse.Namespace) -> int:
    require(args, "runs", "output")
    rows: List[list] = []
    summaries = []
    digests: Dict[str, str] = {}
    for run_dir in args.runs:
        stored = load_run(run_dir)
        label = Path(run_dir).name
        digest = stored.dataset_digest or ""
        digests[label] = digest
        for candidate in stored.valid_candidates:
            if candidate.complexity is None:
                continue
            report = candidate.complexity
            rows.append([label, candidate.id, candidate.round,
                         *(getattr(report, field) for field in ComplexityReport.FIELDS),
                         candidate.fitness, digest])
        summary = complexity_summary(stored)
        summaries.append({"run": label, "candidates": len(stored.valid_candidates),
                          "spearman_with_fitness": summary})
        logger.info(f"{label}: spearman(halstead_volume, fitness) = {summary['halstead_volume']}")

    output = Path(args.output)
    write_csv(output, ROW_COLUMNS, rows)
    write_json(
        output.with_name(f"{output.stem}.summary.json"),
        {"runs": summaries, "dataset_digests": digests},
    )
    write_manifest(output, args, digests)
    return 0
