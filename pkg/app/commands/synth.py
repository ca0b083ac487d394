"""``synth``: write a planted synthetic dataset."""
import argparse
import logging
from pathlib import Path

from app.commands.common import require, write_manifest
from app.data.store import dataset_digest, write_dataset
from app.exceptions import DatasetError, UsageError
from app.models.dataset import TaskType
from app.utils.synthetic_data import generate_synthetic, parse_planted

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("synth", help="generate a synthetic dataset")
    parser.add_argument("--n", type=int, default=1000, help="number of samples")
    parser.add_argument("--min-len", type=int, default=5)
    parser.add_argument("--max-len", type=int, default=40)
    parser.add_argument(
        "--planted", action="append", default=[], metavar="FEATURE=WEIGHT",
        help="planted weight of a catalog feature (repeatable)",
    )
    parser.add_argument("--noise", type=float, default=0.5)
    parser.add_argument("--task", choices=[t.value for t in TaskType], default="binary")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--channel", action="append", default=[], dest="channels",
                        help="distractor channel name (repeatable)")
    parser.add_argument("--name", help="dataset name (default: output file stem)")
    parser.add_argument("-o", "--output", type=Path)
    parser.set_defaults(func=run)
    return parser


def run(args: argparse.Namespace) -> int:
    require(args, "output")
    try:
        planted = parse_planted(args.planted)
    except DatasetError as e:
        raise UsageError(str(e)) from e
    if not planted:
        raise UsageError("at least one --planted FEATURE=WEIGHT is required")

    output = Path(args.output)
    dataset = generate_synthetic(
        n_samples=args.n,
        min_len=args.min_len,
        max_len=args.max_len,
        planted_weights=planted,
        noise=args.noise,
        task=TaskType(args.task),
        seed=args.seed,
        channels=args.channels,
        name=args.name or output.stem,
    )
    write_dataset(dataset, output)
    write_manifest(output, args, {output.name: dataset_digest(dataset)})
    return 0
