"""``evolve``: run or resume an evolutionary search."""
import argparse
import logging
from pathlib import Path
from typing import Tuple

from pydantic import ValidationError

from app.commands.common import default_task, load_inputs, require, write_manifest
from app.config import settings
from app.exceptions import UsageError
from app.graph.evaluation import count_semantic_duplicates
from app.graph.runner import run_evolution
from app.models.dataset import TaskType
from app.models.evolution import SEED_SOURCE, EvolutionConfig
from app.models.scores import MetricName
from app.utils.llm_client import HttpClientConfig, HttpMutationClient
from app.utils.llm_mock import MockMutationClient

logger = logging.getLogger(__name__)


def parse_parents(text: str) -> Tuple[int, int]:
    """``"1..4"`` -> (1, 4); ``"3"`` -> (3, 3)."""
    low, sep, high = str(text).partition("..")
    try:
        bounds = (int(low), int(high)) if sep else (int(low), int(low))
    except ValueError as e:
        raise UsageError(f"--parents expects N or LOW..HIGH, got '{text}'") from e
    return bounds


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("evolve", help="run an evolutionary search")
    parser.add_argument("--data", help="training dataset (JSONL)")
    parser.add_argument("--task", choices=[t.value for t in TaskType])
    parser.add_argument("--metric", choices=[m.value for m in MetricName], default="roc_auc")
    parser.add_argument("--rounds", type=int, default=500)
    parser.add_argument("--per-round", type=int, default=2, help="proposals per round")
    parser.add_argument("--parents", default="1..4", help="parents per prompt, N or LOW..HIGH")
    parser.add_argument("--top-percent", type=float, default=100.0)
    parser.add_argument("--t-cand", type=float, default=0.05, help="parent sampling temperature")
    parser.add_argument("--temperature", type=float, default=1.0, help="LLM temperature")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--no-dedup", action="store_true")
    parser.add_argument("--seed-source", default=SEED_SOURCE)
    parser.add_argument("--constraint", action="append", default=[], dest="constraints")
    parser.add_argument("--domain-knowledge", action="store_true")
    parser.add_argument("--allow-channel", action="append", dest="allowed_channels",
                        help="restrict candidates to these channels (repeatable)")
    parser.add_argument("--max-features", type=int)
    parser.add_argument("--client", choices=["mock", "http"], default="mock")
    parser.add_argument("--endpoint", default=settings.llm_endpoint)
    parser.add_argument("--model", default=settings.llm_model)
    parser.add_argument("--max-tokens", type=int, default=settings.llm_max_tokens)
    parser.add_argument("--retry-budget", type=int, default=settings.llm_retry_budget)
    parser.add_argument("--timeout", type=float, default=settings.llm_timeout)
    parser.add_argument("--api-key-env", default=settings.llm_api_key_env)
    parser.add_argument("--max-in-flight", type=int, default=settings.llm_max_in_flight)
    parser.add_argument("--resume", action="store_true", help="continue the run in -o")
    parser.add_argument("-o", "--output", type=Path, help="run directory")
    parser.set_defaults(func=run)
    return parser


def _config(args: argparse.Namespace) -> EvolutionConfig:
    parents_min, parents_max = parse_parents(args.parents)
    try:
        return EvolutionConfig(
            rounds=args.rounds,
            candidates_per_round=args.per_round,
            parents_min=parents_min,
            parents_per_prompt=parents_max,
            top_percent=args.top_percent,
            t_cand_sampling=args.t_cand,
            llm_temperature=args.temperature,
            fitness_metric=MetricName(args.metric),
            seed=args.seed if args.seed is not None else 0,
            dedup=not args.no_dedup,
            seed_source=args.seed_source,
            constraints=args.constraints,
            domain_knowledge=args.domain_knowledge,
            allowed_channels=args.allowed_channels,
            max_features=args.max_features,
            max_in_flight=args.max_in_flight,
        )
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise UsageError(f"invalid evolution setting {location}: {first['msg']}") from e


def _client(args: argparse.Namespace, config: EvolutionConfig):
    if args.client == "mock":
        return MockMutationClient(seed=config.seed)
    try:
        http_config = HttpClientConfig(
            endpoint=args.endpoint,
            model=args.model,
            temperature=config.llm_temperature,
            max_tokens=args.max_tokens,
            retry_budget=args.retry_budget,
            timeout=args.timeout,
            api_key_env=args.api_key_env,
            max_in_flight=config.max_in_flight,
        )
    except ValidationError as e:
        first = e.errors()[0]
        raise UsageError(f"invalid client setting {first['loc'][0]}: {first['msg']}") from e
    return HttpMutationClient(http_config)


def run(args: argparse.Namespace) -> int:
    require(args, "data", "output")
    if args.client == "mock" and args.seed is None:
        raise UsageError("--seed is required with the mock client")
    config = _config(args)
    client = _client(args, config)

    train, digest = load_inputs([args.data], default_task(args.metric, args.task))[0]
    result = run_evolution(config, train, client, args.output, resume=args.resume)

    best = result.best
    duplicates = count_semantic_duplicates(result)
    logger.info(
        f"Best candidate {best.id} ({best.fitness:.4f}): {best.source}; "
        f"{duplicates} semantic duplicates"
    )
    write_manifest(
        Path(args.output),
        args,
        {Path(args.data).name: digest},
        results={
            "candidates": len(result.candidates),
            "failed": sum(1 for c in result.candidates if c.failed),
            "best_candidate_id": best.id,
            "best_fitness": best.fitness,
            "best_source": best.source,
            "semantic_duplicates": duplicates,
        },
    )
    return 0
