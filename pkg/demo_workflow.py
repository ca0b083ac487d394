#!/usr/bin/env python
"""
End-to-end demonstration of the uq-evolve pipeline.

This script demonstrates:
1. Generating a synthetic dataset with a planted scorer
2. Scoring the built-in baselines
3. Running a short evolutionary search with the offline mock mutator
4. Comparing the best evolved scorer against sequence probability

Usage:
    python demo_workflow.py
"""

import tempfile

from app.data.store import split_dataset
from app.dsl.program import parse
from app.estimators.spec import BUILTIN_ESTIMATORS, score_dataset
from app.graph.evaluation import count_semantic_duplicates, rank_by_validation
from app.graph.runner import run_evolution
from app.metrics.ranking import roc_auc
from app.models.dataset import TaskType
from app.models.evolution import EvolutionConfig
from app.models.scores import MetricName
from app.stats.bootstrap import paired_bootstrap
from app.utils.llm_mock import MockMutationClient
from app.utils.synthetic_data import generate_synthetic


def print_section(title: str):
    """Print a formatted section header."""
    print("\n" + "=" * 80)
    print(f"  {title}")
    print("=" * 80 + "\n")


def main():
    """Run the demonstration workflow."""

    print_section("uq-evolve - End-to-End Demonstration")

    # Step 1: Generate synthetic data
    print_section("Step 1: Generate Synthetic Data")
    dataset = generate_synthetic(
        n_samples=600,
        min_len=5,
        max_len=40,
        planted_weights={"last_logprob": 3.0, "pos_corr": -0.5},
        noise=0.3,
        task=TaskType.BINARY,
        seed=7,
    )
    train, test = split_dataset(dataset, train_fraction=0.7, seed=7)
    print(f"Generated {len(dataset)} samples; {len(train)} train, {len(test)} test")

    # Step 2: Score the baselines
    print_section("Step 2: Built-in Baselines")
    for name, spec in BUILTIN_ESTIMATORS.items():
        print(f"  {name:20s} test ROC-AUC {roc_auc(score_dataset(spec, test), test):.4f}")

    # Step 3: Evolve
    print_section("Step 3: Evolutionary Search (mock mutator)")
    print("Running the round workflow:")
    print("  → Supervisor Router")
    print("  → select_parents (softmax over the pool)")
    print("  → compose_prompt")
    print("  → propose (mutation client)")
    print("  → evaluate (fitness on the training split)\n")

    config = EvolutionConfig(rounds=60, t_cand_sampling=0.01, seed=1)
    with tempfile.TemporaryDirectory() as run_dir:
        run = run_evolution(config, train, MockMutationClient(seed=1), run_dir)

    best = run.best
    print(f"Pool size: {len(run.candidates)}")
    print(f"Semantic duplicates: {count_semantic_duplicates(run)}")
    print(f"Best training fitness: {best.fitness:.4f}")
    print(f"Best program: {best.source}")

    print("\nTop candidates on the test split:")
    for row in rank_by_validation(run, test, MetricName.ROC_AUC, top_k=3):
        print(f"  #{row.rank} ({row.validation_score:.4f}): {row.source}")

    # Step 4: Significance test
    print_section("Step 4: Paired Bootstrap against Sequence Probability")
    result = paired_bootstrap(
        MetricName.ROC_AUC,
        score_dataset(parse(best.source), test),
        score_dataset(BUILTIN_ESTIMATORS["seq_log_prob"], test),
        test,
        n_resamples=2000,
        seed=0,
    )
    print(f"  delta ROC-AUC: {result.delta:+.4f}  CI [{result.ci_low:+.4f}, {result.ci_high:+.4f}]")
    print(f"  p-value: {result.p_value:.4f}  verdict: {result.verdict.value}")

    print_section("Demo Complete!")
    print("Next steps:")
    print("  - Generate data: uq-evolve synth --planted mean_logprob=3.0 --seed 7 -o d.jsonl")
    print("  - Evolve: uq-evolve evolve --data d.jsonl --client mock --seed 1 --rounds 50 -o run/")
    print("  - Run tests: pytest tests/ -v")


if __name__ == "__main__":
    main()
