"""Pytest configuration and fixtures."""
from typing import Dict, List, Optional, Sequence

import numpy as np
import pytest

from app.data.store import build_dataset
from app.dsl.grammar import COMPARISONS, ELEMENTWISE, REDUCTIONS
from app.dsl.nodes import BinOp, Call, Channel, Let, Name, Neg, Node, Num
from app.models.dataset import Dataset, SequenceSample, TaskType, TokenFeatures
from app.utils.synthetic_data import generate_synthetic

PLANTED_WEIGHTS = {"last_logprob": 3.0, "pos_corr": -0.5}


def make_sample(
    sample_id: str,
    logprobs: Sequence[float],
    quality: float,
    entropies: Optional[Sequence[float]] = None,
    channels: Optional[Dict[str, Sequence[float]]] = None,
) -> SequenceSample:
    """Build a sample from per-token lists."""
    entropies = entropies if entropies is not None else [abs(lp) for lp in logprobs]
    channels = channels or {}
    tokens = [
        TokenFeatures(
            lp=lp,
            ent=ent,
            ch={name: float(values[i]) for name, values in channels.items()},
        )
        for i, (lp, ent) in enumerate(zip(logprobs, entropies))
    ]
    return SequenceSample(id=sample_id, tokens=tokens, quality=quality)


def make_dataset(
    samples: List[SequenceSample], task: TaskType = TaskType.BINARY, name: str = "tiny"
) -> Dataset:
    return build_dataset(name, task, samples, frozenset())


def random_samples(rng: np.random.Generator, count: int, max_len: int = 30) -> List[SequenceSample]:
    """Random samples with alternating 0/1 quality."""
    samples = []
    for i in range(count):
        length = int(rng.integers(1, max_len + 1))
        logprobs = list(-rng.gamma(2.0, 0.7, size=length))
        entropies = list(rng.gamma(2.0, 0.5, size=length))
        samples.append(make_sample(f"s{i}", logprobs, float(i % 2), entropies))
    return samples


def _random_number(rng: np.random.Generator) -> Num:
    kind = int(rng.integers(3))
    if kind == 0:
        return Num(float(rng.integers(0, 11)))
    if kind == 1:
        return Num(round(float(rng.uniform(0.0, 5.0)), 3))
    return Num(float(10.0 ** rng.uniform(-6.0, 6.0)))


def random_array_ast(rng: np.random.Generator, depth: int, scope: Dict[str, str]) -> Node:
    leaves: List[Node] = [Name("lp"), Name("ent"), Name("pos"), Channel("extra")]
    leaves += [Name(name) for name, kind in scope.items() if kind == "array"]
    if depth <= 0 or rng.random() < 0.3:
        return leaves[int(rng.integers(len(leaves)))]
    form = int(rng.integers(5))
    if form == 0:
        fn = ELEMENTWISE[int(rng.integers(len(ELEMENTWISE)))]
        return Call(fn, (random_array_ast(rng, depth - 1, scope),))
    if form == 1:
        op = ["+", "-", "*", "/", "^", *COMPARISONS][int(rng.integers(5 + len(COMPARISONS)))]
        other = (
            random_scalar_ast(rng, depth - 1, scope)
            if rng.random() < 0.5
            else random_array_ast(rng, depth - 1, scope)
        )
        return BinOp(op, random_array_ast(rng, depth - 1, scope), other)
    if form == 2:
        return Neg(random_array_ast(rng, depth - 1, scope))
    if form == 3:
        return Call("weights_exp", (random_scalar_ast(rng, depth - 1, scope),))
    return Call(
        "clip",
        (
            random_array_ast(rng, depth - 1, scope),
            random_scalar_ast(rng, depth - 1, scope),
            random_scalar_ast(rng, depth - 1, scope),
        ),
    )


def random_scalar_ast(
    rng: np.random.Generator, depth: int, scope: Optional[Dict[str, str]] = None
) -> Node:
    """Random well-typed scalar expression (the shape every program must have)."""
    scope = scope or {}
    if depth <= 0 or rng.random() < 0.2:
        leaves: List[Node] = [_random_number(rng), Name("n")]
        leaves += [Name(name) for name, kind in scope.items() if kind == "scalar"]
        fn = REDUCTIONS[int(rng.integers(len(REDUCTIONS)))]
        leaves.append(Call(fn, (random_array_ast(rng, 0, scope),)))
        return leaves[int(rng.integers(len(leaves)))]
    form = int(rng.integers(7))
    if form == 0:
        op = ["+", "-", "*", "/", "^", *COMPARISONS][int(rng.integers(5 + len(COMPARISONS)))]
        return BinOp(
            op, random_scalar_ast(rng, depth - 1, scope), random_scalar_ast(rng, depth - 1, scope)
        )
    if form == 1:
        return Neg(random_scalar_ast(rng, depth - 1, scope))
    if form == 2:
        fn = REDUCTIONS[int(rng.integers(len(REDUCTIONS)))]
        return Call(fn, (random_array_ast(rng, depth - 1, scope),))
    if form == 3:
        fn = ELEMENTWISE[int(rng.integers(len(ELEMENTWISE)))]
        return Call(fn, (random_scalar_ast(rng, depth - 1, scope),))
    if form == 4:
        fn = "corr" if rng.random() < 0.5 else "dot"
        return Call(
            fn, (random_array_ast(rng, depth - 1, scope), random_array_ast(rng, depth - 1, scope))
        )
    if form == 5:
        return Call("if", tuple(random_scalar_ast(rng, depth - 1, scope) for _ in range(3)))
    name = f"v{len(scope)}"
    if rng.random() < 0.5:
        value, kind = random_scalar_ast(rng, depth - 1, scope), "scalar"
    else:
        value, kind = random_array_ast(rng, depth - 1, scope), "array"
    return Let(name, value, random_scalar_ast(rng, depth - 1, {**scope, name: kind}))


@pytest.fixture
def tiny_dataset() -> Dataset:
    """Six hand-built binary samples; incorrect ones have lower log-probabilities."""
    return make_dataset(
        [
            make_sample("a", [-0.1, -0.2], 1.0),
            make_sample("b", [-2.0, -1.5, -3.0], 0.0),
            make_sample("c", [-0.3], 1.0),
            make_sample("d", [-1.0, -4.0], 0.0),
            make_sample("e", [-0.05, -0.1, -0.2, -0.1], 1.0),
            make_sample("f", [-2.5], 0.0),
        ]
    )


@pytest.fixture(scope="session")
def planted_dataset() -> Dataset:
    """Binary synthetic set whose quality is driven by the last log-probability."""
    return generate_synthetic(
        n_samples=400,
        min_len=5,
        max_len=30,
        planted_weights=PLANTED_WEIGHTS,
        noise=0.3,
        task=TaskType.BINARY,
        seed=11,
        name="planted",
    )


@pytest.fixture
def run_dir(tmp_path):
    """Fresh directory for an evolution run."""
    return tmp_path / "run"
