"""Random local AST edits: the offline stand-in for an LLM proposer."""
import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from app.dsl.grammar import REDUCTIONS
from app.dsl.nodes import (
    BinOp,
    Call,
    Name,
    Neg,
    Node,
    Num,
    Path,
    children,
    paths,
    replace_at,
    walk,
)
from app.dsl.program import Program
from app.dsl.typecheck import SCALAR, subtree_types, type_check
from app.exceptions import DSLError

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 20
MAX_NODES = 64

WRAPPERS = ("abs", "exp", "log", "sqrt", "tanh", "neg")


def _leaf_library() -> Tuple[Node, ...]:
    leaves: List[Node] = [
        Call(fn, (Name(array),)) for array in ("lp", "ent") for fn in REDUCTIONS
    ]
    leaves += [
        Call("corr", (Name("lp"), Name("pos"))),
        Call("corr", (Name("ent"), Name("pos"))),
        Call("corr", (Name("lp"), Name("ent"))),
        Call("dot", (Call("weights_exp", (Num(0.8),)), Name("lp"))),
        Name("n"),
    ]
    return tuple(leaves)


SPLICE_LEAVES = _leaf_library()

Mutation = Callable[[Node, np.random.Generator], Optional[Node]]


def _pick(rng: np.random.Generator, items: List):
    if not items:
        return None
    return items[int(rng.integers(len(items)))]


def _tidy(value: float) -> float:
    return float(f"{value:.4g}")


def perturb_constant(ast: Node, rng: np.random.Generator) -> Optional[Node]:
    chosen = _pick(rng, [(p, node) for p, node in paths(ast) if isinstance(node, Num)])
    if chosen is None:
        return None
    path, node = chosen
    scale = max(0.1, 0.5 * node.value)
    return replace_at(ast, path, Num(_tidy(abs(node.value + rng.normal(0.0, scale)))))


def swap_reduction(ast: Node, rng: np.random.Generator) -> Optional[Node]:
    chosen = _pick(
        rng, [(p, n) for p, n in paths(ast) if isinstance(n, Call) and n.fn in REDUCTIONS]
    )
    if chosen is None:
        return None
    path, node = chosen
    fn = _pick(rng, [r for r in REDUCTIONS if r != node.fn])
    return replace_at(ast, path, Call(fn, node.args))


def wrap_unary(ast: Node, rng: np.random.Generator) -> Optional[Node]:
    path, node = _pick(rng, list(paths(ast)))
    wrapper = _pick(rng, list(WRAPPERS))
    if wrapper == "neg":
        if isinstance(node, Neg):
            return None
        return replace_at(ast, path, Neg(node))
    return replace_at(ast, path, Call(wrapper, (node,)))


def splice_term(ast: Node, rng: np.random.Generator) -> Optional[Node]:
    """Replace a scalar subtree ``x`` by ``x + c * leaf`` or ``x - c * leaf``."""
    types = subtree_types(ast)
    path = _pick(rng, [p for p, _ in paths(ast) if types.get(p) == SCALAR])
    if path is None:
        return None
    node = dict(paths(ast))[path]
    leaf = _pick(rng, list(SPLICE_LEAVES))
    coefficient = _tidy(10.0 ** rng.uniform(-1.0, 1.0))
    op = "+" if rng.random() < 0.5 else "-"
    return replace_at(ast, path, BinOp(op, node, BinOp("*", Num(coefficient), leaf)))


def adjust_weight(ast: Node, rng: np.random.Generator) -> Optional[Node]:
    """Rescale a multiplicative coefficient or an exponential-weight decay."""
    weights = []
    for path, node in paths(ast):
        if isinstance(node, BinOp) and node.op == "*":
            weights += [(path + (i,), kid) for i, kid in enumerate(children(node))
                        if isinstance(kid, Num)]
        elif isinstance(node, Call) and node.fn == "weights_exp" and isinstance(node.args[0], Num):
            weights.append((path + (0,), node.args[0]))
    chosen = _pick(rng, weights)
    if chosen is None:
        return None
    path, node = chosen
    value = _tidy(node.value * float(np.exp(rng.normal(0.0, 0.3))))
    parent = dict(paths(ast))[path[:-1]]
    if isinstance(parent, Call):
        value = min(value, 1.0)
    return replace_at(ast, path, Num(value))


def prune(ast: Node, rng: np.random.Generator) -> Optional[Node]:
    """Replace an operator node by one of its operands."""
    chosen = _pick(
        rng,
        [(p, n) for p, n in paths(ast) if isinstance(n, (BinOp, Neg))
         or (isinstance(n, Call) and len(n.args) == 1 and n.fn not in REDUCTIONS)],
    )
    if chosen is None:
        return None
    path, node = chosen
    return replace_at(ast, path, _pick(rng, list(children(node))))


MUTATIONS: Tuple[Mutation, ...] = (
    perturb_constant,
    swap_reduction,
    wrap_unary,
    splice_term,
    adjust_weight,
    prune,
)


def mutate_random(program: Program, rng: np.random.Generator) -> Program:
    """
    Apply one random local edit that still type-checks.

    Args:
        program: parent program
        rng: seeded generator; the result is a pure function of its state

    Returns:
        The edited program, or ``program`` itself when every attempt failed
    """
    for _ in range(MAX_ATTEMPTS):
        mutation = MUTATIONS[int(rng.integers(len(MUTATIONS)))]
        candidate = mutation(program.ast, rng)
        if candidate is None or candidate == program.ast:
            continue
        if sum(1 for _ in walk(candidate)) > MAX_NODES:
            continue
        try:
            type_check(candidate)
        except DSLError:
            continue
        return Program.from_ast(candidate)
    logger.debug(f"No valid mutation of '{program.canonical}' after {MAX_ATTEMPTS} attempts")
    return program
