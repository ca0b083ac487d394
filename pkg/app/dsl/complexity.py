"""Complexity proxies: line count, AST size, operator counts, Halstead volume.

Halstead classification: identifiers, numeric constants and channel names are operands;
unary minus, binary operators, function applications (``ch`` included) and ``let`` are
operators.
"""
import math
from collections import Counter
from typing import List

from app.dsl.grammar import ENV_NAMES
from app.dsl.nodes import BinOp, Call, Channel, Let, Name, Neg, Node, Num, walk
from app.models.complexity import ComplexityReport


def halstead_counts(ast: Node):
    """(operator counter, operand counter) of ``ast``."""
    operators: Counter = Counter()
    operands: Counter = Counter()
    for node in walk(ast):
        if isinstance(node, Num):
            operands[("const", float(node.value))] += 1
        elif isinstance(node, Name):
            operands[("name", node.name)] += 1
        elif isinstance(node, Channel):
            operators["call:ch"] += 1
            operands[("channel", node.name)] += 1
        elif isinstance(node, Neg):
            operators["neg"] += 1
        elif isinstance(node, BinOp):
            operators[node.op] += 1
        elif isinstance(node, Call):
            operators[f"call:{node.fn}"] += 1
        elif isinstance(node, Let):
            operators["let"] += 1
            operands[("name", node.name)] += 1
    return operators, operands


def halstead_volume(ast: Node) -> float:
    operators, operands = halstead_counts(ast)
    length = sum(operators.values()) + sum(operands.values())
    vocabulary = len(operators) + len(operands)
    if vocabulary <= 1:
        return 0.0
    return length * math.log2(vocabulary)


def line_count(source: str) -> int:
    return sum(1 for line in source.splitlines() if line.strip())


def complexity(program) -> ComplexityReport:
    """Complexity report of a ``Program``; only ``line_count`` depends on layout."""
    nodes = list(walk(program.ast))
    return ComplexityReport(
        line_count=line_count(program.source),
        ast_nodes=len(nodes),
        unary_ops=sum(1 for node in nodes if isinstance(node, Neg)),
        binary_ops=sum(1 for node in nodes if isinstance(node, BinOp)),
        halstead_volume=halstead_volume(program.ast),
    )


def referenced_features(ast: Node) -> List[str]:
    """Distinct environment inputs and channels a program reads, sorted."""
    features = set()
    for node in walk(ast):
        if isinstance(node, Name) and node.name in ENV_NAMES:
            features.add(node.name)
        elif isinstance(node, Channel):
            features.add(f'ch("{node.name}")')
    return sorted(features)


def lint_feature_count(program, max_features: int) -> List[str]:
    """Warnings when a program reads more than ``max_features`` distinct inputs.

    Never a rejection rule: proposers routinely exceed such limits.
    """
    features = referenced_features(program.ast)
    if len(features) <= max_features:
        return []
    return [
        f"uses {len(features)} distinct features ({', '.join(features)}), "
        f"limit is {max_features}"
    ]
