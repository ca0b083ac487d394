"""AST node types for the candidate-scorer language.

Nodes are immutable and compare structurally, so two programs are the same program
exactly when their trees are equal.
"""
from dataclasses import dataclass
from typing import Iterator, Tuple, Union


@dataclass(frozen=True)
class Num:
    """Non-negative numeric literal; a leading minus parses as ``Neg``."""

    value: float


@dataclass(frozen=True)
class Name:
    """Environment binding (``lp``, ``ent``, ``pos``, ``n``) or let-bound variable."""

    name: str


@dataclass(frozen=True)
class Channel:
    """``ch("name")``: a named per-token channel."""

    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class Let:
    name: str
    value: "Node"
    body: "Node"


Node = Union[Num, Name, Channel, Neg, BinOp, Call, Let]


def children(node: Node) -> Tuple[Node, ...]:
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Call):
        return node.args
    if isinstance(node, Let):
        return (node.value, node.body)
    return ()


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal."""
    yield node
    for child in children(node):
        yield from walk(child)


def with_children(node: Node, new_children: Tuple[Node, ...]) -> Node:
    """Copy of ``node`` with its children replaced, in ``children`` order."""
    if isinstance(node, Neg):
        return Neg(new_children[0])
    if isinstance(node, BinOp):
        return BinOp(node.op, new_children[0], new_children[1])
    if isinstance(node, Call):
        return Call(node.fn, tuple(new_children))
    if isinstance(node, Let):
        return Let(node.name, new_children[0], new_children[1])
    return node


Path = Tuple[int, ...]


def paths(node: Node, prefix: Path = ()) -> Iterator[Tuple[Path, Node]]:
    """Every (path, subtree) pair; a path is the sequence of child indices."""
    yield prefix, node
    for index, child in enumerate(children(node)):
        yield from paths(child, prefix + (index,))


def replace_at(node: Node, path: Path, replacement: Node) -> Node:
    if not path:
        return replacement
    kids = list(children(node))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], replacement)
    return with_children(node, tuple(kids))


def subtree_at(node: Node, path: Path) -> Node:
    for index in path:
        node = children(node)[index]
    return node
