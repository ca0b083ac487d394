"""Parsed, type-checked candidate programs."""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, FrozenSet

from app.data.arrays import SampleArrays, SampleLike, as_arrays
from app.dsl.evaluator import compile_program
from app.dsl.nodes import Channel, Node, walk
from app.dsl.parser import parse_expression
from app.dsl.printer import to_source
from app.dsl.typecheck import type_check


@dataclass(frozen=True, eq=False)
class Program:
    """Source text plus typed AST. Two programs are equal when their ASTs are."""

    source: str
    ast: Node
    result_type: str = field(default="scalar")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Program) and self.ast == other.ast

    def __hash__(self) -> int:
        return hash(self.ast)

    @classmethod
    def from_ast(cls, ast: Node) -> "Program":
        result_type = type_check(ast)
        return cls(source=to_source(ast), ast=ast, result_type=result_type)

    @cached_property
    def canonical(self) -> str:
        return to_source(self.ast)

    @cached_property
    def _compiled(self) -> Callable[[SampleArrays], float]:
        return compile_program(self.ast)

    @cached_property
    def channels(self) -> FrozenSet[str]:
        return frozenset(node.name for node in walk(self.ast) if isinstance(node, Channel))

    def evaluate(self, sample: SampleLike) -> float:
        return self._compiled(as_arrays(sample))


def parse(source: str) -> Program:
    """Parse and type-check ``source``.

    Raises:
        DSLSyntaxError: malformed source (offset and expected tokens attached)
        DSLNameError: unknown identifier or function
        DSLTypeError: type mismatch or non-scalar result
    """
    ast = parse_expression(source)
    return Program(source=source, ast=ast, result_type=type_check(ast))


def evaluate(program: Program, sample: SampleLike) -> float:
    """Total evaluation of ``program`` on one sample.

    Raises:
        UnknownChannelError: the program reads a channel the sample does not carry
    """
    return program.evaluate(sample)
