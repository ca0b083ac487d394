"""Name resolution and scalar/array type inference."""
from typing import Dict, Mapping, Optional

from app.dsl.grammar import (
    ELEMENTWISE,
    ENV_ARRAYS,
    ENV_NAMES,
    ENV_SCALARS,
    FUNCTION_ARITY,
    KEYWORDS,
    REDUCTIONS,
)
from app.dsl.nodes import BinOp, Call, Channel, Let, Name, Neg, Node, Num, Path, children
from app.exceptions import DSLNameError, DSLTypeError

SCALAR = "scalar"
ARRAY = "array"

Scope = Mapping[str, str]


def _join(*types: str) -> str:
    return ARRAY if ARRAY in types else SCALAR


def _require(fn: str, actual: str, wanted: str, position: int) -> None:
    if actual != wanted:
        raise DSLTypeError(f"{fn} expects {wanted} argument {position}, got {actual}")


def _call_type(node: Call, arg_types) -> str:
    fn = node.fn
    if fn not in FUNCTION_ARITY or fn == "ch":
        raise DSLNameError(f"unknown function '{fn}'")
    arity = FUNCTION_ARITY[fn]
    if len(arg_types) != arity:
        raise DSLTypeError(f"{fn} expects {arity} argument(s), got {len(arg_types)}")
    if fn in REDUCTIONS:
        _require(fn, arg_types[0], ARRAY, 1)
        return SCALAR
    if fn in ELEMENTWISE:
        return arg_types[0]
    if fn == "clip":
        _require(fn, arg_types[1], SCALAR, 2)
        _require(fn, arg_types[2], SCALAR, 3)
        return arg_types[0]
    if fn in ("corr", "dot"):
        _require(fn, arg_types[0], ARRAY, 1)
        _require(fn, arg_types[1], ARRAY, 2)
        return SCALAR
    if fn == "weights_exp":
        _require(fn, arg_types[0], SCALAR, 1)
        return ARRAY
    # if(cond, a, b)
    return _join(*arg_types)


def infer(
    node: Node,
    scope: Optional[Scope] = None,
    types: Optional[Dict[Path, str]] = None,
    path: Path = (),
) -> str:
    """Type of ``node`` under ``scope``; records every subtree type in ``types`` by path.

    Raises:
        DSLNameError: unknown identifier or function, or a reserved name bound by let
        DSLTypeError: argument count or scalar/array mismatch
    """
    scope = scope or {}
    if isinstance(node, Num):
        result = SCALAR
    elif isinstance(node, Name):
        if node.name in scope:
            result = scope[node.name]
        elif node.name in ENV_ARRAYS:
            result = ARRAY
        elif node.name in ENV_SCALARS:
            result = SCALAR
        else:
            raise DSLNameError(f"unknown identifier '{node.name}'")
    elif isinstance(node, Channel):
        result = ARRAY
    elif isinstance(node, Let):
        if node.name in ENV_NAMES or node.name in FUNCTION_ARITY or node.name in KEYWORDS:
            raise DSLNameError(f"cannot bind reserved name '{node.name}'")
        value_type = infer(node.value, scope, types, path + (0,))
        result = infer(node.body, {**scope, node.name: value_type}, types, path + (1,))
    else:
        kid_types = [
            infer(child, scope, types, path + (index,))
            for index, child in enumerate(children(node))
        ]
        if isinstance(node, Neg):
            result = kid_types[0]
        elif isinstance(node, BinOp):
            result = _join(*kid_types)
        else:
            result = _call_type(node, kid_types)
    if types is not None:
        types[path] = result
    return result


def type_check(ast: Node) -> str:
    """Check names and types; the program root must be scalar."""
    result = infer(ast)
    if result != SCALAR:
        raise DSLTypeError(f"program must produce a scalar, got {result}")
    return result


def subtree_types(ast: Node) -> Dict[Path, str]:
    """Type of every subtree, keyed by path."""
    types: Dict[Path, str] = {}
    infer(ast, types=types)
    return types
