"""Closure compiler with total semantics.

Every type-checked program evaluates to a finite float on every valid sample:
division by zero yields 0, log of a non-positive value is log(machine epsilon), sqrt of
a negative value is 0, degenerate correlations are 0 and a non-finite final result is
replaced by 0. The only runtime error is a reference to a channel the sample lacks.
"""
import math
from typing import Any, Callable, Dict

import numpy as np

from app.data.arrays import SampleArrays
from app.dsl.nodes import BinOp, Call, Channel, Let, Name, Neg, Node, Num
from app.estimators.baselines import geometric_weights
from app.exceptions import UnknownChannelError
from app.metrics.ranking import safe_correlation

EPS = float(np.finfo(np.float64).eps)

Compiled = Callable[[SampleArrays, Dict[str, Any]], Any]


def _scalarize(value):
    array = np.asarray(value, dtype=np.float64)
    return float(array) if array.ndim == 0 else array


def safe_divide(x, y):
    num, den = np.broadcast_arrays(
        np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    )
    out = np.zeros(num.shape, dtype=np.float64)
    np.divide(num, den, out=out, where=den != 0)
    return _scalarize(out)


def safe_log(x):
    x = np.asarray(x, dtype=np.float64)
    return _scalarize(np.log(np.where(x > 0, x, EPS)))


def safe_sqrt(x):
    return _scalarize(np.sqrt(np.maximum(x, 0.0)))


def _comparison(ufunc):
    return lambda x, y: _scalarize(np.where(ufunc(x, y), 1.0, 0.0))


_BINARY = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": safe_divide,
    "^": np.power,
    "<": _comparison(np.less),
    "<=": _comparison(np.less_equal),
    ">": _comparison(np.greater),
    ">=": _comparison(np.greater_equal),
    "=": _comparison(np.equal),
}

_UNARY = {
    "sum": np.sum,
    "mean": np.mean,
    "min": np.min,
    "max": np.max,
    "std": np.std,
    "first": lambda a: a[0],
    "last": lambda a: a[-1],
    "abs": np.abs,
    "exp": np.exp,
    "log": safe_log,
    "sqrt": safe_sqrt,
    "tanh": np.tanh,
}


def _weights_exp(n: int, gamma) -> np.ndarray:
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        return np.full(n, 1.0 / n)
    return geometric_weights(n, gamma)


def _compile(node: Node) -> Compiled:
    if isinstance(node, Num):
        value = float(node.value)
        return lambda arrays, scope: value

    if isinstance(node, Name):
        name = node.name
        if name in ("lp", "ent", "pos"):
            return lambda arrays, scope: getattr(arrays, name)
        if name == "n":
            return lambda arrays, scope: float(arrays.n)
        return lambda arrays, scope: scope[name]

    if isinstance(node, Channel):
        channel = node.name

        def load_channel(arrays, scope):
            try:
                return arrays.channels[channel]
            except KeyError:
                raise UnknownChannelError(channel) from None

        return load_channel

    if isinstance(node, Neg):
        operand = _compile(node.operand)
        return lambda arrays, scope: -operand(arrays, scope)

    if isinstance(node, BinOp):
        op = _BINARY[node.op]
        left, right = _compile(node.left), _compile(node.right)
        return lambda arrays, scope: op(left(arrays, scope), right(arrays, scope))

    if isinstance(node, Let):
        name = node.name
        value, body = _compile(node.value), _compile(node.body)
        return lambda arrays, scope: body(arrays, {**scope, name: value(arrays, scope)})

    args = [_compile(arg) for arg in node.args]
    fn = node.fn
    if fn in _UNARY:
        unary, (arg,) = _UNARY[fn], args
        return lambda arrays, scope: unary(arg(arrays, scope))
    if fn == "clip":
        x, lo, hi = args
        return lambda arrays, scope: np.clip(x(arrays, scope), lo(arrays, scope), hi(arrays, scope))
    if fn == "corr":
        a, b = args
        return lambda arrays, scope: safe_correlation(a(arrays, scope), b(arrays, scope))
    if fn == "dot":
        a, b = args
        return lambda arrays, scope: np.dot(a(arrays, scope), b(arrays, scope))
    if fn == "weights_exp":
        (gamma,) = args
        return lambda arrays, scope: _weights_exp(arrays.n, gamma(arrays, scope))
    # if(cond, a, b)
    cond, a, b = args
    return lambda arrays, scope: _scalarize(
        np.where(np.asarray(cond(arrays, scope)) != 0, a(arrays, scope), b(arrays, scope))
    )


def compile_program(ast: Node) -> Callable[[SampleArrays], float]:
    """Compile a type-checked AST into ``f(arrays) -> finite float``."""
    run = _compile(ast)

    def evaluate(arrays: SampleArrays) -> float:
        with np.errstate(all="ignore"):
            value = float(run(arrays, {}))
        return value if math.isfinite(value) else 0.0

    return evaluate
