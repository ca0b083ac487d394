"""Canonical printer.

Single spaces around binary operators, ``", "`` between call arguments, no spaces inside
parentheses and only the parentheses precedence requires. ``parse_expression`` of the
output reproduces the AST exactly.
"""
from app.dsl.grammar import ATOM_PREC, LET_PREC, OPERATOR_ASSOC, OPERATOR_PREC, UNARY_PREC
from app.dsl.nodes import BinOp, Call, Channel, Let, Name, Neg, Node, Num


def format_number(value: float) -> str:
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return OPERATOR_PREC[node.op]
    if isinstance(node, Neg):
        return UNARY_PREC
    if isinstance(node, Let):
        return LET_PREC
    return ATOM_PREC


def _wrapped(node: Node, needs_parens: bool) -> str:
    text = to_source(node)
    return f"({text})" if needs_parens else text


def to_source(node: Node) -> str:
    """Canonical source text of ``node``."""
    if isinstance(node, Num):
        return format_number(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Channel):
        return f'ch("{node.name}")'
    if isinstance(node, Neg):
        return "-" + _wrapped(node.operand, _prec(node.operand) < UNARY_PREC)
    if isinstance(node, BinOp):
        prec = OPERATOR_PREC[node.op]
        right_assoc = OPERATOR_ASSOC[node.op] == "right"
        left_prec, right_prec = _prec(node.left), _prec(node.right)
        left = _wrapped(node.left, left_prec < prec or (left_prec == prec and right_assoc))
        right = _wrapped(
            node.right, right_prec < prec or (right_prec == prec and not right_assoc)
        )
        return f"{left} {node.op} {right}"
    if isinstance(node, Call):
        return f"{node.fn}({', '.join(to_source(arg) for arg in node.args)})"
    value = _wrapped(node.value, isinstance(node.value, Let))
    return f"let {node.name} = {value} in {to_source(node.body)}"


def canonical_print(program) -> str:
    """Canonical source of a ``Program``."""
    return to_source(program.ast)
