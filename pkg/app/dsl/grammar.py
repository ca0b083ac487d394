"""Grammar, operator table and function signatures of the candidate-scorer language."""
from typing import Dict, Tuple

# Groups of increasing precedence; unary minus binds tighter than all of them.
OPERATORS = [
    [("<", "left"), ("<=", "left"), (">", "left"), (">=", "left"), ("=", "left")],
    [("+", "left"), ("-", "left")],
    [("*", "left"), ("/", "left")],
    [("^", "right")],
]

OPERATOR_PREC: Dict[str, int] = {
    op: level + 1 for level, group in enumerate(OPERATORS) for op, _ in group
}
OPERATOR_ASSOC: Dict[str, str] = {op: assoc for group in OPERATORS for op, assoc in group}
COMPARISONS = ("<", "<=", ">", ">=", "=")
ARITHMETIC = ("+", "-", "*", "/", "^")

# Printer levels: let < binary groups < unary minus < atoms.
LET_PREC = 0
UNARY_PREC = len(OPERATORS) + 1
ATOM_PREC = UNARY_PREC + 1

ENV_ARRAYS = ("lp", "ent", "pos")
ENV_SCALARS = ("n",)
ENV_NAMES = ENV_ARRAYS + ENV_SCALARS

REDUCTIONS = ("sum", "mean", "min", "max", "std", "first", "last")
ELEMENTWISE = ("abs", "exp", "log", "sqrt", "tanh")

FUNCTION_ARITY: Dict[str, int] = {
    **{fn: 1 for fn in REDUCTIONS},
    **{fn: 1 for fn in ELEMENTWISE},
    "clip": 3,
    "corr": 2,
    "dot": 2,
    "weights_exp": 1,
    "if": 3,
    "ch": 1,
}

KEYWORDS: Tuple[str, ...] = ("let", "in")

GRAMMAR = """\
program     = expr ;
expr        = let_expr | comparison ;
let_expr    = "let" identifier "=" expr "in" expr ;
comparison  = additive { ( "<" | "<=" | ">" | ">=" | "=" ) additive } ;
additive    = term { ( "+" | "-" ) term } ;
term        = power { ( "*" | "/" ) power } ;
power       = unary [ "^" power ] ;
unary       = "-" unary | primary ;
primary     = number | identifier | call | channel | "(" expr ")" ;
call        = function "(" expr { "," expr } ")" ;
channel     = "ch" "(" string ")" ;
number      = digit { digit } [ "." { digit } ] [ ( "e" | "E" ) [ "+" | "-" ] digit { digit } ] ;
string      = '"' { character - '"' } '"' ;
comment     = "#" { character - newline } ;"""

ENVIRONMENT = """\
lp    array  natural-log probability of each emitted token (<= 0)
ent   array  entropy of the next-token distribution at each position (>= 0)
pos   array  token positions 0 .. n-1
n     scalar number of tokens
ch("name")  array  named per-token channel carried by the dataset"""

FUNCTIONS = """\
sum mean min max std first last   array -> scalar
abs exp log sqrt tanh             elementwise, scalar or array
clip(x, lo, hi)                   elementwise clamp, lo and hi scalar
corr(a, b)                        Pearson correlation of two arrays (0 when undefined)
dot(a, b)                         inner product of two arrays
weights_exp(gamma)                normalized weights gamma^(n-1-i), an array
if(cond, a, b)                    elementwise select where cond != 0
comparisons < <= > >= =           produce 1 or 0
let x = e in body                 local binding

Evaluation is total: x / 0 = 0, log of a non-positive value is log(machine epsilon),
sqrt of a negative value is 0, a non-finite final result becomes 0."""


def reference() -> str:
    """Grammar plus environment and function reference, as shown to proposers."""
    return f"Grammar (EBNF):\n{GRAMMAR}\n\nInputs:\n{ENVIRONMENT}\n\nFunctions:\n{FUNCTIONS}"
