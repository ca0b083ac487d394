"""Precedence-climbing parser producing the untyped AST."""
from typing import List, Sequence

from app.dsl.grammar import FUNCTION_ARITY, KEYWORDS, OPERATOR_ASSOC, OPERATOR_PREC
from app.dsl.lexer import Token, tokenize
from app.dsl.nodes import BinOp, Call, Channel, Let, Name, Neg, Node, Num
from app.exceptions import DSLSyntaxError

_EXPRESSION_START = ("number", "identifier", "(", "-")


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "eof":
            self.index += 1
        return token

    def at_op(self, text: str) -> bool:
        token = self.peek()
        return token.kind == "op" and token.text == text

    def at_keyword(self, word: str) -> bool:
        token = self.peek()
        return token.kind == "ident" and token.text == word

    def fail(self, token: Token, expected: Sequence[str]) -> DSLSyntaxError:
        return DSLSyntaxError(f"unexpected {token.describe()}", token.offset, expected)

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            raise self.fail(self.peek(), (text,))
        return self.advance()

    def program(self) -> Node:
        node = self.expression()
        if self.peek().kind != "eof":
            raise self.fail(self.peek(), ("operator", "end of input"))
        return node

    def expression(self) -> Node:
        if self.at_keyword("let"):
            return self.let_expression()
        return self.climb(1)

    def let_expression(self) -> Node:
        self.advance()
        token = self.advance()
        if token.kind != "ident" or token.text in KEYWORDS:
            raise self.fail(token, ("identifier",))
        self.expect_op("=")
        value = self.expression()
        if not self.at_keyword("in"):
            raise self.fail(self.peek(), ("in",))
        self.advance()
        body = self.expression()
        return Let(token.text, value, body)

    def climb(self, min_prec: int) -> Node:
        lhs = self.unary()
        while True:
            token = self.peek()
            if token.kind != "op" or token.text not in OPERATOR_PREC:
                return lhs
            prec = OPERATOR_PREC[token.text]
            if prec < min_prec:
                return lhs
            self.advance()
            next_prec = prec + 1 if OPERATOR_ASSOC[token.text] == "left" else prec
            lhs = BinOp(token.text, lhs, self.climb(next_prec))

    def unary(self) -> Node:
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> Node:
        if self.at_keyword("let"):
            return self.let_expression()
        token = self.advance()
        if token.kind == "number":
            return Num(token.value)
        if token.kind == "ident" and token.text not in KEYWORDS:
            if self.at_op("("):
                return self.call(token.text)
            return Name(token.text)
        if token.kind == "op" and token.text == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        raise self.fail(token, _EXPRESSION_START)

    def call(self, fn: str) -> Node:
        self.advance()
        if fn == "ch":
            token = self.advance()
            if token.kind != "string":
                raise self.fail(token, ("string",))
            self.expect_op(")")
            return Channel(token.text)

        args: List[Node] = []
        if self.at_op(")"):
            self.advance()
            return Call(fn, ())
        while True:
            args.append(self.expression())
            if self.at_op(","):
                self.advance()
                continue
            if self.at_op(")"):
                self.advance()
                return Call(fn, tuple(args))
            arity = FUNCTION_ARITY.get(fn)
            if arity is None:
                expected = (",", ")")
            elif len(args) >= arity:
                expected = (")",)
            else:
                expected = (",",)
            raise self.fail(self.peek(), expected)


def parse_expression(source: str) -> Node:
    """Parse ``source`` into an AST without name or type checking.

    Raises:
        DSLSyntaxError: with the 1-based byte offset and the expected tokens
    """
    return _Parser(source).program()
