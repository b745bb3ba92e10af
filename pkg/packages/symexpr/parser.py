from __future__ import annotations

import re
from typing import List, Tuple

from packages.symexpr.expr import (
    FUNCTIONS,
    RESERVED,
    Const,
    Expr,
    FunctionApp,
    U,
    Var,
    const,
    make_power,
    make_product,
    make_sum,
)
from packages.symexpr.gaussian import GaussianRational


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownFunctionError(ExprSyntaxError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")

Token = Tuple[str, str, int]


def _tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(text, pos)
        if not match:
            offset = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[offset]!r}", offset)
        kind = match.lastgroup or "op"
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, value: str) -> bool:
        kind, text, _ = self.peek()
        if kind == "op" and text == value:
            self.index += 1
            return True
        return False

    def expect(self, value: str) -> None:
        kind, text, offset = self.peek()
        if not (kind == "op" and text == value):
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", offset)
        self.index += 1

    def parse(self) -> Expr:
        expr = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", offset)
        return expr

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            if self.accept("+"):
                terms.append(self.term())
            elif self.accept("-"):
                terms.append(-self.term())
            else:
                return make_sum(terms)

    def term(self) -> Expr:
        factors = [self.unary()]
        while True:
            if self.accept("*"):
                factors.append(self.unary())
            elif self.accept("/"):
                factors.append(make_power(self.unary(), -1))
            else:
                return make_product(factors)

    def unary(self) -> Expr:
        if self.accept("-"):
            return -self.factor()
        return self.factor()

    def factor(self) -> Expr:
        base = self.base()
        if self.accept("^"):
            negative = self.accept("-")
            kind, text, offset = self.advance()
            if kind != "int":
                raise ExprSyntaxError("exponent must be an integer", offset)
            exponent = -int(text) if negative else int(text)
            if exponent == 0:
                return Const(GaussianRational(1))
            return make_power(base, exponent)
        return base

    def base(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "int":
            return const(int(text))
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "ident":
            return self._ident(text, offset)
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", offset)

    def _ident(self, name: str, offset: int) -> Expr:
        if name == "i":
            return Const(GaussianRational(0, 1))
        if name == "n":
            return Var("n")
        if name == "u":
            self.expect("(")
            kind, text, index_offset = self.advance()
            if kind != "int":
                raise ExprSyntaxError("expected integer index", index_offset)
            self.expect(")")
            return U(int(text))
        if name in FUNCTIONS:
            self.expect("(")
            argument = self.expr()
            self.expect(")")
            return FunctionApp(name, argument)
        if self.peek()[1] == "(" and self.peek()[0] == "op":
            raise UnknownFunctionError(f"unknown function {name!r}", offset)
        if not re.match(r"^[a-z][a-z0-9_]*$", name) or name in RESERVED:
            raise ExprSyntaxError(f"invalid identifier {name!r}", offset)
        return Var(name)


def parse_expr(text: str) -> Expr:
    """Parse the text form of an expression.

    Precedence: ``^`` binds tightest, then unary minus, then ``*``/``/``,
    then ``+``/``-``; binary operators are left associative.
    """
    return _Parser(text).parse()
