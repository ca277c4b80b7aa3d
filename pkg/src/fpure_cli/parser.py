"""
Expression parser for polynomial input.

Grammar (whitespace ignored, implicit multiplication rejected):

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' natural)?
    base   := natural | variable | '(' expr ')'
"""
import logging
import math
import re

from . import config
from .errors import ExponentOverflowError, PolynomialSyntaxError
from .poly import Polynomial

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.)", re.DOTALL)
_SPACE = re.compile(r"\s*")


def _tokenize(text):
    tokens = []
    pos = _SPACE.match(text, 0).end()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        number, name, symbol = match.groups()
        start = match.start()
        if number is not None:
            tokens.append(("num", number, start))
        elif name is not None:
            tokens.append(("var", name, start))
        elif symbol in "+-*^()":
            tokens.append((symbol, symbol, start))
        else:
            raise PolynomialSyntaxError(f"unexpected character {symbol!r}", start)
        pos = _SPACE.match(text, match.end()).end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, ring):
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind!r}", tok)
        self.i += 1
        return tok

    def fail(self, message, tok):
        found = "end of input" if tok[0] == "end" else repr(tok[1])
        raise PolynomialSyntaxError(f"{message}, found {found}", tok[2])

    def parse(self):
        result = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail("expected an operator", tok)
        return result

    def expr(self):
        negate = False
        if self.peek()[0] == "-":
            self.take()
            negate = True
        result = self.term()
        if negate:
            result = -result
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self):
        result = self.factor()
        while self.peek()[0] == "*":
            self.take()
            result = result * self.factor()
        return result

    def factor(self):
        base = self.base()
        if self.peek()[0] != "^":
            return base
        self.take()
        tok = self.take("num")
        k = int(tok[1])
        if k > config.MAX_EXPONENT:
            raise ExponentOverflowError(f"exponent {k} exceeds {config.MAX_EXPONENT} at position {tok[2]}")
        if base.is_monomial():
            (exps, c), = base.terms.items()
            scaled = tuple(x * k for x in exps)
            if any(x > config.MAX_EXPONENT for x in scaled):
                raise ExponentOverflowError(f"exponent overflow at position {tok[2]}")
            return Polynomial(self.ring, {scaled: pow(c, k, self.ring.p)})
        if len(base) > 1 and math.comb(k + len(base) - 1, len(base) - 1) > config.MAX_EXPANDED_TERMS:
            raise ExponentOverflowError(f"power {k} of a {len(base)}-term expression is too large to expand at position {tok[2]}")
        return base ** k

    def base(self):
        tok = self.take()
        kind = tok[0]
        if kind == "num":
            return self.ring.constant(int(tok[1]))
        if kind == "var":
            return self.ring.var(tok[1])
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        self.fail("expected a number, variable or '('", tok)


def parse_poly(text, ring):
    """Parse `text` into a Polynomial of `ring` in canonical form."""
    if not isinstance(text, str):
        raise PolynomialSyntaxError(f"expected a string, got {type(text).__name__}", 0)
    return _Parser(text, ring).parse()


def parse_generators(texts, ring):
    return [parse_poly(t, ring) for t in texts]
