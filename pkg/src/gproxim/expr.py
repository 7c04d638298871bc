"""Arithmetic expression DSL for gauge functions, maps and convex structures.

Grammar (EBNF, also documented in the README):

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | IDENT | call | "(" expr ")"
    call   := ("min" | "max") "(" expr "," expr ")"
            | ("abs" | "sqrt") "(" expr ")"
    NUMBER := DIGIT+ ("." DIGIT+)? (("e" | "E") ("+" | "-")? DIGIT+)?

Precedence, tightest first: "^" (right associative), unary "-", "*" and "/",
then "+" and "-".  Variables follow the coordinate convention of the rest of
the library: x1..xd name the first point's coordinates, u1..ud the second
point's, and l the interpolation parameter of a convex structure.

Expression trees are immutable and evaluation is pure, so parsed expressions
are safe to share across threads.  Canonical trees keep numeric literals
non-negative (a leading minus parses as a neg node), which is what makes
``parse(format_expr(e)) == e`` hold structurally.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Union

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Unary",
    "Binary",
    "ParseError",
    "EvalError",
    "parse",
    "evaluate",
    "format_expr",
    "compile_expr",
    "variables",
]

VarEnv = Mapping[str, float]


class ParseError(ValueError):
    """Syntax error with the byte offset and an expected-token hint."""

    def __init__(self, offset: int, expected: str, found: str):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(
            f"syntax error at offset {offset}: expected {expected}, found {found}"
        )


class EvalError(ArithmeticError):
    """Evaluation error carrying a machine-readable kind.

    Kinds: "unbound-variable", "division-by-zero", "sqrt-of-negative",
    "fractional-power-of-negative", "non-finite".
    """

    def __init__(self, kind: str, detail: str):
        self.kind = kind
        super().__init__(f"{kind}: {detail}")


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self) -> str:
        v = self.value
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" | "abs" | "sqrt"
    operand: "Expr"

    def __str__(self) -> str:
        if self.op == "neg":
            return f"(-{self.operand})"
        return f"{self.op}({self.operand})"


@dataclass(frozen=True)
class Binary:
    op: str  # "add" | "sub" | "mul" | "div" | "pow" | "min" | "max"
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        if self.op in ("min", "max"):
            return f"{self.op}({self.left},{self.right})"
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[self.op]
        return f"({self.left}{sym}{self.right})"


Expr = Union[Num, Var, Unary, Binary]

_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
  | (?P<ws>\s+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)

_CALLS_2 = ("min", "max")
_CALLS_1 = ("abs", "sqrt")


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | one of "-+*/^()," | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ParseError(m.start(), "a token", repr(m.group()))
        if kind == "op":
            tokens.append(_Token(m.group(), m.group(), m.start()))
        else:
            tokens.append(_Token(kind, m.group(), m.start()))
    tokens.append(_Token("end", "end of input", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, expected: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.pos, expected, repr(tok.text))
        return self.advance()

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            node = Binary("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            node = Binary("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind == "^":
            self.advance()
            return Binary("pow", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text in _CALLS_2:
                self.expect("(", "'('")
                left = self.expr()
                self.expect(",", "','")
                right = self.expr()
                self.expect(")", "')'")
                return Binary(tok.text, left, right)
            if tok.text in _CALLS_1:
                self.expect("(", "'('")
                operand = self.expr()
                self.expect(")", "')'")
                return Unary(tok.text, operand)
            return Var(tok.text)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")", "')'")
            return node
        raise ParseError(tok.pos, "a number, variable, call or '('", repr(tok.text))


def parse(text: str) -> Expr:
    """Parse an expression string into its unique tree under the grammar."""
    if not text or not text.strip():
        raise ParseError(0, "a non-empty expression", "empty input")
    parser = _Parser(text)
    node = parser.expr()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(tail.pos, "end of input", repr(tail.text))
    return node


def format_expr(e: Expr) -> str:
    """Canonical fully parenthesised text; parse(format_expr(e)) equals e."""
    return str(e)


def variables(e: Expr) -> frozenset[str]:
    """The set of variable names referenced by the expression."""
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Unary):
        return variables(e.operand)
    return variables(e.left) | variables(e.right)


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise EvalError("division-by-zero", f"{a!r} / 0")
    return a / b


def _sqrt(a: float) -> float:
    if a < 0.0:
        raise EvalError("sqrt-of-negative", f"sqrt({a!r})")
    return math.sqrt(a)


def _pow(a: float, b: float) -> float:
    if a == 0.0 and b < 0.0:
        raise EvalError("division-by-zero", f"0 ^ {b!r}")
    if a < 0.0 and b != int(b):
        raise EvalError("fractional-power-of-negative", f"{a!r} ^ {b!r}")
    try:
        return a ** b
    except OverflowError:
        raise EvalError("non-finite", f"{a!r} ^ {b!r} overflows") from None


def evaluate(e: Expr, env: VarEnv) -> float:
    """Evaluate under IEEE double arithmetic; min/max are exact comparisons.

    Every variable must be bound in env; an unbound name is an error, never
    an implicit zero.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return float(env[e.name])
        except KeyError:
            raise EvalError("unbound-variable", e.name) from None
    if isinstance(e, Unary):
        v = evaluate(e.operand, env)
        if e.op == "neg":
            return -v
        if e.op == "abs":
            return abs(v)
        return _sqrt(v)
    left = evaluate(e.left, env)
    if e.op == "min":
        return min(left, evaluate(e.right, env))
    if e.op == "max":
        return max(left, evaluate(e.right, env))
    right = evaluate(e.right, env)
    if e.op == "add":
        return left + right
    if e.op == "sub":
        return left - right
    if e.op == "mul":
        return left * right
    if e.op == "div":
        return _div(left, right)
    return _pow(left, right)


def _gen(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        inner = _gen(e.operand)
        if e.op == "neg":
            return f"(-{inner})"
        if e.op == "abs":
            return f"abs({inner})"
        return f"_sqrt({inner})"
    left, right = _gen(e.left), _gen(e.right)
    if e.op in ("min", "max"):
        return f"{e.op}({left},{right})"
    if e.op == "div":
        return f"_div({left},{right})"
    if e.op == "pow":
        return f"_pow({left},{right})"
    sym = {"add": "+", "sub": "-", "mul": "*"}[e.op]
    return f"({left}{sym}{right})"


_COMPILE_GLOBALS = {
    "_div": _div,
    "_sqrt": _sqrt,
    "_pow": _pow,
    "min": min,
    "max": max,
    "abs": abs,
    "__builtins__": {},
}


def compile_expr(e: Expr, names: tuple[str, ...]) -> Callable[..., float]:
    """Compile to a positional-argument callable over the given variable names.

    Semantics are identical to evaluate(); this is the fast path used by the
    sampled scans.  Raises EvalError("unbound-variable") if the expression
    references a name outside `names`.
    """
    free = variables(e)
    missing = sorted(free - set(names))
    if missing:
        raise EvalError("unbound-variable", ", ".join(missing))
    args = ", ".join(names) if names else "*_ignored"
    src = f"lambda {args}: {_gen(e)}"
    return eval(src, dict(_COMPILE_GLOBALS))  # noqa: S307 (closed namespace)
