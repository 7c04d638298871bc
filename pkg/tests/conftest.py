"""Shared test helpers: a seeded random expression generator and an
independent tree-walking oracle used to cross-check evaluation."""

from __future__ import annotations

import math
import random

from gproxim.expr import Binary, Expr, Num, Unary, Var

VAR_POOL = ("x1", "x2", "u1", "u2", "l")

_BINARY_OPS = ("add", "sub", "mul", "div", "pow", "min", "max")
_UNARY_OPS = ("neg", "abs", "sqrt")


def random_expr(rng: random.Random, depth: int) -> Expr:
    """A random tree of depth at most `depth` with non-negative literals."""
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Var(rng.choice(VAR_POOL))
        choice = rng.random()
        if choice < 0.5:
            return Num(float(rng.randint(0, 9)))
        if choice < 0.8:
            return Num(rng.randint(1, 16) / 8.0)
        return Num(round(rng.uniform(0.0, 4.0), 3))
    if rng.random() < 0.25:
        return Unary(rng.choice(_UNARY_OPS), random_expr(rng, depth - 1))
    op = rng.choice(_BINARY_OPS)
    left = random_expr(rng, depth - 1)
    if op == "pow" and rng.random() < 0.8:
        right: Expr = Num(float(rng.randint(0, 3)))
    else:
        right = random_expr(rng, depth - 1)
    return Binary(op, left, right)


def random_env(rng: random.Random) -> dict[str, float]:
    return {
        name: rng.choice([-2.5, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0, 3.0])
        for name in VAR_POOL
    }


class OracleError(Exception):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(kind)


def oracle_eval(e: Expr, env: dict[str, float]) -> float:
    """Reference evaluator kept independent of the library implementation."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.name not in env:
            raise OracleError("unbound-variable")
        return env[e.name]
    if isinstance(e, Unary):
        v = oracle_eval(e.operand, env)
        if e.op == "neg":
            return 0.0 - v
        if e.op == "abs":
            return v if v >= 0 else -v
        if v < 0:
            raise OracleError("sqrt-of-negative")
        return math.sqrt(v)
    a = oracle_eval(e.left, env)
    b = oracle_eval(e.right, env)
    if e.op == "add":
        return a + b
    if e.op == "sub":
        return a - b
    if e.op == "mul":
        return a * b
    if e.op == "div":
        if b == 0:
            raise OracleError("division-by-zero")
        return a / b
    if e.op == "min":
        return a if a <= b else b
    if e.op == "max":
        return a if a >= b else b
    if e.op == "pow":
        if a == 0 and b < 0:
            raise OracleError("division-by-zero")
        if a < 0 and b != int(b):
            raise OracleError("fractional-power-of-negative")
        try:
            return math.pow(a, b)
        except OverflowError:
            raise OracleError("non-finite") from None
    raise AssertionError(e.op)


def rel_close(a: float, b: float, rel: float = 1e-12) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))
