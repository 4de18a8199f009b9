"""Small expression grammar in one variable ``t`` with exact differentiation.

Accepted: numbers, ``t``, ``pi``, ``+ - * /``, ``**`` or ``^``, parentheses and
sin, cos, tan, arctan, sinh, cosh, tanh, arcsinh, exp, sqrt. The text is parsed
with :mod:`ast` and translated node by node into a sympy expression, so nothing
is ever evaluated as Python.
"""

from __future__ import annotations

import ast

import numpy as np
import sympy as sp

from .errors import ConfigError

T = sp.Symbol("t", real=True)

FUNCTIONS = {
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
    "arctan": sp.atan,
    "atan": sp.atan,
    "sinh": sp.sinh,
    "cosh": sp.cosh,
    "tanh": sp.tanh,
    "arcsinh": sp.asinh,
    "asinh": sp.asinh,
    "exp": sp.exp,
    "sqrt": sp.sqrt,
}
CONSTANTS = {"pi": sp.pi, "t": T}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


def _translate(node):
    if isinstance(node, ast.Expression):
        return _translate(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return sp.nsimplify(node.value) if isinstance(node.value, int) else sp.Float(node.value)
    if isinstance(node, ast.Name):
        if node.id in CONSTANTS:
            return CONSTANTS[node.id]
        raise ConfigError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_translate(node.left), _translate(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _translate(node.operand)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        if node.func.id not in FUNCTIONS:
            raise ConfigError(f"unknown function {node.func.id!r}")
        if len(node.args) != 1:
            raise ConfigError(f"{node.func.id} takes exactly one argument")
        return FUNCTIONS[node.func.id](_translate(node.args[0]))
    raise ConfigError(f"unsupported syntax: {ast.dump(node)[:60]}")


class Expression:
    """Parsed expression; callable on floats or numpy arrays."""

    def __init__(self, text: str, sym: sp.Expr | None = None):
        self.text = text
        if sym is None:
            try:
                tree = ast.parse(text.replace("^", "**"), mode="eval")
            except SyntaxError as exc:
                raise ConfigError(f"cannot parse {text!r}: {exc.msg}") from exc
            sym = _translate(tree)
        self.sym = sp.sympify(sym)
        self._fn = sp.lambdify(T, self.sym, "numpy")

    def __call__(self, t):
        out = self._fn(np.asarray(t, dtype=float))
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(t)) if np.ndim(t) else float(out)

    def derivative(self) -> Expression:
        d = sp.diff(self.sym, T)
        return Expression(str(d), d)

    @property
    def is_constant(self) -> bool:
        return T not in self.sym.free_symbols

    def __repr__(self):
        return f"Expression({self.text!r})"


def parse(text: str) -> Expression:
    return Expression(str(text))


def parse_number(value) -> float:
    """Float from a number or a constant expression such as ``1/sqrt(2)``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    try:
        return float(value)
    except (TypeError, ValueError):
        pass
    e = parse(str(value))
    if not e.is_constant:
        raise ConfigError(f"{value!r} is not a constant")
    return float(e.sym.evalf())
