"""Restricted arithmetic expressions for command-line models.

Only numeric literals, the variables and parameters named by the caller,
arithmetic operators and a fixed set of numpy functions are accepted.  The
expression is validated on its syntax tree before compilation, so nothing
else (attributes, subscripts, calls to arbitrary names) can run.
"""

from __future__ import annotations

import ast
from typing import Callable, Mapping

import numpy as np

FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "conj": np.conj,
    "abs": np.abs,
    "real": np.real,
    "imag": np.imag,
}
CONSTANTS = {"pi": np.pi, "e": np.e, "i": 1j}

_ALLOWED = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)


class ExpressionError(ValueError):
    pass


def _to_number(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float, complex)):
        return v
    raise ExpressionError(f"parameter value {v!r} is not a number or [re, im] pair")


def compile_expression(text: str, variables=("z",), params: Mapping | None = None) -> Callable:
    """Compile ``text`` to a vectorised function of ``variables``."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as e:
        raise ExpressionError(f"cannot parse expression {text!r}: {e.msg}")
    params = {k: _to_number(v) for k, v in (params or {}).items()}
    names = set(variables) | set(params) | set(CONSTANTS)
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ExpressionError(f"disallowed syntax {type(node).__name__} in {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float, complex)):
            raise ExpressionError(f"only numeric literals are allowed in {text!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS or node.keywords:
                raise ExpressionError(f"unknown function in {text!r}")
        elif isinstance(node, ast.Name) and node.id not in names and node.id not in FUNCTIONS:
            raise ExpressionError(f"unknown name {node.id!r} in {text!r}")
    code = compile(tree, "<expr>", "eval")
    env = {"__builtins__": {}}
    env.update(FUNCTIONS)
    env.update(CONSTANTS)
    env.update(params)

    def f(*args):
        local = dict(env)
        for name, a in zip(variables, args):
            local[name] = np.asarray(a, dtype=complex)
        out = eval(code, local)  # validated tree, empty builtins
        shape = np.broadcast(*[np.asarray(a) for a in args]).shape if args else ()
        return np.broadcast_to(np.asarray(out, dtype=complex), shape).copy() if shape else complex(out)

    f.__doc__ = text
    return f
