"""Parsers for the small text grammar used on the command line.

Sets:      ``[0,1/2]``, ``(0,1]``, ``{3/2, 2}``, unions with ``U``: ``[3,4] U {3/2}``
Decomps:   sets separated by ``;``
Maps:      an affine expression in ``x`` (``x/2``, ``(x-2)/2``, ``3/2``), or
           pieces ``RULE on SET`` separated by ``;``
Metrics:   an expression in ``x`` and ``y`` built from numbers, ``+ - * /``,
           ``abs``/``|...|``, ``max``, ``min``, comparisons and
           ``A if COND else B``

Everything is parsed with :mod:`ast` and evaluated through a node whitelist;
no names other than ``x``, ``y``, ``inf`` and the listed functions exist.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from typing import Callable

from .errors import ParseError
from .sets import Affine, Interval, Piece, PiecewiseMap, SetDescriptor

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_CMPS = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}
_FUNCS = {"abs": abs, "max": max, "min": min}


def _parse(text: str) -> ast.expr:
    text = _bars_to_abs(text.strip())
    try:
        return ast.parse(text, mode="eval").body
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg} at column {exc.offset}") from None


def _bars_to_abs(text: str) -> str:
    # |a| -> abs(a); bars cannot nest
    if text.count("|") % 2:
        raise ParseError(f"unbalanced '|' in {text!r}")
    return re.sub(r"\|([^|]*)\|", r"abs(\1)", text)


def _compile(node: ast.AST, names: tuple[str, ...]) -> Callable:
    """Turn a whitelisted AST into a closure over the variables in ``names``."""
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        v = float(node.value)
        return lambda env: v
    if isinstance(node, ast.Name):
        if node.id in names:
            key = node.id
            return lambda env: env[key]
        if node.id == "inf":
            return lambda env: math.inf
        raise ParseError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        f = _compile(node.operand, names)
        sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
        return lambda env: sign * f(env)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        a, b = _compile(node.left, names), _compile(node.right, names)
        return lambda env: op(a(env), b(env))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
        fn = _FUNCS[node.func.id]
        args = [_compile(a, names) for a in node.args]
        if not args or (fn is abs and len(args) != 1):
            raise ParseError(f"bad arguments to {node.func.id}")
        return lambda env: fn(*(a(env) for a in args))
    if isinstance(node, ast.Compare) and all(type(o) in _CMPS for o in node.ops):
        parts = [_compile(node.left, names)] + [_compile(c, names) for c in node.comparators]
        ops = [_CMPS[type(o)] for o in node.ops]

        def compare(env):
            vals = [p(env) for p in parts]
            return all(op(vals[i], vals[i + 1]) for i, op in enumerate(ops))

        return compare
    if isinstance(node, ast.BoolOp):
        parts = [_compile(v, names) for v in node.values]
        if isinstance(node.op, ast.And):
            return lambda env: all(p(env) for p in parts)
        return lambda env: any(p(env) for p in parts)
    if isinstance(node, ast.IfExp):
        cond, a, b = (_compile(n, names) for n in (node.test, node.body, node.orelse))
        return lambda env: a(env) if cond(env) else b(env)
    raise ParseError(f"unsupported syntax: {ast.dump(node)[:60]}")


def parse_number(text: str) -> float:
    """A constant expression such as ``3/2``, ``-0.25`` or ``inf``."""
    return float(_compile(_parse(text), ())({}))


def parse_metric(text: str) -> Callable[[float, float], float]:
    f = _compile(_parse(text), ("x", "y"))

    def rule(x: float, y: float) -> float:
        return float(f({"x": x, "y": y}))

    return rule


class _Lin:
    """Affine form ``a*x + b`` used to check that a map rule is affine."""

    def __init__(self, a: float, b: float):
        self.a, self.b = a, b


def _affine(node: ast.AST) -> _Lin:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return _Lin(0.0, float(node.value))
    if isinstance(node, ast.Name) and node.id == "x":
        return _Lin(1.0, 0.0)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _affine(node.operand)
        s = -1.0 if isinstance(node.op, ast.USub) else 1.0
        return _Lin(s * v.a, s * v.b)
    if isinstance(node, ast.BinOp):
        l, r = _affine(node.left), _affine(node.right)
        if isinstance(node.op, ast.Add):
            return _Lin(l.a + r.a, l.b + r.b)
        if isinstance(node.op, ast.Sub):
            return _Lin(l.a - r.a, l.b - r.b)
        if isinstance(node.op, ast.Mult):
            if l.a and r.a:
                raise ParseError("map rule must be affine in x")
            if l.a:
                return _Lin(l.a * r.b, l.b * r.b)
            return _Lin(r.a * l.b, r.b * l.b)
        if isinstance(node.op, ast.Div):
            if r.a:
                raise ParseError("map rule must be affine in x")
            if r.b == 0:
                raise ParseError("division by zero in map rule")
            return _Lin(l.a / r.b, l.b / r.b)
    raise ParseError(f"map rule must be an affine expression in x, got {ast.unparse(node)!r}")


def parse_affine(text: str) -> Affine:
    lin = _affine(_parse(text))
    return Affine(lin.a, lin.b)


_INTERVAL = re.compile(r"^([\[(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\])])$")
_POINTS = re.compile(r"^\{(.*)\}$")


def parse_set(text: str) -> SetDescriptor:
    intervals, points = [], []
    for part in re.split(r"\s+U\s+|\s*∪\s*", text.strip()):
        part = part.strip()
        m = _INTERVAL.match(part)
        if m:
            lb, lo, hi, rb = m.groups()
            try:
                intervals.append(Interval(parse_number(lo), parse_number(hi), lb == "[", rb == "]"))
            except ValueError as exc:
                raise ParseError(f"bad interval {part!r}: {exc}") from None
            continue
        m = _POINTS.match(part)
        if m:
            points.extend(parse_number(p) for p in m.group(1).split(",") if p.strip())
            continue
        raise ParseError(f"cannot parse set component {part!r}")
    return SetDescriptor(tuple(intervals), tuple(points))


def parse_sets(text: str) -> list[SetDescriptor]:
    return [parse_set(chunk) for chunk in text.split(";") if chunk.strip()]


def parse_map(text: str, domain: SetDescriptor, name: str = "T") -> PiecewiseMap:
    pieces = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        rule, sep, guard = chunk.partition(" on ")
        pieces.append(Piece(parse_set(guard) if sep else domain, parse_affine(rule)))
    if not pieces:
        raise ParseError("empty map definition")
    return PiecewiseMap(tuple(pieces), name)
