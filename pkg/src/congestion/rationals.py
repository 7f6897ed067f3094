"""Exact rational scalars, linear forms, and a tiny expression evaluator.

All numeric data in the engine is exact: coefficients, markings, LP pivots
and phase-cell descriptions.  ``Q`` is gmpy2's mpq when available (much
faster on large numerators), otherwise the stdlib Fraction.
"""

from __future__ import annotations

import ast
import keyword
import re
from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def rat(value) -> Q:
    """Convert int / str / Fraction to an exact rational.

    Decimal strings are converted exactly ("0.4" -> 2/5); floats are
    rejected because they silently lose exactness.
    """
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    if isinstance(value, str):
        return Q(Fraction(value.strip()))
    return Q(value)


def rat_str(q) -> str:
    """Render a rational as 'p/q' (or 'p' for integers)."""
    return str(Q(q))


class LinForm:
    """A linear form over named parameters plus a rational constant.

    Immutable; supports +, -, and multiplication by scalars.  Used both for
    resource expressions (N_S, lambda, ...) and for evaluating model-file
    expressions symbolically.
    """

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=ZERO):
        items = {}
        for name, c in dict(coeffs or {}).items():
            c = Q(c)
            if c != 0:
                items[name] = c
        self.coeffs = dict(items)
        self.const = Q(const)

    @classmethod
    def variable(cls, name: str) -> "LinForm":
        return cls({name: ONE})

    @classmethod
    def constant(cls, value) -> "LinForm":
        return cls({}, rat(value) if not isinstance(value, (int, Fraction)) else Q(value))

    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        other = _as_form(other)
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs.get(k, ZERO) + v
        return LinForm(coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return LinForm({k: -v for k, v in self.coeffs.items()}, -self.const)

    def __sub__(self, other):
        return self + (-_as_form(other))

    def __rsub__(self, other):
        return _as_form(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, LinForm):
            if other.is_constant():
                other = other.const
            elif self.is_constant():
                return other * self.const
            else:
                raise ValueError("product of two non-constant linear forms")
        factor = Q(other)
        return LinForm({k: v * factor for k, v in self.coeffs.items()}, self.const * factor)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LinForm):
            if not other.is_constant():
                raise ValueError("division by a non-constant form")
            other = other.const
        return self * (ONE / Q(other))

    def __eq__(self, other):
        other = _as_form(other)
        return self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.const))

    def evaluate(self, bindings) -> Q:
        total = self.const
        for name, c in self.coeffs.items():
            if name not in bindings:
                raise KeyError(name)
            total += c * Q(bindings[name])
        return total

    def __repr__(self):
        if not self.coeffs:
            return f"LinForm({rat_str(self.const)})"
        parts = [f"{rat_str(c)}*{n}" for n, c in sorted(self.coeffs.items())]
        if self.const != 0:
            parts.append(rat_str(self.const))
        return "LinForm(" + " + ".join(parts) + ")"


def _as_form(value) -> LinForm:
    if isinstance(value, LinForm):
        return value
    return LinForm({}, Q(value))


_ALLOWED_BINOPS = {ast.Add, ast.Sub, ast.Mult, ast.Div}


def eval_expr(text: str, resolve):
    """Evaluate an arithmetic expression with +, -, *, / and names.

    ``resolve(name)`` supplies the value of each name; numeric literals are
    parsed exactly (0.4 becomes 2/5).  Returns whatever arithmetic over the
    resolved values yields (rationals or LinForms).
    """
    text = str(text)
    # identifiers that collide with Python keywords (e.g. "lambda") are
    # aliased so the expression still parses
    aliases = {}
    def alias(match):
        word = match.group(0)
        if keyword.iskeyword(word):
            safe = f"_kw_{word}"
            aliases[safe] = word
            return safe
        return word
    text = re.sub(r"[A-Za-z_][A-Za-z0-9_]*", alias, text)
    inner_resolve = resolve
    if aliases:
        def resolve(name, _base=inner_resolve):
            return _base(aliases.get(name, name))
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"bad expression {text!r}: {exc}") from None

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ValueError(f"bad literal in expression: {node.value!r}")
            if isinstance(node.value, int):
                return Q(node.value)
            # Re-read the exact decimal token from the source text.
            token = ast.get_source_segment(str(text), node)
            return rat(token)
        if isinstance(node, ast.Name):
            return resolve(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = walk(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp) and type(node.op) in _ALLOWED_BINOPS:
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            return left / right
        raise ValueError(f"unsupported syntax in expression {text!r}")

    return walk(tree)
