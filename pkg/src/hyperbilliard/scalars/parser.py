"""Direction expressions: ``1,sqrt(3),sqrt(2)`` or ``1,t1,t2``.

Grammar (whitespace ignored, components separated by commas)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := INT | INT '/' INT | 'sqrt' '(' expr ')' | 't' INT
            | '(' expr ')' | '-' factor
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from ..direction import Direction
from .numeric import DEFAULT_PRECISION, context
from .symbolic import symbolic_field


class DirectionError(ValueError):
    """Invalid direction text. ``kind`` names the failed check."""

    def __init__(self, message, kind="syntax", position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.kind = kind
        self.position = position


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Rat:
    num: int
    den: int


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Sqrt:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt)|(t)|([-+*/(),]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise DirectionError(f"unexpected character {text[pos:].lstrip()[0]!r}",
                                 position=pos + len(text[pos:]) - len(text[pos:].lstrip()))
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("INT", int(m.group(1)), start))
        elif m.group(2):
            tokens.append(("SQRT", None, start))
        elif m.group(3):
            tokens.append(("T", None, start))
        else:
            tokens.append((m.group(4), None, start))
        pos = m.end()
    tokens.append(("EOF", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[self.i + offset]

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            found = "end of input" if tok[0] == "EOF" else repr(tok[0])
            raise DirectionError(f"expected {kind!r}, found {found}", position=tok[2])
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take(self.peek()[0])[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take(self.peek()[0])[0]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        kind, value, pos = self.peek()
        if kind == "INT":
            self.i += 1
            if self.peek()[0] == "/" and self.peek(1)[0] == "INT":
                self.i += 1
                den = self.take("INT")
                if den[1] == 0:
                    raise DirectionError("zero denominator", kind="value", position=den[2])
                return Rat(value, den[1])
            return Num(value)
        if kind == "SQRT":
            self.i += 1
            self.take("(")
            node = self.expr()
            self.take(")")
            return Sqrt(node)
        if kind == "T":
            self.i += 1
            idx = self.take("INT")
            if idx[1] < 1:
                raise DirectionError("indeterminates are numbered from t1", position=idx[2])
            return Var(idx[1])
        if kind == "(":
            self.i += 1
            node = self.expr()
            self.take(")")
            return node
        if kind == "-":
            self.i += 1
            return Neg(self.factor())
        found = "end of input" if kind == "EOF" else repr(kind)
        raise DirectionError(f"expected a number, sqrt, t<k> or '(', found {found}",
                             position=pos)


def parse_expression(text):
    """Parse one component expression into an AST."""
    p = _Parser(text)
    node = p.expr()
    if p.peek()[0] != "EOF":
        raise DirectionError(f"unexpected {p.peek()[0]!r}", position=p.peek()[2])
    return node


def format_expression(node):
    """Print an AST so that re-parsing yields the same AST."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Rat):
        return f"({node.num}/{node.den})"
    if isinstance(node, Var):
        return f"t{node.index}"
    if isinstance(node, Neg):
        return f"(-{format_expression(node.arg)})"
    if isinstance(node, Sqrt):
        return f"sqrt({format_expression(node.arg)})"
    left = format_expression(node.left)
    right = format_expression(node.right)
    if node.op == "/" and isinstance(node.left, Num) and isinstance(node.right, Num):
        # keep "a/(b)" from collapsing into a rational literal
        right = f"({right})"
    return f"({left}{node.op}{right})"


def walk(node):
    yield node
    for child in (getattr(node, a) for a in ("arg", "left", "right") if hasattr(node, a)):
        yield from walk(child)


def has_sqrt(node):
    return any(isinstance(n, Sqrt) for n in walk(node))


def variables(node):
    return {n.index for n in walk(node) if isinstance(n, Var)}


def evaluate_exact(node):
    """Exact rational value, or None if an irrational square root occurs."""
    if isinstance(node, Num):
        return Fraction(node.value)
    if isinstance(node, Rat):
        return Fraction(node.num, node.den)
    if isinstance(node, Var):
        return None
    if isinstance(node, Neg):
        v = evaluate_exact(node.arg)
        return None if v is None else -v
    if isinstance(node, Sqrt):
        v = evaluate_exact(node.arg)
        if v is None or v < 0:
            return None
        rn, rd = isqrt(v.numerator), isqrt(v.denominator)
        if rn * rn == v.numerator and rd * rd == v.denominator:
            return Fraction(rn, rd)
        return None
    a, b = evaluate_exact(node.left), evaluate_exact(node.right)
    if a is None or b is None:
        return None
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if b == 0:
        raise DirectionError("division by zero", kind="value")
    return a / b


def evaluate_numeric(node, ctx):
    if isinstance(node, Num):
        return ctx.mpf(node.value)
    if isinstance(node, Rat):
        return ctx.mpf(node.num) / node.den
    if isinstance(node, Var):
        raise DirectionError("indeterminate in a numeric expression", kind="mixed")
    if isinstance(node, Neg):
        return -evaluate_numeric(node.arg, ctx)
    if isinstance(node, Sqrt):
        v = evaluate_numeric(node.arg, ctx)
        if v < 0:
            raise DirectionError("square root of a negative number", kind="value")
        return ctx.sqrt(v)
    a, b = evaluate_numeric(node.left, ctx), evaluate_numeric(node.right, ctx)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if b == 0:
        raise DirectionError("division by zero", kind="value")
    return a / b


def evaluate_symbolic(node, d):
    K, gens = symbolic_field(d)
    if isinstance(node, Num):
        return K(node.value)
    if isinstance(node, Rat):
        return K(node.num) / node.den
    if isinstance(node, Var):
        if node.index > d:
            raise DirectionError(f"t{node.index} exceeds the dimension d={d}", kind="value")
        return gens[node.index - 1]
    if isinstance(node, Neg):
        return -evaluate_symbolic(node.arg, d)
    if isinstance(node, Sqrt):
        raise DirectionError("sqrt in a symbolic expression", kind="mixed")
    a, b = evaluate_symbolic(node.left, d), evaluate_symbolic(node.right, d)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if b == 0:
        raise DirectionError("division by zero", kind="value")
    return a / b


def _split_components(text):
    parts, start, depth = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((start, text[start:i]))
            start = i + 1
    parts.append((start, text[start:]))
    return parts


def parse_direction(text, precision=DEFAULT_PRECISION, epsilon=None):
    """Parse ``"1,theta_1,...,theta_d"`` into a :class:`Direction`."""
    parts = _split_components(text)
    if len(parts) < 2:
        raise DirectionError("need at least two components (1 and theta_1)", kind="arity")
    nodes = []
    for offset, part in parts:
        try:
            nodes.append(parse_expression(part))
        except DirectionError as exc:
            pos = None if exc.position is None else exc.position + offset
            msg = str(exc).split(" (at position")[0]
            raise DirectionError(msg, kind=exc.kind, position=pos) from None
    d = len(nodes) - 1

    if any(variables(n) for n in nodes):
        if any(has_sqrt(n) for n in nodes):
            raise DirectionError("mixing indeterminates and sqrt in one direction",
                                 kind="mixed")
    first = nodes[0]
    if variables(first) or evaluate_exact(first) != 1:
        raise DirectionError("the first component must be exactly 1", kind="first")

    if any(variables(n) for n in nodes):
        _, gens = symbolic_field(d)
        values = [evaluate_symbolic(n, d) for n in nodes[1:]]
        if tuple(values) != gens:
            raise DirectionError(
                "a symbolic direction must be the generic (1,t1,...,td)", kind="symbolic")
        return Direction(gens, True, precision, epsilon, text.strip())

    ctx = context(precision)
    values = [evaluate_numeric(n, ctx) for n in nodes[1:]]
    for k, v in enumerate(values, start=1):
        if v <= 0:
            raise DirectionError(f"component {k + 1} is not positive", kind="positive")
    exact = [evaluate_exact(n) for n in nodes[1:]]
    notes = ()
    if any(v is not None for v in exact):
        notes = ("some components are rational; irrationality is assumed, not verified",)
    try:
        return Direction(tuple(values), False, precision, epsilon, text.strip(),
                         notes=notes)
    except ValueError as exc:
        raise DirectionError(str(exc), kind="positive") from None
