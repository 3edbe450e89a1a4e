"""Polynomial expressions and web description documents.

Grammar (whitespace-insensitive, no implicit multiplication)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*      # '/' only by a nonzero constant
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INTEGER)?
    atom   := INTEGER | NAME | '(' expr ')'

Documents are ``key: value`` lines; ``#`` starts a comment.  See
``docs/input_format.md`` for the keys of each ``kind``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import ParseError
from .jets import MAX_ORDER, Jet

__all__ = ["parse_polynomial", "InputDocument", "parse_document", "load_document", "default_variables"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables, order):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = {name: k for k, name in enumerate(variables)}
        self.nvars = len(variables)
        self.order = order

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        result = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return result

    def expr(self):
        acc = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.degree > 0 or not rhs.constant:
                    raise ParseError("division is only allowed by a nonzero constant", pos)
                acc = acc / rhs.constant
        return acc

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            val = self.unary()
            return -val if tok[1] == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise ParseError("exponent must be a non-negative integer", tok[2])
            base = base ** int(tok[1])
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "int":
            return Jet.const(int(value), self.nvars, self.order)
        if kind == "name":
            if value not in self.names:
                raise ParseError(f"unknown variable {value!r}", pos)
            return Jet.var(self.names[value], self.nvars, self.order)
        if value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


def parse_polynomial(text, variables, order):
    """Parse ``text`` into an exact jet in ``variables`` with reliable ``order``."""
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise ParseError("duplicate variable names")
    return _Parser(text, variables, order).parse()


def polynomial_degree(text, variables):
    return parse_polynomial(text, variables, MAX_ORDER).degree


def default_variables(n):
    if n == 2:
        return ("x", "y")
    if n == 3:
        return ("x", "y", "z")
    return tuple(f"x{i + 1}" for i in range(n))


KINDS = ("generators", "quv", "wp", "basic2d")


@dataclass
class InputDocument:
    """A web description: which construction, where, and to what order.

    ``payload`` holds expression strings: ``generators`` -> list of n+1 lists
    of n strings; ``quv`` -> {"Q", "u", "v"}; ``wp`` -> list of 7 rationals
    (as strings); ``basic2d`` -> {"u"}.
    """

    kind: str
    dimension: int
    order: int = None
    variables: tuple = ()
    payload: object = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParseError(f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind in ("quv", "wp") and self.dimension != 3:
            raise ParseError(f"kind {self.kind} requires dimension 3")
        if self.kind == "basic2d" and self.dimension != 2:
            raise ParseError("kind basic2d requires dimension 2")
        if self.dimension < 2:
            raise ParseError("dimension must be at least 2")
        if not self.variables:
            self.variables = default_variables(self.dimension)
        self.variables = tuple(self.variables)
        if len(self.variables) != self.dimension:
            raise ParseError("number of variables does not match the dimension")
        self._check_payload()

    def _check_payload(self):
        n = self.dimension
        p = self.payload
        if self.kind == "generators":
            if not isinstance(p, list) or len(p) != n + 1 or any(len(g) != n for g in p):
                raise ParseError(f"generators need {n + 1} entries of {n} expressions each")
        elif self.kind == "quv":
            if not isinstance(p, dict) or set(p) != {"Q", "u", "v"}:
                raise ParseError("quv documents need exactly the keys Q, u and v")
        elif self.kind == "wp":
            if not isinstance(p, list) or len(p) != 7:
                raise ParseError("wp documents need seven parameters a, b, c, aa, bb, cc, e")
        elif self.kind == "basic2d":
            if not isinstance(p, dict) or set(p) != {"u"}:
                raise ParseError("basic2d documents need exactly the key u")

    def expressions(self):
        p = self.payload
        if self.kind == "generators":
            return [e for g in p for e in g]
        if self.kind in ("quv", "basic2d"):
            return list(p.values())
        return []

    def degree_bound(self):
        degs = [polynomial_degree(e, self.variables) for e in self.expressions()]
        return max(degs + [3 if self.kind == "wp" else 0])

    def effective_order(self, requested=None):
        """``max(6, degree + 3)`` by default; a requested order is raised to
        ``degree + 3`` so that polynomial pair determinants are exact."""
        floor = self.degree_bound() + 3
        order = requested if requested is not None else self.order
        if order is None:
            return max(6, floor)
        if order < 2:
            return order
        return max(order, floor)


def _split_top_level(text, sep=","):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def parse_document(text):
    """Parse a ``key: value`` document (or the equivalent JSON object)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc
        return _from_mapping(data)
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"line {lineno}: expected 'key: value'")
        key, value = line.split(":", 1)
        key = key.strip()
        if key in fields:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value.strip()
    return _from_mapping(fields, textual=True)


def _from_mapping(data, textual=False):
    try:
        kind = str(data["kind"]).strip()
    except KeyError:
        raise ParseError("missing 'kind'") from None
    dim = data.get("dimension")
    if dim is None:
        dim = {"quv": 3, "wp": 3, "basic2d": 2}.get(kind)
    if dim is None:
        gens = data.get("generators")
        if gens is not None and not textual:
            dim = len(gens) - 1
        else:
            count = sum(1 for k in data if re.fullmatch(r"W\d+", k))
            dim = count - 1 if count else None
    if dim is None:
        raise ParseError("missing 'dimension'")
    try:
        dim = int(dim)
    except (TypeError, ValueError):
        raise ParseError(f"dimension must be an integer, got {dim!r}") from None
    order = data.get("order")
    if order is not None:
        try:
            order = int(order)
        except (TypeError, ValueError):
            raise ParseError(f"order must be an integer, got {order!r}") from None
    variables = data.get("variables", ())
    if isinstance(variables, str):
        variables = tuple(v.strip() for v in variables.split(",") if v.strip())
    payload = None
    if kind == "generators":
        if "generators" in data and not textual:
            payload = [[str(e) for e in g] for g in data["generators"]]
        else:
            payload = []
            for i in range(1, dim + 2):
                key = f"W{i}"
                if key not in data:
                    raise ParseError(f"missing generator {key}")
                payload.append(_split_top_level(data[key]))
    elif kind == "quv":
        payload = {k: str(data[k]) for k in ("Q", "u", "v") if k in data}
    elif kind == "wp":
        params = data.get("params")
        if params is None:
            raise ParseError("missing 'params'")
        if isinstance(params, str):
            params = _split_top_level(params)
        payload = [str(p).strip() for p in params]
    elif kind == "basic2d":
        payload = {k: str(data[k]) for k in ("u",) if k in data}
    return InputDocument(kind, dim, order, tuple(variables), payload)


def load_document(path):
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())
