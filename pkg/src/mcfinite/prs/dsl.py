"""Text format for polynomial recurrence systems.

::

    # Fibonacci
    dim 1
    depth 2
    init 1
    init 1
    next[1] = a[1][1] + a[2][1]

``a[j][i]`` is coordinate ``i`` of the vector ``j`` steps back.  Operator
precedence, tightest first: ``^`` (literal exponent), ``*``, unary minus,
binary ``+``/``-``.  A signed literal such as ``-3`` is also accepted as a
factor, so ``2*-3`` parses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

# A monomial is a sorted tuple of (variable index, exponent); the variable
# index of a[j][i] in a dimension-k system is (j - 1) * k + (i - 1).
Monomial = Tuple[Tuple[int, int], ...]
Poly = Dict[Monomial, int]
Terms = Tuple[Tuple[int, Monomial], ...]


class SpecError(ValueError):
    """Malformed recurrence document; carries a 1-based line/column."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


# -- polynomial helpers -----------------------------------------------------

def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: Dict[int, int] = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def poly_add(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for mono, c in q.items():
        out[mono] = out.get(mono, 0) + sign * c
        if out[mono] == 0:
            del out[mono]
    return out


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            mono = _mono_mul(ma, mb)
            out[mono] = out.get(mono, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def poly_pow(p: Poly, e: int) -> Poly:
    out: Poly = {(): 1}
    base = p
    while e:
        if e & 1:
            out = poly_mul(out, base)
        e >>= 1
        if e:
            base = poly_mul(base, base)
    return out


def poly_const(c: int) -> Poly:
    return {(): c} if c else {}


def poly_var(v: int) -> Poly:
    return {((v, 1),): 1}


def _term_key(item: Tuple[Monomial, int]):
    mono, _ = item
    degree = sum(e for _, e in mono)
    return (-degree, mono)


def poly_terms(p: Poly) -> Terms:
    """Canonical, hashable form: terms ordered by degree then monomial."""
    return tuple((c, m) for m, c in sorted(p.items(), key=_term_key))


# -- tokenizer / expression parser -----------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<var>a\s*\[\s*\d+\s*\]\s*\[\s*\d+\s*\])|(?P<op>[-+*^()]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> List[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip()) if m is None else pos
            raise SpecError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(text) + 1))
    return toks


class _ExprParser:
    def __init__(self, toks: List[_Tok], line: int, dim: int, depth: int):
        self.toks = toks
        self.i = 0
        self.line = line
        self.dim = dim
        self.depth = depth

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: Optional[_Tok] = None) -> SpecError:
        tok = tok or self.peek()
        return SpecError(message, self.line, tok.col)

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return p

    def expr(self) -> Poly:
        p = self.unary()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            sign = 1 if self.take().text == "+" else -1
            p = poly_add(p, self.unary(), sign)
        return p

    def unary(self) -> Poly:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("-", "+"):
            self.take()
            p = self.unary()
            return p if tok.text == "+" else poly_add({}, p, -1)
        return self.term()

    def term(self) -> Poly:
        p = self.power()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            p = poly_mul(p, self.power())
        return p

    def power(self) -> Poly:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.take()
            if tok.kind != "int":
                raise self.error("exponent must be a nonnegative integer literal", tok)
            base = poly_pow(base, int(tok.text))
        return base

    def atom(self) -> Poly:
        tok = self.take()
        if tok.kind == "int":
            return poly_const(int(tok.text))
        if tok.kind == "op" and tok.text in ("-", "+") and self.peek().kind == "int":
            value = int(self.take().text)
            return poly_const(-value if tok.text == "-" else value)
        if tok.kind == "var":
            j, i = (int(x) for x in re.findall(r"\d+", tok.text))
            if not 1 <= j <= self.depth:
                raise self.error(f"lag {j} in {tok.text} outside 1..{self.depth}", tok)
            if not 1 <= i <= self.dim:
                raise self.error(f"coordinate {i} in {tok.text} outside 1..{self.dim}", tok)
            return poly_var((j - 1) * self.dim + (i - 1))
        if tok.kind == "op" and tok.text == "(":
            p = self.expr()
            close = self.take()
            if close.text != ")":
                raise self.error("expected ')'", close)
            return p
        if tok.kind == "end":
            raise self.error("unexpected end of expression", tok)
        raise self.error(f"unexpected {tok.text!r}", tok)


def parse_expr(text: str, dim: int, depth: int, line: int = 1, col0: int = 0) -> Poly:
    return _ExprParser(_tokenize(text, line, col0), line, dim, depth).parse()


# -- document level ---------------------------------------------------------

_INT = re.compile(r"[+-]?\d+")


def parse_document(text: str):
    """Parse a recurrence document into ``(dim, depth, init, polys)``."""
    dim = depth = None
    init: List[Tuple[int, ...]] = []
    nexts: Dict[int, Poly] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        word = body.split(None, 1)[0]
        if word in ("dim", "depth"):
            parts = body.split()
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise SpecError(f"'{word}' needs one positive integer", lineno, indent + 1)
            value = int(parts[1])
            if word == "dim":
                if dim is not None:
                    raise SpecError("duplicate 'dim'", lineno, indent + 1)
                dim = value
            else:
                if depth is not None:
                    raise SpecError("duplicate 'depth'", lineno, indent + 1)
                depth = value
        elif word == "init":
            if dim is None:
                raise SpecError("'init' before 'dim'", lineno, indent + 1)
            rest = body[4:].strip()
            if rest.startswith("(") and rest.endswith(")"):
                rest = rest[1:-1]
            elif dim != 1:
                raise SpecError("vector initial value must be parenthesized", lineno, indent + 6)
            items = [x.strip() for x in rest.split(",")]
            if any(not _INT.fullmatch(x) for x in items):
                raise SpecError(f"bad initial vector {body[4:].strip()!r}", lineno, indent + 6)
            if len(items) != dim:
                raise SpecError(
                    f"initial vector has {len(items)} entries, dim is {dim}", lineno, indent + 6
                )
            init.append(tuple(int(x) for x in items))
        elif body.startswith("next"):
            m = re.match(r"next\s*\[\s*(\d+)\s*\]\s*=", body)
            if not m:
                raise SpecError("expected 'next[i] = EXPR'", lineno, indent + 1)
            if dim is None or depth is None:
                raise SpecError("'next' before 'dim' and 'depth'", lineno, indent + 1)
            idx = int(m.group(1))
            if not 1 <= idx <= dim:
                raise SpecError(f"next[{idx}]: index {idx} outside 1..{dim}", lineno, indent + 1)
            if idx in nexts:
                raise SpecError(f"duplicate next[{idx}]", lineno, indent + 1)
            nexts[idx] = parse_expr(body[m.end():], dim, depth, lineno, indent + m.end())
        else:
            raise SpecError(f"unknown directive {word!r}", lineno, indent + 1)
    if dim is None or depth is None:
        raise SpecError("missing 'dim' or 'depth'")
    if len(init) != depth:
        raise SpecError(f"expected {depth} init lines, found {len(init)}")
    missing = [i for i in range(1, dim + 1) if i not in nexts]
    if missing:
        raise SpecError(f"missing next[{missing[0]}]")
    polys = tuple(poly_terms(nexts[i]) for i in range(1, dim + 1))
    return dim, depth, tuple(init), polys


def format_terms(terms: Terms, dim: int) -> str:
    if not terms:
        return "0"
    out = []
    for pos, (coef, mono) in enumerate(terms):
        factors = []
        for v, e in mono:
            j, i = divmod(v, dim)
            name = f"a[{j + 1}][{i + 1}]"
            factors.append(name if e == 1 else f"{name}^{e}")
        mag = abs(coef)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if pos == 0:
            out.append(("-" if coef < 0 else "") + body)
        else:
            out.append((" - " if coef < 0 else " + ") + body)
    return "".join(out)


def format_document(dim: int, depth: int, init, polys) -> str:
    lines = [f"dim {dim}", f"depth {depth}"]
    for vec in init:
        if dim == 1:
            lines.append(f"init {vec[0]}")
        else:
            lines.append("init (" + ", ".join(str(v) for v in vec) + ")")
    for i, terms in enumerate(polys, start=1):
        lines.append(f"next[{i}] = {format_terms(terms, dim)}")
    return "\n".join(lines) + "\n"
