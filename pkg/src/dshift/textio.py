"""Text grammar for polynomials, forms and presentations.

Expressions use generator names, integer and ``a/b`` literals, ``+ - *``,
parentheses and ``^``.  A ``^`` followed by an integer is a power; any other
``^`` is a wedge, which is the same graded-commutative product as ``*``.
De Rham generators are written ``d(NAME)``.

Presentation files look like::

    field Q;
    gen x : 0 weight 1;
    gen xi : -1 weight 2;
    D xi = x^2;

Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .gca import Generator, GradedRing, Poly, PresentationError, SemifreeCdga


class ParseError(PresentationError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else (f"column {col}: " if col else "")
        super().__init__(where + msg)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<form>d\(\s*[A-Za-z_][\w']*\s*\))"
                    r"|(?P<name>[A-Za-z_][\w']*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r}", col=pos + 1)
        col = m.start(m.lastgroup) + 1
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "form":
            val = "d(" + val[2:-1].strip() + ")"
            kind = "name"
        out.append((kind, val, col))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, ring: GradedRing, line: int = 0, col0: int = 0):
        try:
            self.toks = _tokenize(text)
        except ParseError as e:
            msg = str(e).split(": ", 1)[-1]
            raise ParseError(msg, line, e.col + col0) from None
        self.i = 0
        self.ring = ring
        self.line = line
        self.col0 = col0

    def err(self, msg, tok=None):
        tok = tok or self.toks[self.i]
        return ParseError(msg, self.line, self.col0 + tok[2])

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.err(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Poly:
        acc = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                acc = acc * self.power()
            elif t[0] == "op" and t[1] == "^":
                # wedge: power() already consumed any integer exponent
                self.take()
                acc = acc * self.power()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                n = self.take()
                if n[0] != "num":
                    raise self.err("division only by integer literals", n)
                if int(n[1]) == 0:
                    raise self.err("division by zero", n)
                acc = acc.scale(Fraction(1, int(n[1])))
            else:
                return acc

    def power(self) -> Poly:
        base = self.atom()
        while (self.peek()[0] == "op" and self.peek()[1] == "^"
               and self.toks[self.i + 1][0] == "num"):
            self.take()
            e = int(self.take()[1])
            base = base ** e
        return base

    def atom(self) -> Poly:
        t = self.take()
        if t[0] == "num":
            return self.ring.const(int(t[1]))
        if t[0] == "name":
            if t[1] not in self.ring.index:
                raise self.err(f"unknown generator {t[1]!r}", t)
            return self.ring.gen(t[1])
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            c = self.take()
            if c[1] != ")":
                raise self.err("expected ')'", c)
            return p
        if t[0] == "op" and t[1] == "-":
            return -self.power()
        raise self.err(f"unexpected {t[1] or 'end of input'!r}", t)


def parse_poly(text: str, ring: GradedRing, line: int = 0, col0: int = 0) -> Poly:
    return _Parser(text, ring, line, col0).parse()


def parse_form(text: str, ring: GradedRing) -> Poly:
    """Alias of :func:`parse_poly`; forms live in the de Rham ring."""
    return parse_poly(text, ring)


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(ring: GradedRing, m) -> str:
    parts = []
    prev_form = False
    out = ""
    for i, e in enumerate(m):
        if not e:
            continue
        g = ring.gens[i]
        s = g.name if e == 1 else f"{g.name}^{e}"
        if parts:
            out += "^" if (prev_form and g.form) else "*"
        out += s
        parts.append(s)
        prev_form = bool(g.form)
    return out


def sort_key(m):
    return tuple(-x for x in m)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for m in sorted(p.terms, key=sort_key):
        c = p.terms[m]
        mono = format_monomial(p.ring, m)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


# ---------------------------------------------------------------------------
# presentations

_GEN = re.compile(r"gen\s+(?P<name>[A-Za-z_][\w']*)\s*:\s*(?P<deg>[-+]?\d+)"
                  r"(?:\s+weight\s+(?P<w>\d+))?\s*$")
_DIF = re.compile(r"D\s+(?P<name>[A-Za-z_][\w']*)\s*=\s*(?P<expr>.*)$", re.S)


def _statements(text: str):
    """Yield ``(line, col, statement)`` for ``;``-terminated statements."""
    buf = []
    start = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        col = 0
        for j, ch in enumerate(line):
            if start is None and not ch.isspace():
                start = (ln, j + 1)
            if ch == ";":
                yield start[0], start[1], "".join(buf).strip()
                buf = []
                start = None
            elif start is not None:
                buf.append(ch)
        if start is not None:
            buf.append(" ")
        col += 1
    if "".join(buf).strip():
        raise ParseError("missing ';' at end of input", start[0], start[1])


def parse_presentation(text: str, name: str = "") -> SemifreeCdga:
    """Parse the presentation grammar; errors carry line and column."""
    gens: list[Generator] = []
    diffs: dict[str, tuple] = {}
    header = False
    for ln, col, st in _statements(text):
        if not header:
            if re.fullmatch(r"field\s+Q", st):
                header = True
                continue
            raise ParseError("expected header 'field Q;'", ln, col)
        if st.startswith("gen"):
            m = _GEN.match(st)
            if not m:
                raise ParseError(f"malformed generator line {st!r}", ln, col)
            nm, deg = m["name"], int(m["deg"])
            if deg > 0:
                raise ParseError(f"generator {nm} has positive degree {deg}", ln, col)
            if any(g.name == nm for g in gens):
                raise ParseError(f"duplicate generator {nm}", ln, col)
            if nm in diffs:
                raise ParseError(f"generator {nm} declared after its differential", ln, col)
            gens.append(Generator(nm, deg, int(m["w"]) if m["w"] is not None else None))
        elif st.startswith("D"):
            m = _DIF.match(st)
            if not m:
                raise ParseError(f"malformed differential line {st!r}", ln, col)
            nm = m["name"]
            if nm not in {g.name for g in gens}:
                raise ParseError(f"differential for undeclared generator {nm}", ln, col)
            if nm in diffs:
                raise ParseError(f"second differential for {nm}", ln, col)
            diffs[nm] = (ln, col + m.start("expr"), m["expr"])
        else:
            raise ParseError(f"unknown statement {st.split()[0]!r}", ln, col)
    if not header:
        raise ParseError("empty presentation: expected header 'field Q;'", 1, 1)
    ring = GradedRing(gens)
    parsed = {}
    for nm, (ln, col, expr) in diffs.items():
        p = parse_poly(expr, ring, ln, col - 1)
        pos = ring.index[nm]
        late = [ring.gens[i].name for m in p.terms for i, e in enumerate(m) if e and i >= pos]
        if late:
            raise ParseError(f"forward reference: D{nm} uses {sorted(set(late))}", ln, col)
        parsed[nm] = p
    return SemifreeCdga(gens, parsed, name=name)


def format_presentation(A: SemifreeCdga) -> str:
    lines = ["field Q;"]
    for g in A.gens:
        w = f" weight {g.weight}" if g.weight is not None else ""
        lines.append(f"gen {g.name} : {g.degree}{w};")
    for g in A.gens:
        f = A.diffs[g.name]
        if f.terms:
            lines.append(f"D {g.name} = {format_poly(f)};")
    return "\n".join(lines) + "\n"
