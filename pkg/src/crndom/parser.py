"""Text format for CRNs (``.crn``) and configuration literals.

Grammar::

    file     := (line NEWLINE)*
    line     := reaction | comment | blank
    comment  := '#' any
    reaction := name ':' complex arrow complex
    arrow    := '->' | '<->'
    complex  := '0' | term ('+' term)*
    term     := [count] species
    count    := decimal integer >= 1
    name, species := [A-Za-z][A-Za-z0-9_]*

``x: A <-> B`` expands to reactions ``x.fwd`` and ``x.rev``. Species are
numbered by first occurrence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import ComplexVector, Crn, Reaction, Species


@dataclass(frozen=True)
class SourceSpan:
    line: int
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start after end")


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span
        super().__init__(f"{span.line}:{span.start}: {message}")

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.span.line}:{self.span.start}: {self.message}"


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<arrow><->|->)
  | (?P<punct>[:+])
""", re.VERBOSE)


def _tokenize(text: str, lineno: int) -> list[tuple[str, str, SourceSpan]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            ch = text[pos]
            raise ParseError(f"unexpected character {ch!r}",
                             SourceSpan(lineno, pos + 1, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), SourceSpan(lineno, pos + 1, m.end())))
        pos = m.end()
    return tokens


class _Cursor:
    def __init__(self, tokens, lineno, line_len):
        self.tokens = tokens
        self.i = 0
        self.eol = SourceSpan(lineno, line_len + 1, line_len + 1)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def span(self):
        tok = self.peek()
        return tok[2] if tok else self.eol

    def take(self, kind=None, value=None, what=None):
        tok = self.peek()
        if tok is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            found = repr(tok[1]) if tok else "end of line"
            raise ParseError(f"expected {what or value or kind}, found {found}",
                             self.span())
        self.i += 1
        return tok


def _parse_complex(cur: _Cursor, lookup) -> ComplexVector:
    """Parse a complex; ``lookup(name, span)`` maps a species name to its index."""
    tok = cur.peek()
    if tok and tok[0] == "num" and int(tok[1]) == 0:
        nxt = cur.tokens[cur.i + 1] if cur.i + 1 < len(cur.tokens) else None
        if nxt is None or nxt[0] != "ident":
            cur.take()
            return ComplexVector.zero()
    counts: dict[int, int] = {}
    while True:
        count = 1
        tok = cur.peek()
        if tok and tok[0] == "num":
            cur.take()
            count = int(tok[1])
            if count == 0:
                raise ParseError("count must be at least 1", tok[2])
        name_tok = cur.take("ident", what="species name")
        idx = lookup(name_tok[1], name_tok[2])
        counts[idx] = counts.get(idx, 0) + count
        tok = cur.peek()
        if tok and tok[1] == "+":
            cur.take()
            continue
        return ComplexVector.from_mapping(counts)


def parse_crn(text: str) -> Crn:
    species: dict[str, int] = {}
    reactions: list[Reaction] = []
    seen: dict[str, SourceSpan] = {}

    def lookup(name, span):
        if name not in species:
            species[name] = len(species)
        return species[name]

    def claim(name, span):
        if name in seen:
            raise ParseError(f"duplicate reaction name {name!r}", span)
        seen[name] = span

    for lineno, raw in enumerate(text.split("\n"), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cur = _Cursor(_tokenize(raw, lineno), lineno, len(raw))
        name_tok = cur.take("ident", what="reaction name")
        cur.take("punct", ":", what="':'")
        lhs = _parse_complex(cur, lookup)
        arrow = cur.take("arrow", what="'->' or '<->'")
        rhs = _parse_complex(cur, lookup)
        if cur.peek() is not None:
            tok = cur.peek()
            raise ParseError(f"unexpected {tok[1]!r} after reaction", tok[2])
        name = name_tok[1]
        if arrow[1] == "->":
            claim(name, name_tok[2])
            reactions.append(Reaction(name, lhs, rhs))
        else:
            claim(name, name_tok[2])
            claim(name + ".fwd", name_tok[2])
            claim(name + ".rev", name_tok[2])
            reactions.append(Reaction(name + ".fwd", lhs, rhs))
            reactions.append(Reaction(name + ".rev", rhs, lhs))

    sp = tuple(Species(n, i) for n, i in species.items())
    return Crn(sp, tuple(reactions))


def parse_configuration(text: str, crn: Crn) -> ComplexVector:
    index = {s.name: s.index for s in crn.species}

    def lookup(name, span):
        if name not in index:
            raise ParseError(f"unknown species {name!r}", span)
        return index[name]

    if "\n" in text.strip():
        raise ParseError("configuration must be a single line",
                         SourceSpan(1, 1, 1))
    line = text.strip("\n")
    cur = _Cursor(_tokenize(line, 1), 1, len(line))
    value = _parse_complex(cur, lookup)
    if cur.peek() is not None:
        tok = cur.peek()
        raise ParseError(f"unexpected {tok[1]!r} after configuration", tok[2])
    return value


def serialize_crn(crn: Crn) -> str:
    """Canonical text of ``crn``; adjacent ``x.fwd``/``x.rev`` mirror pairs
    are folded back into ``x: ... <-> ...``."""
    lines = []
    rx = crn.reactions
    i = 0
    while i < len(rx):
        r = rx[i]
        lhs = crn.format_complex(r.reactant)
        rhs = crn.format_complex(r.product)
        if (r.name.endswith(".fwd") and i + 1 < len(rx)
                and rx[i + 1].name == r.name[:-4] + ".rev"
                and rx[i + 1].reactant == r.product
                and rx[i + 1].product == r.reactant):
            lines.append(f"{r.name[:-4]}: {lhs} <-> {rhs}")
            i += 2
            continue
        lines.append(f"{r.name}: {lhs} -> {rhs}")
        i += 1
    return "".join(line + "\n" for line in lines)
