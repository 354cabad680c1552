"""Read-only parser for a small undirected subset of the DOT language.

Supported: an optional ``strict`` keyword, ``graph NAME { ... }``, node
statements with attribute lists, ``a -- b -- c [attrs]`` edge chains,
quoted and bare values, and ``//``, ``#``, ``/* */`` comments. Recognized
attributes: ``label``, ``width``, ``height``, ``color``, ``pos`` ("x,y"
with an optional trailing ``!``), plus ``label_width``/``label_height``
on edges. Anything else is ignored with a warning. Directed graphs and
subgraphs are rejected.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import GraphInputError

_SYMBOLS = "{}[];,="


@dataclass(frozen=True)
class _Token:
    kind: str  # "id" | "sym" | "edgeop" | "eof"
    value: str
    line: int
    col: int


def _fail(msg: str, line: int, col: int) -> None:
    raise GraphInputError(f"DOT parse error at line {line}, column {col}: {msg}")


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "#" or text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance()
            continue
        if text.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not text.startswith("*/", i):
                advance()
            if i >= n:
                _fail("unterminated comment", start_line, start_col)
            advance(2)
            continue
        if ch == '"':
            start_line, start_col = line, col
            advance()
            chars = []
            while i < n and text[i] != '"':
                if text[i] == "\\" and i + 1 < n and text[i + 1] in ('"', "\\"):
                    chars.append(text[i + 1])
                    advance(2)
                else:
                    chars.append(text[i])
                    advance()
            if i >= n:
                _fail("unterminated string", start_line, start_col)
            advance()
            tokens.append(_Token("id", "".join(chars), start_line, start_col))
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token("sym", ch, line, col))
            advance()
            continue
        if ch == "-":
            if text.startswith("--", i):
                tokens.append(_Token("edgeop", "--", line, col))
                advance(2)
                continue
            if text.startswith("->", i):
                _fail("directed edges are not supported", line, col)
            # fall through: negative numeral
        if ch.isalnum() or ch in "_.-":
            start_line, start_col = line, col
            chars = []
            while i < n and (text[i].isalnum() or text[i] in "_.-"):
                if text[i] == "-" and text.startswith("--", i):
                    break
                chars.append(text[i])
                advance()
            tokens.append(_Token("id", "".join(chars), start_line, start_col))
            continue
        _fail(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            _fail(f"expected {want!r}, found {tok.value!r}", tok.line, tok.col)
        return tok

    def parse_attrs(self) -> dict[str, str]:
        attrs: dict[str, str] = {}
        self.expect("sym", "[")
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.value == "]":
                self.next()
                break
            if tok.kind == "sym" and tok.value in (",", ";"):
                self.next()
                continue
            name = self.expect("id")
            self.expect("sym", "=")
            value = self.expect("id")
            attrs[name.value] = value.value
        return attrs


_NODE_ATTRS = {"label", "width", "height", "pos"}
_EDGE_ATTRS = {"label", "label_width", "label_height", "color"}


def _node_entry(node_id: str, attrs: dict[str, str], line: int, col: int) -> dict:
    entry: dict = {"id": node_id}
    for key, value in attrs.items():
        if key == "label":
            entry["label"] = value
        elif key in ("width", "height"):
            try:
                entry[key] = float(value)
            except ValueError:
                _fail(f"non-numeric {key} {value!r}", line, col)
        elif key == "pos":
            raw = value.rstrip("!")
            parts = raw.split(",")
            if len(parts) != 2:
                _fail(f"malformed pos {value!r}", line, col)
            try:
                entry["x"] = float(parts[0])
                entry["y"] = float(parts[1])
            except ValueError:
                _fail(f"malformed pos {value!r}", line, col)
        else:
            warnings.warn(f"ignoring unknown node attribute {key!r}", stacklevel=4)
    return entry


def _edge_entry(src: str, dst: str, attrs: dict[str, str], line: int, col: int) -> dict:
    entry: dict = {"source": src, "target": dst}
    for key, value in attrs.items():
        if key == "label":
            entry["label"] = value
        elif key in ("label_width", "label_height"):
            try:
                entry[key] = float(value)
            except ValueError:
                _fail(f"non-numeric {key} {value!r}", line, col)
        elif key == "color":
            entry["color"] = value
        else:
            warnings.warn(f"ignoring unknown edge attribute {key!r}", stacklevel=4)
    return entry


def parse_dot(text: str) -> dict:
    """Parse DOT text into a graph document dictionary."""
    parser = _Parser(_tokenize(text))

    tok = parser.next()
    if tok.kind == "id" and tok.value.lower() == "strict":
        tok = parser.next()
    if tok.kind != "id" or tok.value.lower() not in ("graph", "digraph"):
        _fail("expected 'graph'", tok.line, tok.col)
    if tok.value.lower() == "digraph":
        _fail("directed graphs are not supported", tok.line, tok.col)
    tok = parser.next()
    if tok.kind == "id":  # optional graph name
        tok = parser.next()
    if tok.kind != "sym" or tok.value != "{":
        _fail("expected '{'", tok.line, tok.col)

    node_order: list[str] = []
    node_attrs: dict[str, dict] = {}
    edges: list[dict] = []

    def touch_node(name: str) -> None:
        if name not in node_attrs:
            node_attrs[name] = {"id": name}
            node_order.append(name)

    while True:
        tok = parser.peek()
        if tok.kind == "eof":
            _fail("expected '}'", tok.line, tok.col)
        if tok.kind == "sym" and tok.value == "}":
            parser.next()
            break
        if tok.kind == "sym" and tok.value == ";":
            parser.next()
            continue
        if tok.kind != "id":
            _fail(f"unexpected {tok.value!r}", tok.line, tok.col)
        name_tok = parser.next()

        follow = parser.peek()
        if (
            name_tok.value.lower() in ("node", "edge", "graph")
            and follow.kind == "sym"
            and follow.value == "["
        ):
            parser.parse_attrs()
            warnings.warn(
                f"ignoring {name_tok.value.lower()} default attributes", stacklevel=2
            )
            continue

        if follow.kind == "edgeop":
            chain = [name_tok.value]
            while parser.peek().kind == "edgeop":
                parser.next()
                nxt = parser.expect("id")
                chain.append(nxt.value)
            attrs = {}
            if parser.peek().kind == "sym" and parser.peek().value == "[":
                attrs = parser.parse_attrs()
            for src, dst in zip(chain[:-1], chain[1:]):
                touch_node(src)
                touch_node(dst)
                edges.append(_edge_entry(src, dst, attrs, name_tok.line, name_tok.col))
            continue

        touch_node(name_tok.value)
        if follow.kind == "sym" and follow.value == "[":
            attrs = parser.parse_attrs()
            node_attrs[name_tok.value].update(
                _node_entry(name_tok.value, attrs, name_tok.line, name_tok.col)
            )

    trailing = parser.peek()
    if trailing.kind != "eof":
        _fail(f"unexpected {trailing.value!r} after '}}'", trailing.line, trailing.col)

    return {
        "format_version": "1",
        "nodes": [node_attrs[name] for name in node_order],
        "edges": edges,
    }
