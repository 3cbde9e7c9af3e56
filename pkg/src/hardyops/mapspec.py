"""Parser for the map-spec text format.

Grammar::

    map     := name (key '=' value)*
             | 'compose' '(' map ';' map ')'
    name    := 'affine' | 'mobius' | 'monomial' | 'poly' | 'blaschke' | 'contact'
    value   := complex | '[' complex (',' complex)* ']'
    complex := a | a+bi | a-bi | bi | -bi | i

``compose(f ; g)`` denotes ``f o g``. A ``#`` starts a comment that runs to
the end of the line. Keys per family (defaults in parentheses)::

    affine    a, b (0)
    mobius    lambda
    monomial  k, scale (1)
    poly      coeffs
    blaschke  zeros, rotation (1)
    contact   alpha

Examples: ``affine a=0.5 b=0``, ``mobius lambda=0.3+0.4i``,
``blaschke zeros=[0.5,-0.5] rotation=1``,
``compose(monomial k=2 ; mobius lambda=0.5)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

from .errors import MapSemanticError, MapSyntaxError
from .maps import Affine, Blaschke, Compose, Contact, Mobius, Monomial, Poly, SelfMap

_LITERAL_CHARS = re.compile(r"[0-9.eE+\-i]+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PUNCT = set("=()[];,")

FAMILIES = {
    "affine": ({"a"}, {"b": 0.0}),
    "mobius": ({"lambda"}, {}),
    "monomial": ({"k"}, {"scale": 1.0}),
    "poly": ({"coeffs"}, {}),
    "blaschke": ({"zeros"}, {"rotation": 1.0}),
    "contact": ({"alpha"}, {}),
}


@dataclass
class _Token:
    kind: str  # ident, punct, literal, end
    text: str
    line: int
    col: int


@dataclass
class _Value:
    value: Union[complex, List[complex]]
    line: int
    col: int


def _tokenize(src: str) -> List[_Token]:
    tokens: List[_Token] = []
    i, line, col = 0, 1, 1
    expect_value = False
    while i < len(src):
        ch = src[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < len(src) and src[i] != "\n":
                i += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, line, col))
            expect_value = ch in "=[," and (ch != "," or _in_list(tokens))
            i, col = i + 1, col + 1
            continue
        if expect_value:
            m = _LITERAL_CHARS.match(src, i)
            if m:
                tokens.append(_Token("literal", m.group(), line, col))
                i, col = m.end(), col + len(m.group())
                expect_value = False
                continue
        m = _IDENT.match(src, i)
        if m:
            tokens.append(_Token("ident", m.group(), line, col))
            i, col = m.end(), col + len(m.group())
            continue
        raise MapSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


def _in_list(tokens: List[_Token]) -> bool:
    depth = 0
    for t in tokens:
        if t.kind == "punct" and t.text == "[":
            depth += 1
        elif t.kind == "punct" and t.text == "]":
            depth -= 1
    return depth > 0


def parse_complex(text: str) -> complex:
    """Parse a complex literal such as ``0.3``, ``0.3+0.4i`` or ``-2i``."""
    if "i" in text[:-1] or "j" in text:
        raise ValueError(f"malformed complex literal {text!r}")
    body = text[:-1] + "j" if text.endswith("i") else text
    return complex(body)


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.take()
        if tok.text != text or tok.kind not in ("punct",):
            found = tok.text or "end of input"
            raise MapSyntaxError(f"expected {text!r}, found {found!r}", tok.line, tok.col)
        return tok

    def parse(self) -> SelfMap:
        m = self.parse_map()
        tok = self.peek()
        if tok.kind != "end":
            raise MapSyntaxError(f"unexpected {tok.text!r} after map", tok.line, tok.col)
        return m

    def parse_map(self) -> SelfMap:
        tok = self.take()
        if tok.kind != "ident":
            found = tok.text or "end of input"
            raise MapSyntaxError(f"expected a map name, found {found!r}", tok.line, tok.col)
        if tok.text == "compose":
            self.expect("(")
            left = self.parse_map()
            self.expect(";")
            right = self.parse_map()
            self.expect(")")
            return Compose(left, right)
        if tok.text not in FAMILIES:
            raise MapSemanticError(f"unknown map family {tok.text!r}", tok.line, tok.col)
        params: Dict[str, _Value] = {}
        while self.peek().kind == "ident" and self._is_key():
            key = self.take()
            self.expect("=")
            if key.text in params:
                raise MapSemanticError(f"duplicate key {key.text!r}", key.line, key.col)
            params[key.text] = self.parse_value()
        return _build(tok, params)

    def _is_key(self) -> bool:
        nxt = self.tokens[self.pos + 1]
        return nxt.kind == "punct" and nxt.text == "="

    def parse_value(self) -> _Value:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "[":
            self.take()
            items = [self._literal()]
            while self.peek().kind == "punct" and self.peek().text == ",":
                self.take()
                items.append(self._literal())
            self.expect("]")
            return _Value(items, tok.line, tok.col)
        return _Value(self._literal(), tok.line, tok.col)

    def _literal(self) -> complex:
        tok = self.take()
        if tok.kind != "literal":
            found = tok.text or "end of input"
            raise MapSyntaxError(f"expected a number, found {found!r}", tok.line, tok.col)
        try:
            return parse_complex(tok.text)
        except ValueError:
            raise MapSyntaxError(f"malformed number {tok.text!r}", tok.line, tok.col) from None


def _scalar(name: str, v: _Value) -> complex:
    if isinstance(v.value, list):
        raise MapSemanticError(f"{name} expects a number, not a list", v.line, v.col)
    return v.value


def _real(name: str, v: _Value) -> float:
    z = _scalar(name, v)
    if z.imag != 0:
        raise MapSemanticError(f"{name} must be real", v.line, v.col)
    return z.real


def _listed(name: str, v: _Value) -> Tuple[complex, ...]:
    if not isinstance(v.value, list):
        raise MapSemanticError(f"{name} expects a list [v1,v2,...]", v.line, v.col)
    return tuple(v.value)


def _build(tok: _Token, params: Dict[str, _Value]) -> SelfMap:
    family = tok.text
    required, defaults = FAMILIES[family]
    allowed = required | set(defaults)
    for key, v in params.items():
        if key not in allowed:
            raise MapSemanticError(f"{family} has no parameter {key!r}", v.line, v.col)
    missing = required - set(params)
    if missing:
        raise MapSemanticError(
            f"{family} is missing {', '.join(sorted(missing))}", tok.line, tok.col
        )
    vals = {k: _Value(d, tok.line, tok.col) for k, d in defaults.items()}
    vals.update(params)
    try:
        if family == "affine":
            return Affine(_scalar("a", vals["a"]), _scalar("b", vals["b"]))
        if family == "mobius":
            return Mobius(_scalar("lambda", vals["lambda"]))
        if family == "monomial":
            k = _real("k", vals["k"])
            if k != int(k):
                raise MapSemanticError("k must be an integer", vals["k"].line, vals["k"].col)
            return Monomial(int(k), _scalar("scale", vals["scale"]))
        if family == "poly":
            return Poly(_listed("coeffs", vals["coeffs"]))
        if family == "blaschke":
            return Blaschke(_listed("zeros", vals["zeros"]), _scalar("rotation", vals["rotation"]))
        return Contact(_real("alpha", vals["alpha"]))
    except ValueError as exc:
        raise MapSemanticError(str(exc), tok.line, tok.col) from None


def parse_map(spec: str) -> SelfMap:
    """Parse map-spec text into a :class:`~hardyops.maps.SelfMap`.

    Raises ``MapSyntaxError`` or ``MapSemanticError``; both carry the line
    and column of the offending token.
    """
    return _Parser(spec).parse()


def render(m: SelfMap) -> str:
    return m.render()
