"""Co-safe LTL formulas and their finite-word semantics.

Formulas are immutable, hashable trees built from :class:`TrueF`, :class:`Atom`,
:class:`NegAtom`, :class:`And`, :class:`Or`, :class:`Next` and :class:`Until`.
``F phi`` is sugar that the parser rewrites to ``true U phi``.

Grammar (ASCII, whitespace insignificant)::

    formula := or
    or      := and { "|" and }
    and     := until { "&" until }
    until   := unary [ "U" until ]
    unary   := "!" atom | "X" unary | "F" unary | atom | "true" | "(" formula ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Sequence, Union

__all__ = [
    "TrueF", "Atom", "NegAtom", "And", "Or", "Next", "Until", "TRUE",
    "Formula", "Eventually", "FormulaError", "FormulaSyntaxError", "UnknownAtom",
    "NegationOfNonAtom", "parse", "pretty", "atoms", "depth", "holds_on",
    "is_minimal_good_prefix", "IDENT_RE",
]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_KEYWORDS = {"true", "X", "F", "U"}


@dataclass(frozen=True)
class TrueF:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class NegAtom:
    name: str

    def __str__(self):
        return "!" + self.name


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Next:
    sub: "Formula"


@dataclass(frozen=True)
class Until:
    lhs: "Formula"
    rhs: "Formula"


Formula = Union[TrueF, Atom, NegAtom, And, Or, Next, Until]
TRUE = TrueF()


def Eventually(sub: Formula) -> Until:
    """``F sub``, stored in its normalized form ``true U sub``."""
    return Until(TRUE, sub)


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, position: int, expected: str, text: str = ""):
        self.position = position
        self.expected = expected
        super().__init__(f"syntax error at position {position}: expected {expected}"
                         + (f" in {text!r}" if text else ""))


class UnknownAtom(FormulaError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        self.position = position
        super().__init__(f"unknown atomic proposition {name!r}"
                         + (f" at position {position}" if position is not None else ""))


class NegationOfNonAtom(FormulaError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"negation applied to a non-atomic formula at position {position}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            tokens.append((m.group(1), m.start(1)))
        elif m.group(2) is not None:
            ch = m.group(2)
            if ch not in "()!&|":
                raise FormulaSyntaxError(m.start(2), "a valid token", text)
            tokens.append((ch, m.start(2)))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ap_universe: AbstractSet[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.ap = ap_universe

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str, what: str):
        tok, pos = self.tok
        if tok != value:
            raise FormulaSyntaxError(pos, what, self.text)
        self.advance()

    def parse(self) -> Formula:
        f = self.p_or()
        tok, pos = self.tok
        if tok != "<end>":
            raise FormulaSyntaxError(pos, "end of input", self.text)
        return f

    def p_or(self):
        f = self.p_and()
        while self.tok[0] == "|":
            self.advance()
            f = Or(f, self.p_and())
        return f

    def p_and(self):
        f = self.p_until()
        while self.tok[0] == "&":
            self.advance()
            f = And(f, self.p_until())
        return f

    def p_until(self):
        f = self.p_unary()
        if self.tok[0] == "U":
            self.advance()
            return Until(f, self.p_until())
        return f

    def p_unary(self):
        tok, pos = self.tok
        if tok == "!":
            self.advance()
            nxt, npos = self.tok
            if nxt == "(" or nxt in _KEYWORDS or nxt == "!":
                raise NegationOfNonAtom(pos)
            return NegAtom(self.p_atom_name())
        if tok == "X":
            self.advance()
            return Next(self.p_unary())
        if tok == "F":
            self.advance()
            return Eventually(self.p_unary())
        if tok == "true":
            self.advance()
            return TRUE
        if tok == "(":
            self.advance()
            f = self.p_or()
            self.expect(")", "')'")
            return f
        return Atom(self.p_atom_name())

    def p_atom_name(self) -> str:
        tok, pos = self.tok
        if tok == "<end>" or tok in _KEYWORDS or not IDENT_RE.match(tok):
            raise FormulaSyntaxError(pos, "an atomic proposition", self.text)
        if self.ap is not None and tok not in self.ap:
            raise UnknownAtom(tok, pos)
        self.advance()
        return tok


def parse(text: str, ap_universe: Iterable[str] | None = None) -> Formula:
    """Parse ``text`` into a formula AST.

    When ``ap_universe`` is given every atom must belong to it, otherwise
    :class:`UnknownAtom` is raised.
    """
    ap = None if ap_universe is None else frozenset(ap_universe)
    return _Parser(text, ap).parse()


_PREC = {Or: 1, And: 2, Until: 3}


def pretty(f: Formula) -> str:
    """Render ``f`` so that ``parse(pretty(f)) == f``."""
    if isinstance(f, (TrueF, Atom, NegAtom)):
        return str(f)
    if isinstance(f, Next):
        return "X " + _wrap(f.sub, 4)
    if isinstance(f, Until):
        if f.lhs == TRUE:
            return "F " + _wrap(f.rhs, 4)
        # right associative: the rhs may itself be an Until
        return f"{_wrap(f.lhs, 4)} U {_wrap(f.rhs, 3)}"
    op = " & " if isinstance(f, And) else " | "
    p = _PREC[type(f)]
    # left associative: the rhs needs parentheses at equal precedence
    return _wrap(f.lhs, p) + op + _wrap(f.rhs, p + 1)


def _wrap(f: Formula, min_prec: int) -> str:
    prec = _PREC.get(type(f), 4)
    s = pretty(f)
    return s if prec >= min_prec else f"({s})"


def atoms(f: Formula) -> frozenset:
    if isinstance(f, (Atom, NegAtom)):
        return frozenset([f.name])
    if isinstance(f, TrueF):
        return frozenset()
    if isinstance(f, Next):
        return atoms(f.sub)
    return atoms(f.lhs) | atoms(f.rhs)


def depth(f: Formula) -> int:
    if isinstance(f, (TrueF, Atom, NegAtom)):
        return 0
    if isinstance(f, Next):
        return 1 + depth(f.sub)
    return 1 + max(depth(f.lhs), depth(f.rhs))


# ---------------------------------------------------------------------------
# finite-word semantics

Word = Sequence[AbstractSet[str]]


def _sat(f: Formula, w: Word, i: int) -> bool:
    n = len(w)
    if isinstance(f, TrueF):
        return True
    if isinstance(f, Atom):
        return i < n and f.name in w[i]
    if isinstance(f, NegAtom):
        return i < n and f.name not in w[i]
    if isinstance(f, And):
        return _sat(f.lhs, w, i) and _sat(f.rhs, w, i)
    if isinstance(f, Or):
        return _sat(f.lhs, w, i) or _sat(f.rhs, w, i)
    if isinstance(f, Next):
        return i + 1 < n and _sat(f.sub, w, i + 1)
    if isinstance(f, Until):
        for j in range(i, n):
            if _sat(f.rhs, w, j):
                return True
            if not _sat(f.lhs, w, j):
                return False
        return False
    raise TypeError(f"not a formula: {f!r}")


def holds_on(w: Word, f: Formula) -> bool:
    """Strong finite-word satisfaction, used as the good-prefix oracle.

    ``X g`` needs a next position inside ``w`` and ``a U b`` needs its witness
    inside ``w``. Only ``true`` holds past the end of the word, so
    ``holds_on([], TRUE)`` is true while ``holds_on([{"p"}], Next(TRUE))`` is not.
    """
    return _sat(f, w, 0)


def is_minimal_good_prefix(w: Word, f: Formula) -> bool:
    if not holds_on(w, f):
        return False
    return not any(holds_on(w[:k], f) for k in range(len(w)))
