"""Recursive-descent parser for path queries.

::

    MATCH [WALK|TRAIL|ACYCLIC|SIMPLE] p = (x)-[regex]->(y)
    [WHERE condition]
    RETURN term [, term ...] [LIMIT n] [;]

Regex precedence, tightest first: ``!label``, postfix ``* + ?``,
concatenation ``.``, alternation ``|``; both binary operators are
left-associative.  Keywords, restrictors and function names are
case-insensitive; labels, variables and property keys are not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .algebra import (
    And,
    CheckTerm,
    Condition,
    IdCmp,
    IdTerm,
    LabelCmp,
    LabelTerm,
    LengthCmp,
    LengthTerm,
    NodeTerm,
    Or,
    PathCheck,
    PathTerm,
    PropertyCmp,
    PropertyTerm,
    Ref,
    Term,
    format_string,
)
from .path import Semantic

# -- regex AST ----------------------------------------------------------------


class Regex:
    def __str__(self) -> str:
        return regex_text(self)


@dataclass(frozen=True)
class LabelAtom(Regex):
    label: str


@dataclass(frozen=True)
class NegLabel(Regex):
    label: str


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Alt(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Star(Regex):
    child: Regex


@dataclass(frozen=True)
class Plus(Regex):
    child: Regex


@dataclass(frozen=True)
class Opt(Regex):
    child: Regex


_POSTFIX = {"*": Star, "+": Plus, "?": Opt}
_POSTFIX_TEXT = {Star: "*", Plus: "+", Opt: "?"}


@dataclass(frozen=True)
class ParsedQuery:
    restrictor: Optional[Semantic]
    path_var: str
    src_var: Optional[str]
    tgt_var: Optional[str]
    regex: Regex
    condition: Optional[Condition]
    terms: tuple[Term, ...]
    limit: Optional[int] = None

    def __str__(self) -> str:
        return to_text(self)


class QueryError(Exception):
    """Query rejected by the parser; ``str()`` renders as ``line:col message``."""

    def __init__(self, message: str, line: int = 1, col: int = 1, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        super().__init__(f"{line}:{col} {message}")


# -- lexer --------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<string>"(?:[^"\\]|\\[\s\S])*")
  | (?P<punct>->|<>|!=|<=|>=|[()\[\]\-.|*+?!=<>,;≠≤≥])
    """,
    re.VERBOSE,
)
_OP_ALIASES = {"!=": "<>", "≠": "<>", "≤": "<=", "≥": ">="}
_COMPARISONS = {"=", "<>", "<", ">", "<=", ">="}
_KEYWORDS = {"MATCH", "WHERE", "RETURN", "LIMIT", "AND", "OR"}
_FUNCTIONS = {
    "FIRST", "LAST", "NODE", "EDGE", "LABEL", "ID", "LENGTH",
    "ISTRAIL", "ISSIMPLE", "ISACYCLIC",
}


class Token(NamedTuple):
    kind: str  # ident | number | string | punct | eof
    text: str
    pos: int

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


def _unescape(body: str) -> str:
    return re.sub(r"\\([\s\S])", r"\1", body)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    for m in _TOKEN.finditer(text):
        if m.start() != pos:
            break
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        value = m.group()
        if kind == "punct":
            value = _OP_ALIASES.get(value, value)
        tokens.append(Token(kind, value, m.start()))
    if pos != len(text):
        line, col = _position(text, pos)
        raise QueryError(f"unexpected character {text[pos]!r}", line, col)
    tokens.append(Token("eof", "", len(text)))
    return tokens


def _position(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.src_var: Optional[str] = None
        self.tgt_var: Optional[str] = None
        self.path_var = ""

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, n: int = 1) -> Token:
        return self.tokens[min(self.i + n, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, message: str, token: Optional[Token] = None, expected=()) -> QueryError:
        token = token or self.tok
        line, col = _position(self.text, token.pos)
        if expected:
            message = f"{message}; expected {', '.join(expected)}"
        return QueryError(message, line, col, expected)

    def unexpected(self, *expected: str) -> QueryError:
        return self.error(f"unexpected {self.tok.describe()}", expected=expected)

    def at(self, punct: str) -> bool:
        return self.tok.kind == "punct" and self.tok.text == punct

    def at_keyword(self, word: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text.upper() == word

    def expect(self, punct: str) -> Token:
        if not self.at(punct):
            raise self.unexpected(repr(punct))
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise self.unexpected(word)
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise self.unexpected(what)
        return self.advance()

    # query
    def query(self) -> ParsedQuery:
        self.expect_keyword("MATCH")
        restrictor = None
        if (
            self.tok.kind == "ident"
            and self.tok.text.upper() in Semantic.__members__
            and self.peek().kind == "ident"
        ):
            restrictor = Semantic[self.advance().text.upper()]
        self.path_var = self.expect_ident("path variable").text
        self.expect("=")
        src = self.node_pattern()
        self.expect("-")
        self.expect("[")
        if self.at("]"):
            raise self.error("empty regular expression", expected=("label", "'('", "'!'"))
        regex = self.alternation()
        self.expect("]")
        self.expect("->")
        tgt_token = self.tok
        tgt = self.node_pattern()
        for name, token in ((src, None), (tgt, tgt_token)):
            if name is not None and name == self.path_var:
                raise self.error(f"variable {name!r} declared twice", token)
        if src is not None and src == tgt:
            raise self.error(f"source and target variables must differ, got {src!r}", tgt_token)
        self.src_var, self.tgt_var = src, tgt

        condition = None
        if self.at_keyword("WHERE"):
            self.advance()
            condition = self.disjunction()
        self.expect_keyword("RETURN")
        terms = [self.term()]
        while True:
            if self.at(","):
                self.advance()
                terms.append(self.term())
            elif self.tok.kind == "ident" and self.tok.text.upper() not in ("LIMIT",):
                terms.append(self.term())
            else:
                break
        limit = None
        if self.at_keyword("LIMIT"):
            self.advance()
            t = self.tok
            if t.kind != "number" or "." in t.text:
                raise self.unexpected("positive integer")
            self.advance()
            limit = int(t.text)
            if limit < 1:
                raise self.error("LIMIT must be positive", t)
        if self.at(";"):
            self.advance()
        if self.tok.kind != "eof":
            raise self.unexpected("end of input")
        return ParsedQuery(
            restrictor, self.path_var, src, tgt, regex, condition, tuple(terms), limit
        )

    def node_pattern(self) -> Optional[str]:
        self.expect("(")
        name = None
        if self.tok.kind == "ident":
            name = self.advance().text
        self.expect(")")
        return name

    # regex
    def alternation(self) -> "Regex":
        node = self.concatenation()
        while self.at("|"):
            self.advance()
            node = Alt(node, self.concatenation())
        return node

    def concatenation(self) -> "Regex":
        node = self.postfix()
        while self.at("."):
            self.advance()
            node = Concat(node, self.postfix())
        return node

    def postfix(self) -> "Regex":
        node = self.primary()
        while self.tok.kind == "punct" and self.tok.text in _POSTFIX:
            node = _POSTFIX[self.advance().text](node)
        return node

    def primary(self) -> "Regex":
        t = self.tok
        if t.kind == "ident":
            self.advance()
            return LabelAtom(t.text)
        if t.kind == "string":
            self.advance()
            return LabelAtom(_unescape(t.text[1:-1]))
        if self.at("!"):
            self.advance()
            t = self.tok
            if t.kind == "ident":
                self.advance()
                return NegLabel(t.text)
            if t.kind == "string":
                self.advance()
                return NegLabel(_unescape(t.text[1:-1]))
            raise self.error("'!' applies to a single label only", expected=("label",))
        if self.at("("):
            self.advance()
            node = self.alternation()
            self.expect(")")
            return node
        raise self.unexpected("label", "'('", "'!'")

    # conditions
    def disjunction(self) -> Condition:
        node = self.conjunction()
        while self.at_keyword("OR"):
            self.advance()
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Condition:
        node = self.condition_atom()
        while self.at_keyword("AND"):
            self.advance()
            node = And(node, self.condition_atom())
        return node

    def condition_atom(self) -> Condition:
        if self.at("("):
            self.advance()
            node = self.disjunction()
            self.expect(")")
            return node
        t = self.tok
        if t.kind != "ident":
            raise self.unexpected("condition")
        if self.peek().kind == "punct" and self.peek().text == "(":
            return self.function_condition()
        ref = self.variable_ref()
        return self.property_comparison(ref)

    def function_condition(self) -> Condition:
        name_token = self.tok
        name = name_token.text.upper()
        if name not in _FUNCTIONS:
            raise self.error(f"unknown function {name_token.text!r}")
        if name in ("FIRST", "LAST", "NODE", "EDGE"):
            ref = self.function_ref()
            return self.property_comparison(ref)
        self.advance()
        self.expect("(")
        if name in ("LABEL", "ID"):
            ref = self.ref()
            self.expect(")")
            op_token = self.tok
            op = self.comparison()
            if op not in ("=", "<>"):
                raise self.error(f"{name}() supports only = and <>", op_token)
            if name == "LABEL":
                return LabelCmp(ref, op, self.label_value())
            v = self.tok
            if v.kind != "string":
                raise self.unexpected("string literal")
            self.advance()
            return IdCmp(ref, op, _unescape(v.text[1:-1]))
        self.expect(")")
        if name == "LENGTH":
            op = self.comparison()
            value = self.literal()
            if isinstance(value, str):
                raise self.error("LENGTH() compares with a number")
            return LengthCmp(op, value)
        return PathCheck(Semantic[name[2:]])

    def variable_ref(self) -> Ref:
        t = self.expect_ident("variable")
        if t.text == self.src_var:
            return Ref("src", name=t.text)
        if t.text == self.tgt_var:
            return Ref("tgt", name=t.text)
        if t.text == self.path_var:
            raise self.error(f"path variable {t.text!r} cannot be used here", t)
        raise self.error(f"unknown variable {t.text!r}", t)

    def function_ref(self) -> Ref:
        t = self.advance()
        name = t.text.upper()
        self.expect("(")
        if name in ("FIRST", "LAST"):
            self.expect(")")
            return Ref(name.lower())
        n = self.tok
        if n.kind != "number" or "." in n.text:
            raise self.unexpected("positive integer")
        self.advance()
        index = int(n.text)
        if index < 1:
            raise self.error(f"{name}() index must be at least 1", n)
        self.expect(")")
        return Ref(name.lower(), index)

    def ref(self) -> Ref:
        t = self.tok
        if t.kind != "ident":
            raise self.unexpected("variable", "FIRST()", "LAST()", "NODE(i)", "EDGE(i)")
        if self.peek().kind == "punct" and self.peek().text == "(":
            if t.text.upper() not in ("FIRST", "LAST", "NODE", "EDGE"):
                raise self.error(f"unknown function {t.text!r}")
            return self.function_ref()
        return self.variable_ref()

    def property_comparison(self, ref: Ref) -> Condition:
        self.expect(".")
        key = self.expect_ident("property key").text
        op = self.comparison()
        return PropertyCmp(ref, key, op, self.literal())

    def comparison(self) -> str:
        if self.tok.kind == "punct" and self.tok.text in _COMPARISONS:
            return self.advance().text
        raise self.unexpected(*sorted(repr(o) for o in _COMPARISONS))

    def literal(self) -> Union[str, int, float]:
        t = self.tok
        if t.kind == "string":
            self.advance()
            return _unescape(t.text[1:-1])
        negative = False
        if self.at("-"):
            self.advance()
            negative = True
            t = self.tok
        if t.kind == "number":
            self.advance()
            value = float(t.text) if "." in t.text else int(t.text)
            return -value if negative else value
        raise self.unexpected("string", "number")

    def label_value(self) -> str:
        t = self.tok
        if t.kind == "ident":
            self.advance()
            return t.text
        if t.kind == "string":
            self.advance()
            return _unescape(t.text[1:-1])
        raise self.unexpected("label")

    # projection
    def term(self) -> Term:
        t = self.tok
        if t.kind != "ident":
            raise self.unexpected("return term")
        if self.peek().kind == "punct" and self.peek().text == "(":
            name = t.text.upper()
            if name not in _FUNCTIONS:
                raise self.error(f"unknown function {t.text!r}")
            if name in ("FIRST", "LAST", "NODE", "EDGE"):
                ref = self.function_ref()
                if self.at("."):
                    self.advance()
                    return PropertyTerm(ref, self.expect_ident("property key").text)
                return NodeTerm(ref)
            self.advance()
            self.expect("(")
            if name in ("LABEL", "ID"):
                ref = self.ref()
                self.expect(")")
                return LabelTerm(ref) if name == "LABEL" else IdTerm(ref)
            self.expect(")")
            if name == "LENGTH":
                return LengthTerm()
            return CheckTerm(Semantic[name[2:]])
        if t.text == self.path_var:
            self.advance()
            return PathTerm(t.text)
        ref = self.variable_ref()
        if self.at("."):
            self.advance()
            return PropertyTerm(ref, self.expect_ident("property key").text)
        return NodeTerm(ref)


def parse(text: str) -> ParsedQuery:
    return _Parser(text).query()


def parse_regex(text: str) -> Regex:
    p = _Parser(text)
    if p.tok.kind == "eof":
        raise p.error("empty regular expression", expected=("label", "'('", "'!'"))
    node = p.alternation()
    if p.tok.kind != "eof":
        raise p.unexpected("end of input")
    return node


# -- printing -----------------------------------------------------------------

_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _label_text(label: str) -> str:
    return label if _LABEL_RE.match(label) else format_string(label)


def _prec(r: Regex) -> int:
    if isinstance(r, Alt):
        return 0
    if isinstance(r, Concat):
        return 1
    if isinstance(r, (Star, Plus, Opt)):
        return 2
    return 3


def regex_text(r: Regex) -> str:
    def at_least(child: Regex, level: int) -> str:
        text = regex_text(child)
        return text if _prec(child) >= level else f"({text})"

    if isinstance(r, LabelAtom):
        return _label_text(r.label)
    if isinstance(r, NegLabel):
        return "!" + _label_text(r.label)
    if isinstance(r, Concat):
        return f"{at_least(r.left, 1)}.{at_least(r.right, 2)}"
    if isinstance(r, Alt):
        return f"{at_least(r.left, 0)}|{at_least(r.right, 1)}"
    return at_least(r.child, 2) + _POSTFIX_TEXT[type(r)]


def to_text(q: Union[ParsedQuery, Regex]) -> str:
    if isinstance(q, Regex):
        return regex_text(q)
    parts = ["MATCH"]
    if q.restrictor is not None:
        parts.append(q.restrictor.value)
    parts.append(
        f"{q.path_var} = ({q.src_var or ''})-[{regex_text(q.regex)}]->({q.tgt_var or ''})"
    )
    if q.condition is not None:
        parts.append(f"WHERE {q.condition.to_text()}")
    parts.append("RETURN " + ", ".join(t.to_text() for t in q.terms))
    if q.limit is not None:
        parts.append(f"LIMIT {q.limit}")
    return " ".join(parts)
