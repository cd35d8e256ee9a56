"""Text front end for theory files and serializers for theories and extensions.

Grammar (statements end with ``.``; ``#`` starts a comment)::

    fact   := "fact" item "."
    item   := lit | "O(" lit ")" | "P(" lit ")" | "!O(" lit ")" | "!P(" lit ")"
    lit    := ["~"] IDENT
    rule   := "rule" LABEL ":" [item ("," item)*] arrow chain "."
    arrow  := "=>O" | "=>P" | "~>"
    chain  := lit (("(x)" | "(o)") lit)*
    sup    := "sup" LABEL ">" LABEL "."

``⊗`` and ``⊙`` are accepted as aliases of ``(x)`` and ``(o)``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterator

from .model import (
    Chain,
    Extension,
    Literal,
    ModalLiteral,
    Modality,
    Rule,
    RuleKind,
    Theory,
    chain_normalize,
)

SYNTAX = "syntax"
DUPLICATE_LABEL = "duplicate-label"
MALFORMED_CHAIN = "malformed-chain"
UNKNOWN_LABEL = "unknown-label-in-sup"
NESTED_MODALITY = "nested-modality"


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    message: str
    kind: str = SYNTAX

    def __str__(self) -> str:
        return f"{self.span}: {self.kind}: {self.message}"


class TheorySyntaxError(ValueError):
    """Raised by :func:`parse_theory`; ``errors`` holds every problem found."""

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("\n".join(str(e) for e in errors))


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, OP, EOF
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v﻿]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<op>=>|~>|[~!(),:.>⊗⊙])
  | (?P<ident>[\w%']+)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> Iterator[Token | ParseError]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            yield ParseError(SourceSpan(line, col, 1), f"unexpected character {text[pos]!r}")
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "op":
            yield Token("OP", m.group(), SourceSpan(line, col, m.end() - pos))
        elif kind == "ident":
            yield Token("IDENT", m.group(), SourceSpan(line, col, m.end() - pos))
        pos = m.end()
    yield Token("EOF", "", SourceSpan(line, pos - line_start + 1, 0))


class _Abort(Exception):
    def __init__(self, error: ParseError):
        self.error = error


class _Parser:
    def __init__(self, text: str):
        self.tokens: list[Token] = []
        self.errors: list[ParseError] = []
        for t in tokenize(text):
            if isinstance(t, ParseError):
                self.errors.append(t)
            else:
                self.tokens.append(t)
        self.i = 0
        self.facts: list = []
        self.rules: list[Rule] = []
        self.rule_spans: dict[str, SourceSpan] = {}
        self.sup: list[tuple[str, str, SourceSpan, SourceSpan]] = []

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def fail(self, msg: str, kind: str = SYNTAX, span: SourceSpan | None = None):
        raise _Abort(ParseError(span or self.tok.span, msg, kind))

    def expect_op(self, text: str) -> Token:
        if self.tok.kind == "OP" and self.tok.text == text:
            return self.advance()
        found = self.tok.text or "end of input"
        self.fail(f"expected {text!r}, found {found!r}")

    def expect_ident(self, what: str) -> Token:
        if self.tok.kind == "IDENT":
            return self.advance()
        found = self.tok.text or "end of input"
        self.fail(f"expected {what}, found {found!r}")

    def at_op(self, text: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text == text

    def recover(self) -> None:
        while self.tok.kind != "EOF" and not self.at_op("."):
            self.advance()
        if self.at_op("."):
            self.advance()

    # grammar

    def parse(self) -> None:
        while self.tok.kind != "EOF":
            try:
                self.statement()
            except _Abort as exc:
                self.errors.append(exc.error)
                self.recover()

    def statement(self) -> None:
        t = self.tok
        if t.kind == "IDENT" and t.text == "fact":
            self.advance()
            self.facts.append(self.item())
            self.expect_op(".")
        elif t.kind == "IDENT" and t.text == "rule":
            self.advance()
            self.rule()
        elif t.kind == "IDENT" and t.text == "sup":
            self.advance()
            w = self.expect_ident("rule label")
            self.expect_op(">")
            l = self.expect_ident("rule label")
            self.expect_op(".")
            self.sup.append((w.text, l.text, w.span, l.span))
        else:
            self.fail(f"expected 'fact', 'rule' or 'sup', found {t.text or 'end of input'!r}")

    def literal(self) -> Literal:
        positive = True
        if self.at_op("~"):
            self.advance()
            positive = False
        name = self.expect_ident("literal")
        return Literal(name.text, positive)

    def item(self):
        negated = False
        start = self.tok.span
        if self.at_op("!"):
            self.advance()
            negated = True
        t = self.tok
        if t.kind == "IDENT" and t.text in ("O", "P") and self.peek().kind == "OP" and self.peek().text == "(":
            self.advance()
            self.advance()
            if self.at_op("!") or (
                self.tok.kind == "IDENT" and self.tok.text in ("O", "P")
                and self.peek().kind == "OP" and self.peek().text == "("
            ):
                self.fail("nested modalities are not allowed", NESTED_MODALITY)
            lit = self.literal()
            self.expect_op(")")
            return ModalLiteral(Modality(t.text), lit, negated)
        if negated:
            self.fail("'!' must be followed by O(...) or P(...)", span=start)
        return self.literal()

    def arrow(self) -> RuleKind:
        if self.at_op("~>"):
            self.advance()
            return RuleKind.DEFEATER
        if self.at_op("=>"):
            self.advance()
            t = self.tok
            if t.kind == "IDENT" and t.text in ("O", "P"):
                self.advance()
                return RuleKind.OBLIGATION if t.text == "O" else RuleKind.PERMISSION
            self.fail("expected modality O or P after '=>'")
        # '=>O' written without a space tokenizes as '=>' followed by 'O'; anything else is an error
        self.fail(f"expected '=>O', '=>P' or '~>', found {self.tok.text or 'end of input'!r}")

    def chain_op(self) -> str | None:
        t = self.tok
        if t.kind == "OP" and t.text in ("⊗", "⊙"):
            self.advance()
            return "x" if t.text == "⊗" else "o"
        if (
            t.kind == "OP" and t.text == "("
            and self.peek().kind == "IDENT" and self.peek().text in ("x", "o")
            and self.peek(2).kind == "OP" and self.peek(2).text == ")"
        ):
            op = self.peek().text
            self.advance(); self.advance(); self.advance()
            return op
        return None

    def head_literal(self) -> Literal:
        t = self.tok
        if self.at_op("!") or (
            t.kind == "IDENT" and t.text in ("O", "P")
            and self.peek().kind == "OP" and self.peek().text == "("
        ):
            self.fail("modal literals may only occur in antecedents", NESTED_MODALITY)
        return self.literal()

    def rule(self) -> None:
        label = self.expect_ident("rule label")
        self.expect_op(":")
        body = []
        if not (self.at_op("=>") or self.at_op("~>")):
            body.append(self.item())
            while self.at_op(","):
                self.advance()
                body.append(self.item())
        arrow_span = self.tok.span
        kind = self.arrow()
        elements = [self.head_literal()]
        ops: list[tuple[str, SourceSpan]] = []
        while True:
            span = self.tok.span
            op = self.chain_op()
            if op is None:
                break
            ops.append((op, span))
            elements.append(self.head_literal())
        self.expect_op(".")

        # the statement is fully consumed here, so report without aborting
        problem = None
        seen_o = False
        for op, span in ops:
            if op == "o":
                seen_o = True
            elif seen_o:
                problem = problem or ("'(x)' cannot follow '(o)' in a chain", span)
            if op == "x" and kind is RuleKind.PERMISSION:
                problem = problem or ("a =>P head must be a (o)-chain", span)
        if kind is RuleKind.DEFEATER and len(elements) > 1:
            problem = problem or ("a defeater has a single-literal head", arrow_span)
        if problem:
            self.errors.append(ParseError(problem[1], problem[0], MALFORMED_CHAIN))
            return

        if kind is RuleKind.OBLIGATION:
            otimes = 1 + sum(1 for op, _ in ops if op == "x")
        else:
            otimes = 0
        head = chain_normalize(Chain(tuple(elements), otimes))
        if label.text in self.rule_spans:
            self.errors.append(ParseError(label.span, f"rule label {label.text!r} already used", DUPLICATE_LABEL))
            return
        self.rule_spans[label.text] = label.span
        self.rules.append(Rule(label.text, frozenset(body), kind, head))

    def finish(self) -> Theory:
        sup = set()
        for w, l, wspan, lspan in self.sup:
            ok = True
            for name, span in ((w, wspan), (l, lspan)):
                if name not in self.rule_spans:
                    self.errors.append(ParseError(span, f"unknown rule label {name!r}", UNKNOWN_LABEL))
                    ok = False
            if ok:
                sup.add((w, l))
        if self.errors:
            self.errors.sort(key=lambda e: (e.span.line, e.span.column))
            raise TheorySyntaxError(self.errors)
        return Theory(frozenset(self.facts), tuple(self.rules), frozenset(sup))


def parse_theory(text: str) -> Theory:
    """Parse a theory; raises :class:`TheorySyntaxError` listing every error."""
    p = _Parser(text)
    p.parse()
    return p.finish()


def load_theory(path) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())


def format_rule(r: Rule) -> str:
    body = ", ".join(sorted(str(a) for a in r.antecedent))
    sep = " " if body else ""
    return f"rule {r.label}: {body}{sep}{r.kind} {r.head.render()}."


def serialize_theory(t: Theory) -> str:
    lines = [f"fact {f}." for f in sorted(t.facts, key=str)]
    lines += [format_rule(r) for r in t.rules]
    lines += [f"sup {w} > {l}." for w, l in sorted(t.sup)]
    return "".join(line + "\n" for line in lines)


TEXT_TAGS = {
    "plus_dO": "+dO",
    "plus_dP": "+dP",
    "minus_dO": "-dO",
    "minus_dP": "-dP",
    "undetermined_O": "?O",
    "undetermined_P": "?P",
}


def extension_to_dict(e: Extension) -> dict:
    return {k: sorted(str(q) for q in getattr(e, k)) for k in Extension.KEYS}


def extension_from_dict(d: dict) -> Extension:
    return Extension(**{k: {Literal.parse(s) for s in d.get(k, [])} for k in Extension.KEYS})


def serialize_extension(e: Extension, format: str = "json") -> str:
    data = extension_to_dict(e)
    if format == "json":
        return json.dumps(data, indent=2) + "\n"
    if format == "text":
        return "".join(f"{TEXT_TAGS[k]} {q}\n" for k in Extension.KEYS for q in data[k])
    raise ValueError(f"unknown extension format {format!r}")
