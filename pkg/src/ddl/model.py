"""Logical vocabulary for modal defeasible theories.

Literals, modal literals, reparation chains, rules and theories, plus the
pure chain algebra (truncation, removal, contraction) and the complement
sets used when a conclusion is established.
"""

from __future__ import annotations

import enum
import sys
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Union


class Modality(enum.Enum):
    O = "O"
    P = "P"

    def __str__(self) -> str:
        return self.value


class RuleKind(enum.Enum):
    OBLIGATION = "=>O"
    PERMISSION = "=>P"
    DEFEATER = "~>"

    def __str__(self) -> str:
        return self.value


class DefeaterMode(enum.Enum):
    """Which rules may derive strong permissions."""

    RULES_ONLY = "rules-only"
    DEFEATERS_IN_RP = "defeaters-in-RP"
    DEFEATERS_ONLY = "defeaters-only"


@dataclass(frozen=True, order=True)
class Literal:
    atom: str
    positive: bool = True

    def __post_init__(self) -> None:
        if not self.atom:
            raise ValueError("atom name must be non-empty")
        # interned names make equality and hashing cheap on large theories
        object.__setattr__(self, "atom", sys.intern(self.atom))

    def __invert__(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return self.atom if self.positive else "~" + self.atom

    @classmethod
    def parse(cls, text: str) -> Literal:
        text = text.strip()
        if text.startswith("~"):
            return cls(text[1:], False)
        return cls(text, True)


@dataclass(frozen=True, order=True)
class ModalLiteral:
    """``O l``, ``P l`` or their outer negations ``¬O l``, ``¬P l``."""

    modality: Modality
    literal: Literal
    negated: bool = False

    def __str__(self) -> str:
        return f"{'!' if self.negated else ''}{self.modality}({self.literal})"


AntecedentItem = Union[Literal, ModalLiteral]


def complement_literal(q: Literal) -> Literal:
    return ~q


def complement_set(item: AntecedentItem) -> frozenset:
    """Items that are refuted once ``item`` holds.

    Note the asymmetry for ``¬P m``: its complement is ``{P m}`` only,
    because failing to derive ``P m`` says nothing about ``O m``.
    """
    if isinstance(item, Literal):
        return frozenset({~item})
    m, lit = item.modality, item.literal
    if item.negated:
        return frozenset({ModalLiteral(m, lit)})
    if m is Modality.O:
        return frozenset({
            ModalLiteral(Modality.O, lit, negated=True),
            ModalLiteral(Modality.O, ~lit),
            ModalLiteral(Modality.P, ~lit),
        })
    return frozenset({
        ModalLiteral(Modality.P, lit, negated=True),
        ModalLiteral(Modality.O, ~lit),
    })


def item_literal(item: AntecedentItem) -> Literal:
    return item if isinstance(item, Literal) else item.literal


@dataclass(frozen=True)
class Chain:
    """A reparation chain ``c1 ⊗ ... ⊗ ck ⊙ ... ⊙ cn``.

    ``otimes_len`` counts the leading elements of the ⊗-segment; for an
    obligation rule it is at least 1 (its first element is always an
    obligation), for permission rules and defeaters it is 0.
    """

    elements: tuple[Literal, ...]
    otimes_len: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("a chain needs at least one literal")
        if not 0 <= self.otimes_len <= len(self.elements):
            raise ValueError(f"bad otimes_len {self.otimes_len} for chain of {len(self.elements)}")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, a: Literal) -> int | None:
        """1-based index of ``a``, or None."""
        try:
            return self.elements.index(a) + 1
        except ValueError:
            return None

    def in_otimes(self, n: int) -> bool:
        """True when the element at 1-based index ``n`` lies in the ⊗-segment."""
        return n <= self.otimes_len

    def render(self) -> str:
        out = [str(self.elements[0])]
        for i, c in enumerate(self.elements[1:], start=2):
            out.append("(x)" if i <= self.otimes_len else "(o)")
            out.append(str(c))
        return " ".join(out)

    def __str__(self) -> str:
        return self.render()


def chain_normalize(c: Chain) -> Chain:
    """Drop every later duplicate of a literal, keeping the leftmost one."""
    seen: set[Literal] = set()
    kept: list[Literal] = []
    otimes = c.otimes_len
    for i, lit in enumerate(c.elements, start=1):
        if lit in seen:
            if i <= c.otimes_len:
                otimes -= 1
            continue
        seen.add(lit)
        kept.append(lit)
    return Chain(tuple(kept), otimes)


@dataclass(frozen=True)
class Rule:
    label: str
    antecedent: frozenset
    kind: RuleKind
    head: Chain

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", frozenset(self.antecedent))
        if self.kind is RuleKind.OBLIGATION and self.head.otimes_len < 1:
            raise ValueError(f"rule {self.label}: obligation chain must open with an obligation")
        if self.kind is RuleKind.PERMISSION and self.head.otimes_len != 0:
            raise ValueError(f"rule {self.label}: permission rules carry a pure (o)-chain")
        if self.kind is RuleKind.DEFEATER and (len(self.head) != 1 or self.head.otimes_len != 0):
            raise ValueError(f"rule {self.label}: a defeater has a single-literal head")
        for item in self.antecedent:
            if not isinstance(item, (Literal, ModalLiteral)):
                raise TypeError(f"rule {self.label}: bad antecedent item {item!r}")

    @property
    def is_defeater(self) -> bool:
        return self.kind is RuleKind.DEFEATER

    def __str__(self) -> str:
        body = ", ".join(sorted(str(a) for a in self.antecedent))
        return f"{self.label}: {body} {self.kind} {self.head}".replace(":  ", ": ")


class _Deleted:
    """Marker returned when a removal leaves a rule with an empty head."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DELETED"

    def __bool__(self) -> bool:
        return False


DELETED = _Deleted()


def chain_truncate(r: Rule, a: Literal) -> Rule:
    """``C(r)!a``: keep the prefix of the head ending at ``a`` (identity on a miss)."""
    n = r.head.index_of(a)
    if n is None:
        return r
    head = Chain(r.head.elements[:n], min(r.head.otimes_len, n))
    return replace(r, head=head)


def rule_remove(r: Rule, a: Literal) -> Rule | _Deleted:
    """``C(r) ⊖ a``: remove ``a`` from the head.

    Removing the only ⊗-element of an obligation rule whose tail is a
    ⊙-sequence turns it into a permission rule over that tail.
    """
    n = r.head.index_of(a)
    if n is None:
        return r
    elements = r.head.elements[: n - 1] + r.head.elements[n:]
    if not elements:
        return DELETED
    otimes = r.head.otimes_len - 1 if n <= r.head.otimes_len else r.head.otimes_len
    kind = r.kind
    if kind is RuleKind.OBLIGATION and otimes == 0:
        kind = RuleKind.PERMISSION
    return replace(r, kind=kind, head=Chain(elements, otimes))


@dataclass(frozen=True)
class Theory:
    facts: frozenset = frozenset()
    rules: tuple[Rule, ...] = ()
    sup: frozenset = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "facts", frozenset(self.facts))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "sup", frozenset(self.sup))
        labels = [r.label for r in self.rules]
        if len(set(labels)) != len(labels):
            raise ValueError("rule labels must be unique")
        known = set(labels)
        for w, l in self.sup:
            if w not in known or l not in known:
                raise ValueError(f"superiority pair ({w}, {l}) names an unknown rule")

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r
        raise KeyError(label)

    def canonical(self) -> tuple:
        """Order-insensitive identity, used to compare theories up to rule order."""
        return (self.facts, frozenset(self.rules), self.sup)

    def size(self) -> int:
        """Literal occurrences plus number of rules."""
        occ = len(self.facts)
        for r in self.rules:
            occ += len(r.antecedent) + len(r.head)
        return occ + len(self.rules)

    def herbrand_literals(self) -> frozenset:
        """Literals (closed under complement) that occur in a head or under a modality.

        Plain antecedent literals and plain facts are not part of the base:
        no rule can conclude anything about them.
        """
        out: set[Literal] = set()
        for f in self.facts:
            if isinstance(f, ModalLiteral):
                out.add(f.literal)
        for r in self.rules:
            out.update(r.head.elements)
            for a in r.antecedent:
                if isinstance(a, ModalLiteral):
                    out.add(a.literal)
        return frozenset(out | {~l for l in out})

    def herbrand_base(self) -> frozenset:
        return frozenset(
            HerbrandEntry(m, l) for l in self.herbrand_literals() for m in Modality
        )


@dataclass(frozen=True, order=True)
class HerbrandEntry:
    modality: Modality
    literal: Literal


def occurrence_class(r: Rule, n: int, mode: DefeaterMode = DefeaterMode.RULES_ONLY) -> Modality | None:
    """Which of ``R^O[q,n]`` / ``R^P[q,n]`` the occurrence at index ``n`` belongs to.

    Obligation occurrences do not depend on the defeater mode; permission
    occurrences do.  None means the occurrence only attacks and counterattacks.
    """
    if r.kind is RuleKind.OBLIGATION and r.head.in_otimes(n):
        return Modality.O
    if mode is DefeaterMode.DEFEATERS_ONLY:
        return Modality.P if r.kind is RuleKind.DEFEATER else None
    if r.kind is RuleKind.DEFEATER:
        return Modality.P if mode is DefeaterMode.DEFEATERS_IN_RP else None
    return Modality.P


@dataclass
class RuleSelectors:
    """Indexed views ``R[q]``, ``R[q,n]``, ``R^O[q,n]``, ``R^P[q,n]``, ``R^□``, ``R_def``."""

    mode: DefeaterMode
    occurrences: dict = field(default_factory=lambda: defaultdict(list))
    by_modality: dict = field(default_factory=lambda: {Modality.O: [], Modality.P: []})
    defeaters: list = field(default_factory=list)

    def R(self, q: Literal, n: int | None = None) -> list[Rule]:
        return [r for r, i in self.occurrences.get(q, ()) if n is None or i == n]

    def R_mod(self, m: Modality, q: Literal, n: int | None = None) -> list[Rule]:
        return [
            r for r, i in self.occurrences.get(q, ())
            if (n is None or i == n) and occurrence_class(r, i, self.mode) is m
        ]

    def RO(self, q: Literal, n: int | None = None) -> list[Rule]:
        return self.R_mod(Modality.O, q, n)

    def RP(self, q: Literal, n: int | None = None) -> list[Rule]:
        return self.R_mod(Modality.P, q, n)

    def index(self, r: Rule, q: Literal) -> int | None:
        return r.head.index_of(q)


def rule_selectors(rules: Iterable[Rule], mode: DefeaterMode = DefeaterMode.RULES_ONLY) -> RuleSelectors:
    sel = RuleSelectors(mode)
    for r in rules:
        for i, q in enumerate(r.head.elements, start=1):
            sel.occurrences[q].append((r, i))
        if r.kind is RuleKind.OBLIGATION:
            sel.by_modality[Modality.O].append(r)
        elif r.kind is RuleKind.PERMISSION:
            sel.by_modality[Modality.P].append(r)
        else:
            sel.defeaters.append(r)
    return sel


@dataclass
class Extension:
    """The four conclusion sets plus the literals left undetermined.

    ``consistent`` is False when the input theory failed the consistency
    check; the sets are still the fixpoint, but the usual guarantees
    (no literal both proved and refuted, and so on) are not promised.
    """

    plus_dO: set = field(default_factory=set)
    plus_dP: set = field(default_factory=set)
    minus_dO: set = field(default_factory=set)
    minus_dP: set = field(default_factory=set)
    undetermined_O: set = field(default_factory=set)
    undetermined_P: set = field(default_factory=set)
    consistent: bool = True

    KEYS = ("plus_dO", "plus_dP", "minus_dO", "minus_dP", "undetermined_O", "undetermined_P")

    def sets(self) -> dict:
        return {k: getattr(self, k) for k in self.KEYS}

    def same_conclusions(self, other: Extension) -> bool:
        return all(getattr(self, k) == getattr(other, k) for k in self.KEYS)

    def restricted(self, literals: Iterable[Literal]) -> Extension:
        keep = set(literals)
        return Extension(**{k: getattr(self, k) & keep for k in self.KEYS}, consistent=self.consistent)

    def status(self, sign: str, modality: Modality, q: Literal) -> bool:
        key = ("plus_d" if sign == "+" else "minus_d") + modality.value
        return q in getattr(self, key)


@dataclass(frozen=True)
class EngineConfig:
    """Semantic switches shared by the engine and the oracle."""

    defeater_mode: DefeaterMode = DefeaterMode.RULES_ONLY
    weak_perm_antecedent: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.defeater_mode, str):
            object.__setattr__(self, "defeater_mode", DefeaterMode(self.defeater_mode))
