"""Reference evaluator: the proof conditions applied literally, to a fixpoint.

Nothing here is clever.  Every round re-evaluates every open
``(sign, modality, literal)`` triple against the conclusions of the
previous rounds, so the cost is polynomial with a large constant.  The
engine is checked against this module; keep the two independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .consistency import is_consistent
from .model import (
    EngineConfig,
    Extension,
    Literal,
    ModalLiteral,
    Modality,
    Rule,
    Theory,
    occurrence_class,
)

O, P = Modality.O, Modality.P
PLUS, MINUS = "+", "-"

Tag = tuple  # (sign, Modality, Literal)


def tag_key(tag: Tag) -> tuple:
    sign, m, lit = tag
    return (lit.atom, lit.positive, m.value, sign)


def format_tag(tag: Tag) -> str:
    sign, m, lit = tag
    return f"{sign}d{m.value} {lit}"


@dataclass(frozen=True)
class Evidence:
    """One reason a condition holds: a derived tag, or a fact lookup."""

    kind: str  # "tag", "fact", "no-fact"
    value: object

    def __str__(self) -> str:
        if self.kind == "tag":
            return format_tag(self.value)
        if self.kind == "fact":
            return f"fact {self.value}"
        return f"not a fact: {self.value}"


def _tag(sign: str, m: Modality, lit: Literal) -> Evidence:
    return Evidence("tag", (sign, m, lit))


@dataclass
class Step:
    """A proof-condition clause that fired, with the evidence it used."""

    clause: str
    rule: str | None = None
    evidence: list = field(default_factory=list)
    note: str = ""


class _Index:
    def __init__(self, theory: Theory, cfg: EngineConfig):
        self.occ: dict[Literal, list[tuple[Rule, int, Modality | None]]] = {}
        for r in theory.rules:
            for j, c in enumerate(r.head.elements, start=1):
                self.occ.setdefault(c, []).append((r, j, occurrence_class(r, j, cfg.defeater_mode)))
        for lst in self.occ.values():
            lst.sort(key=lambda e: e[0].label)
        self.beaters: dict[str, frozenset[str]] = {}
        tmp: dict[str, set[str]] = {}
        for w, l in theory.sup:
            tmp.setdefault(l, set()).add(w)
        self.beaters = {k: frozenset(v) for k, v in tmp.items()}


@dataclass
class ProofState:
    """Conclusions proved so far, each stamped with the round that added it."""

    theory: Theory
    cfg: EngineConfig = field(default_factory=EngineConfig)
    proved: dict = field(default_factory=dict)
    horizon: int | None = None

    def __post_init__(self) -> None:
        self.facts = self.theory.facts
        self._index = _Index(self.theory, self.cfg)

    def has(self, sign: str, m: Modality, lit: Literal) -> bool:
        rnd = self.proved.get((sign, m, lit))
        return rnd is not None and (self.horizon is None or rnd < self.horizon)

    def round_of(self, tag: Tag) -> int | None:
        return self.proved.get(tag)

    def snapshot(self, horizon: int) -> ProofState:
        """View of the state restricted to conclusions from rounds before ``horizon``."""
        view = object.__new__(ProofState)
        view.theory, view.cfg, view.proved, view.horizon = self.theory, self.cfg, self.proved, horizon
        view.facts, view._index = self.facts, self._index
        return view

    def fact(self, item) -> bool:
        return item in self.facts


# antecedent items and chain prefixes

def item_support(item, s: ProofState) -> list | None:
    if isinstance(item, Literal):
        return [Evidence("fact", item)] if s.fact(item) else None
    m, lit = item.modality, item.literal
    if item.negated:
        return [_tag(MINUS, m, lit)] if s.has(MINUS, m, lit) else None
    if s.has(PLUS, m, lit):
        return [_tag(PLUS, m, lit)]
    if m is P and s.cfg.weak_perm_antecedent and s.has(MINUS, O, ~lit):
        return [_tag(MINUS, O, ~lit)]
    return None


def item_refutation(item, s: ProofState) -> list | None:
    if isinstance(item, Literal):
        return None if s.fact(item) else [Evidence("no-fact", item)]
    m, lit = item.modality, item.literal
    if item.negated:
        return [_tag(PLUS, m, lit)] if s.has(PLUS, m, lit) else None
    if not s.has(MINUS, m, lit):
        return None
    if m is P and s.cfg.weak_perm_antecedent:
        if not s.has(PLUS, O, ~lit):
            return None
        return [_tag(MINUS, P, lit), _tag(PLUS, O, ~lit)]
    return [_tag(MINUS, m, lit)]


def _prefix_passed(r: Rule, k: int, s: ProofState) -> list | None:
    c = r.head.elements[k - 1]
    if r.head.in_otimes(k):
        if not s.has(PLUS, O, c):
            return None
        if not s.fact(c):
            return [_tag(PLUS, O, c), Evidence("no-fact", c)]
        if s.fact(~c):
            return [_tag(PLUS, O, c), Evidence("fact", ~c)]
        return None
    return [_tag(MINUS, P, c)] if s.has(MINUS, P, c) else None


def _prefix_blocked(r: Rule, k: int, s: ProofState) -> list | None:
    c = r.head.elements[k - 1]
    if r.head.in_otimes(k):
        if s.has(MINUS, O, c):
            return [_tag(MINUS, O, c)]
        if s.fact(c) and not s.fact(~c):
            return [Evidence("fact", c)]
        return None
    return [_tag(PLUS, P, c)] if s.has(PLUS, P, c) else None


def _applicable(r: Rule, j: int, s: ProofState) -> list | None:
    out: list = []
    for item in sorted(r.antecedent, key=str):
        ev = item_support(item, s)
        if ev is None:
            return None
        out.extend(ev)
    for k in range(1, j):
        ev = _prefix_passed(r, k, s)
        if ev is None:
            return None
        out.extend(ev)
    return out


def _discarded(r: Rule, j: int, s: ProofState) -> list | None:
    for item in sorted(r.antecedent, key=str):
        ev = item_refutation(item, s)
        if ev is not None:
            return ev
    for k in range(1, j):
        ev = _prefix_blocked(r, k, s)
        if ev is not None:
            return ev
    return None


def occurrence_status(r: Rule, j: int, s: ProofState) -> tuple[list | None, list | None]:
    """``(applicable evidence, discarded evidence)``; at most one is not None."""
    app = _applicable(r, j, s)
    disc = _discarded(r, j, s)
    assert app is None or disc is None, f"rule {r.label} both applicable and discarded at index {j}"
    return app, disc


def _index_for(r: Rule, q: Literal, j: int | None) -> int:
    if j is None:
        j = r.head.index_of(q)
        if j is None:
            raise ValueError(f"{q} does not occur in the head of {r.label}")
    return j


def applicable_O(r: Rule, q: Literal, j: int | None, s: ProofState) -> bool:
    """Applicability for an obligation at index ``j`` (antecedent plus violated prior obligations)."""
    return occurrence_status(r, _index_for(r, q, j), s)[0] is not None


def applicable_P(r: Rule, q: Literal, j: int | None, s: ProofState) -> bool:
    """Applicability for a permission at index ``j``; prior ⊙ elements must be refuted."""
    return occurrence_status(r, _index_for(r, q, j), s)[0] is not None


def discarded(r: Rule, q: Literal, j: int | None, s: ProofState) -> bool:
    return occurrence_status(r, _index_for(r, q, j), s)[1] is not None


# proof conditions; each returns the clauses that fired, or None

def prove_plus_O(q: Literal, s: ProofState) -> list[Step] | None:
    if s.fact(ModalLiteral(O, q)):
        return [Step("1", evidence=[Evidence("fact", ModalLiteral(O, q))])]
    for f in (ModalLiteral(O, ~q), ModalLiteral(O, q, True), ModalLiteral(P, ~q)):
        if s.fact(f):
            return None
    idx = s._index
    steps: list[Step] = []
    for r, j, cls in idx.occ.get(q, ()):
        if cls is O:
            app, _ = occurrence_status(r, j, s)
            if app is not None:
                steps.append(Step("2.2", r.label, app))
                break
    if not steps:
        return None
    for a, ja, cls_a in idx.occ.get(~q, ()):
        app_a, disc_a = occurrence_status(a, ja, s)
        if disc_a is not None:
            steps.append(Step("2.3.1", a.label, disc_a, f"{a.label} is discarded"))
            continue
        beaters = idx.beaters.get(a.label, ())
        found = None
        for t, jt, cls_t in idx.occ.get(q, ()):
            if t.label not in beaters or (cls_a is not O and cls_t is not O):
                continue
            app_t, _ = occurrence_status(t, jt, s)
            if app_t is not None:
                clause = "2.3.2" if cls_a is O else "2.3.3"
                found = Step(clause, t.label, app_t, f"{a.label} is beaten by {t.label} > {a.label}")
                break
        if found is None:
            return None
        steps.append(found)
    return steps


def prove_minus_O(q: Literal, s: ProofState) -> list[Step] | None:
    if s.fact(ModalLiteral(O, q)):
        return None
    for f in (ModalLiteral(O, ~q), ModalLiteral(O, q, True), ModalLiteral(P, ~q)):
        if s.fact(f):
            return [Step("2.1", evidence=[Evidence("fact", f)])]
    idx = s._index
    steps: list[Step] = []
    for r, j, cls in idx.occ.get(q, ()):
        if cls is O:
            _, disc = occurrence_status(r, j, s)
            if disc is None:
                break
            steps.append(Step("2.2", r.label, disc, f"{r.label} is discarded"))
    else:
        if not steps:
            steps.append(Step("2.2", note="no obligation rule for the literal"))
        return steps
    for a, ja, cls_a in idx.occ.get(~q, ()):
        app_a, _ = occurrence_status(a, ja, s)
        if app_a is None:
            continue
        beaters = idx.beaters.get(a.label, ())
        sub = [Step("2.3.1", a.label, app_a, f"{a.label} is applicable")]
        for t, jt, cls_t in idx.occ.get(q, ()):
            if t.label not in beaters or (cls_a is not O and cls_t is not O):
                continue
            _, disc_t = occurrence_status(t, jt, s)
            if disc_t is None:
                break
            sub.append(Step("2.3.2" if cls_a is O else "2.3.3", t.label, disc_t, f"{t.label} is discarded"))
        else:
            return sub
    return None


def prove_plus_P(q: Literal, s: ProofState) -> list[Step] | None:
    if s.fact(ModalLiteral(P, q)):
        return [Step("1", evidence=[Evidence("fact", ModalLiteral(P, q))])]
    for f in (ModalLiteral(O, ~q), ModalLiteral(P, q, True)):
        if s.fact(f):
            return None
    idx = s._index
    steps: list[Step] = []
    for r, j, cls in idx.occ.get(q, ()):
        if cls is P:
            app, _ = occurrence_status(r, j, s)
            if app is not None:
                steps.append(Step("2.2", r.label, app))
                break
    if not steps:
        return None
    for a, ja, cls_a in idx.occ.get(~q, ()):
        if cls_a is not O:
            continue
        app_a, disc_a = occurrence_status(a, ja, s)
        if disc_a is not None:
            steps.append(Step("2.3.1", a.label, disc_a, f"{a.label} is discarded"))
            continue
        beaters = idx.beaters.get(a.label, ())
        found = None
        for t, jt, _cls in idx.occ.get(q, ()):
            if t.label not in beaters:
                continue
            app_t, _ = occurrence_status(t, jt, s)
            if app_t is not None:
                found = Step("2.3.2", t.label, app_t, f"{a.label} is beaten by {t.label} > {a.label}")
                break
        if found is None:
            return None
        steps.append(found)
    return steps


def prove_minus_P(q: Literal, s: ProofState) -> list[Step] | None:
    if s.fact(ModalLiteral(P, q)):
        return None
    for f in (ModalLiteral(O, ~q), ModalLiteral(P, q, True)):
        if s.fact(f):
            return [Step("2.1", evidence=[Evidence("fact", f)])]
    idx = s._index
    steps: list[Step] = []
    for r, j, cls in idx.occ.get(q, ()):
        if cls is P:
            _, disc = occurrence_status(r, j, s)
            if disc is None:
                break
            steps.append(Step("2.2", r.label, disc, f"{r.label} is discarded"))
    else:
        if not steps:
            steps.append(Step("2.2", note="no permissive rule for the literal"))
        return steps
    for a, ja, cls_a in idx.occ.get(~q, ()):
        if cls_a is not O:
            continue
        app_a, _ = occurrence_status(a, ja, s)
        if app_a is None:
            continue
        beaters = idx.beaters.get(a.label, ())
        sub = [Step("2.3.1", a.label, app_a, f"{a.label} is applicable")]
        for t, jt, _cls in idx.occ.get(q, ()):
            if t.label not in beaters:
                continue
            _, disc_t = occurrence_status(t, jt, s)
            if disc_t is None:
                break
            sub.append(Step("2.3.2", t.label, disc_t, f"{t.label} is discarded"))
        else:
            return sub
    return None


CONDITIONS = {
    (PLUS, O): prove_plus_O,
    (MINUS, O): prove_minus_O,
    (PLUS, P): prove_plus_P,
    (MINUS, P): prove_minus_P,
}


def justify(tag: Tag, s: ProofState) -> list[Step] | None:
    sign, m, lit = tag
    return CONDITIONS[(sign, m)](lit, s)


def run_oracle(t: Theory, cfg: EngineConfig | None = None) -> ProofState:
    """Compute the full fixpoint and return the stamped proof state."""
    s = ProofState(t, cfg or EngineConfig())
    open_pairs = sorted(
        ((m, lit) for lit in t.herbrand_literals() for m in (O, P)),
        key=lambda p: (p[1].atom, p[1].positive, p[0].value),
    )
    rnd = 0
    while open_pairs:
        s.horizon = None
        new: list[Tag] = []
        still_open = []
        for m, lit in open_pairs:
            fired = None
            for sign in (PLUS, MINUS):
                if justify((sign, m, lit), s) is not None:
                    assert fired is None, f"both signs provable for {m}{lit}"
                    fired = (sign, m, lit)
            if fired is None:
                still_open.append((m, lit))
            else:
                new.append(fired)
        if not new:
            break
        for tag in new:
            s.proved[tag] = rnd
        open_pairs = still_open
        rnd += 1
    return s


def extension_from_state(s: ProofState) -> Extension:
    ext = Extension(consistent=is_consistent(s.theory))
    keys = {
        (PLUS, O): ext.plus_dO,
        (PLUS, P): ext.plus_dP,
        (MINUS, O): ext.minus_dO,
        (MINUS, P): ext.minus_dP,
    }
    for (sign, m, lit) in s.proved:
        keys[(sign, m)].add(lit)
    for lit in s.theory.herbrand_literals():
        if lit not in ext.plus_dO and lit not in ext.minus_dO:
            ext.undetermined_O.add(lit)
        if lit not in ext.plus_dP and lit not in ext.minus_dP:
            ext.undetermined_P.add(lit)
    return ext


def oracle_extension(t: Theory, cfg: EngineConfig | None = None) -> Extension:
    return extension_from_state(run_oracle(t, cfg))
