"""Questions asked of a theory or its extension: consistency, weak permission, proofs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .consistency import ConsistencyReport, Violation, check_consistency
from .model import EngineConfig, Extension, Literal, Modality, Theory
from .oracle import Evidence, ProofState, Tag, format_tag, justify, run_oracle

__all__ = [
    "ConsistencyReport",
    "NotDerivable",
    "ProofTrace",
    "Violation",
    "check_consistency",
    "explain",
    "is_weakly_permitted",
]


def is_weakly_permitted(e: Extension, l: Literal) -> bool:
    """``l`` is weakly permitted when its complement is refuted as an obligation."""
    return ~l in e.minus_dO


@dataclass
class ProofTrace:
    """One node of a derivation.

    ``conclusion`` is set on nodes that establish a tagged literal; clause
    nodes below it carry the clause label, the rule involved and the
    evidence (further conclusions, or fact lookups as leaves).
    """

    conclusion: Tag | None
    clause: str
    rule_used: str | None = None
    children: list = field(default_factory=list)
    detail: str = ""

    def to_dict(self) -> dict:
        concl = None
        if self.conclusion is not None:
            sign, m, lit = self.conclusion
            concl = {"sign": sign, "modality": m.value, "literal": str(lit)}
        return {
            "conclusion": concl,
            "clause": self.clause,
            "rule": self.rule_used,
            "detail": self.detail,
            "children": [c.to_dict() for c in self.children],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        if self.conclusion is not None:
            head = f"{format_tag(self.conclusion)}  [clause {self.clause}]"
        else:
            head = f"clause {self.clause}"
            if self.rule_used:
                head += f" rule {self.rule_used}"
        if self.detail:
            head += f": {self.detail}"
        lines = [pad + head]
        lines += [c.render(indent + 1) for c in self.children]
        return "\n".join(lines)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def clauses(self) -> list[tuple[str, str | None]]:
        return [(n.clause, n.rule_used) for n in self.walk()]


@dataclass(frozen=True)
class NotDerivable:
    target: Tag
    reason: str

    def render(self) -> str:
        return f"{format_tag(self.target)} is not derivable: {self.reason}"


def _evidence_trace(ev: Evidence, s: ProofState, memo: dict) -> ProofTrace:
    if ev.kind == "tag":
        return _trace(ev.value, s, memo)
    if ev.kind == "fact":
        return ProofTrace(None, "fact", detail=f"{ev.value} is a fact")
    return ProofTrace(None, "fact", detail=f"{ev.value} is not a fact")


def _trace(tag: Tag, s: ProofState, memo: dict) -> ProofTrace:
    if tag in memo:
        return memo[tag]
    rnd = s.round_of(tag)
    steps = justify(tag, s.snapshot(rnd))
    assert steps is not None, f"cannot replay {format_tag(tag)}"
    children = []
    for st in steps:
        kids = [_evidence_trace(ev, s, memo) for ev in st.evidence]
        children.append(ProofTrace(None, st.clause, st.rule, kids, st.note))
    first = steps[0].clause
    if first in ("1", "2.1") or (tag[0] == "-" and first == "2.2"):
        top = first
    else:
        top = "2" if tag[0] == "+" else "2.3"
    node = ProofTrace(tag, top, steps[0].rule, children)
    memo[tag] = node
    return node


def explain(t: Theory, cfg: EngineConfig | None, target: Tag) -> ProofTrace | NotDerivable:
    """Replay the proof conditions to justify ``target = (sign, modality, literal)``.

    Every premise cited was established in an earlier round than the
    conclusion it supports, so traces are finite.
    """
    sign, m, lit = target
    if sign not in ("+", "-") or not isinstance(m, Modality):
        raise ValueError(f"bad target {target!r}")
    s = run_oracle(t, cfg or EngineConfig())
    if s.round_of(target) is None:
        other = ("-" if sign == "+" else "+", m, lit)
        if s.round_of(other) is not None:
            return NotDerivable(target, f"the opposite conclusion {format_tag(other)} holds")
        if lit not in t.herbrand_literals():
            return NotDerivable(target, f"{lit} is outside the Herbrand base")
        return NotDerivable(target, "undetermined")
    return _trace(target, s, {})
