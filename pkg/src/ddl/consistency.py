"""Structural consistency of a theory: acyclic superiority and clash-free facts."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Literal, ModalLiteral, Modality, Theory

CYCLIC_SUPERIORITY = "cyclic-superiority"
COMPLEMENTARY_FACTS = "complementary-facts"
O_CLASH_FACTS = "o-clash-facts"


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: tuple

    def __str__(self) -> str:
        if self.kind == CYCLIC_SUPERIORITY:
            return f"{self.kind}: " + " > ".join(self.detail)
        return f"{self.kind}: " + ", ".join(str(x) for x in self.detail)


@dataclass
class ConsistencyReport:
    consistent: bool = True
    o_consistent: bool = True
    violations: list = field(default_factory=list)


def superiority_cycle(sup) -> list[str] | None:
    """Return one cycle of the relation (as a closed label path) or None."""
    succ: dict[str, list[str]] = {}
    for w, l in sorted(sup):
        succ.setdefault(w, []).append(l)
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    for root in sorted(succ):
        if color.get(root, WHITE) != WHITE:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        path = [root]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
                path.pop()
                continue
            c = color.get(nxt, WHITE)
            if c == GREY:
                return path[path.index(nxt):] + [nxt]
            if c == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(succ.get(nxt, ()))))
                path.append(nxt)
    return None


def check_consistency(t: Theory) -> ConsistencyReport:
    report = ConsistencyReport()
    cycle = superiority_cycle(t.sup)
    if cycle is not None:
        report.violations.append(Violation(CYCLIC_SUPERIORITY, tuple(cycle)))
        report.consistent = False
        report.o_consistent = False

    facts = t.facts
    for f in sorted(facts, key=str):
        if isinstance(f, Literal):
            if f.positive and ~f in facts:
                report.violations.append(Violation(COMPLEMENTARY_FACTS, (f, ~f)))
                report.consistent = False
            continue
        if not f.negated and ModalLiteral(f.modality, f.literal, True) in facts:
            report.violations.append(
                Violation(COMPLEMENTARY_FACTS, (f, ModalLiteral(f.modality, f.literal, True)))
            )
            report.consistent = False
        if f.modality is Modality.O and not f.negated:
            opp = ModalLiteral(Modality.O, ~f.literal)
            if f.literal.positive and opp in facts:
                report.violations.append(Violation(O_CLASH_FACTS, (f, opp)))
                report.o_consistent = False
            perm = ModalLiteral(Modality.P, ~f.literal)
            if perm in facts:
                report.violations.append(Violation(O_CLASH_FACTS, (f, perm)))
                report.o_consistent = False
    return report


def is_consistent(t: Theory) -> bool:
    return check_consistency(t).consistent
