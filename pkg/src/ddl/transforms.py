"""Equivalence-preserving simplifications of a theory.

Each transformation removes material whose effect is already settled,
either by a plain fact or by a conclusion of the theory's extension.  The
simplified theory must reach the same conclusions on every literal the two
Herbrand bases share; the metamorphic tests rely on exactly that.

Only the parts that are safe under team defeat are performed: satisfied
antecedent items vanish, rules with a refuted item are deleted, and chains
are cut after an element that blocks the rest.  Chain elements are never
removed from the middle of a head, since a removed element would stop
attacking its complement.
"""

from __future__ import annotations

from dataclasses import replace

from .model import (
    Extension,
    Literal,
    ModalLiteral,
    Modality,
    Rule,
    Theory,
    chain_truncate,
)

O, P = Modality.O, Modality.P


def _rebuild(t: Theory, facts, rules: list[Rule]) -> Theory:
    labels = {r.label for r in rules}
    sup = frozenset((w, l) for w, l in t.sup if w in labels and l in labels)
    return Theory(frozenset(facts), tuple(rules), sup)


def eliminate_fact(t: Theory, p: Literal) -> Theory:
    """Drop the plain fact ``p`` and compile its effect into the rules.

    Requires ``p`` in the facts and ``~p`` not in them.  Antecedent
    occurrences of ``p`` are removed, rules needing ``~p`` are deleted and
    ⊗-chains stop at ``p`` because that obligation is fulfilled.
    """
    if p not in t.facts or ~p in t.facts:
        raise ValueError(f"fact elimination needs {p} in F and {~p} not in F")
    rules = []
    for r in t.rules:
        if ~p in r.antecedent:
            continue
        r = replace(r, antecedent=r.antecedent - {p})
        n = r.head.index_of(p)
        if n is not None and r.head.in_otimes(n):
            r = chain_truncate(r, p)
        rules.append(r)
    return _rebuild(t, t.facts - {p}, rules)


def item_status(item, e: Extension, facts, weak_perm: bool = False) -> bool | None:
    """True if satisfied, False if refuted, None if the extension leaves it open."""
    if isinstance(item, Literal):
        return item in facts
    m, q = item.modality, item.literal
    plus, minus = e.status("+", m, q), e.status("-", m, q)
    if item.negated:
        return True if minus else False if plus else None
    if m is P and weak_perm:
        if plus or e.status("-", O, ~q):
            return True
        if minus and e.status("+", O, ~q):
            return False
        return None
    return True if plus else False if minus else None


def simplify_after(t: Theory, e: Extension, sign: str, m: Modality, q: Literal, weak_perm: bool = False) -> Theory:
    """Simplify ``t`` using the established conclusion ``sign m q``.

    Antecedent items about ``q`` or ``~q`` that the extension settles are
    resolved, and chains are cut right after each element this conclusion
    blocks: ``-O q`` blocks ⊗-elements, ``+P q`` blocks ⊙-elements.
    """
    if not e.status(sign, m, q):
        raise ValueError(f"{sign}{m}{q} is not in the extension")
    rules = []
    for r in t.rules:
        drop = False
        ante = set()
        for a in r.antecedent:
            if isinstance(a, ModalLiteral) and a.literal in (q, ~q):
                st = item_status(a, e, t.facts, weak_perm)
                if st is True:
                    continue
                if st is False:
                    drop = True
                    break
            ante.add(a)
        if drop:
            continue
        r = replace(r, antecedent=frozenset(ante))
        n = r.head.index_of(q)
        if n is not None and n < len(r.head):
            if (m is O and sign == "-" and r.head.in_otimes(n)) or (
                m is P and sign == "+" and not r.head.in_otimes(n)
            ):
                r = chain_truncate(r, q)
        rules.append(r)
    return _rebuild(t, t.facts, rules)


def agree_on_shared_base(t1: Theory, e1: Extension, t2: Theory, e2: Extension) -> bool:
    shared = t1.herbrand_literals() & t2.herbrand_literals()
    return e1.restricted(shared).same_conclusions(e2.restricted(shared))


def candidate_transforms(t: Theory, e: Extension, weak_perm: bool = False):
    """Yield ``(name, transformed theory)`` for every applicable transformation."""
    for f in sorted((f for f in t.facts if isinstance(f, Literal)), key=str):
        if ~f not in t.facts:
            yield f"eliminate-fact {f}", eliminate_fact(t, f)
    for key, sign, m, name in (
        ("plus_dO", "+", O, "after +dO"),
        ("minus_dO", "-", O, "after -dO"),
        ("plus_dP", "+", P, "after +dP"),
        ("minus_dP", "-", P, "after -dP"),
    ):
        for q in sorted(getattr(e, key)):
            yield f"{name} {q}", simplify_after(t, e, sign, m, q, weak_perm)
