"""Seeded random theories for differential and property testing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import Chain, Literal, ModalLiteral, Modality, Rule, RuleKind, Theory, chain_normalize


@dataclass(frozen=True)
class GenParams:
    atoms: int = 6
    rules: int = 10
    max_antecedent: int = 3
    max_chain: int = 4
    p_defeater: float = 0.15
    p_perm_rule: float = 0.25
    p_modal_antecedent: float = 0.5
    p_fact: float = 0.3
    sup_density: float = 0.4
    seed: int = 0


def _literal(rng: random.Random, atoms: list[str]) -> Literal:
    return Literal(rng.choice(atoms), rng.random() < 0.5)


def _modal(rng: random.Random, atoms: list[str]) -> ModalLiteral:
    return ModalLiteral(rng.choice((Modality.O, Modality.P)), _literal(rng, atoms), rng.random() < 0.3)


def _head(rng: random.Random, kind: RuleKind, atoms: list[str], max_chain: int) -> Chain:
    if kind is RuleKind.DEFEATER:
        return Chain((_literal(rng, atoms),), 0)
    n = rng.randint(1, max_chain)
    elements = tuple(_literal(rng, atoms) for _ in range(n))
    otimes = rng.randint(1, n) if kind is RuleKind.OBLIGATION else 0
    return chain_normalize(Chain(elements, otimes))


def generate_theory(params: GenParams) -> Theory:
    """A random theory; superiority only ever runs from a lower to a higher rule index."""
    rng = random.Random(params.seed)
    atoms = [f"a{i}" for i in range(max(1, params.atoms))]

    facts = set()
    for atom in atoms:
        while rng.random() < params.p_fact:
            if rng.random() < 0.5:
                facts.add(Literal(atom, rng.random() < 0.6))
            else:
                facts.add(ModalLiteral(
                    rng.choice((Modality.O, Modality.P)), Literal(atom, rng.random() < 0.6), rng.random() < 0.25
                ))

    rules = []
    for i in range(params.rules):
        x = rng.random()
        if x < params.p_defeater:
            kind = RuleKind.DEFEATER
        elif x < params.p_defeater + params.p_perm_rule:
            kind = RuleKind.PERMISSION
        else:
            kind = RuleKind.OBLIGATION
        body = set()
        for _ in range(rng.randint(0, params.max_antecedent)):
            if rng.random() < params.p_modal_antecedent:
                body.add(_modal(rng, atoms))
            else:
                body.add(_literal(rng, atoms))
        rules.append(Rule(f"r{i}", frozenset(body), kind, _head(rng, kind, atoms, params.max_chain)))

    sup = set()
    for i, r in enumerate(rules):
        heads = set(r.head.elements)
        for s in rules[i + 1:]:
            if any(~c in heads for c in s.head.elements) and rng.random() < params.sup_density:
                sup.add((r.label, s.label))
    return Theory(frozenset(facts), tuple(rules), frozenset(sup))


def corpus_params(seed: int, max_atoms: int = 8, max_rules: int = 12, max_chain: int = 4,
                  max_antecedent: int = 3) -> GenParams:
    """Parameters for member ``seed`` of a bounded corpus; sizes vary with the seed."""
    rng = random.Random(seed * 7919 + 17)
    return GenParams(
        atoms=rng.randint(1, max_atoms),
        rules=rng.randint(1, max_rules),
        max_antecedent=max_antecedent,
        max_chain=max_chain,
        p_defeater=rng.uniform(0.0, 0.3),
        p_perm_rule=rng.uniform(0.1, 0.4),
        p_modal_antecedent=rng.uniform(0.2, 0.9),
        p_fact=rng.uniform(0.0, 0.5),
        sup_density=rng.uniform(0.0, 1.0),
        seed=seed,
    )
