from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddl.model import (
    Chain,
    DefeaterMode,
    EngineConfig,
    Literal,
    ModalLiteral,
    Modality,
    Rule,
    RuleKind,
    Theory,
)
from ddl.oracle import (
    ProofState,
    applicable_O,
    applicable_P,
    discarded,
    justify,
    occurrence_status,
    oracle_extension,
    run_oracle,
)
from ddl.parser import parse_theory

O, P = Modality.O, Modality.P
a, b, c, x = (Literal(s) for s in "abcx")


def state(rule, facts=(), proved=()):
    t = Theory(frozenset(facts), (rule,))
    return ProofState(t, EngineConfig(), {tag: 0 for tag in proved})


OBL_AB = Rule("r", frozenset(), RuleKind.OBLIGATION, Chain((a, b), 2))
PERM_AB = Rule("r", frozenset(), RuleKind.PERMISSION, Chain((a, b), 0))


class TestApplicability:
    def test_violated_obligation_activates_reparation(self):
        s = state(OBL_AB, {~a}, [("+", O, a)])
        assert applicable_O(OBL_AB, b, 2, s)

    def test_fulfilled_obligation_does_not(self):
        s = state(OBL_AB, {a}, [("+", O, a)])
        assert not applicable_O(OBL_AB, b, 2, s)

    def test_missing_modal_premise(self):
        r = Rule("r", frozenset({ModalLiteral(O, x)}), RuleKind.OBLIGATION, Chain((a,), 1))
        assert not applicable_O(r, a, 1, state(r))

    def test_refuted_permission_activates_next(self):
        assert applicable_P(PERM_AB, b, 2, state(PERM_AB, proved=[("-", P, a)]))

    def test_granted_permission_does_not(self):
        assert not applicable_P(PERM_AB, b, 2, state(PERM_AB, proved=[("+", P, a)]))

    def test_mixed_chain(self):
        r = Rule("r", frozenset(), RuleKind.OBLIGATION, Chain((a, b, c), 2))
        s = state(r, {~a, ~b}, [("+", O, a), ("+", O, b)])
        assert applicable_P(r, c, 3, s)

    def test_mixed_chain_exhaustively(self):
        # (c, 3) is applicable exactly when a and b are both violated obligations
        r = Rule("r", frozenset(), RuleKind.OBLIGATION, Chain((a, b, c), 2))
        tags = [("+", O, a), ("-", O, a), ("+", O, b), ("-", O, b)]
        for picked in itertools.product([False, True], repeat=len(tags)):
            proved = [t for t, keep in zip(tags, picked) if keep]
            if ("+", O, a) in proved and ("-", O, a) in proved:
                continue
            if ("+", O, b) in proved and ("-", O, b) in proved:
                continue
            for facts in ({~a, ~b}, {a}, {~a, b}, set()):
                s = state(r, facts, proved)
                expected = (
                    ("+", O, a) in proved and a not in facts
                    and ("+", O, b) in proved and b not in facts
                )
                assert applicable_P(r, c, 3, s) == expected


class TestDiscarded:
    def test_fulfilled_obligation_discards_reparation(self):
        assert discarded(OBL_AB, b, 2, state(OBL_AB, {a}))

    def test_granted_permission_discards_next(self):
        assert discarded(PERM_AB, b, 2, state(PERM_AB, proved=[("+", P, a)]))

    def test_empty_antecedent_first_element(self):
        assert not discarded(OBL_AB, a, 1, state(OBL_AB))

    def test_non_fact_plain_premise_discards(self):
        r = Rule("r", frozenset({x}), RuleKind.OBLIGATION, Chain((a,), 1))
        assert discarded(r, a, 1, state(r))

    @given(st.sets(st.sampled_from([("+", O, a), ("-", O, a), ("+", P, a), ("-", P, a)])),
           st.sets(st.sampled_from([a, ~a])), st.integers(1, 2))
    def test_never_both(self, proved, facts, j):
        if {("+", O, a), ("-", O, a)} <= proved or {("+", P, a), ("-", P, a)} <= proved:
            return
        for r in (OBL_AB, PERM_AB):
            app, disc = occurrence_status(r, j, state(r, facts, proved))
            assert app is None or disc is None


class TestExtensions:
    def test_weekend_defeater_blocks_without_proving(self, fixture_theory):
        e = oracle_extension(fixture_theory("weekend-defeater"))
        assert Literal("UseCar", False) in e.minus_dO
        assert Literal("UseCar") not in e.plus_dO

    def test_copyright_second_option_refuted(self, fixture_theory):
        e = oracle_extension(fixture_theory("copyright"))
        assert Literal("ActualDamages") in e.plus_dP
        assert Literal("StatutoryDamages") in e.minus_dP

    def test_self_supporting_obligation_loops(self):
        e = oracle_extension(parse_theory("rule r: O(a) =>O a."))
        assert a in e.undetermined_O
        assert a not in e.plus_dO | e.minus_dO

    def test_weekend_defeater_as_permission_in_rp_mode(self, fixture_theory):
        t = fixture_theory("weekend-defeater")
        cfg = EngineConfig(DefeaterMode.DEFEATERS_IN_RP)
        assert Literal("UseCar") in oracle_extension(t, cfg).minus_dP  # r1 still stands
        stronger = Theory(t.facts, t.rules, {("r2", "r1")})
        assert Literal("UseCar") in oracle_extension(stronger, cfg).plus_dP
        assert Literal("UseCar") in oracle_extension(stronger).minus_dP

    def test_permissive_rule_variant(self):
        t = parse_theory(
            "fact Weekend.\nfact AirPollution.\nfact Emergency.\n"
            "rule r1: Weekend, AirPollution =>O ~UseCar.\nrule r2: Emergency =>P UseCar.\n"
        )
        e = oracle_extension(t)
        assert Literal("UseCar", False) in e.minus_dO
        assert Literal("UseCar") in e.minus_dP  # r1 is not beaten, so no strong permission
        assert Literal("UseCar") in oracle_extension(t, EngineConfig(DefeaterMode.DEFEATERS_ONLY)).minus_dP

    def test_invoice_reparations_apply(self, fixture_theory):
        e = oracle_extension(fixture_theory("invoice"))
        for atom in ("PayWithin7days", "Pay5%Interest", "Pay10%Interest"):
            assert Literal(atom) in e.plus_dO

    def test_second_permission_option_after_prohibition(self, fixture_theory):
        e = oracle_extension(fixture_theory("affirmative-action"))
        assert Literal("Hire_Disabled_Men", False) in e.plus_dO
        assert Literal("Hire_Disabled_Men") in e.minus_dP
        assert Literal("Hire_NonDisabled_Women") in e.plus_dP

    def test_facts_settle_modal_literals(self):
        e = oracle_extension(parse_theory("fact O(a).\nfact !P(b).\nrule r: =>P b."))
        assert a in e.plus_dO and ~a in e.minus_dO
        assert b in e.minus_dP


class TestKnownGaps:
    """O-consistent theories where obligation and opposite permission are both proved.

    The proof conditions let a defeater rescue an obligation from a
    stronger opposite obligation, while the permissive rule it overrides
    is still judged against the rules that beat it directly.
    """

    def test_obligation_with_opposite_permission(self):
        t = parse_theory(
            "rule r: =>O l.\nrule t: =>O ~l.\nrule d: ~> l.\nrule p: =>P ~l.\n"
            "sup t > r.\nsup d > t.\nsup r > p.\n"
        )
        e = oracle_extension(t)
        assert Literal("l") in e.plus_dO
        assert Literal("l", False) in e.plus_dP

    def test_permission_with_opposite_obligation(self):
        t = parse_theory(
            "rule q: =>P l.\nrule s: =>O ~l.\nrule o: =>O l.\nrule d: ~> ~l.\n"
            "sup s > q.\nsup o > s.\nsup d > o.\n"
        )
        e = oracle_extension(t)
        assert Literal("l") in e.plus_dP
        assert Literal("l", False) in e.plus_dO

    def test_permissive_rule_in_place_of_defeater(self):
        # same shape with a permissive rule rescuing the obligation; corpus seed 440 contains it
        t = parse_theory(
            "rule r1: =>P ~a.\nrule r3: =>O a.\nrule r5: =>O ~a.\nrule r6: =>P a.\n"
            "sup r1 > r3.\nsup r3 > r5.\nsup r5 > r6.\n"
        )
        e = oracle_extension(t)
        assert Literal("a") in e.plus_dP
        assert Literal("a", False) in e.plus_dO


def test_rounds_are_stratified():
    s = run_oracle(parse_theory("fact O(a).\nrule r: O(a) =>O b.\nrule u: O(b) =>O c."))
    assert s.round_of(("+", O, Literal("a"))) < s.round_of(("+", O, Literal("b"))) < s.round_of(("+", O, c))


def test_justify_cites_rule():
    s = run_oracle(parse_theory("rule r: =>O a."))
    steps = justify(("+", O, a), s)
    assert any(st.rule == "r" for st in steps)


@pytest.mark.parametrize("mode", list(DefeaterMode))
def test_empty_theory(mode):
    e = oracle_extension(Theory(), EngineConfig(mode))
    assert all(not v for v in e.sets().values())
