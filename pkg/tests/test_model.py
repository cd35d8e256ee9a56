from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddl.model import (
    DELETED,
    Chain,
    DefeaterMode,
    Literal,
    ModalLiteral,
    Modality,
    Rule,
    RuleKind,
    Theory,
    chain_normalize,
    chain_truncate,
    complement_literal,
    complement_set,
    occurrence_class,
    rule_remove,
    rule_selectors,
)

O, P = Modality.O, Modality.P
a, b, c, d = (Literal(x) for x in "abcd")
m = Literal("m")

literals = st.builds(Literal, st.sampled_from(["p", "q", "Enter", "x1"]), st.booleans())
modal_literals = st.builds(ModalLiteral, st.sampled_from([O, P]), literals, st.booleans())


def obl(label, *elems, otimes=None, ante=()):
    return Rule(label, frozenset(ante), RuleKind.OBLIGATION, Chain(elems, otimes or len(elems)))


def perm(label, *elems, ante=()):
    return Rule(label, frozenset(ante), RuleKind.PERMISSION, Chain(elems, 0))


class TestLiterals:
    def test_complement_flips_polarity(self):
        p = Literal("p")
        assert complement_literal(p) == Literal("p", False)
        assert complement_literal(Literal("p", False)) == p

    def test_double_complement_of_enter(self):
        assert ~~Literal("Enter") == Literal("Enter")

    @given(literals)
    def test_complement_is_involution(self, lit):
        assert ~~lit == lit
        assert ~lit != lit

    def test_atoms_are_case_sensitive(self):
        assert Literal("enter") != Literal("Enter")

    def test_empty_atom_rejected(self):
        with pytest.raises(ValueError):
            Literal("")

    def test_outer_negation_differs_from_inner(self):
        assert ModalLiteral(O, m, negated=True) != ModalLiteral(O, ~m)

    def test_parse_and_str(self):
        assert Literal.parse("~Enter") == Literal("Enter", False)
        assert str(Literal("Enter", False)) == "~Enter"
        assert str(ModalLiteral(P, ~m, True)) == "!P(~m)"


class TestComplementSet:
    def test_obligation(self):
        assert complement_set(ModalLiteral(O, m)) == {
            ModalLiteral(O, m, True), ModalLiteral(O, ~m), ModalLiteral(P, ~m)
        }

    def test_permission(self):
        assert complement_set(ModalLiteral(P, m)) == {ModalLiteral(P, m, True), ModalLiteral(O, ~m)}

    def test_plain(self):
        assert complement_set(m) == {~m}

    def test_negated_obligation(self):
        assert complement_set(ModalLiteral(O, m, True)) == {ModalLiteral(O, m)}

    def test_negated_permission_excludes_obligation(self):
        assert complement_set(ModalLiteral(P, m, True)) == {ModalLiteral(P, m)}

    @given(modal_literals)
    def test_table_agreement(self, item):
        got = complement_set(item)
        q = item.literal
        if item.negated:
            expected = {ModalLiteral(item.modality, q)}
        elif item.modality is O:
            expected = {ModalLiteral(O, q, True), ModalLiteral(O, ~q), ModalLiteral(P, ~q)}
        else:
            expected = {ModalLiteral(P, q, True), ModalLiteral(O, ~q)}
        assert got == expected
        assert item not in got


class TestChainAlgebra:
    def test_truncate_at_first_element(self):
        ca, cp = Literal("CreditActivity", False), Literal("CivilPenalty")
        r = obl("r1", ca, cp)
        assert chain_truncate(r, ca).head == Chain((ca,), 1)
        assert chain_truncate(r, ca).kind is RuleKind.OBLIGATION

    def test_truncate_permission_prefix(self):
        assert chain_truncate(perm("r", a, b, c), b).head == Chain((a, b), 0)

    def test_truncate_missing_literal_is_identity(self):
        r = obl("r", a, b)
        assert chain_truncate(r, d) is r

    def test_truncate_clamps_otimes(self):
        r = obl("r", a, b, c, otimes=3)
        assert chain_truncate(r, b).head == Chain((a, b), 2)

    def test_remove_middle_of_otimes(self):
        c1, c2 = Literal("c1"), Literal("c2")
        assert rule_remove(obl("r", c1, a, c2), a).head == Chain((c1, c2), 2)

    def test_remove_sole_obligation_flips_kind(self):
        c2 = Literal("c2")
        out = rule_remove(obl("r", a, c2, otimes=1), a)
        assert out.kind is RuleKind.PERMISSION
        assert out.head == Chain((c2,), 0)

    def test_remove_last_element_deletes(self):
        assert rule_remove(perm("r", a), a) is DELETED
        assert not DELETED

    def test_remove_from_odot_segment(self):
        out = rule_remove(obl("r", a, b, c, otimes=1), c)
        assert out.head == Chain((a, b), 1) and out.kind is RuleKind.OBLIGATION

    def test_remove_missing_is_identity(self):
        r = perm("r", a, b)
        assert rule_remove(r, d) is r

    def test_normalize_keeps_leftmost(self):
        assert chain_normalize(Chain((a, b, a), 3)) == Chain((a, b), 2)

    def test_normalize_no_duplicates(self):
        assert chain_normalize(Chain((a, b), 1)) == Chain((a, b), 1)

    def test_normalize_across_segments(self):
        assert chain_normalize(Chain((a, a, a), 2)) == Chain((a,), 1)

    @given(st.lists(st.sampled_from([a, b, c, ~a]), min_size=1, max_size=6), st.data())
    def test_algebra_properties(self, elems, data):
        otimes = data.draw(st.integers(1, len(elems)))
        ch = Chain(tuple(elems), otimes)
        norm = chain_normalize(ch)
        assert chain_normalize(norm) == norm
        assert len(set(norm.elements)) == len(norm.elements)
        # survivors keep their relative order
        it = iter(ch.elements)
        assert all(any(x == y for y in it) for x in norm.elements)
        r = Rule("r", frozenset(), RuleKind.OBLIGATION, norm)
        target = data.draw(st.sampled_from(norm.elements))
        once = chain_truncate(r, target)
        assert chain_truncate(once, target) == once
        removed = rule_remove(r, target)
        rest = [x for x in norm.elements if x != target]
        if removed is DELETED:
            assert not rest
        else:
            assert list(removed.head.elements) == rest

    def test_render(self):
        assert Chain((a, b, c), 2).render() == "a (x) b (o) c"

    def test_chain_rejects_bad_otimes(self):
        with pytest.raises(ValueError):
            Chain((a,), 2)
        with pytest.raises(ValueError):
            Chain((), 0)


class TestRulesAndTheories:
    def test_kind_constraints(self):
        with pytest.raises(ValueError):
            Rule("p", frozenset(), RuleKind.PERMISSION, Chain((a, b), 1))
        with pytest.raises(ValueError):
            Rule("d", frozenset(), RuleKind.DEFEATER, Chain((a, b), 0))
        with pytest.raises(ValueError):
            Rule("o", frozenset(), RuleKind.OBLIGATION, Chain((a,), 0))

    def test_theory_validation(self):
        r = obl("r", a)
        with pytest.raises(ValueError):
            Theory(rules=(r, r))
        with pytest.raises(ValueError):
            Theory(rules=(r,), sup={("r", "ghost")})

    def test_herbrand_base_excludes_plain_antecedents(self):
        t = Theory(frozenset({Literal("Park")}), (obl("r", a, ante={Literal("Park"), ModalLiteral(P, b)}),))
        assert t.herbrand_literals() == {a, ~a, b, ~b}
        assert len(t.herbrand_base()) == 8

    def test_size(self):
        t = Theory(frozenset({a}), (obl("r", b, c, ante={a}),))
        assert t.size() == 1 + (1 + 2) + 1


class TestSelectors:
    def test_segment_tags(self):
        r = obl("r", a, b, c, otimes=2)
        sel = rule_selectors([r])
        assert sel.RO(b, 2) == [r]
        assert sel.RP(c, 3) == [r]
        assert sel.RP(b) == [] and sel.RO(c) == []

    def test_defeater_default_mode(self):
        dft = Rule("d", frozenset(), RuleKind.DEFEATER, Chain((Literal("q"),), 0))
        sel = rule_selectors([dft])
        assert sel.RP(Literal("q")) == []
        assert sel.defeaters == [dft]

    def test_defeater_in_rp_mode(self):
        dft = Rule("d", frozenset(), RuleKind.DEFEATER, Chain((Literal("q"),), 0))
        sel = rule_selectors([dft], DefeaterMode.DEFEATERS_IN_RP)
        assert sel.RP(Literal("q"), 1) == [dft]

    def test_defeaters_only_mode_drops_permission_rules(self):
        p = perm("p", a)
        dft = Rule("d", frozenset(), RuleKind.DEFEATER, Chain((a,), 0))
        sel = rule_selectors([p, dft], DefeaterMode.DEFEATERS_ONLY)
        assert sel.RP(a) == [dft]

    @given(st.integers(1, 4), st.integers(0, 4))
    def test_segments_partition_rules_mode(self, n, k):
        otimes = max(1, min(k, n))
        r = obl("r", *[Literal(f"e{i}") for i in range(n)], otimes=otimes)
        for i in range(1, n + 1):
            cls = occurrence_class(r, i)
            assert cls in (O, P)
            assert (cls is O) == (i <= otimes)
