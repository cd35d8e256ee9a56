from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddl.generate import corpus_params, generate_theory
from ddl.model import Chain, Extension, Literal, ModalLiteral, Modality, RuleKind, Theory
from ddl.parser import (
    DUPLICATE_LABEL,
    MALFORMED_CHAIN,
    NESTED_MODALITY,
    SYNTAX,
    UNKNOWN_LABEL,
    TheorySyntaxError,
    extension_from_dict,
    extension_to_dict,
    parse_theory,
    serialize_extension,
    serialize_theory,
)

CREDIT = """
rule r1: => O ~CreditActivity (x) CivilPenalty.
rule r2: CreditLicence =>P CreditActivity.
sup r2 > r1.
"""


def errors_of(text):
    with pytest.raises(TheorySyntaxError) as info:
        parse_theory(text)
    return info.value.errors


def test_credit_act_theory():
    t = parse_theory(CREDIT)
    r1, r2 = t.rules
    assert r1.kind is RuleKind.OBLIGATION
    assert r1.head == Chain((Literal("CreditActivity", False), Literal("CivilPenalty")), 2)
    assert r2.kind is RuleKind.PERMISSION and r2.antecedent == {Literal("CreditLicence")}
    assert t.sup == {("r2", "r1")}


def test_copyright_rule_is_odot_chain():
    t = parse_theory("rule r: infringement, beforeJudgment =>P ActualDamages (o) StatutoryDamages.")
    (r,) = t.rules
    assert r.kind is RuleKind.PERMISSION
    assert r.head == Chain((Literal("ActualDamages"), Literal("StatutoryDamages")), 0)


def test_modal_items_and_outer_negation():
    t = parse_theory("fact !O(a).\nfact O(~a).\nrule r: P(b), !P(~c) =>O d.")
    assert t.facts == {ModalLiteral(Modality.O, Literal("a"), True), ModalLiteral(Modality.O, Literal("a", False))}
    assert t.rules[0].antecedent == {
        ModalLiteral(Modality.P, Literal("b")), ModalLiteral(Modality.P, Literal("c", False), True)
    }


def test_defeater_and_unicode_aliases():
    t = parse_theory("rule d: w ~> UseCar.\nrule r: =>O a ⊗ b ⊙ c.")
    assert t.rules[0].kind is RuleKind.DEFEATER
    assert t.rules[1].head == Chain(tuple(map(Literal, "abc")), 2)


def test_duplicates_are_normalized_and_facts_deduplicated():
    t = parse_theory("fact a.\nfact a.\nrule r: =>O a (x) b (x) a.")
    assert len(t.facts) == 1
    assert t.rules[0].head == Chain((Literal("a"), Literal("b")), 2)


def test_crlf_and_comments():
    t = parse_theory("# header\r\nfact a. # trailing\r\nfact b.\r\n")
    assert t.facts == {Literal("a"), Literal("b")}


def test_conflicting_facts_parse():
    t = parse_theory("fact O(a).\nfact !O(a).")
    assert len(t.facts) == 2


@pytest.mark.parametrize(
    "text, kind",
    [
        ("rule bad: =>P a (x) b.", MALFORMED_CHAIN),
        ("rule r: =>O a (o) b (x) c.", MALFORMED_CHAIN),
        ("rule d: ~> a (o) b.", MALFORMED_CHAIN),
        ("rule r: =>O O(a).", NESTED_MODALITY),
        ("rule r: =>O a.\nrule r: =>P b.", DUPLICATE_LABEL),
        ("rule r: =>O a.\nsup r > s.", UNKNOWN_LABEL),
        ("fact ~.", SYNTAX),
        ("rule r: a =>O b", SYNTAX),
        ("bogus.", SYNTAX),
    ],
)
def test_error_kinds(text, kind):
    assert kind in {e.kind for e in errors_of(text)}


def test_error_spans_point_into_input():
    text = "fact a.\nrule bad: =>P a (x) b.\n"
    (err,) = errors_of(text)
    assert (err.span.line, err.span.column) == (2, 17)
    assert text.splitlines()[err.span.line - 1][err.span.column - 1] == "("


def test_recovery_reports_several_errors():
    errs = errors_of("fact .\nrule r: =>P a (x) b.\nsup r > nope.\n")
    # r is rejected, so both labels in the sup statement are unknown
    assert [(e.span.line, e.kind) for e in errs] == [
        (1, SYNTAX), (2, MALFORMED_CHAIN), (3, UNKNOWN_LABEL), (3, UNKNOWN_LABEL)
    ]


def test_serialize_empty_and_single_fact():
    assert serialize_theory(Theory()) == ""
    assert serialize_theory(Theory(frozenset({Literal("Park")}))) == "fact Park.\n"


def test_credit_act_round_trip():
    t = parse_theory(CREDIT)
    assert parse_theory(serialize_theory(t)).canonical() == t.canonical()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_generated(seed):
    t = generate_theory(corpus_params(seed))
    text = serialize_theory(t)
    back = parse_theory(text)
    assert back.canonical() == t.canonical()
    assert serialize_theory(back) == text


@settings(max_examples=500, deadline=None)
@given(st.binary(max_size=200))
def test_arbitrary_bytes_never_crash(data):
    text = data.decode("utf-8", errors="replace")
    try:
        parse_theory(text)
    except TheorySyntaxError as exc:
        assert exc.errors
        for e in exc.errors:
            assert e.span.line >= 1 and e.span.column >= 1


TOKENS = ["fact", "rule", "sup", "r", "s", "a", "~", "b", "O", "P", "!", "(", ")", ",", ":", ".", ">",
          "=>O", "=>P", "=>", "~>", "(x)", "(o)", " ", "\n", "#"]


@settings(max_examples=500, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=40))
def test_token_soup_never_crashes(parts):
    try:
        parse_theory(" ".join(parts))
    except TheorySyntaxError as exc:
        assert exc.errors


def test_serialize_extension_shapes():
    empty = json.loads(serialize_extension(Extension()))
    assert empty == {k: [] for k in Extension.KEYS}
    e = Extension(plus_dO={Literal("Help")})
    assert json.loads(serialize_extension(e))["plus_dO"] == ["Help"]
    assert serialize_extension(e, "text") == "+dO Help\n"


def test_serialize_extension_sorted_and_stable():
    e = Extension(minus_dO={Literal("b"), Literal("a", False), Literal("a")})
    out = serialize_extension(e)
    assert json.loads(out)["minus_dO"] == sorted(["b", "~a", "a"])
    assert out == serialize_extension(extension_from_dict(extension_to_dict(e)))
