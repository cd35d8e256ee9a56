"""Engine-versus-oracle differential runs and counterexample shrinking."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

from .engine import compute_extension
from .generate import GenParams, corpus_params, generate_theory
from .model import Chain, DefeaterMode, EngineConfig, Rule, RuleKind, Theory
from .oracle import oracle_extension

ALL_CONFIGS = tuple(EngineConfig(m, w) for m in DefeaterMode for w in (False, True))


@dataclass
class Disagreement:
    seed: int
    cfg: EngineConfig
    theory: Theory
    engine: dict
    oracle: dict
    error: str | None = None

    def sets_that_differ(self) -> list[str]:
        return [k for k in self.engine if self.engine[k] != self.oracle.get(k)]


@dataclass
class DiffReport:
    cases: int = 0
    checks: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def _compare(t: Theory, cfg: EngineConfig) -> tuple[bool, dict, dict, str | None]:
    o = oracle_extension(t, cfg)
    try:
        e = compute_extension(t, cfg)
    except AssertionError as exc:
        return False, {}, o.sets(), f"engine assertion: {exc}"
    return e.same_conclusions(o), e.sets(), o.sets(), None


def disagrees(t: Theory, cfg: EngineConfig) -> bool:
    return not _compare(t, cfg)[0]


def _without_rule(t: Theory, label: str) -> Theory:
    rules = tuple(r for r in t.rules if r.label != label)
    sup = frozenset((w, l) for w, l in t.sup if label not in (w, l))
    return Theory(t.facts, rules, sup)


def _head_without(r: Rule, i: int) -> Rule | None:
    elems = r.head.elements[:i] + r.head.elements[i + 1:]
    if not elems:
        return None
    otimes = r.head.otimes_len - (1 if i < r.head.otimes_len else 0)
    if r.kind is RuleKind.OBLIGATION and otimes == 0:
        return None
    return replace(r, head=Chain(elems, otimes))


def _smaller(t: Theory) -> Iterator[Theory]:
    for r in t.rules:
        yield _without_rule(t, r.label)
    for f in sorted(t.facts, key=str):
        yield Theory(t.facts - {f}, t.rules, t.sup)
    for pair in sorted(t.sup):
        yield Theory(t.facts, t.rules, t.sup - {pair})
    for idx, r in enumerate(t.rules):
        for a in sorted(r.antecedent, key=str):
            rules = list(t.rules)
            rules[idx] = replace(r, antecedent=r.antecedent - {a})
            yield Theory(t.facts, tuple(rules), t.sup)
        for i in range(len(r.head)):
            nr = _head_without(r, i)
            if nr is not None:
                rules = list(t.rules)
                rules[idx] = nr
                yield Theory(t.facts, tuple(rules), t.sup)


def shrink(t: Theory, failing: Callable[[Theory], bool]) -> Theory:
    """Greedy deletion of rules, facts, sup pairs, antecedent items and chain
    elements until no single deletion keeps ``failing`` true."""
    progress = True
    while progress:
        progress = False
        for cand in _smaller(t):
            if failing(cand):
                t = cand
                progress = True
                break
    return t


def _run_case(seed: int, params: GenParams | None, bounds: tuple[int, int], configs):
    p = replace(params, seed=seed) if params is not None else corpus_params(seed, *bounds)
    t = generate_theory(p)
    found = []
    for cfg in configs:
        same, e, o, err = _compare(t, cfg)
        if not same:
            found.append(Disagreement(seed, cfg, t, e, o, err))
    return len(configs), found


def oracle_diff(
    seed: int = 0,
    cases: int = 100,
    max_atoms: int = 8,
    max_rules: int = 12,
    configs=ALL_CONFIGS,
    workers: int = 1,
    minimize: bool = True,
    params: GenParams | None = None,
) -> DiffReport:
    """Compare engine and oracle on ``cases`` generated theories, seeds ``seed..seed+cases-1``.

    Atom and rule counts vary per seed up to the bounds unless fixed
    ``params`` are given.  The first disagreement (if any) is shrunk to a
    locally minimal theory.
    """
    bounds = (max_atoms, max_rules)
    report = DiffReport()
    seeds = range(seed, seed + cases)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda s: _run_case(s, params, bounds, configs), seeds))
    else:
        results = [_run_case(s, params, bounds, configs) for s in seeds]
    for checks, found in results:
        report.cases += 1
        report.checks += checks
        report.disagreements.extend(found)
    if minimize and report.disagreements:
        d = report.disagreements[0]
        small = shrink(d.theory, lambda th: disagrees(th, d.cfg))
        _, e, o, err = _compare(small, d.cfg)
        report.disagreements[0] = Disagreement(d.seed, d.cfg, small, e, o, err)
    return report
