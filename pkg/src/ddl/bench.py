"""Scaling benchmark: wall time and index mutations against theory size."""

from __future__ import annotations

import gc
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .engine import WorkingTheory, compute_extension
from .model import Chain, EngineConfig, Literal, ModalLiteral, Modality, Rule, RuleKind, Theory

CHAIN_LEN = 50
FAN_WIDTH = 25


def chain_family(target: int) -> Theory:
    """Long ⊗-chains, each attacked midway by a weaker permissive rule.

    Nothing in a chain is a fact, so every obligation is violated and the
    next one comes into force; the run needs one pass per chain element.
    """
    block = (CHAIN_LEN + 1) + 2 + 1  # chain rule, attacker rule, sup is free, fact
    n = max(1, target // block)
    rules, sup, facts = [], set(), set()
    for k in range(n):
        elems = tuple(Literal(f"c{k}_{i}") for i in range(CHAIN_LEN))
        rules.append(Rule(f"ch{k}", frozenset(), RuleKind.OBLIGATION, Chain(elems, CHAIN_LEN)))
        rules.append(Rule(f"at{k}", frozenset({Literal(f"g{k}")}), RuleKind.PERMISSION,
                          Chain((~elems[CHAIN_LEN // 2],), 0)))
        facts.add(Literal(f"g{k}"))
        sup.add((f"ch{k}", f"at{k}"))
    return Theory(frozenset(facts), tuple(rules), frozenset(sup))


def dependency_family(target: int) -> Theory:
    """``O(a0)``; ``r_i: O(a_{i-1}) =>O a_i``: one long antecedent dependency chain."""
    n = max(1, target // 4)
    rules = [
        Rule(f"d{i}", frozenset({ModalLiteral(Modality.O, Literal(f"a{i - 1}"))}), RuleKind.OBLIGATION,
             Chain((Literal(f"a{i}"),), 1))
        for i in range(1, n + 1)
    ]
    return Theory(frozenset({ModalLiteral(Modality.O, Literal("a0"))}), tuple(rules), frozenset())


def fan_family(target: int) -> Theory:
    """Hubs where many obligation rules for ``h`` each beat one rule for ``~h``."""
    per_hub = 2 * FAN_WIDTH * 2
    hubs = max(1, target // per_hub)
    rules, sup = [], set()
    for h in range(hubs):
        q = Literal(f"h{h}")
        for j in range(FAN_WIDTH):
            rules.append(Rule(f"t{h}_{j}", frozenset(), RuleKind.OBLIGATION, Chain((q,), 1)))
            rules.append(Rule(f"s{h}_{j}", frozenset(), RuleKind.OBLIGATION, Chain((~q,), 1)))
            sup.add((f"t{h}_{j}", f"s{h}_{j}"))
    return Theory(frozenset(), tuple(rules), frozenset(sup))


FAMILIES: dict[str, Callable[[int], Theory]] = {
    "chain": chain_family,
    "dependency": dependency_family,
    "fan": fan_family,
}


@dataclass
class BenchReport:
    family: str
    sizes: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)
    mutation_counts: list = field(default_factory=list)
    slope_time: float = float("nan")
    slope_mutations: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)

    def ratios(self) -> list[float]:
        m = self.mutation_counts
        return [m[i + 1] / m[i] for i in range(len(m) - 1)]


def loglog_slope(xs, ys) -> float:
    if len(xs) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)


def measure(t: Theory, cfg: EngineConfig | None = None) -> tuple[float, int]:
    # like timeit, keep the cyclic collector out of the measurement
    enabled = gc.isenabled()
    gc.disable()
    try:
        start = time.perf_counter()
        w = WorkingTheory(t, cfg)
        compute_extension(t, cfg, working=w)
        elapsed = time.perf_counter() - start
    finally:
        if enabled:
            gc.enable()
    return elapsed, w.mutations


def run_bench(sizes, reps: int = 3, family: str = "chain", cfg: EngineConfig | None = None) -> BenchReport:
    """Median wall time and mutation count for each target size of ``family``."""
    if len(sizes) < 2:
        raise ValueError("need at least two sizes")
    build = FAMILIES[family]
    report = BenchReport(family)
    for target in sorted(sizes):
        t = build(int(target))
        times, muts = [], []
        for _ in range(max(1, reps)):
            dt, m = measure(t, cfg)
            times.append(dt)
            muts.append(m)
        report.sizes.append(t.size())
        report.wall_times.append(statistics.median(times))
        report.mutation_counts.append(int(statistics.median(muts)))
    report.slope_time = loglog_slope(report.sizes, report.wall_times)
    report.slope_mutations = loglog_slope(report.sizes, report.mutation_counts)
    return report


def plot_reports(reports, path) -> None:
    """Write a log-log plot of mutations and wall time against size."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for rep in reports:
        ax1.loglog(rep.sizes, rep.mutation_counts, "o-", label=f"{rep.family} (slope {rep.slope_mutations:.2f})")
        ax2.loglog(rep.sizes, rep.wall_times, "o-", label=f"{rep.family} (slope {rep.slope_time:.2f})")
    ax1.set_xlabel("theory size S")
    ax1.set_ylabel("index mutations")
    ax2.set_xlabel("theory size S")
    ax2.set_ylabel("wall time (s)")
    for ax in (ax1, ax2):
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
