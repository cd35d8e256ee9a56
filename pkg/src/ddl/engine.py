"""Linear-time computation of the defeasible extension.

The working theory never rebuilds rules.  Each rule keeps a count of
unsatisfied antecedent items, a failure flag, the length of its passed
chain prefix and the position of its first blocked element; each head
occurrence moves once from *pending* to *applicable* or *discarded*.
Per-literal counters summarise the support and attack picture, so a
proof condition is decided in O(1) whenever a counter moves.  Every
occurrence, item and superiority link is touched a bounded number of
times, which keeps the total work proportional to the theory size.

The public procedures ``check_facts``, ``discard``, ``modify_obl`` and
``modify_perm`` only stage conclusions; :meth:`WorkingTheory.commit`
applies a batch of staged conclusions at the end of each pass.
"""

from __future__ import annotations

from .consistency import check_consistency, superiority_cycle
from .model import (
    DELETED,
    EngineConfig,
    Extension,
    Literal,
    ModalLiteral,
    Modality,
    Rule,
    RuleKind,
    Theory,
    chain_truncate,
    occurrence_class,
    rule_remove,
)

__all__ = [
    "EngineConfig",
    "Extension",
    "WorkingTheory",
    "check_facts",
    "compute_extension",
    "discard",
    "modify_obl",
    "modify_perm",
]

O, P = Modality.O, Modality.P
PLUS, MINUS = 1, 2  # values stored in the per-literal tag arrays
MO, MP = 0, 1  # modality codes used internally
_CODE = {O: MO, P: MP}

_CLS_O, _CLS_P, _CLS_NONE = 0, 1, 2
_PENDING, _APPLICABLE, _DISCARDED = 0, 1, 2


class WorkingTheory:
    """Mutable evaluation state for one theory; confined to a single thread."""

    def __init__(self, theory: Theory, cfg: EngineConfig | None = None):
        self.theory = theory
        self.cfg = cfg = cfg or EngineConfig()
        self.mutations = 0
        report = check_consistency(theory)
        self.consistent = report.consistent
        self.sup_acyclic = superiority_cycle(theory.sup) is None

        # literal interning: id = 2 * atom + (1 if negative); complement is id ^ 1
        self._atoms: dict[str, int] = {}
        self.lits: list[Literal] = []
        hb_atoms: set[int] = set()
        intern = self._intern
        for f in theory.facts:
            if isinstance(f, Literal):
                intern(f)
            else:
                hb_atoms.add(intern(f.literal) >> 1)
        for r in theory.rules:
            for c in r.head.elements:
                hb_atoms.add(intern(c) >> 1)
            for a in r.antecedent:
                if isinstance(a, Literal):
                    intern(a)
                else:
                    hb_atoms.add(intern(a.literal) >> 1)
        n_lits = len(self.lits)

        facts = theory.facts
        self.facts = facts
        lid = self.lit_id
        self.plain_fact = [False] * n_lits
        self.fact_O = [False] * n_lits
        self.fact_P = [False] * n_lits
        self.fact_notO = [False] * n_lits
        self.fact_notP = [False] * n_lits
        for f in facts:
            if isinstance(f, Literal):
                self.plain_fact[lid(f)] = True
            elif f.modality is O:
                (self.fact_notO if f.negated else self.fact_O)[lid(f.literal)] = True
            else:
                (self.fact_notP if f.negated else self.fact_P)[lid(f.literal)] = True

        # facts that settle a literal's status on their own
        self.blocked_O = [
            self.fact_O[q ^ 1] or self.fact_notO[q] or self.fact_P[q ^ 1] for q in range(n_lits)
        ]
        self.blocked_P = [self.fact_O[q ^ 1] or self.fact_notP[q] for q in range(n_lits)]

        self.in_hb = [False] * n_lits
        for atom in hb_atoms:
            self.in_hb[2 * atom] = self.in_hb[2 * atom + 1] = True

        # conclusions: 0 undecided, PLUS, MINUS
        self.tag_O = [0] * n_lits
        self.tag_P = [0] * n_lits
        self.tags = (self.tag_O, self.tag_P)
        self._staged: dict[int, int] = {}  # (literal << 1 | modality code) -> sign
        self._touched: set[int] = set()

        # rules and head occurrences
        self.rules = list(theory.rules)
        self.rule_index = {r.label: i for i, r in enumerate(self.rules)}
        n_rules = len(self.rules)
        self.occ_base = [0] * n_rules
        self.head_len = [0] * n_rules
        self.otimes_len = [0] * n_rules
        self.head_pos: list[dict[int, int]] = []
        self.occ_rule: list[int] = []
        self.occ_pos: list[int] = []
        self.occ_lit: list[int] = []
        self.occ_cls: list[int] = []
        self.occ_of: list[list[int]] = [[] for _ in range(n_lits)]
        mode = cfg.defeater_mode
        for ri, r in enumerate(self.rules):
            self.occ_base[ri] = len(self.occ_rule)
            self.head_len[ri] = len(r.head)
            self.otimes_len[ri] = r.head.otimes_len
            pos = {}
            for p, c in enumerate(r.head.elements):
                o = len(self.occ_rule)
                q = lid(c)
                pos[q] = p
                cls = occurrence_class(r, p + 1, mode)
                self.occ_rule.append(ri)
                self.occ_pos.append(p)
                self.occ_lit.append(q)
                self.occ_cls.append(_CLS_O if cls is O else _CLS_P if cls is P else _CLS_NONE)
                self.occ_of[q].append(o)
            self.head_pos.append(pos)
        n_occ = len(self.occ_rule)
        self.occ_state = [_PENDING] * n_occ
        self.passed = [False] * n_occ

        self.ante_left = [len(r.antecedent) for r in self.rules]
        self.failed = [False] * n_rules
        self.start = [0] * n_rules  # number of leading passed chain positions
        self.block = [n - 1 for n in self.head_len]  # occurrences after this position are discarded

        # support and attack counters, per literal
        self.supO_app = [0] * n_lits
        self.supO_live = [0] * n_lits
        self.supP_app = [0] * n_lits
        self.supP_live = [0] * n_lits
        self.att_unres = [0] * n_lits
        self.attO_unres = [0] * n_lits
        self.att_unbeat_app = [0] * n_lits
        self.attO_unbeat_app = [0] * n_lits
        for o in range(n_occ):
            q, cls = self.occ_lit[o], self.occ_cls[o]
            if cls == _CLS_O:
                self.supO_live[q] += 1
                self.attO_unres[q ^ 1] += 1
            elif cls == _CLS_P:
                self.supP_live[q] += 1
            self.att_unres[q ^ 1] += 1

        # superiority links: beater occurrence -> attacker occurrences it can beat
        self.beats: list[list[int]] = [[] for _ in range(n_occ)]
        self.beaten = [0] * n_occ
        self.live_beaters = [0] * n_occ
        self.infd: dict[Literal, set[str]] = {}
        for w, l in sorted(theory.sup):
            t, s = self.rule_index[w], self.rule_index[l]
            s_pos = self.head_pos[s]
            for q, pt in self.head_pos[t].items():
                ps = s_pos.get(q ^ 1)
                if ps is None:
                    continue
                b, a = self.occ_base[t] + pt, self.occ_base[s] + ps
                if self.occ_cls[a] == _CLS_O or self.occ_cls[b] == _CLS_O:
                    self.beats[b].append(a)
                    self.live_beaters[a] += 1

        # antecedent items, deduplicated across rules
        self.items: list = []
        self.item_ids: dict = {}
        self.item_rules: list[list[int]] = []
        self.item_state: list[int] = []
        self.triggers: dict[tuple[int, int, int], list[int]] = {}
        for ri, r in enumerate(self.rules):
            for a in r.antecedent:
                k = self.item_ids.get(a)
                if k is None:
                    k = len(self.items)
                    self.item_ids[a] = k
                    self.items.append(a)
                    self.item_rules.append([])
                    self.item_state.append(_PENDING)
                    self._register_triggers(k, a)
                self.item_rules[k].append(ri)

    # interning

    def _intern(self, lit: Literal) -> int:
        a = self._atoms.get(lit.atom)
        if a is None:
            a = len(self._atoms)
            self._atoms[lit.atom] = a
            if lit.positive:
                self.lits += (lit, ~lit)
            else:
                self.lits += (~lit, lit)
        return 2 * a + (0 if lit.positive else 1)

    def lit_id(self, lit: Literal) -> int:
        return 2 * self._atoms[lit.atom] + (0 if lit.positive else 1)

    def _register_triggers(self, k: int, item) -> None:
        if isinstance(item, Literal):
            return
        q = self.lit_id(item.literal)
        mi = _CODE[item.modality]
        keys = [(PLUS, mi, q), (MINUS, mi, q)]
        if item.modality is P and not item.negated and self.cfg.weak_perm_antecedent:
            keys += [(PLUS, MO, q ^ 1), (MINUS, MO, q ^ 1)]
        for key in keys:
            self.triggers.setdefault(key, []).append(k)

    # conclusions

    def tag(self, m: Modality, q: int) -> int:
        return self.tags[_CODE[m]][q]

    def stage(self, sign: int, mi: int, q: int) -> None:
        """Queue a conclusion (``mi`` is a modality code); it takes effect at the next :meth:`commit`."""
        have = self.tags[mi][q]
        if have:
            assert have == sign, f"conflicting conclusions for {self.lits[q]}"
            return
        key = q << 1 | mi
        prev = self._staged.get(key)
        if prev is None:
            self._staged[key] = sign
        else:
            assert prev == sign, f"conflicting staged conclusions for {self.lits[q]}"

    def staged(self) -> list[tuple[str, Modality, Literal]]:
        return [
            ("+" if s == PLUS else "-", O if key & 1 == MO else P, self.lits[key >> 1])
            for key, s in self._staged.items()
        ]

    def commit(self) -> set[int]:
        """Apply every staged conclusion; return the undecided literals whose counters moved."""
        while self._staged:
            batch, self._staged = self._staged, {}
            for key, sign in batch.items():
                q, mi = key >> 1, key & 1
                arr = self.tags[mi]
                if arr[q]:
                    continue
                arr[q] = sign
                self.mutations += 1
                self._touched.add(q)
                self._apply(sign, mi, q)
        touched, self._touched = self._touched, set()
        return {q for q in touched if self.in_hb[q] and not (self.tag_O[q] and self.tag_P[q])}

    def _apply(self, sign: int, mi: int, q: int) -> None:
        for k in self.triggers.get((sign, mi, q), ()):
            self._update_item(k)
        otimes_len, occ_pos, occ_rule = self.otimes_len, self.occ_pos, self.occ_rule
        for o in self.occ_of[q]:
            in_otimes = occ_pos[o] < otimes_len[occ_rule[o]]
            if mi == MO and in_otimes:
                if sign == MINUS:
                    self._block(o)
                elif not self.plain_fact[q] or self.plain_fact[q ^ 1]:
                    self._pass(o)  # obligation in force and violated
            elif mi == MP and not in_otimes:
                if sign == MINUS:
                    self._pass(o)
                else:
                    self._block(o)

    # antecedent items

    def _item_status(self, item) -> int:
        if isinstance(item, Literal):
            return _APPLICABLE if self.plain_fact[self.lit_id(item)] else _DISCARDED
        q = self.lit_id(item.literal)
        t = self.tag(item.modality, q)
        if item.negated:
            return {MINUS: _APPLICABLE, PLUS: _DISCARDED}.get(t, _PENDING)
        if item.modality is P and self.cfg.weak_perm_antecedent:
            if t == PLUS or self.tag_O[q ^ 1] == MINUS:
                return _APPLICABLE
            if t == MINUS and self.tag_O[q ^ 1] == PLUS:
                return _DISCARDED
            return _PENDING
        return {PLUS: _APPLICABLE, MINUS: _DISCARDED}.get(t, _PENDING)

    def _update_item(self, k: int) -> None:
        if self.item_state[k] != _PENDING:
            return
        status = self._item_status(self.items[k])
        if status == _PENDING:
            return
        self.item_state[k] = status
        self.mutations += 1
        if status == _APPLICABLE:
            for ri in self.item_rules[k]:
                self.ante_left[ri] -= 1
                self.mutations += 1
                if self.ante_left[ri] == 0 and not self.failed[ri]:
                    base = self.occ_base[ri]
                    for p in range(0, min(self.start[ri], self.head_len[ri] - 1) + 1):
                        self._make_applicable(base + p)
        else:
            for ri in self.item_rules[k]:
                self._fail(ri)

    def _fail(self, ri: int) -> None:
        if self.failed[ri]:
            return
        self.failed[ri] = True
        self.mutations += 1
        base = self.occ_base[ri]
        for p in range(self.head_len[ri]):
            self._make_discarded(base + p)

    # chain positions

    def _pass(self, o: int) -> None:
        if self.passed[o]:
            return
        self.passed[o] = True
        self.mutations += 1
        ri, p = self.occ_rule[o], self.occ_pos[o]
        if p != self.start[ri]:
            return
        base, n = self.occ_base[ri], self.head_len[ri]
        old = self.start[ri]
        new = old
        while new < n and self.passed[base + new]:
            new += 1
        self.start[ri] = new
        if self.ante_left[ri] == 0 and not self.failed[ri]:
            for k in range(old + 1, min(new, n - 1) + 1):
                self._make_applicable(base + k)

    def _block(self, o: int) -> None:
        ri, p = self.occ_rule[o], self.occ_pos[o]
        old = self.block[ri]
        if p >= old:
            return
        self.block[ri] = p
        self.mutations += 1
        base = self.occ_base[ri]
        for k in range(p + 1, old + 1):
            self._make_discarded(base + k)

    # occurrence transitions

    def _resolve(self, a: int) -> None:
        y = self.occ_lit[a] ^ 1
        self.att_unres[y] -= 1
        if self.occ_cls[a] == _CLS_O:
            self.attO_unres[y] -= 1
        self.mutations += 1
        self._touched.add(y)

    def _make_applicable(self, o: int) -> None:
        state = self.occ_state[o]
        if state != _PENDING:
            assert state == _APPLICABLE, "occurrence both applicable and discarded"
            return
        self.occ_state[o] = _APPLICABLE
        self.mutations += 1
        q, cls = self.occ_lit[o], self.occ_cls[o]
        if cls == _CLS_O:
            self.supO_app[q] += 1
        elif cls == _CLS_P:
            self.supP_app[q] += 1
        self._touched.add(q)
        if self.live_beaters[o] == 0:
            self.att_unbeat_app[q ^ 1] += 1
            if cls == _CLS_O:
                self.attO_unbeat_app[q ^ 1] += 1
            self._touched.add(q ^ 1)
        for a in self.beats[o]:
            self.beaten[a] += 1
            self.mutations += 1
            if self.beaten[a] == 1 and self.occ_state[a] != _DISCARDED:
                self.infd.setdefault(self.lits[q], set()).add(self.rules[self.occ_rule[a]].label)
                self._resolve(a)

    def _make_discarded(self, o: int) -> None:
        state = self.occ_state[o]
        if state != _PENDING:
            assert state == _DISCARDED, "occurrence both applicable and discarded"
            return
        self.occ_state[o] = _DISCARDED
        self.mutations += 1
        q, cls = self.occ_lit[o], self.occ_cls[o]
        if cls == _CLS_O:
            self.supO_live[q] -= 1
        elif cls == _CLS_P:
            self.supP_live[q] -= 1
        self._touched.add(q)
        if self.beaten[o] == 0:
            self._resolve(o)
        for a in self.beats[o]:
            self.live_beaters[a] -= 1
            self.mutations += 1
            if self.live_beaters[a] == 0 and self.occ_state[a] == _APPLICABLE:
                self.att_unbeat_app[q] += 1
                if self.occ_cls[a] == _CLS_O:
                    self.attO_unbeat_app[q] += 1
                self._touched.add(q)

    # proof conditions over the counters

    def evaluate(self, q: int) -> None:
        """Stage whatever the current counters decide for literal ``q``."""
        staged = self._staged
        if not self.tag_O[q] and (q << 1 | MO) not in staged:
            if self.fact_O[q]:
                self._modify_obl(q)
            elif self.blocked_O[q] or self.supO_live[q] == 0 or self.att_unbeat_app[q] > 0:
                self.stage(MINUS, MO, q)
            elif self.supO_app[q] > 0 and self.att_unres[q] == 0:
                self._modify_obl(q)
        if not self.tag_P[q] and (q << 1 | MP) not in staged:
            if self.fact_P[q]:
                self.stage(PLUS, MP, q)
            elif self.blocked_P[q] or self.supP_live[q] == 0 or self.attO_unbeat_app[q] > 0:
                self.stage(MINUS, MP, q)
            elif self.supP_app[q] > 0 and self.attO_unres[q] == 0:
                self.stage(PLUS, MP, q)

    def _modify_obl(self, q: int) -> None:
        self.stage(PLUS, MO, q)
        # with an acyclic superiority relation the two obligations cannot both win
        if not self.fact_O[q ^ 1] and (self.sup_acyclic or self.fact_O[q]):
            self.stage(MINUS, MO, q ^ 1)

    # inspection

    def rule_view(self, label: str) -> Rule | object:
        """The rule as the simplifications so far leave it, or ``DELETED``.

        Satisfied antecedent items disappear, the head is cut after its
        first blocked element and passed elements are removed.
        """
        ri = self.rule_index[label]
        if self.failed[ri]:
            return DELETED
        r = self.rules[ri]
        ante = frozenset(a for a in r.antecedent if self.item_state[self.item_ids[a]] == _PENDING)
        view = Rule(r.label, ante, r.kind, r.head)
        if self.block[ri] < self.head_len[ri] - 1:
            view = chain_truncate(view, r.head.elements[self.block[ri]])
        base = self.occ_base[ri]
        for p, c in enumerate(r.head.elements[: self.block[ri] + 1]):
            if self.passed[base + p]:
                view = rule_remove(view, c)
                if view is DELETED:
                    return DELETED
        return view

    def current_rules(self) -> list[Rule]:
        return [v for v in (self.rule_view(r.label) for r in self.rules) if v is not DELETED]

    def conclusions(self) -> set[tuple[str, Modality, Literal]]:
        out = set()
        for q, lit in enumerate(self.lits):
            for m, arr in ((O, self.tag_O), (P, self.tag_P)):
                if arr[q]:
                    out.add(("+" if arr[q] == PLUS else "-", m, lit))
        return out

    def extension(self) -> Extension:
        ext = Extension(consistent=self.consistent)
        lits, in_hb = self.lits, self.in_hb
        for arr, plus, minus, undet in (
            (self.tag_O, ext.plus_dO, ext.minus_dO, ext.undetermined_O),
            (self.tag_P, ext.plus_dP, ext.minus_dP, ext.undetermined_P),
        ):
            plus.update(lits[q] for q, t in enumerate(arr) if t == PLUS)
            minus.update(lits[q] for q, t in enumerate(arr) if t == MINUS and in_hb[q])
            undet.update(lits[q] for q, t in enumerate(arr) if not t and in_hb[q])
        return ext


# the four procedures

def discard(w: WorkingTheory, l: Literal, m: Modality) -> None:
    """Record that ``m l`` is refuted.

    Once committed, rules needing ``m l`` are deleted, ``¬m l`` leaves
    the antecedents and the chain elements it governs are blocked or
    passed.  Literals outside the Herbrand base are ignored.
    """
    q = w._atoms.get(l.atom)
    if q is None:
        return
    q = w.lit_id(l)
    if w.in_hb[q]:
        w.stage(MINUS, _CODE[m], q)


def modify_obl(w: WorkingTheory, l: Literal) -> None:
    """Record ``+∂O l`` and its immediate consequence ``−∂O ∼l``."""
    w._modify_obl(w.lit_id(l))


def modify_perm(w: WorkingTheory, l: Literal) -> None:
    """Record ``+∂P l``."""
    w.stage(PLUS, MP, w.lit_id(l))


def check_facts(w: WorkingTheory) -> None:
    """Consume the facts before the main loop.

    Plain literals settle every plain antecedent item (rules that need a
    non-fact are deleted) and block the fulfilled obligations in the
    ⊗-segments.  Modal facts are turned into conclusions.
    """
    for ri, left in enumerate(w.ante_left):
        if left == 0:
            w._make_applicable(w.occ_base[ri])
    for k, item in enumerate(w.items):
        if isinstance(item, Literal):
            w._update_item(k)
    for f in w.facts:
        if isinstance(f, Literal):
            q = w.lit_id(f)
            if w.plain_fact[q ^ 1]:
                continue
            for o in w.occ_of[q]:
                if w.occ_pos[o] < w.otimes_len[w.occ_rule[o]]:
                    w._block(o)
    for f in sorted((f for f in w.facts if isinstance(f, ModalLiteral)), key=str):
        q = w.lit_id(f.literal)
        l = f.literal
        if f.modality is O and not f.negated:
            modify_obl(w, l)
            if not w.fact_P[q ^ 1]:
                discard(w, ~l, P)
            if not w.fact_O[q ^ 1]:
                discard(w, ~l, O)
        elif f.modality is O:
            if not w.fact_O[q]:
                discard(w, l, O)
        elif not f.negated:
            modify_perm(w, l)
            if not w.fact_O[q ^ 1]:
                discard(w, ~l, O)
        elif not w.fact_P[q]:
            discard(w, l, P)


def compute_extension(t: Theory, cfg: EngineConfig | None = None, *, working: WorkingTheory | None = None) -> Extension:
    w = working if working is not None else WorkingTheory(t, cfg)
    check_facts(w)
    w.commit()
    pending = [q for q in range(len(w.lits)) if w.in_hb[q]]
    while pending:
        for q in pending:
            w.evaluate(q)
        pending = sorted(w.commit())
    return w.extension()


def run(t: Theory, cfg: EngineConfig | None = None) -> WorkingTheory:
    """Compute the extension and return the final working state (for counters and views)."""
    w = WorkingTheory(t, cfg)
    compute_extension(t, cfg, working=w)
    return w
