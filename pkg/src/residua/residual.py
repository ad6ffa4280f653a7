"""Static transition function, usefulness classification and residual constructions.

Guards are treated with the maximal over-approximation: any guard that is not
literally ``false`` may hold, and any guard that is not literally ``true`` may
fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import expr as ex
from .date import (DateSpec, Transition, empty_like, restrict_alphabet,
                   restrict_transitions, union)
from .errors import ResourceLimit
from .program import ProgramModel, alphabet_of, alphabet_of_id, project_static, resource_cap

DEFAULT_PRODUCT_CAP = 10**7

BAD_AFTER = "badAfter"
GOOD_ENTRY = "goodEntryPoint"
USELESS = "useless"


def _possible(t: Transition) -> bool:
    return not ex.is_literally(t.guard, False)


def approx_step(d: DateSpec, q: str, e: str) -> frozenset:
    """States ``q`` potentially goes to on ``e``."""
    outs = d.outgoing(q, e)
    result = {t.target for t in outs if _possible(t)}
    forced_exit = any(t.target != q and ex.is_literally(t.guard, True) for t in outs)
    if not forced_exit:
        result.add(q)
    return frozenset(result)


class _Approx:
    """Memoised ``approx_step`` for one DATE."""

    def __init__(self, d: DateSpec):
        self.d = d
        self.cache: dict = {}

    def __call__(self, q, e):
        key = (q, e)
        r = self.cache.get(key)
        if r is None:
            r = self.cache[key] = approx_step(self.d, q, e)
        return r


def static_run(d: DateSpec, states: Iterable[str], trace: Iterable[str]) -> frozenset:
    cur = frozenset(states)
    step = _Approx(d)
    for e in trace:
        cur = frozenset().union(*(step(q, e) for q in cur)) if cur else cur
    return cur


def _successors(d: DateSpec) -> dict:
    """q -> every state approx-reachable in one step on some event."""
    step = _Approx(d)
    return {q: frozenset().union(*(step(q, e) for e in d.alphabet)) | {q} for q in d.states}


def _closure(start: Iterable, succ: dict) -> set:
    seen = set(start)
    todo = list(seen)
    while todo:
        q = todo.pop()
        for r in succ.get(q, ()):
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


def classify_states(d: DateSpec) -> dict:
    if d.is_empty:
        return {}
    succ = _successors(d)
    pred: dict = {q: set() for q in d.states}
    for q, rs in succ.items():
        for r in rs:
            pred[r].add(q)
    reach = _closure([d.initial], succ)
    coreach = _closure(d.bad, pred)
    bad_after = reach & coreach
    out = {}
    for q in d.states:
        if q in bad_after:
            out[q] = BAD_AFTER
        elif any(p in bad_after and p != q for p in pred[q]):
            out[q] = GOOD_ENTRY
        else:
            out[q] = USELESS
    return out


def useful_states(d: DateSpec) -> frozenset:
    return frozenset(q for q, c in classify_states(d).items() if c != USELESS)


def reachable_reduce(d: DateSpec) -> DateSpec:
    useful = useful_states(d)
    if d.initial not in useful:
        return empty_like(d)
    return DateSpec(useful, d.alphabet, d.vars, d.initial, d.bad & useful,
                    frozenset(t for t in d.transitions if t.source in useful and t.target in useful),
                    name=d.name, param=d.param)


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    residual: DateSpec
    silenced: frozenset
    level: int
    original: DateSpec
    per_id: dict = field(default_factory=dict)
    steps: tuple = ()  # per-model removed-transition sets for level 2

    @property
    def removed_transitions(self) -> frozenset:
        return self.original.transitions - self.residual.transitions

    @property
    def statically_satisfied(self) -> bool:
        return self.residual.is_empty

    def format_report(self) -> str:
        d0, d1 = self.original, self.residual
        lines = [
            f"level {self.level}",
            f"states_before {len(d0.states)}",
            f"states_after {len(d1.states)}",
            f"transitions_before {len(d0.transitions)}",
            f"transitions_after {len(d1.transitions)}",
            f"removed_states {len(d0.states - d1.states)}",
            f"removed_transitions {len(self.removed_transitions)}",
            f"silenced {len(self.silenced)}",
            f"statically_satisfied {'true' if self.statically_satisfied else 'false'}",
        ]
        for t in sorted(self.removed_transitions, key=lambda t: t.sort_key):
            lines.append(f"removed {t}")
        return "\n".join(lines) + "\n"

    def format_silenced(self) -> str:
        return "".join(f"{x} {e}\n" for x, e in sorted(self.silenced))


def parse_silenced(text: str) -> frozenset:
    from .program import Pair, parse_trace

    if not text.strip():
        return frozenset()
    rows = parse_trace(text)
    if rows and not isinstance(rows[0], tuple):
        from .errors import SpecError
        raise SpecError("silenced files need '<id> <event>' lines")
    return frozenset(Pair(*r) for r in rows)


def _silenced_pairs(d: DateSpec, p: ProgramModel, residual: DateSpec, per_id: dict) -> frozenset:
    """Instrumentation points that cannot influence any verdict.

    A pair is silenced if its event drives no transition of the monitored
    residual, or if its identifier's must-class is isolated from every other
    identifier and that identifier's own residual is empty.
    """
    active = residual.active_events()
    al = p.aliases
    out = set()
    for pair in p.pairs():
        if pair.event not in d.alphabet:
            continue
        if pair.event not in active:
            out.add(pair)
            continue
        own = per_id.get(pair.id)
        if own is not None and own.is_empty and al.isolated(pair.id):
            out.add(pair)
    return frozenset(out)


def residual0(d: DateSpec, p: ProgramModel) -> ResidualReport:
    r = reachable_reduce(restrict_alphabet(d, alphabet_of(p)))
    return ResidualReport(r, frozenset(), 0, d)


def residual1(d: DateSpec, p: ProgramModel, x: str) -> DateSpec:
    return reachable_reduce(restrict_alphabet(d, alphabet_of_id(p, x)))


def _join(d: DateSpec, parts: Iterable[DateSpec]) -> DateSpec:
    acc = empty_like(d)
    for part in parts:
        acc = union(acc, part)
    return acc


def residual1_union(d: DateSpec, p: ProgramModel) -> ResidualReport:
    per_id = {x: residual1(d, p, x) for x in sorted(p.ids)}
    r = _join(d, per_id.values())
    return ResidualReport(r, _silenced_pairs(d, p, r, per_id), 1, d, per_id)


def used_transitions(d: DateSpec, p: ProgramModel, x: str, cap: int | None = None) -> frozenset:
    """Transitions some trace of ``p`` projected on ``x`` can use.

    Reachability over pairs (program node, DATE state) starting at the
    entry and the initial state; a transition is used when its source state
    co-occurs with a node that has an outgoing edge on its event.
    """
    if d.is_empty:
        return frozenset()
    g = project_static(p, x)
    succ = g.succ
    step = _Approx(d)
    limit = resource_cap(cap or DEFAULT_PRODUCT_CAP)
    start = (g.entry, d.initial)
    seen = {start}
    todo = [start]
    fired = set()  # (q, e)
    while todo:
        n, q = todo.pop()
        for ev, m in succ.get(n, ()):
            if ev is None:
                nxt = ((m, q),)
            else:
                fired.add((q, ev))
                nxt = [(m, r) for r in step(q, ev)]
            for s in nxt:
                if s not in seen:
                    seen.add(s)
                    if len(seen) > limit:
                        raise ResourceLimit(f"product exceeds {limit} pairs")
                    todo.append(s)
    return frozenset(t for t in d.transitions if (t.source, t.event) in fired and _possible(t))


def _prune(d: DateSpec, p: ProgramModel, cap=None) -> DateSpec:
    used = set()
    for x in sorted(p.ids):
        used |= used_transitions(d, p, x, cap)
    return reachable_reduce(restrict_transitions(d, used))


def residual2(d: DateSpec, ps: Sequence[ProgramModel], fixpoint: bool = False,
              cap: int | None = None) -> ResidualReport:
    if not ps:
        raise ValueError("residual2 needs at least one program model")
    cur = d
    steps = []
    for p in ps:
        before = cur
        cur = _prune(cur, p, cap)
        while fixpoint:
            nxt = _prune(cur, p, cap)
            if nxt == cur:
                break
            cur = nxt
        steps.append(before.transitions - cur.transitions)
    last = ps[-1]
    per_id = {x: reachable_reduce(restrict_transitions(cur, used_transitions(cur, last, x, cap)))
              for x in sorted(last.ids)}
    return ResidualReport(cur, _silenced_pairs(d, last, cur, per_id), 2, d, per_id, tuple(steps))


def analyze(d: DateSpec, ps: Sequence[ProgramModel], level: int, fixpoint: bool = False,
            cap: int | None = None) -> ResidualReport:
    """Apply the residual constructions cumulatively up to ``level``.

    Levels 0 and 1 use the first program model; level 2 consumes all of them in order.
    """
    if level not in (0, 1, 2):
        raise ValueError("level must be 0, 1 or 2")
    p = ps[0]
    rep = residual0(d, p)
    silenced = set()
    if level >= 1:
        rep = residual1_union(rep.residual, p)
        silenced |= _silenced_pairs(d, p, rep.residual, rep.per_id)
    if level >= 2:
        rep = residual2(rep.residual, ps, fixpoint=fixpoint, cap=cap)
        silenced |= _silenced_pairs(d, ps[-1], rep.residual, rep.per_id)
    return ResidualReport(rep.residual, frozenset(silenced), level, d, rep.per_id, rep.steps)
