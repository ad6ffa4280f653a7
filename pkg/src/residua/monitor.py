"""Parametrised monitoring: one DATE instance per must-class, created lazily."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable

from .date import OK, DateSpec, Verdict, step_counted
from .errors import NondeterminismError
from .program import AliasRelations, Pair


@dataclass
class ActivationStats:
    events_total: int = 0
    events_delivered: int = 0
    transitions_evaluated: int = 0
    monitors_created: int = 0
    violations: int = 0
    bad_entries: int = 0  # every entry into a bad state, not only the first per class

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __iadd__(self, other: "ActivationStats"):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    def format(self) -> str:
        return "".join(f"{k} {v}\n" for k, v in self.as_dict().items())


def _canonical(must):
    if must is None:
        return lambda x: x
    if isinstance(must, AliasRelations):
        return must.canonical
    if isinstance(must, dict):
        return lambda x: must.get(x, x)
    return must


@dataclass
class _Instance:
    state: str
    theta: dict
    verdict: Verdict
    position: int = 0  # events of this class seen so far (delivered or not)
    halted: bool = False


class MonitorPool:
    """Online monitor for one template DATE.

    ``must`` maps identifiers to class representatives: an AliasRelations, a
    dict, a callable, or None for identity.  Verdict indices count every event
    of the class in the input, silenced ones included, so they are comparable
    with ``run`` on the class projection.
    """

    def __init__(self, template: DateSpec, must=None, silenced: Iterable = (),
                 halt_on_violation: bool = False):
        self.template = template
        self.rep = _canonical(must)
        self.silenced = frozenset(Pair(*p) for p in silenced)
        self.halt = halt_on_violation
        self.instances: dict = {}
        self.seen: dict = {}  # class -> number of its events so far
        self.stats = ActivationStats()

    def feed(self, ident: str, event: str) -> None:
        st = self.stats
        st.events_total += 1
        cls = self.rep(ident)
        pos = self.seen.get(cls, 0)
        self.seen[cls] = pos + 1
        d = self.template
        if (ident, event) in self.silenced or event not in d.alphabet or d.is_empty:
            return
        inst = self.instances.get(cls)
        if inst is None:
            st.monitors_created += 1
            q0 = d.initial
            verdict = Verdict(-1) if q0 in d.bad else OK
            if verdict.violated:
                st.violations += 1
                st.bad_entries += 1
            inst = self.instances[cls] = _Instance(q0, d.theta0, verdict)
        if inst.halted:
            return
        st.events_delivered += 1
        try:
            q, theta, n = step_counted(d, inst.state, inst.theta, event)
        except NondeterminismError as err:
            raise NondeterminismError(err.state, err.event, err.valuation, cls, pos) from None
        st.transitions_evaluated += n
        entered = q != inst.state and q in d.bad
        inst.state, inst.theta = q, theta
        if entered:
            st.bad_entries += 1
        if inst.verdict.ok and q in d.bad:
            inst.verdict = Verdict(pos)
            st.violations += 1
        if self.halt and inst.verdict.violated:
            inst.halted = True

    def verdicts(self) -> dict:
        """Class representative -> Verdict, for every class seen (sorted by name)."""
        d = self.template
        # a class with no delivered event still sits in the initial state
        idle = Verdict(-1) if not d.is_empty and d.initial in d.bad else OK
        out = {}
        for cls in sorted(self.seen):
            inst = self.instances.get(cls)
            out[cls] = inst.verdict if inst is not None else idle
        return out


def monitor(d: DateSpec, rt: Iterable, must=None, silenced: Iterable = (),
            halt_on_violation: bool = False):
    pool = MonitorPool(d, must, silenced, halt_on_violation)
    for ident, event in rt:
        pool.feed(ident, event)
    return pool.verdicts(), pool.stats


@dataclass(frozen=True)
class ClassAgreement:
    klass: str
    verdict_a: Verdict
    verdict_b: Verdict

    @property
    def agree(self) -> bool:
        return self.verdict_a.ok == self.verdict_b.ok


def replay_compare(da: DateSpec, db: DateSpec, rt: Iterable, must=None,
                   silenced_b: Iterable = ()) -> list:
    rt = list(rt)
    va, _ = monitor(da, rt, must)
    vb, _ = monitor(db, rt, must, silenced_b)
    return [ClassAgreement(c, va[c], vb.get(c, OK)) for c in sorted(va)]
