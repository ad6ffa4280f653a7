"""DATE data model, concrete monitoring semantics and structural combinators."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import expr as ex
from .errors import IncompatibleUnion, NondeterminismError, SpecError

RESERVED = frozenset({"*", "eps"})
_TOKEN = re.compile(r"[^\s.]+")


def check_token(name: str, what: str = "name") -> None:
    if not isinstance(name, str) or not _TOKEN.fullmatch(name) or name in RESERVED:
        raise SpecError(f"invalid {what} {name!r}")


@dataclass(frozen=True)
class VarDecl:
    name: str
    kind: str  # ex.INT | ex.BOOL
    initial: int | bool

    def __post_init__(self):
        check_token(self.name, "variable name")
        if self.kind == ex.INT:
            ok = type(self.initial) is int and ex.INT_MIN <= self.initial <= ex.INT_MAX
        elif self.kind == ex.BOOL:
            ok = type(self.initial) is bool
        else:
            raise SpecError(f"unknown variable kind {self.kind!r}")
        if not ok:
            raise SpecError(f"initial value {self.initial!r} is not a valid {self.kind}")


@dataclass(frozen=True)
class Transition:
    source: str
    event: str
    guard: ex.Expr = ex.TRUE
    action: ex.Action = ex.SKIP
    target: str = ""

    @property
    def sort_key(self):
        return (self.source, self.event, self.target,
                ex.format_expr(self.guard), ex.format_action(self.action))

    def __str__(self):
        s = f"{self.source} -> {self.target} on {self.event}"
        if self.guard != ex.TRUE:
            s += f" if {ex.format_expr(self.guard)}"
        if self.action:
            s += f" do {ex.format_action(self.action)}"
        return s


def trans(source, target, event, guard="", action="") -> Transition:
    """Build a transition from textual guard/action (test and fixture helper)."""
    g = ex.parse_expr(guard) if guard else ex.TRUE
    a = ex.parse_action(action) if action else ex.SKIP
    return Transition(source, event, g, a, target)


@dataclass(frozen=True)
class Verdict:
    """``index`` is None for OK, -1 when the initial state is already bad."""

    index: int | None = None

    @property
    def ok(self) -> bool:
        return self.index is None

    @property
    def violated(self) -> bool:
        return self.index is not None

    def __str__(self):
        return "OK" if self.index is None else f"VIOLATION@{self.index}"


OK = Verdict()


class RunResult(NamedTuple):
    verdict: Verdict
    state: str
    theta: dict


class _Edge(NamedTuple):
    transition: Transition
    guard: object  # compiled guard
    updates: tuple  # ((var, compiled rhs), ...)


@dataclass(frozen=True)
class DateSpec:
    """A timer-free DATE ``<Q, Sigma, Theta, q0, theta0, B, delta>``.

    A DateSpec with no states is the *empty residual*: the property is
    statically satisfied and every run reports OK.
    """

    states: frozenset
    alphabet: frozenset
    vars: tuple
    initial: str
    bad: frozenset
    transitions: frozenset
    name: str = "date"
    param: str = "x"

    def __post_init__(self):
        for attr in ("states", "alphabet", "bad", "transitions"):
            val = getattr(self, attr)
            if not isinstance(val, frozenset):
                object.__setattr__(self, attr, frozenset(val))
        if not isinstance(self.vars, tuple):
            object.__setattr__(self, "vars", tuple(self.vars))
        self._validate()

    def _validate(self):
        for q in self.states:
            check_token(q, "state")
        for e in self.alphabet:
            check_token(e, "event")
        seen = set()
        for v in self.vars:
            if v.name in seen:
                raise SpecError(f"duplicate variable {v.name!r}")
            seen.add(v.name)
        if self.states and self.initial not in self.states:
            raise SpecError(f"initial state {self.initial!r} is not declared")
        if not self.bad <= self.states:
            raise SpecError(f"undeclared bad states {sorted(self.bad - self.states)}")
        env = self.var_kinds
        keys: dict = {}
        for t in self.transitions:
            if t.source not in self.states or t.target not in self.states:
                raise SpecError(f"transition {t} references an undeclared state")
            if t.event not in self.alphabet:
                raise SpecError(f"transition {t} uses event outside the alphabet")
            if ex.check_expr(t.guard, env) != ex.BOOL:
                raise SpecError(f"guard of {t} is not boolean")
            ex.check_action(t.action, env)
            k = (t.source, t.event, t.guard)
            if k in keys:
                raise SpecError(f"duplicate edge: {keys[k]} and {t}")
            keys[k] = t

    # -- derived views -------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.states

    @cached_property
    def var_kinds(self) -> dict:
        return {v.name: v.kind for v in self.vars}

    @property
    def theta0(self) -> dict:
        return {v.name: v.initial for v in self.vars}

    @cached_property
    def _out(self) -> dict:
        out: dict = {}
        for t in sorted(self.transitions, key=lambda t: t.sort_key):
            edge = _Edge(t, ex.compile_expr(t.guard),
                         tuple((a.var, ex.compile_expr(a.expr)) for a in t.action))
            out.setdefault((t.source, t.event), []).append(edge)
        return {k: tuple(v) for k, v in out.items()}

    def outgoing(self, q: str, e: str) -> tuple:
        return tuple(edge.transition for edge in self._out.get((q, e), ()))

    def sorted_transitions(self) -> list:
        return sorted(self.transitions, key=lambda t: t.sort_key)

    def active_events(self) -> frozenset:
        """Events that label at least one transition."""
        return frozenset(t.event for t in self.transitions)


def empty_like(d: DateSpec) -> DateSpec:
    return DateSpec(frozenset(), frozenset(), d.vars, d.initial, frozenset(), frozenset(),
                    name=d.name, param=d.param)


# -- concrete semantics --------------------------------------------------------


def eval_guard(g: ex.Expr, theta: Mapping) -> bool:
    return ex.eval_guard(g, theta)


def apply_action(a: ex.Action, theta: Mapping) -> dict:
    return ex.apply_action(a, theta)


def step_counted(d: DateSpec, q: str, theta: dict, e: str):
    """One concrete step; also returns the number of guards evaluated."""
    edges = d._out.get((q, e))
    if not edges:
        return q, theta, 0
    taken = None
    for edge in edges:
        if edge.guard(theta):
            if taken is not None:
                raise NondeterminismError(q, e, theta)
            taken = edge
    if taken is None:
        return q, theta, len(edges)
    if taken.updates:
        theta = dict(theta)
        for var, rhs in taken.updates:
            theta[var] = rhs(theta)
    return taken.transition.target, theta, len(edges)


def concrete_step(d: DateSpec, q: str, theta: Mapping, e: str) -> tuple:
    """Deterministic, implicitly total step: stay put when nothing is enabled."""
    q2, theta2, _ = step_counted(d, q, dict(theta), e)
    return q2, theta2


def run(d: DateSpec, trace: Iterable[str]) -> RunResult:
    theta = d.theta0
    q = d.initial
    if d.is_empty:
        return RunResult(OK, q, theta)
    verdict = Verdict(-1) if q in d.bad else OK
    for i, e in enumerate(trace):
        q, theta, _ = step_counted(d, q, theta, e)
        if verdict.ok and q in d.bad:
            verdict = Verdict(i)
    return RunResult(verdict, q, theta)


def verdict_of(d: DateSpec, trace: Sequence[str]) -> Verdict:
    """Like ``run`` but stops at the first bad entry."""
    if d.is_empty:
        return OK
    q = d.initial
    if q in d.bad:
        return Verdict(-1)
    theta = d.theta0
    bad = d.bad
    for i, e in enumerate(trace):
        q, theta, _ = step_counted(d, q, theta, e)
        if q in bad:
            return Verdict(i)
    return OK


# -- structural combinators ------------------------------------------------------


def restrict_alphabet(d: DateSpec, sigma: Iterable[str]) -> DateSpec:
    keep = d.alphabet & frozenset(sigma)
    return replace(d, alphabet=keep,
                   transitions=frozenset(t for t in d.transitions if t.event in keep))


def restrict_transitions(d: DateSpec, delta: Iterable[Transition]) -> DateSpec:
    return replace(d, transitions=d.transitions & frozenset(delta))


def compatible(d1: DateSpec, d2: DateSpec) -> str | None:
    """Why ``d1`` and ``d2`` cannot be joined, or None when they can."""
    if d1.initial != d2.initial:
        return f"initial states differ ({d1.initial!r} vs {d2.initial!r})"
    if d1.vars != d2.vars:
        return "variable declarations differ"
    shared = d1.states & d2.states
    if (d1.bad & shared) != (d2.bad & shared):
        return "a shared state is bad in only one operand"
    keyed = {(t.source, t.event, t.guard): t for t in d1.transitions}
    for t in d2.transitions:
        other = keyed.get((t.source, t.event, t.guard))
        if other is not None and other != t:
            return f"conflicting transitions {other} and {t}"
    return None


def union(d1: DateSpec, d2: DateSpec) -> DateSpec:
    why = compatible(d1, d2)
    if why is not None:
        raise IncompatibleUnion(why)
    if d1.is_empty:
        return d2
    if d2.is_empty:
        return d1
    try:
        return replace(d1, states=d1.states | d2.states, alphabet=d1.alphabet | d2.alphabet,
                       bad=d1.bad | d2.bad, transitions=d1.transitions | d2.transitions)
    except SpecError as err:
        raise IncompatibleUnion(str(err)) from err
