"""Bounded brute-force equivalence checking and random instance generation."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from . import expr as ex
from .date import DateSpec, Transition, VarDecl, restrict_transitions, step_counted, verdict_of
from .errors import ResourceLimit
from .program import (DEFAULT_TRACE_CAP, Edge, Pair, ProgramModel, close_relations,
                      enumerate_traces, resource_cap)
from .residual import static_run


class Mismatch(NamedTuple):
    trace: tuple  # parametrised trace
    ident: str
    verdict_a: object
    verdict_b: object
    ground_a: tuple
    ground_b: tuple


@dataclass
class EquivResult:
    checked: int = 0
    mismatches: list = field(default_factory=list)
    bound: int = 0

    @property
    def equivalent(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        return f"checked={self.checked} mismatches={len(self.mismatches)} bound={self.bound}"


def projection_branches(rt, x: str, aliases, silenced_b: frozenset = frozenset()):
    """Yield (ground trace for A, ground trace for B) over every branch of the static projection.

    Must-aliased events are kept, not-may events dropped, and may-but-not-must
    events produce both branches.  The B trace additionally drops silenced pairs.
    """
    options = []
    for ident, ev in rt:
        if aliases.must(x, ident):
            options.append((True,))
        elif aliases.may(x, ident):
            options.append((False, True))
        else:
            options.append((False,))
    for choice in itertools.product(*options):
        a, b = [], []
        for keep, (ident, ev) in zip(choice, rt):
            if keep:
                a.append(ev)
                if (ident, ev) not in silenced_b:
                    b.append(ev)
        yield tuple(a), tuple(b)


def _signature(rt, x: str, aliases, silenced_b: frozenset) -> tuple:
    """What the branches of ``rt`` projected on ``x`` depend on: per kept-or-maybe
    event, whether it is certain and whether the B side drops it."""
    sig = []
    for ident, ev in rt:
        if aliases.must(x, ident):
            sig.append((ev, True, (ident, ev) in silenced_b))
        elif aliases.may(x, ident):
            sig.append((ev, False, (ident, ev) in silenced_b))
    return tuple(sig)


def _branches(sig):
    options = [(True,) if certain else (False, True) for _, certain, _ in sig]
    for choice in itertools.product(*options):
        a, b = [], []
        for keep, (ev, _, quiet) in zip(choice, sig):
            if keep:
                a.append(ev)
                if not quiet:
                    b.append(ev)
        yield tuple(a), tuple(b)


def equiv_on_program(da: DateSpec, db: DateSpec, p: ProgramModel, bound: int,
                     silenced_b: Iterable = (), cap: int | None = None,
                     stop_at_first: bool = False) -> EquivResult:
    """Compare OK/VIOLATION classifications of ``da`` and ``db`` on every static
    projection branch of every program trace with at most ``bound`` events.

    Traces whose projections coincide are grouped, so each distinct branch set
    is evaluated once; every trace of a failing group is still reported.
    """
    silenced_b = frozenset(Pair(*s) for s in silenced_b)
    limit = resource_cap(cap or DEFAULT_TRACE_CAP)
    res = EquivResult(bound=bound)
    memo_a: dict = {}
    memo_b: dict = {}
    ids = sorted(p.ids)
    groups: dict = {}  # (x, signature) -> traces
    for rt in enumerate_traces(p, bound, cap):
        for x in ids:
            res.checked += 1
            groups.setdefault((x, _signature(rt, x, p.aliases, silenced_b)), []).append(rt)
    grounds = 0
    for (x, sig), traces in groups.items():
        for ga, gb in _branches(sig):
            grounds += 1
            if grounds > limit:
                raise ResourceLimit(f"more than {limit} projected ground traces")
            va = memo_a.get(ga)
            if va is None:
                va = memo_a[ga] = verdict_of(da, ga)
            vb = memo_b.get(gb)
            if vb is None:
                vb = memo_b[gb] = verdict_of(db, gb)
            if va.ok != vb.ok:
                res.mismatches.extend(Mismatch(rt, x, va, vb, ga, gb) for rt in traces)
                if stop_at_first:
                    res.mismatches.sort(key=_mismatch_key)
                    return res
                break
    res.mismatches.sort(key=_mismatch_key)
    return res


def _mismatch_key(m):
    return (len(m.trace), m.trace, m.ident, m.ground_a)


# -- random instances ------------------------------------------------------------


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_states: int = 5
    max_events: int = 3
    max_int_vars: int = 1
    max_transitions: int = 8
    max_nodes: int = 5
    max_edges: int = 7
    trace_bound: int = 6
    max_ids: int = 3

    def __post_init__(self):
        for f in ("max_states", "max_events", "max_transitions", "max_nodes", "max_edges", "max_ids"):
            if getattr(self, f) < 1:
                raise ValueError(f"{f} must be >= 1")
        if self.max_int_vars < 0 or self.trace_bound < 0:
            raise ValueError("max_int_vars and trace_bound must be >= 0")


def _random_guard_pair(rng, var):
    k = rng.randint(-1, 3)
    return (ex.Binary("<", ex.Var(var), ex.IntLit(k)), ex.Binary(">=", ex.Var(var), ex.IntLit(k)))


def _random_action(rng, vars_):
    if not vars_ or rng.random() < 0.5:
        return ex.SKIP
    v = rng.choice(vars_).name
    if rng.random() < 0.7:
        rhs = ex.Binary("+", ex.Var(v), ex.IntLit(rng.choice((-1, 1, 1, 2))))
    else:
        rhs = ex.IntLit(rng.randint(0, 3))
    return (ex.Assign(v, rhs),)


_LIT_TRUE = ex.Binary("<", ex.IntLit(1), ex.IntLit(2))
_LIT_FALSE = ex.Binary(">", ex.IntLit(1), ex.IntLit(2))


def random_date(rng: random.Random, cfg: GenConfig) -> DateSpec:
    n_states = rng.randint(1, cfg.max_states)
    states = [f"q{i}" for i in range(n_states)]
    events = [f"e{i}" for i in range(rng.randint(1, cfg.max_events))]
    vars_ = [VarDecl(f"v{i}", ex.INT, rng.randint(0, 2))
             for i in range(rng.randint(0, cfg.max_int_vars))]
    slots = [(q, e) for q in states for e in events]
    rng.shuffle(slots)
    # a spanning chain first (each state gets an incoming slot from an earlier
    # state), so bad states are usually reachable and residuals non-trivial
    targets = {}
    for i in range(1, n_states):
        free = [sl for sl in slots if sl not in targets and int(sl[0][1:]) < i]
        if free:
            targets[rng.choice(free)] = states[i]
    slots = [sl for sl in slots if sl in targets] + [sl for sl in slots if sl not in targets]
    budget = rng.randint(min(len(targets) + 1, cfg.max_transitions), cfg.max_transitions)
    transitions = []
    for q, e in slots:
        if len(transitions) >= budget:
            break
        roll = rng.random()
        if vars_ and roll < 0.35 and len(transitions) + 2 <= budget:
            g1, g2 = _random_guard_pair(rng, rng.choice(vars_).name)
            transitions.append(Transition(q, e, g1, _random_action(rng, vars_),
                                          targets.get((q, e)) or rng.choice(states)))
            transitions.append(Transition(q, e, g2, _random_action(rng, vars_), rng.choice(states)))
            continue
        if (q, e) in targets:
            transitions.append(Transition(q, e, ex.TRUE, _random_action(rng, vars_), targets[(q, e)]))
            continue
        if vars_ and roll < 0.5:
            guard = rng.choice(_random_guard_pair(rng, rng.choice(vars_).name))
        elif roll < 0.55:
            guard = _LIT_FALSE
        elif roll < 0.6:
            guard = _LIT_TRUE
        else:
            guard = ex.TRUE
        transitions.append(Transition(q, e, guard, _random_action(rng, vars_), rng.choice(states)))
    bad = [q for q in states[1:] if rng.random() < 0.3]
    if n_states > 1 and not bad and rng.random() < 0.8:
        bad.append(rng.choice(states[1:]))
    if rng.random() < 0.03:
        bad.append("q0")
    return DateSpec(frozenset(states), frozenset(events), tuple(vars_), "q0", frozenset(bad),
                    frozenset(transitions), name="random", param="x")


def random_program(rng: random.Random, cfg: GenConfig, events: Iterable[str]) -> ProgramModel:
    events = sorted(events)
    nodes = [f"n{i}" for i in range(rng.randint(1, cfg.max_nodes))]
    ids = [f"o{i}" for i in range(rng.randint(1, cfg.max_ids))]
    edges = []
    reached = [nodes[0]]
    for _ in range(rng.randint(1, cfg.max_edges)):
        # mostly grow from nodes already reachable, so few edges are dead
        src = rng.choice(reached) if rng.random() < 0.85 else rng.choice(nodes)
        dst = rng.choice(nodes)
        if src in reached and dst not in reached:
            reached.append(dst)
        r = rng.random()
        if r < 0.12:
            label = None
        else:
            ev = "z" if r < 0.17 else rng.choice(events)
            label = Pair(rng.choice(ids), ev)
        edges.append(Edge(src, label, dst))
    must, may = [], []
    if len(ids) > 1:
        if rng.random() < 0.2:
            must.append(tuple(rng.sample(ids, 2)))
        for _ in range(2):
            if rng.random() < 0.3:
                may.append(tuple(rng.sample(ids, 2)))
    return ProgramModel(frozenset(nodes), nodes[0], tuple(dict.fromkeys(edges)), frozenset(ids),
                        close_relations(ids, must, may), name="random")


def random_instance(cfg: GenConfig) -> tuple:
    rng = random.Random(cfg.seed)
    d = random_date(rng, cfg)
    p = random_program(rng, cfg, d.alphabet)
    return d, p


def widen_program(p: ProgramModel, seed: int, extra_edges: int = 2) -> ProgramModel:
    """A coarser over-approximation of ``p``: same identifiers, extra edges."""
    rng = random.Random(seed)
    nodes = sorted(p.nodes)
    labels = sorted({e.label for e in p.edges if e.label is not None}) or [None]
    edges = list(p.edges)
    for _ in range(extra_edges):
        edges.append(Edge(rng.choice(nodes), rng.choice(labels + [None]), rng.choice(nodes)))
    return ProgramModel(p.nodes, p.entry, tuple(dict.fromkeys(edges)), p.ids, p.aliases,
                        name=p.name + "-wide")


def random_valuation(rng: random.Random, d: DateSpec) -> dict:
    return {v.name: (rng.random() < 0.5 if v.kind == ex.BOOL else rng.randint(-3, 5))
            for v in d.vars}


# -- soundness checks ------------------------------------------------------------------


def concrete_in_static(d: DateSpec, q: str, theta: dict, trace) -> bool:
    """The concrete run from (q, theta) ends in a state the static run allows."""
    state = q
    for e in trace:
        state, theta, _ = step_counted(d, state, theta, e)
    return state in static_run(d, {q}, trace)


def enabled_transition(d: DateSpec, q: str, theta: dict, e: str):
    for t in d.outgoing(q, e):
        if ex.eval_guard(t.guard, theta):
            return t
    return None


def violation_witnesses(d: DateSpec, p: ProgramModel, bound: int) -> dict:
    """Transition -> shortest projected ground trace whose first bad entry fires it."""
    out: dict = {}
    if d.is_empty or d.initial in d.bad:
        return out
    seen = set()
    for rt in enumerate_traces(p, bound):
        for x in sorted(p.ids):
            for ga, _ in projection_branches(rt, x, p.aliases):
                if ga in seen:
                    continue
                seen.add(ga)
                q, theta = d.initial, d.theta0
                for i, e in enumerate(ga):
                    t = enabled_transition(d, q, theta, e)
                    q, theta, _ = step_counted(d, q, theta, e)
                    if q in d.bad:
                        if t not in out or len(out[t]) > i + 1:
                            out[t] = ga[:i + 1]
                        break
    return out


def mutate_delete(d: DateSpec, t: Transition) -> DateSpec:
    return restrict_transitions(d, d.transitions - {t})
