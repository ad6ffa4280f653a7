"""Static program abstractions: alias relations, event-flow graphs, projections.

A program is a single flow graph whose edges carry either ``eps`` or an
``(identifier, event)`` pair.  Every node is accepting, so the trace language
is prefix-closed.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .date import check_token
from .errors import ContradictoryAliases, ResourceLimit, SpecError

DEFAULT_TRACE_CAP = 10**6


def resource_cap(default: int) -> int:
    env = os.environ.get("RESIDUA_LIMIT")
    return int(env) if env else default


class Pair(NamedTuple):
    id: str
    event: str

    def __str__(self):
        return f"{self.id}.{self.event}"


class Edge(NamedTuple):
    src: str
    label: Pair | None  # None is eps
    dst: str


@dataclass(frozen=True)
class AliasRelations:
    """Must-alias equivalence (as canonical representatives) plus may-alias pairs.

    ``may`` holds unordered pairs of distinct identifiers; reflexivity is implicit.
    """

    rep: dict
    may_pairs: frozenset

    def must(self, a: str, b: str) -> bool:
        return self.rep[a] == self.rep[b]

    def may(self, a: str, b: str) -> bool:
        return a == b or frozenset((a, b)) in self.may_pairs

    def canonical(self, a: str) -> str:
        return self.rep.get(a, a)

    def must_class(self, a: str) -> frozenset:
        r = self.rep[a]
        return frozenset(x for x, y in self.rep.items() if y == r)

    def isolated(self, a: str) -> bool:
        """True when every may-alias of ``a``'s must-class is inside that class."""
        cls = self.must_class(a)
        for pair in self.may_pairs:
            if len(pair & cls) == 1:
                return False
        return True

    def __hash__(self):
        return hash((tuple(sorted(self.rep.items())), self.may_pairs))


def close_relations(ids: Iterable[str], must: Iterable = (), may: Iterable = (),
                    not_may: Iterable = ()) -> AliasRelations:
    ids = sorted(set(ids))
    known = set(ids)
    parent = {x: x for x in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def check(pair):
        a, b = pair
        for x in (a, b):
            if x not in known:
                raise SpecError(f"undeclared identifier {x!r}")
        return a, b

    for pair in must:
        a, b = check(pair)
        ra, rb = find(a), find(b)
        if ra != rb:
            # keep the least name as representative
            lo, hi = sorted((ra, rb))
            parent[hi] = lo
    rep = {x: find(x) for x in ids}
    may_pairs = set()
    for pair in may:
        a, b = check(pair)
        if a != b:
            may_pairs.add(frozenset((a, b)))
    classes: dict = {}
    for x in ids:
        classes.setdefault(rep[x], []).append(x)
    for members in classes.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                may_pairs.add(frozenset((a, b)))
    for pair in not_may:
        a, b = check(pair)
        if rep[a] == rep[b]:
            raise ContradictoryAliases(f"{a} and {b} must alias but are declared not-may")
        if frozenset((a, b)) in may_pairs:
            raise ContradictoryAliases(f"{a} and {b} are declared both may and not-may")
    return AliasRelations(rep, frozenset(may_pairs))


@dataclass(frozen=True)
class ProgramModel:
    nodes: frozenset
    entry: str
    edges: tuple
    ids: frozenset
    aliases: AliasRelations
    name: str = "program"

    def __post_init__(self):
        if self.entry not in self.nodes:
            raise SpecError(f"entry node {self.entry!r} is not declared")
        for e in self.edges:
            if e.src not in self.nodes or e.dst not in self.nodes:
                raise SpecError(f"edge {e.src} -> {e.dst} references an undeclared node")
            if e.label is not None:
                if e.label.id not in self.ids:
                    raise SpecError(f"edge uses undeclared identifier {e.label.id!r}")
                check_token(e.label.event, "event")
        if set(self.aliases.rep) != set(self.ids):
            raise SpecError("alias relations do not cover exactly the declared identifiers")

    @property
    def alphabet(self) -> frozenset:
        return frozenset(e.label.event for e in self.edges if e.label is not None)

    @cached_property
    def reachable_nodes(self) -> frozenset:
        succ: dict = {}
        for e in self.edges:
            succ.setdefault(e.src, []).append(e.dst)
        seen = {self.entry}
        todo = [self.entry]
        while todo:
            n = todo.pop()
            for m in succ.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        return frozenset(seen)

    def reachable_edges(self) -> list:
        live = self.reachable_nodes
        return [e for e in self.edges if e.src in live]

    def pairs(self) -> frozenset:
        """(identifier, event) pairs on reachable edges: the instrumentation points."""
        return frozenset(e.label for e in self.reachable_edges() if e.label is not None)


def make_program(nodes, entry, edges, ids, must=(), may=(), not_may=(), name="program"):
    """Convenience constructor; ``edges`` are (src, 'id.event' | 'eps' | Pair | None, dst)."""
    norm = []
    for src, label, dst in edges:
        if isinstance(label, str):
            label = None if label == "eps" else Pair(*label.split(".", 1))
        elif label is not None:
            label = Pair(*label)
        norm.append(Edge(src, label, dst))
    return ProgramModel(frozenset(nodes), entry, tuple(norm), frozenset(ids),
                        close_relations(ids, must, may, not_may), name=name)


# -- projections ---------------------------------------------------------------


def project_runtime(rt: Iterable, x: str, must=None) -> tuple:
    """``rt`` restricted to events whose identifier is must-equivalent to ``x``.

    ``must`` is an AliasRelations, a callable ``(a, b) -> bool``, or None for identity.
    """
    if must is None:
        same = lambda a: a == x
    elif isinstance(must, AliasRelations):
        rx = must.canonical(x)
        same = lambda a: must.canonical(a) == rx
    else:
        same = lambda a: must(x, a)
    return tuple(ev for ident, ev in rt if same(ident))


@dataclass(frozen=True)
class FlowGraph:
    """Nondeterministic event graph; ``None`` labels are eps."""

    nodes: frozenset
    entry: str
    edges: tuple  # (src, event | None, dst)

    @cached_property
    def succ(self) -> dict:
        out: dict = {}
        for src, ev, dst in self.edges:
            out.setdefault(src, []).append((ev, dst))
        return out

    @cached_property
    def eps_closure(self) -> dict:
        clos = {}
        for n in self.nodes:
            seen = {n}
            todo = [n]
            while todo:
                m = todo.pop()
                for ev, dst in self.succ.get(m, ()):
                    if ev is None and dst not in seen:
                        seen.add(dst)
                        todo.append(dst)
            clos[n] = frozenset(seen)
        return clos

    def accepts(self, word) -> bool:
        """Whether ``word`` labels some path from the entry (eps elided)."""
        cur = self.eps_closure[self.entry]
        for sym in word:
            nxt = set()
            for n in cur:
                for ev, dst in self.succ.get(n, ()):
                    if ev == sym:
                        nxt |= self.eps_closure[dst]
            if not nxt:
                return False
            cur = nxt
        return True

    def language(self, bound: int, cap: int | None = None) -> list:
        return _enumerate(self.entry, self.succ, self.eps_closure, bound,
                          resource_cap(cap or DEFAULT_TRACE_CAP))


def project_static(p: ProgramModel, x: str) -> FlowGraph:
    al = p.aliases
    edges = []
    for e in p.edges:
        if e.label is None:
            edges.append((e.src, None, e.dst))
        elif al.must(x, e.label.id):
            edges.append((e.src, e.label.event, e.dst))
        elif not al.may(x, e.label.id):
            edges.append((e.src, None, e.dst))
        else:
            edges.append((e.src, e.label.event, e.dst))
            edges.append((e.src, None, e.dst))
    return FlowGraph(p.nodes, p.entry, tuple(edges))


def alphabet_of(p: ProgramModel) -> frozenset:
    return frozenset(e.label.event for e in p.reachable_edges() if e.label is not None)


def alphabet_of_id(p: ProgramModel, x: str) -> frozenset:
    al = p.aliases
    return frozenset(e.label.event for e in p.reachable_edges()
                     if e.label is not None and al.may(x, e.label.id))


# -- enumeration ---------------------------------------------------------------


def _trace_key(t):
    return (len(t), tuple(tuple(s) if isinstance(s, tuple) else (s,) for s in t))


def _enumerate(entry, succ, closure, bound, cap) -> list:
    # trace -> set of nodes reachable after reading it (eps-closed)
    layer = {(): closure[entry]}
    result = [()]
    for _ in range(bound):
        nxt: dict = {}
        for trace, nodes in layer.items():
            for n in nodes:
                for label, dst in succ.get(n, ()):
                    if label is None:
                        continue
                    t2 = trace + (label,)
                    bucket = nxt.get(t2)
                    if bucket is None:
                        nxt[t2] = set(closure[dst])
                        if len(result) + len(nxt) > cap:
                            raise ResourceLimit(f"more than {cap} traces")
                    else:
                        bucket |= closure[dst]
        if not nxt:
            break
        result.extend(nxt)
        layer = nxt
    result.sort(key=_trace_key)
    return result


def _graph_of(p: ProgramModel) -> FlowGraph:
    return FlowGraph(p.nodes, p.entry, tuple((e.src, e.label, e.dst) for e in p.edges))


def enumerate_traces(p: ProgramModel, bound: int, cap: int | None = None) -> list:
    """All parametrised traces of at most ``bound`` events, sorted by (length, ids, events)."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    return _graph_of(p).language(bound, cap)


# -- silencing -------------------------------------------------------------------


def silence(t: Iterable, pairs: Iterable) -> tuple:
    drop = {Pair(*q) for q in pairs}
    return tuple(Pair(*s) for s in t if Pair(*s) not in drop)


def silence_model(p: ProgramModel, pairs: Iterable) -> ProgramModel:
    drop = {Pair(*q) for q in pairs}
    edges = tuple(Edge(e.src, None, e.dst) if e.label in drop else e for e in p.edges)
    return ProgramModel(p.nodes, p.entry, edges, p.ids, p.aliases, name=p.name)


# -- file formats ------------------------------------------------------------------


def parse_program(text: str) -> ProgramModel:
    """Read the ``.prog`` format.

    ::

        program <name>
        ids <s1> <s2> ...
        must <id> <id> ...     # all listed ids are must-aliases; repeatable
        may <id> <id> ...
        notmay <id> <id>
        nodes <n...>
        entry <n>
        edge <n> -> <n'> : <id>.<event> | eps
    """
    name = "program"
    ids: list = []
    nodes: list = []
    entry = None
    must, may, not_may, edges = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        words = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
        if not words:
            continue
        head, hcol = words[0]
        args = words[1:]
        if head == "program":
            if len(args) != 1:
                raise SpecError("expected: program <name>", lineno, hcol)
            name = args[0][0]
        elif head == "ids":
            for w, c in args:
                _token(w, "identifier", lineno, c)
                ids.append(w)
        elif head == "nodes":
            for w, c in args:
                _token(w, "node", lineno, c)
                nodes.append(w)
        elif head == "entry":
            if len(args) != 1:
                raise SpecError("expected: entry <node>", lineno, hcol)
            entry = args[0][0]
        elif head in ("must", "may", "notmay"):
            if len(args) < 2 or (head == "notmay" and len(args) != 2):
                raise SpecError(f"expected: {head} <id> <id>", lineno, hcol)
            for w, c in args:
                if w not in ids:
                    raise SpecError(f"undeclared identifier {w!r}", lineno, c)
            group = [w for w, _ in args]
            target = {"must": must, "may": may, "notmay": not_may}[head]
            if head == "must":
                target.extend(zip(group, group[1:]))
            else:
                target.extend((a, b) for i, a in enumerate(group) for b in group[i + 1:])
        elif head == "edge":
            edges.append(_parse_edge(args, lineno, hcol, set(nodes), set(ids)))
        else:
            raise SpecError(f"unknown directive {head!r}", lineno, hcol)
    if entry is None:
        raise SpecError("missing 'entry' line")
    if entry not in nodes:
        raise SpecError(f"entry node {entry!r} is not declared")
    if len(set(ids)) != len(ids):
        raise SpecError("duplicate identifier")
    return ProgramModel(frozenset(nodes), entry, tuple(edges), frozenset(ids),
                        close_relations(ids, must, may, not_may), name=name)


def _token(w, what, lineno, col):
    try:
        check_token(w, what)
    except SpecError as err:
        raise SpecError(err.message, lineno, col) from None


def _parse_edge(args, lineno, hcol, nodes, ids) -> Edge:
    if len(args) != 5 or args[1][0] != "->" or args[3][0] != ":":
        raise SpecError("expected: edge <n> -> <n'> : <id>.<event> | eps", lineno, hcol)
    (src, scol), (dst, dcol), (lab, lcol) = args[0], args[2], args[4]
    for n, c in ((src, scol), (dst, dcol)):
        if n not in nodes:
            raise SpecError(f"undeclared node {n!r}", lineno, c)
    if lab == "eps":
        return Edge(src, None, dst)
    ident, dot, event = lab.partition(".")
    if not dot:
        raise SpecError(f"expected <id>.<event>, found {lab!r}", lineno, lcol)
    if ident not in ids:
        raise SpecError(f"undeclared identifier {ident!r}", lineno, lcol)
    _token(event, "event", lineno, lcol + len(ident) + 1)
    return Edge(src, Pair(ident, event), dst)


def print_program(p: ProgramModel) -> str:
    lines = [f"program {p.name}", " ".join(["ids", *sorted(p.ids)])]
    al = p.aliases
    classes: dict = {}
    for x in sorted(p.ids):
        classes.setdefault(al.canonical(x), []).append(x)
    for members in classes.values():
        if len(members) > 1:
            lines.append(" ".join(["must", *members]))
    for pair in sorted(tuple(sorted(q)) for q in al.may_pairs):
        if not al.must(*pair):
            lines.append(f"may {pair[0]} {pair[1]}")
    lines.append(" ".join(["nodes", *sorted(p.nodes)]))
    lines.append(f"entry {p.entry}")
    for e in sorted(p.edges, key=lambda e: (e.src, e.dst, "" if e.label is None else str(e.label))):
        lines.append(f"edge {e.src} -> {e.dst} : {'eps' if e.label is None else e.label}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str):
    """Read a ``.trace`` file: ``<id> <event>`` per line, or ``<event>`` for ground traces.

    Returns a tuple of Pair for parametrised traces and a tuple of str otherwise.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        if len(words) > 2:
            raise SpecError("expected '<id> <event>' or '<event>'", lineno, 1)
        rows.append((lineno, words))
    arity = {len(w) for _, w in rows}
    if len(arity) > 1:
        raise SpecError("mixed parametrised and ground lines", rows[-1][0], 1)
    if arity == {2}:
        return tuple(Pair(*w) for _, w in rows)
    return tuple(w[0] for _, w in rows)


def format_trace(t: Iterable) -> str:
    lines = []
    for s in t:
        lines.append(f"{s[0]} {s[1]}" if isinstance(s, tuple) else str(s))
    return "".join(line + "\n" for line in lines)
