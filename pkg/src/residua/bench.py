"""Transaction benchmark: random user walks over the user-type flow graphs,
monitored with the payment property at each cumulative analysis level.

Counts are the overhead proxy: fewer delivered events and fewer guard
evaluations mean less monitoring work at runtime.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field

from . import fixtures
from .date import DateSpec
from .monitor import ActivationStats, MonitorPool
from .program import Pair
from .residual import analyze

LEVELS = ("none", "0", "1", "2")
USER_TYPES = ("bronze", "silver", "gold")
STATIC_ID = {"bronze": "bronzeUser", "silver": "silverUser", "gold": "goldUser"}
ENTRY_NODE = {"bronze": "b0", "silver": "s0", "gold": "g0"}
PROPERTY = "fig5"
PROGRAM = "fig4_combined"

COUNTERS = ("events_total", "events_delivered", "transitions_evaluated",
            "monitors_created", "violations", "bad_entries")


@dataclass(frozen=True)
class BenchScenario:
    users: int = 1000
    mix: tuple = (1 / 3, 1 / 3, 1 / 3)  # bronze, silver, gold
    seed: int = 0
    steps: int = 50
    level: str = "2"  # highest level run; "none" and every level below are included

    def __post_init__(self):
        object.__setattr__(self, "level", str(self.level))
        if self.users < 1 or self.steps < 1:
            raise ValueError("users and steps must be >= 1")
        if len(self.mix) != 3 or any(m < 0 for m in self.mix) or not math.isclose(sum(self.mix), 1.0):
            raise ValueError("mix needs three nonnegative proportions summing to 1")
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {', '.join(LEVELS)}")

    @property
    def levels(self) -> tuple:
        return LEVELS[:LEVELS.index(self.level) + 1]


@dataclass
class LevelResult:
    stats: ActivationStats
    delivered_by_type: dict
    verdicts: dict


@dataclass
class BenchReport:
    scenario: BenchScenario
    users: dict  # runtime user -> type
    results: dict = field(default_factory=dict)  # level -> LevelResult

    def ratio(self, level: str, counter: str) -> float:
        base = getattr(self.results["none"].stats, counter)
        val = getattr(self.results[level].stats, counter)
        return val / base if base else 0.0

    @property
    def verdicts_agree(self) -> bool:
        ref = self.results["none"].verdicts
        return all(r.verdicts == ref for r in self.results.values())

    def rows(self) -> list:
        out = []
        for lvl, r in self.results.items():
            row = {"level": lvl}
            row.update({c: getattr(r.stats, c) for c in COUNTERS})
            for t in USER_TYPES:
                row[f"delivered_{t}"] = r.delivered_by_type.get(t, 0)
            row["delivered_ratio"] = f"{self.ratio(lvl, 'events_delivered'):.4f}"
            row["evaluated_ratio"] = f"{self.ratio(lvl, 'transitions_evaluated'):.4f}"
            out.append(row)
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()


def assign_types(s: BenchScenario, rng: random.Random) -> dict:
    """Deterministic user -> type assignment honouring the mix proportions."""
    counts = [int(s.users * m) for m in s.mix]
    # hand the rounding remainder to the largest fractional parts
    rest = sorted(range(3), key=lambda i: -(s.users * s.mix[i] - counts[i]))
    for i in rest[:s.users - sum(counts)]:
        counts[i] += 1
    kinds = [t for t, c in zip(USER_TYPES, counts) for _ in range(c)]
    rng.shuffle(kinds)
    width = len(str(s.users - 1))
    return {f"u{i:0{width}d}": k for i, k in enumerate(kinds)}


def _walk(graph: dict, start: str, steps: int, rng: random.Random) -> list:
    node, events = start, []
    while len(events) < steps:
        outs = graph.get(node)
        if not outs:
            break
        label, node = rng.choice(outs)
        if label is not None:
            events.append(label.event)
    return events


def generate_trace(s: BenchScenario) -> tuple:
    """(user -> type, parametrised runtime trace) for the scenario."""
    rng = random.Random(s.seed)
    users = assign_types(s, rng)
    p = fixtures.program(PROGRAM)
    graph: dict = {}
    for e in sorted(p.edges, key=lambda e: (e.src, str(e.label), e.dst)):
        graph.setdefault(e.src, []).append((e.label, e.dst))
    walks = {u: _walk(graph, ENTRY_NODE[t], s.steps, rng) for u, t in users.items()}
    order = [u for u in users for _ in walks[u]]
    rng.shuffle(order)
    pos = dict.fromkeys(users, 0)
    trace = []
    for u in order:
        trace.append(Pair(u, walks[u][pos[u]]))
        pos[u] += 1
    return users, tuple(trace)


def level_properties(levels=LEVELS) -> dict:
    """level -> (monitored DATE, static silenced pairs); analyses run once."""
    d = fixtures.date(PROPERTY)
    p = fixtures.program(PROGRAM)
    out = {"none": (d, frozenset())}
    for lvl in levels:
        if lvl != "none":
            rep = analyze(d, [p], int(lvl))
            out[lvl] = (rep.residual, rep.silenced)
    return out


def runtime_silenced(users: dict, silenced: frozenset) -> frozenset:
    """Expand static silenced pairs to every runtime user of the matching type."""
    by_id: dict = {}
    for ident, ev in silenced:
        by_id.setdefault(ident, []).append(ev)
    return frozenset(Pair(u, ev) for u, t in users.items() for ev in by_id.get(STATIC_ID[t], ()))


def monitor_level(d: DateSpec, silenced: frozenset, users: dict, trace) -> LevelResult:
    pool = MonitorPool(d, None, runtime_silenced(users, silenced))
    by_type = dict.fromkeys(USER_TYPES, 0)
    for u, ev in trace:
        before = pool.stats.events_delivered
        pool.feed(u, ev)
        by_type[users[u]] += pool.stats.events_delivered - before
    return LevelResult(pool.stats, by_type, {k: str(v) for k, v in pool.verdicts().items()})


def run_bench(s: BenchScenario) -> BenchReport:
    props = level_properties(s.levels)
    users, trace = generate_trace(s)
    rep = BenchReport(s, users)
    for lvl in s.levels:
        d, silenced = props[lvl]
        rep.results[lvl] = monitor_level(d, silenced, users, trace)
    return rep
