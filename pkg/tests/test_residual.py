import random

import pytest
from hypothesis import given, settings, strategies as st

from residua import expr as ex
from residua import fixtures
from residua.date import DateSpec, restrict_alphabet, restrict_transitions, run, step_counted, trans
from residua.oracle import GenConfig, random_date, random_instance, random_valuation
from residua.program import Pair, enumerate_traces, make_program, project_runtime, project_static, silence
from residua.residual import (BAD_AFTER, GOOD_ENTRY, USELESS, analyze, approx_step, classify_states,
                              parse_silenced, reachable_reduce, residual0, residual1, residual1_union,
                              residual2, static_run, used_transitions)


@pytest.fixture(scope="module")
def fig3():
    return fixtures.date("fig3")


@pytest.fixture(scope="module")
def fig5():
    return fixtures.date("fig5")


@pytest.fixture(scope="module")
def fig4():
    return fixtures.program("fig4_combined")


def _edges(d):
    return {(t.source, t.event, t.target) for t in d.transitions}


def test_approx_step_fig3(fig3):
    assert approx_step(fig3, "q1", "whiteList") == {"q0", "q1", "q3"}
    assert approx_step(fig3, "q0", "greyList") == {"q1"}
    assert approx_step(fig3, "q0", "transfer") == {"q0"}


def test_literal_guards_in_approx_step():
    d = DateSpec({"a", "b", "c"}, {"e", "f"}, (), "a", set(),
                 {trans("a", "b", "e", "1 > 2"), trans("a", "c", "f", "2 > 1")})
    assert approx_step(d, "a", "e") == {"a"}
    assert approx_step(d, "a", "f") == {"c"}


def test_static_run_fig3(fig3):
    assert static_run(fig3, {"q0", "q2"}, []) == {"q0", "q2"}
    assert static_run(fig3, {"q0"}, ["greyList", "whiteList"]) == {"q0", "q1", "q3"}
    assert static_run(fig3, {"q0"}, ["permanentlyDisabled"]) == {"q2"}


def test_classify_fig3(fig3):
    c = classify_states(fig3)
    assert c == {"q0": BAD_AFTER, "q1": BAD_AFTER, "q3": BAD_AFTER,
                 "q2": GOOD_ENTRY, "q4": GOOD_ENTRY, "q5": USELESS}


def test_classify_degenerate():
    d = DateSpec({"a", "b"}, {"e"}, (), "a", set(), {trans("a", "b", "e")})
    assert set(classify_states(d).values()) == {USELESS}
    assert reachable_reduce(d).is_empty
    d = DateSpec({"a"}, {"e"}, (), "a", {"a"}, ())
    assert classify_states(d) == {"a": BAD_AFTER}


def test_reachable_reduce_fig3(fig3):
    r = reachable_reduce(fig3)
    assert r.states == {"q0", "q1", "q2", "q3", "q4"}
    assert all(t.target != "q5" for t in r.transitions)
    assert len(r.transitions) == 6
    assert reachable_reduce(restrict_alphabet(fig3, {"transfer"})).is_empty


def test_residual0_fig5(fig5, fig4):
    rep = residual0(fig5, fig4)
    assert {(t.source, t.event, t.target) for t in rep.removed_transitions} == {
        ("qe", "transfer", "qf"), ("qg", "transfer", "qh")}
    assert rep.silenced == frozenset()


def test_residual0_fig1():
    d = fixtures.date("fig1")
    p = make_program({"n0", "n1"}, "n0", [("n0", "s.open", "n1"), ("n1", "s.write", "n0"),
                                          ("n1", "s.close", "n0")], {"s"})
    r = residual0(d, p).residual
    assert r.states == {"qa", "qb", "qc"}
    assert {"read", "lookAhead"}.isdisjoint(t.event for t in r.transitions)


def test_residual1_bronze_empty(fig5, fig4):
    assert residual1(fig5, fig4, "bronzeUser").is_empty
    silver = residual1(fig5, fig4, "silverUser")
    assert silver == residual0(fig5, fig4).residual


def test_residual1_transfers_only(fig3):
    p = make_program({"n0"}, "n0", [("n0", "u.transfer", "n0")], {"u"})
    assert residual1(fig3, p, "u").is_empty


def test_residual1_union_fig5(fig5, fig4):
    rep = residual1_union(fig5, fig4)
    assert rep.residual == residual0(fig5, fig4).residual
    assert {x for x, _ in rep.silenced} == {"bronzeUser"}
    assert rep.silenced == parse_silenced(fixtures.text("fig5_level1.silenced"))


def test_may_entangled_ids_are_not_silenced(fig3):
    # b only transfers, but it may be a: silencing its transfer could change a's verdict
    p = make_program({"n0", "n1", "n2", "n3"}, "n0",
                     [("n0", "a.greyList", "n1"), ("n1", "b.transfer", "n2"), ("n2", "a.whiteList", "n3")],
                     {"a", "b"}, may=[("a", "b")])
    rep = residual1_union(fig3, p)
    assert Pair("b", "transfer") not in rep.silenced


def test_used_transitions_fig3(fig3):
    p = fixtures.program("fig3_program")
    used = used_transitions(fig3, p, "u")
    assert _edges(restrict_transitions(fig3, used)) == {("q0", "greyList", "q1"), ("q1", "transfer", "q1")}


def test_used_transitions_empty_language(fig3):
    p = make_program({"n0"}, "n0", [], {"u"})
    assert used_transitions(fig3, p, "u") == frozenset()


def test_used_transitions_silver_pay(fig5):
    p = fixtures.program("fig4_silver_gold")
    used = {(t.source, t.event) for t in used_transitions(fig5, p, "silverUser")}
    assert ("qe", "pay") not in used and ("qg", "pay") not in used
    assert ("qb", "pay") in used


def test_residual2_fig5(fig5, fig4):
    rep = residual2(fig5, [fig4])
    assert _edges(rep.residual) == {("qa", "createdUser", "qb"), ("qb", "pay", "qc"),
                                    ("qb", "activate", "qd")}
    assert rep.residual.transitions == fixtures.date("fig5_residual2").transitions


def test_residual2_fig3_empty(fig3):
    rep = residual2(fig3, [fixtures.program("fig3_program")])
    assert rep.residual.is_empty and rep.statically_satisfied
    assert {t for t in rep.removed_transitions if t.source == "q1" and t.event == "whiteList"}


def test_residual2_full_language_is_reduce(fig3):
    nodes = {"n0"}
    edges = [("n0", f"u.{e}", "n0") for e in sorted(fig3.alphabet)]
    p = make_program(nodes, "n0", edges, {"u"})
    assert residual2(fig3, [p]).residual == reachable_reduce(fig3)


def test_report_format(fig3):
    rep = analyze(fig3, [fixtures.program("fig3_program")], 2)
    text = rep.format_report()
    lines = text.splitlines()
    assert lines[0] == "level 2"
    assert "statically_satisfied true" in lines
    assert "removed q1 -> q3 on whiteList if transferCount < 3" in lines
    assert rep.format_silenced() == "u greyList\nu transfer\nu whiteList\n"


# -- oracle-backed properties -------------------------------------------------------------


def _uses_by_words(d, p, x, bound):
    """Brute force: a transition is used when a projected word reaches its source right before its event."""
    used = set()
    for w in project_static(p, x).language(bound):
        cur = frozenset({d.initial})
        for e in w:
            for t in d.transitions:
                if t.source in cur and t.event == e and not ex.is_literally(t.guard, False):
                    used.add(t)
            cur = static_run(d, cur, [e])
    return used


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_used_transitions_matches_word_enumeration(seed):
    cfg = GenConfig(seed=seed, max_states=3, max_events=2, max_nodes=3, max_edges=5)
    d, p = random_instance(cfg)
    # every product pair is reachable within |nodes| * |states| labelled steps
    bound = len(p.nodes) * len(d.states) + 1
    for x in sorted(p.ids):
        assert used_transitions(d, p, x) == _uses_by_words(d, p, x, bound)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**63 - 1), st.lists(st.integers(0, 2), max_size=8))
def test_static_run_contains_concrete(seed, picks):
    rng = random.Random(seed)
    d = random_date(rng, GenConfig())
    events = sorted(d.alphabet)
    trace = [events[i % len(events)] for i in picks]
    q = rng.choice(sorted(d.states))
    theta = random_valuation(rng, d)
    state = q
    for e in trace:
        state, theta, _ = step_counted(d, state, theta, e)
    assert state in static_run(d, {q}, trace)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**63 - 1), st.lists(st.integers(0, 2), max_size=8))
def test_no_bad_in_static_run_means_ok(seed, picks):
    d = random_date(random.Random(seed), GenConfig())
    events = sorted(d.alphabet)
    trace = [events[i % len(events)] for i in picks]
    if all(not (static_run(d, {d.initial}, trace[:i]) & d.bad) for i in range(len(trace) + 1)):
        assert run(d, trace).verdict.ok


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**63 - 1), st.sets(st.sampled_from(["q0", "q1", "q2", "q3", "q4"])))
def test_static_step_monotone(seed, extra):
    d = random_date(random.Random(seed), GenConfig())
    s = {"q0"}
    s2 = s | (extra & d.states)
    for e in d.alphabet:
        assert static_run(d, s, [e]) <= static_run(d, s2, [e])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_pruning_is_monotone_across_levels(seed):
    d, p = random_instance(GenConfig(seed=seed))
    r0, r1, r2 = (analyze(d, [p], lvl).residual for lvl in (0, 1, 2))
    assert r2.transitions <= r1.transitions <= r0.transitions <= reachable_reduce(d).transitions


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_literally_false_never_used(seed):
    d, p = random_instance(GenConfig(seed=seed))
    for x in p.ids:
        assert not any(ex.is_literally(t.guard, False) for t in used_transitions(d, p, x))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_silencing_keeps_per_id_verdicts(seed):
    """Dropping silenced pairs never changes a must-class verdict on a program trace."""
    d, p = random_instance(GenConfig(seed=seed))
    rep = analyze(d, [p], 1)
    for rt in enumerate_traces(p, 5):
        quiet = silence(rt, rep.silenced)
        for x in sorted(p.ids):
            want = run(d, project_runtime(rt, x, p.aliases)).verdict.ok
            assert run(rep.residual, project_runtime(quiet, x, p.aliases)).verdict.ok == want


def test_fixpoint_flag_is_sound(fig5, fig4):
    a = analyze(fig5, [fig4], 2, fixpoint=True)
    b = analyze(fig5, [fig4], 2)
    assert a.residual.transitions <= b.residual.transitions
