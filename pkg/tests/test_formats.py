import pytest
from hypothesis import given, settings, strategies as st

from residua import fixtures
from residua.dateformat import parse_date, print_date
from residua.errors import ContradictoryAliases, SpecError
from residua.oracle import GenConfig, random_instance
from residua.program import Pair, format_trace, parse_program, parse_trace, print_program

HEAD = "date t\nalphabet a b\nstates q0 q1\ninitial q0\n"


def test_fig3_fixture_shape():
    d = fixtures.date("fig3")
    assert len(d.states) == 6
    assert [v.name for v in d.vars] == ["transferCount"]
    explicit = [t for t in d.transitions if t.target != "q5"]
    assert len(explicit) == 6
    # each star fans out over the four events of the alphabet
    assert len(d.transitions) == 6 + 8
    assert d.bad == {"q3"}


def test_star_expands_only_missing_events():
    d = parse_date(HEAD + "trans q0 -> q1 on a\ntrans q0 -> q0 on *\n")
    assert {(t.source, t.event, t.target) for t in d.transitions} == {("q0", "a", "q1"), ("q0", "b", "q0")}


def test_star_order_does_not_matter():
    a = parse_date(HEAD + "trans q0 -> q0 on *\ntrans q0 -> q1 on a\n")
    b = parse_date(HEAD + "trans q0 -> q1 on a\ntrans q0 -> q0 on *\n")
    assert a == b


def test_undeclared_variable_is_positioned():
    with pytest.raises(SpecError) as info:
        parse_date(HEAD + "trans q0 -> q1 on a if n > 1\n")
    assert info.value.line == 5
    assert info.value.col is not None


@pytest.mark.parametrize("bad_line", [
    "trans q0 -> q9 on a",
    "trans q0 q1 on a",
    "trans q0 -> q1 on c",
    "trans q0 -> q1 on * if true",
    "var int x = yes",
    "frobnicate q0",
])
def test_malformed_date_lines(bad_line):
    with pytest.raises(SpecError) as info:
        parse_date(HEAD + bad_line + "\n")
    assert info.value.line == 5


def test_print_is_canonical():
    a = parse_date("date t\nalphabet b a\nstates q1 q0\ninitial q0\n"
                   "trans q1 -> q0 on b\ntrans q0 -> q1 on a\n")
    text = print_date(a)
    assert text.index("q0 -> q1") < text.index("q1 -> q0")
    assert "alphabet a b\n" in text
    assert parse_date(text) == a


def test_all_fixtures_round_trip():
    for name in fixtures.names(".date"):
        d = fixtures.date(name)
        text = print_date(d)
        assert parse_date(text) == d, name
        assert print_date(parse_date(text)) == text
    for name in fixtures.names(".prog"):
        p = fixtures.program(name)
        text = print_program(p)
        again = parse_program(text)
        assert again.aliases == p.aliases and set(again.edges) == set(p.edges), name
        assert print_program(again) == text


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_random_instances_round_trip(seed):
    d, p = random_instance(GenConfig(seed=seed))
    assert parse_date(print_date(d)) == d
    again = parse_program(print_program(p))
    assert again.aliases == p.aliases and set(again.edges) == set(p.edges)


def test_fig4_combined_structure():
    p = fixtures.program("fig4_combined")
    assert p.ids == {"bronzeUser", "silverUser", "goldUser"}
    entry_edges = [e for e in p.edges if e.src == p.entry]
    assert all(e.label is None for e in entry_edges) and len(entry_edges) == 3
    assert not p.aliases.may("bronzeUser", "silverUser")


def test_program_errors():
    with pytest.raises(SpecError) as info:
        parse_program("program p\nids a\nnodes n0\nentry n0\nedge n0 -> n0 : b.open\n")
    assert info.value.line == 5
    with pytest.raises(ContradictoryAliases):
        parse_program("program p\nids a b\nmust a b\nnotmay a b\nnodes n0\nentry n0\n")


def test_must_implies_may():
    p = parse_program("program p\nids a b c\nmust a b\nnodes n0\nentry n0\n")
    assert p.aliases.may("a", "b") and p.aliases.must("a", "b")
    assert not p.aliases.may("a", "c")


def test_trace_format():
    rt = parse_trace("# comment\nu1 greyList\n\nu2 transfer  # trailing\n")
    assert rt == (Pair("u1", "greyList"), Pair("u2", "transfer"))
    assert parse_trace(format_trace(rt)) == rt
    assert parse_trace("a\nb\n") == ("a", "b")
    with pytest.raises(SpecError):
        parse_trace("a\nu b\n")
