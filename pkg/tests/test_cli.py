import io

import pytest

from residua import fixtures
from residua.cli import main
from residua.dateformat import parse_date
from residua.residual import parse_silenced


def call(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_analyze_writes_outputs(tmp_path):
    d, s, r = tmp_path / "r.date", tmp_path / "r.silenced", tmp_path / "r.report"
    code, text = call("analyze", "--date", "fixture:fig5.date", "--program", "fixture:fig4_combined.prog",
                      "--level", "2", "--out-date", str(d), "--out-silenced", str(s), "--out-report", str(r))
    assert code == 0
    assert text == r.read_text()
    assert "transitions_after 3" in text.splitlines()
    assert parse_date(d.read_text()).transitions == fixtures.date("fig5_residual2").transitions
    assert ("bronzeUser", "createdUser") in parse_silenced(s.read_text())


def test_analyze_from_files(tmp_path):
    (tmp_path / "p.date").write_text(fixtures.text("fig3.date"))
    (tmp_path / "p.prog").write_text(fixtures.text("fig3_program.prog"))
    code, text = call("analyze", "--date", str(tmp_path / "p.date"),
                      "--program", str(tmp_path / "p.prog"))
    assert code == 0 and "statically_satisfied true" in text


def test_monitor_exit_codes(tmp_path):
    bad = tmp_path / "bad.trace"
    bad.write_text("u1 greyList\nu1 transfer\nu1 transfer\nu1 whiteList\n")
    code, text = call("monitor", "--date", "fixture:fig3.date", "--trace", str(bad))
    assert code == 3
    lines = text.splitlines()
    assert lines[0] == "u1 VIOLATION@3"
    assert lines[1:] == ["events_total 4", "events_delivered 4", "transitions_evaluated 5",
                         "monitors_created 1", "violations 1", "bad_entries 1"]
    good = tmp_path / "good.trace"
    good.write_text("u2 greyList\nu1 greyList\n")
    code, text = call("monitor", "--date", "fixture:fig3.date", "--trace", str(good))
    assert code == 0 and text.splitlines()[:2] == ["u1 OK", "u2 OK"]


def test_monitor_ground_trace(tmp_path):
    t = tmp_path / "g.trace"
    t.write_text("greyList\nwhiteList\n")
    code, text = call("monitor", "--date", "fixture:fig3.date", "--trace", str(t))
    assert code == 3 and text.startswith("u VIOLATION@1")


def test_monitor_with_silenced(tmp_path):
    t = tmp_path / "t.trace"
    t.write_text("bronzeUser createdUser\nbronzeUser pay\n")
    s = tmp_path / "s.silenced"
    s.write_text("bronzeUser createdUser\nbronzeUser pay\n")
    code, text = call("monitor", "--date", "fixture:fig5.date", "--trace", str(t), "--silenced", str(s))
    assert code == 0 and "events_delivered 0" in text.splitlines()


def test_equiv(tmp_path):
    code, text = call("equiv", "--date", "fixture:fig5.date", "--program", "fixture:fig4_combined.prog",
                      "--bound", "5")
    assert code == 0 and text.startswith("checked=") and text.strip().endswith("mismatches=0 bound=5")
    mutant = fixtures.text("fig5.date").replace("trans qb -> qd on activate if success\n", "")
    (tmp_path / "m.date").write_text(mutant)
    code, text = call("equiv", "--date", "fixture:fig5.date", "--program", "fixture:fig4_combined.prog",
                      "--residual", str(tmp_path / "m.date"), "--bound", "4")
    assert code == 4
    assert "mismatches=0" not in text.splitlines()[0]
    assert any(line.endswith(" pay") for line in text.splitlines())


def test_bench(tmp_path):
    csv_path, png = tmp_path / "b.csv", tmp_path / "b.png"
    code, text = call("bench", "--users", "30", "--seed", "1", "--out-csv", str(csv_path),
                      "--out-plot", str(png))
    assert code == 0
    assert csv_path.read_text() == text
    assert png.read_bytes()[:4] == b"\x89PNG"


def test_input_errors(tmp_path):
    code, _ = call("analyze", "--date", str(tmp_path / "missing.date"), "--program", "x.prog")
    assert code == 2
    broken = tmp_path / "broken.date"
    broken.write_text("date d\nstates a\ninitial a\ntrans a -> b on e\n")
    code, _ = call("analyze", "--date", str(broken), "--program", "fixture:fig3_program.prog")
    assert code == 2


def test_resource_limit(monkeypatch):
    monkeypatch.setenv("RESIDUA_LIMIT", "5")
    code, _ = call("equiv", "--date", "fixture:fig5.date", "--program", "fixture:fig4_combined.prog")
    assert code == 5


def test_usage_errors():
    with pytest.raises(SystemExit):
        call("analyze", "--level", "7", "--date", "x")
