import os
import pathlib

import pytest

import picsif

SOURCE = pathlib.Path(os.environ.get("PICSIF_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def test_bundled_scenarios():
    names = picsif.scenarios()
    assert "signalgate" in names
    assert "honest2" in names
    text = picsif.scenario_text("signalgate")
    assert text == (SOURCE / "scenarios" / "signalgate.scif").read_text()


def test_terms():
    assert picsif.congruent("send a(m) | 0", "send a(m)")
    assert not picsif.congruent("send a(m)", "send b(m)")
    assert picsif.alpha_equivalent("new x. send a(x)", "new y. send a(y)")
    p = picsif.pretty("send a(m) | recv b<n>. send c(n)")
    assert picsif.alpha_equivalent(p, "send a(m) | recv b<n>. send c(n)")
    n = picsif.normalize(p)
    assert picsif.normalize(n) == n
    with pytest.raises(picsif.FormatError):
        picsif.pretty("send a(m) | (")


def test_clocks():
    assert picsif.inc_ele([0, 0, 0], 1) == [0, 1, 0]
    assert picsif.max_vec([3, 1, 0], [2, 2, 0]) == [3, 2, 0]
    assert picsif.happened_before([1, 0], [1, 1]) == "before"
    assert picsif.happened_before([1, 0], [0, 1]) == "concurrent"
    with pytest.raises(picsif.Error):
        picsif.max_vec([1], [1, 2])


def test_stepping_and_audit():
    s = picsif.load("honest2", fuel=3)
    assert s.trace() == []
    labels = s.enabled()
    assert labels
    t = s.step(0)
    assert len(t.trace()) == 1
    assert t.key() != s.key()
    with pytest.raises(IndexError):
        s.step(len(labels))
    v = picsif.run("honest2", policy="random", seed=3, steps=10, fuel=3).audit()
    assert v["accountable"]
    assert v["summary"] == "accountable"


def test_explore_and_replay():
    r = picsif.explore("signalgate", target="auth-z", depth=12, fuel=3)
    assert r["result"] == "found"
    golden = (SOURCE / "golden" / "signalgate-auth-z.witness").read_text()
    assert r["witness"] == golden
    assert r["verdict"]["summary"] in ("auth-z-violated", "both")
    v = picsif.replay("signalgate", r["witness"], fuel=3)
    assert v == r["verdict"]
    with pytest.raises(picsif.ReplayDivergence):
        picsif.replay("honest2", r["witness"], fuel=3)


def test_honest_search_is_clean():
    r = picsif.explore("honest2", target="any", depth=5, fuel=3, strategy="dfs")
    assert r["result"] == "exhausted"
    assert r["witness"] is None
    assert r["states"] > 0
