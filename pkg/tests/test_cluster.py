from importlib import resources

import numpy as np
import pytest
import yaml

from crgc.bounds import CodeParams
from crgc.cluster import (Event, Scenario, ScenarioAbort, ScenarioError, compare_mechanisms,
                          default_upgrade_download, parse_scenario, run)

EXAMPLE3 = resources.files("crgc").joinpath("data/example3.scenario").read_text()


def test_bundled_scenario_ledger():
    report = run(parse_scenario(EXAMPLE3))
    assert report.passed
    assert [e.helper_to_engine for e in report.ledger] == [10, 6, 10]
    assert [e.predicted for e in report.ledger] == [10, 6, 10]
    assert [e.engine_to_newcomers for e in report.ledger] == [6, 3, 6]
    assert all(ev.ok for ev in report.events)
    assert report.alive == list(range(1, 11))


def test_report_yaml_round_trip():
    report = run(parse_scenario(EXAMPLE3))
    doc = yaml.safe_load(report.to_yaml())
    assert doc["status"] == "ok"
    assert [l["helper_to_engine"] for l in doc["ledger"]] == [10, 6, 10]


def test_empty_events():
    report = run(Scenario(CodeParams(12, 7, 4, 5, 2)))
    assert report.passed and report.ledger == [] and report.events == []
    assert report.alive == list(range(1, 8))


def test_impossible_repair_aborts():
    text = """
schema: 1
params: {B: 12, n: 7, k: 4, d: 5, t: 2}
events:
  - fail: [1, 2, 3, 4, 5]
  - repair: {helpers: [6, 7]}
"""
    with pytest.raises(ScenarioAbort) as info:
        run(parse_scenario(text))
    assert info.value.index == 1
    assert "k=4" in info.value.reason
    assert info.value.report.status == "aborted"


def test_replay_is_deterministic():
    a = run(parse_scenario(EXAMPLE3))
    b = run(parse_scenario(EXAMPLE3))
    assert a.digest == b.digest and a.to_yaml() == b.to_yaml()


def test_seed_override_keeps_totals():
    base = parse_scenario(EXAMPLE3)
    other = parse_scenario(EXAMPLE3)
    other.seed = 7
    a, b = run(base), run(other)
    assert a.digest != b.digest
    assert [e.helper_to_engine for e in a.ledger] == [e.helper_to_engine for e in b.ledger]


@pytest.mark.parametrize("text,line", [
    ("schema: 1\nparams: {B: 12, n: 7\n", 3),
    ("schema: 1\nparams:\n  B: 12\n   n: 7\n", 4),
])
def test_parse_error_location(text, line):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    assert info.value.line == line and info.value.column is not None


@pytest.mark.parametrize("text", [
    "schema: 2\nparams: {B: 12, n: 7, k: 4, d: 5, t: 2}\n",
    "schema: 1\nparams: {B: 11, n: 7, k: 4, d: 8, t: 2}\n",
    "schema: 1\nparams: {B: 12, n: 7, k: 4, d: 5, t: 2}\nevents: [{explode: 1}]\n",
    "schema: 1\nparams: {B: 12, n: 7, k: 4, d: 5, t: 2}\nevents: [{fail: [9]}]\n",
    "schema: 1\nparams: {B: 12, n: 7, k: 4, d: 5, t: 2}\nevents: [{repair: {}}]\n",
    "schema: 1\nparams: {B: 12, n: 7, k: 4, d: 5, t: 2}\nfield: 256\n",
    "schema: 1\nparams: {B: 12, n: 7, k: 4, d: 5, t: 2}\nextra: 1\n",
])
def test_schema_errors(text):
    with pytest.raises(ScenarioError):
        parse_scenario(text)


def test_collect_download_vector():
    text = """
schema: 1
params: {B: 12, n: 7, k: 4, d: 5, t: 2}
symbols: 2
events:
  - collect: {download: [2, 2, 2, 2, 2, 1, 1]}
  - collect: {download: [2, 2, 2, 2, 2, 1, 0]}
on_mds_failure: continue
"""
    report = run(parse_scenario(text))
    assert [e.ok for e in report.events] == [True, False]
    assert report.status == "failed"


def test_default_upgrade_download():
    assert default_upgrade_download(4, 3, 1, 6) == [1] * 6
    assert sum(default_upgrade_download(4, 3, 2, 6)) == 10


def _random_scenario(rng):
    k = int(rng.integers(1, 5))
    t = int(rng.integers(1, k + 1))
    d = int(rng.integers(k, 9 - t))
    n = int(rng.integers(d + t, 10))
    params = CodeParams(k * (d - k + t), n, k, d, t)
    events, alive, next_id = [], list(range(1, n + 1)), n + 1
    while len(events) < 6:
        roll = rng.random()
        if roll < 0.4 and len(events) <= 4:
            ids = sorted(int(x) for x in rng.choice(alive, t, replace=False))
            events += [Event("fail", {"ids": ids}), Event("repair", {"helpers": "first-d-alive"})]
        elif roll < 0.7 and next_id <= 12 and len(alive) >= d + t - 1:
            # one new node needs alpha packets at one per helper
            d_s = int(rng.integers(d + t - 1, len(alive) + 1))
            events.append(Event("upgrade", {"s": 1, "d_s": d_s}))
            alive.append(next_id)
            next_id += 1
        else:
            nodes = sorted(int(x) for x in rng.choice(alive, k, replace=False))
            events.append(Event("collect", {"nodes": nodes}))
    return Scenario(params, 257, int(rng.integers(1 << 30)), 2, events[:6])


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_fuzz_scenarios(seed):
    scenario = _random_scenario(np.random.default_rng(seed))
    report = run(scenario)
    assert report.passed, report.reason
    for entry in report.ledger:
        assert entry.helper_to_engine == entry.predicted
    assert run(scenario).digest == report.digest


def test_compare_mechanisms():
    rows = {r.mechanism: r for r in compare_mechanisms(CodeParams(12, 7, 4, 5, 2))}
    assert rows["concurrent MS"].gamma == 10 and rows["concurrent MS"].links == 5
    assert rows["MFR"].gamma == 13.5
    assert rows["cooperative MSCR"].gamma == 12
    assert rows["one-by-one RGC"].gamma == 15


def test_compare_mechanisms_t1_collapses():
    p = CodeParams(12, 7, 4, 6, 1)
    gammas = {r.gamma for r in compare_mechanisms(p)}
    assert len(gammas) == 1
