"""Scripted cluster simulation with a bandwidth ledger.

A scenario distributes a file and then applies fail / repair / upgrade /
collect events in order, checking the MDS property after every change.
Scenario files are YAML; see ``docs/scenario-format.md`` for the grammar
and ``crgc/data/example3.scenario`` for a complete example.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import bounds
from .bounds import CodeParams
from .codec import (CodecError, ConstructionError, check_mds, check_strong_mds,
                    concurrent_repair, distribute, reconstruct, reconstruct_packets,
                    uniform_download, upgrade)
from .gf import DEFAULT_PRIME, PrimeField
from .matrix import GfMatrix, random_array, rank

SCHEMA_VERSION = 1
EVENT_KINDS = ("fail", "repair", "upgrade", "collect")


class ScenarioError(ValueError):
    """Malformed scenario: bad syntax, schema or ids."""

    def __init__(self, message, line=None, column=None, event=None):
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if event is not None:
            where.append(f"event {event}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line, self.column, self.event = line, column, event


class ScenarioAbort(RuntimeError):
    """An event's precondition failed at run time."""

    def __init__(self, index: int, reason: str, report: SimReport):
        super().__init__(f"event {index}: {reason}")
        self.index, self.reason, self.report = index, reason, report


@dataclass(frozen=True)
class Event:
    kind: str
    args: dict = dc_field(default_factory=dict)


@dataclass
class Scenario:
    params: CodeParams
    field: int = DEFAULT_PRIME
    seed: int = 0
    symbols: int = 1
    events: list[Event] = dc_field(default_factory=list)
    on_mds_failure: str = "halt"


@dataclass(frozen=True)
class LedgerEntry:
    event: int
    kind: str
    helper_to_engine: int
    engine_to_newcomers: int
    links: int
    predicted: Fraction
    cooperative_links: int


@dataclass
class EventResult:
    index: int
    kind: str
    ok: bool
    mds: bool | None
    detail: dict = dc_field(default_factory=dict)


@dataclass
class SimReport:
    scenario: Scenario
    events: list[EventResult] = dc_field(default_factory=list)
    ledger: list[LedgerEntry] = dc_field(default_factory=list)
    status: str = "ok"
    reason: str | None = None
    digest: str | None = None
    alive: list[int] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        p = self.scenario.params
        return {
            "schema": SCHEMA_VERSION,
            "params": {"B": _fmt(p.B), "n": p.n, "k": p.k, "d": p.d, "t": p.t},
            "field": self.scenario.field,
            "seed": self.scenario.seed,
            "status": self.status,
            "reason": self.reason,
            "events": [
                {"index": e.index, "kind": e.kind, "ok": e.ok, "mds": e.mds,
                 **{k: _plain(v) for k, v in e.detail.items()}}
                for e in self.events
            ],
            "ledger": [
                {"event": l.event, "kind": l.kind, "helper_to_engine": l.helper_to_engine,
                 "engine_to_newcomers": l.engine_to_newcomers, "links": l.links,
                 "predicted": _fmt(l.predicted), "cooperative_links": l.cooperative_links}
                for l in self.ledger
            ],
            "alive": list(self.alive),
            "digest": self.digest,
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None, width=100)


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _plain(v):
    if isinstance(v, Fraction):
        return _fmt(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


# -- loading ------------------------------------------------------------------

def _int_list(value, what, index):
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise ScenarioError(f"{what} must be a list of integers", event=index)
    return value


def _parse_event(raw, index) -> Event:
    if not isinstance(raw, dict) or len(raw) != 1:
        raise ScenarioError("each event must be a mapping with exactly one key", event=index)
    (kind, body), = raw.items()
    if kind not in EVENT_KINDS:
        raise ScenarioError(f"unknown event kind {kind!r}", event=index)
    if kind == "fail":
        ids = body["ids"] if isinstance(body, dict) and "ids" in body else body
        return Event("fail", {"ids": _int_list(ids, "fail ids", index)})
    body = {} if body is None else body
    if not isinstance(body, dict):
        raise ScenarioError(f"{kind} takes a mapping", event=index)
    allowed = {
        "repair": {"helpers", "d"},
        "upgrade": {"s", "d_s", "h", "helpers"},
        "collect": {"nodes", "download"},
    }[kind]
    extra = set(body) - allowed
    if extra:
        raise ScenarioError(f"unknown {kind} keys {sorted(extra)}", event=index)
    args = dict(body)
    if kind == "repair":
        helpers = args.get("helpers", "first-d-alive")
        if helpers != "first-d-alive":
            _int_list(helpers, "repair helpers", index)
        args["helpers"] = helpers
    elif kind == "upgrade":
        if not isinstance(args.get("s"), int) or args["s"] < 1:
            raise ScenarioError("upgrade needs an integer s >= 1", event=index)
        if "h" in args:
            _int_list(args["h"], "upgrade h", index)
        if "helpers" in args:
            _int_list(args["helpers"], "upgrade helpers", index)
        if "d_s" not in args:
            n = len(args.get("helpers") or args.get("h") or [])
            if not n:
                raise ScenarioError("upgrade needs d_s, helpers or h", event=index)
            args["d_s"] = n
    else:
        if ("nodes" in args) == ("download" in args):
            raise ScenarioError("collect takes exactly one of nodes / download", event=index)
        _int_list(args.get("nodes", args.get("download")), "collect selection", index)
    return Event(kind, args)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ScenarioError(getattr(exc, "problem", None) or str(exc),
                                line=mark.line + 1, column=mark.column + 1) from exc
        raise ScenarioError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a mapping")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema {doc.get('schema')!r}, expected {SCHEMA_VERSION}")
    unknown = set(doc) - {"schema", "params", "field", "seed", "symbols", "events", "on_mds_failure"}
    if unknown:
        raise ScenarioError(f"unknown top-level keys {sorted(unknown)}")
    raw = doc.get("params")
    if not isinstance(raw, dict) or set(raw) - {"B", "n", "k", "d", "t"}:
        raise ScenarioError("params must map B, n, k, d, t")
    try:
        params = CodeParams(**{k: (str(v) if k == "B" else v) for k, v in raw.items()})
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"params: {exc}") from exc
    events = doc.get("events") or []
    if not isinstance(events, list):
        raise ScenarioError("events must be a list")
    policy = doc.get("on_mds_failure", "halt")
    if policy not in ("halt", "continue"):
        raise ScenarioError("on_mds_failure must be 'halt' or 'continue'")
    try:
        PrimeField(int(doc.get("field", DEFAULT_PRIME)))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field: {exc}") from exc
    scenario = Scenario(params, int(doc.get("field", DEFAULT_PRIME)), int(doc.get("seed", 0)),
                        int(doc.get("symbols", 1)),
                        [_parse_event(e, i) for i, e in enumerate(events)], policy)
    _check_ids(scenario)
    return scenario


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def _check_ids(scenario: Scenario):
    # replay id bookkeeping so bad references are caught before any coding
    alive = set(range(1, scenario.params.n + 1))
    failed: set[int] = set()
    next_id = scenario.params.n + 1
    for i, ev in enumerate(scenario.events):
        if ev.kind == "fail":
            bad = set(ev.args["ids"]) - alive
            if bad or len(set(ev.args["ids"])) != len(ev.args["ids"]):
                raise ScenarioError(f"fail references non-live or repeated ids {sorted(bad)}", event=i)
            alive -= set(ev.args["ids"])
            failed |= set(ev.args["ids"])
        elif ev.kind == "repair":
            if not failed:
                raise ScenarioError("repair with no failed nodes", event=i)
            if ev.args["helpers"] != "first-d-alive" and set(ev.args["helpers"]) - alive:
                raise ScenarioError(f"repair helpers {sorted(set(ev.args['helpers']) - alive)} "
                                    "are not live", event=i)
            alive |= failed
            failed = set()
        elif ev.kind == "upgrade":
            if "helpers" in ev.args and set(ev.args["helpers"]) - alive:
                raise ScenarioError("upgrade helpers must be live", event=i)
            alive |= set(range(next_id, next_id + ev.args["s"]))
            next_id += ev.args["s"]
        elif ev.kind == "collect" and "nodes" in ev.args:
            if set(ev.args["nodes"]) - alive:
                raise ScenarioError(f"collect from non-live nodes "
                                    f"{sorted(set(ev.args['nodes']) - alive)}", event=i)


# -- running ------------------------------------------------------------------

def default_upgrade_download(k: int, alpha: int, s: int, d_s: int) -> list[int]:
    """Smallest near-uniform download vector able to create ``s`` nodes."""
    for total in range(1, d_s * s + 1):
        try:
            h = uniform_download(total, d_s, min(s, alpha))
        except ValueError:
            continue
        if bounds.is_feasible_download(h, alpha, k, s):
            return h
    raise ValueError(f"no download vector lets {d_s} helpers create {s} nodes")


def _event_seed(seed: int, index: int):
    return [seed, index + 1]


def run(scenario: Scenario) -> SimReport:
    """Apply the scenario; raises :class:`ScenarioAbort` on a violated precondition."""
    params = scenario.params
    field_ = PrimeField(scenario.field)
    report = SimReport(scenario)
    source = None
    if scenario.symbols > 0:
        alpha = params.d - params.k + params.t
        rng = np.random.default_rng([scenario.seed, 0])
        source = GfMatrix._wrap(random_array(rng, (params.k * alpha, scenario.symbols), field_.p), field_)
    try:
        cluster = distribute(source, params, field_, _event_seed(scenario.seed, -1))
    except (CodecError, ValueError) as exc:
        report.status, report.reason = "aborted", f"distribute: {exc}"
        raise ScenarioAbort(-1, str(exc), report) from exc
    failed: list[int] = []

    def finish():
        report.alive = cluster.ids
        report.digest = cluster.digest()
        return report

    for index, ev in enumerate(scenario.events):
        seed = _event_seed(scenario.seed, index)
        try:
            result = _apply(cluster, failed, ev, index, seed, params, report)
        except ConstructionError as exc:
            result = EventResult(index, ev.kind, False, False, {"error": str(exc)})
        except (CodecError, ValueError) as exc:
            report.status, report.reason = "aborted", f"event {index} ({ev.kind}): {exc}"
            finish()
            raise ScenarioAbort(index, str(exc), report) from exc
        report.events.append(result)
        if not result.ok:
            report.status = "failed"
            report.reason = report.reason or f"event {index} ({ev.kind}) failed"
            if scenario.on_mds_failure == "halt":
                break
    return finish()


def _apply(cluster, failed, ev, index, seed, params, report) -> EventResult:
    k = cluster.k
    if ev.kind == "fail":
        ids = ev.args["ids"]
        missing = [i for i in ids if i not in cluster.nodes]
        if missing:
            raise ValueError(f"nodes {missing} are not live")
        cluster.remove(ids)
        failed.extend(ids)
        mds = None
        if cluster.n >= k:
            mds = check_mds(cluster).passed
        # losing more than n - k nodes is recorded; the next repair aborts
        return EventResult(index, "fail", mds is not False, mds,
                           {"failed": sorted(failed), "alive": cluster.n,
                            "recoverable": cluster.n >= k})

    if ev.kind == "repair":
        if not failed:
            raise ValueError("no failed nodes to repair")
        helpers = ev.args["helpers"]
        if helpers == "first-d-alive":
            helpers = cluster.ids[:ev.args.get("d", params.d)]
        t = len(failed)
        _, tr = concurrent_repair(cluster, list(failed), helpers, seed)
        failed.clear()
        report.ledger.append(LedgerEntry(
            index, "repair", tr.helper_to_engine, tr.engine_to_newcomers, tr.links,
            bounds.core_ms_bound(cluster.B, k, len(helpers), t),
            bounds.count_links("cooperative", len(helpers), t)))
        mds = check_mds(cluster)
        return EventResult(index, "repair", mds.passed, mds.passed,
                           {"repaired": list(tr.new_ids), "helpers": list(tr.helpers),
                            "per_helper": list(tr.per_helper), "attempts": tr.attempts})

    if ev.kind == "upgrade":
        s, d_s = ev.args["s"], ev.args["d_s"]
        helpers = ev.args.get("helpers") or cluster.ids[:d_s]
        if len(helpers) != d_s:
            raise ValueError(f"need {d_s} helpers, got {len(helpers)}")
        h = ev.args.get("h") or default_upgrade_download(k, cluster.alpha, s, d_s)
        _, tr = upgrade(cluster, s, helpers, h, seed)
        if cluster.alpha == d_s - k + 1 and s <= k:
            predicted = bounds.min_upgrade_bandwidth(cluster.B, k, d_s, s)[0]
        else:
            predicted = Fraction(sum(h))
        report.ledger.append(LedgerEntry(
            index, "upgrade", tr.helper_to_engine, tr.engine_to_newcomers, tr.links,
            predicted, bounds.count_links("cooperative", d_s, s)))
        mds = check_mds(cluster)
        return EventResult(index, "upgrade", mds.passed, mds.passed,
                           {"added": list(tr.new_ids), "helpers": list(tr.helpers),
                            "h": list(tr.per_helper), "n": cluster.n, "attempts": tr.attempts})

    # collect
    src = cluster.source
    if "nodes" in ev.args:
        ids = ev.args["nodes"]
        missing = [i for i in ids if i not in cluster.nodes]
        if missing:
            raise ValueError(f"nodes {missing} are not live")
        if src is None:
            gens = np.concatenate([cluster.nodes[i].gen.data for i in ids], axis=1)
            ok = rank(GfMatrix._wrap(gens, cluster.field)) == cluster.B
        else:
            try:
                ok = reconstruct([cluster.nodes[i] for i in ids], cluster) == src
            except CodecError:
                ok = False
        return EventResult(index, "collect", ok, None, {"nodes": list(ids)})
    h = ev.args["download"]
    if len(h) != cluster.n:
        raise ValueError(f"download vector needs {cluster.n} entries, got {len(h)}")
    if src is None:
        ok = check_strong_mds(cluster, h)
    else:
        try:
            ok = check_strong_mds(cluster, h) and reconstruct_packets(cluster, h) == src
        except CodecError:
            ok = False
    return EventResult(index, "collect", ok, None, {"download": list(h)})


# -- mechanism comparison -----------------------------------------------------

@dataclass(frozen=True)
class MechanismRow:
    mechanism: str
    gamma: Fraction
    links: int


def compare_mechanisms(params: CodeParams, t: int | None = None) -> list[MechanismRow]:
    """Total repair traffic and links for ``t`` failures under each mechanism."""
    t = params.t if t is None else t
    p = params.replace(t=t) if t != params.t else params
    B, k, d = p.B, p.k, p.d
    one_by_one = t * bounds.msr_point(B, k, d).gamma
    mfr = bounds.mfr_bound(B, k, [d + i for i in range(t)])
    mscr, _ = bounds.cooperative_points(p)
    return [
        MechanismRow("one-by-one RGC", one_by_one, bounds.count_links("one-by-one", d, t)),
        MechanismRow("MFR", mfr, bounds.count_links("mfr", d, t)),
        MechanismRow("cooperative MSCR", mscr.gamma, bounds.count_links("cooperative", d, t)),
        MechanismRow("concurrent MS", bounds.ms_point(p).gamma, bounds.count_links("concurrent", d, t)),
    ]
