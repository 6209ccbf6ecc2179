"""Deterministic discrete-event kernel.

Events are ordered by (time, kind rank, insertion sequence). Whenever the
state has changed, the network view (positions, links, antenna grants,
routes, capacity shares) is recomputed once all events sharing a timestamp
have been handled, or earlier if a placement epoch or election check needs a
fresh view. Each recomputation appends a ``delta`` record holding only what
changed, so a trace replays without rerunning the model.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from nomadsim.context import ContextManager, MeasurementSample, emit_notifications
from nomadsim.links import (
    Blockage,
    EnvironmentState,
    Rain,
    backhaul_up,
    link_quality,
    pair_key,
)
from nomadsim.model import INFRASTRUCTURE, FlowSpec, Position, Role
from nomadsim.placement import Strategy, plan, service_available
from nomadsim.scenario import ScenarioConfig, position_at, scenario_hash
from nomadsim.topology import (
    CandidateDetected,
    Complete,
    GroupTopology,
    HandoverEvent,
    LinkState,
    Path as RoutePath,
    Prepare,
    Stable,
    Switch,
    Unreachable,
    allocate_capacity,
    elect_nm,
    handover_step,
    hop_resource,
    route_flow,
)
from nomadsim.validation import ValidatedScenario, validate_scenario

log = logging.getLogger(__name__)

TRACE_SCHEMA = "nomadsim.trace/1"
DEFAULT_TICK_S = 0.1

KIND_ORDER = (
    "EnvChange", "FlowStart", "MobilityTick", "PlacementEpoch",
    "ElectionCheck", "HandoverAction", "FlowStop", "Notification",
)
_RANK = {k: i for i, k in enumerate(KIND_ORDER)}
PRNG_STREAMS = ("random_blockages",)


@dataclass(order=True)
class Event:
    t: float
    rank: int
    seq: int
    kind: str = field(compare=False)
    payload: dict = field(compare=False, default_factory=dict)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


class MalformedTrace(ValueError):
    pass


class EventTrace:
    """Header plus an append-only list of event and delta records."""

    def __init__(self, header: dict, records: list[dict] | None = None):
        self.header = header
        self.records = records if records is not None else []

    def __len__(self) -> int:
        return len(self.records)

    def events(self, kind: str | None = None) -> Iterator[dict]:
        for r in self.records:
            if r["type"] == "event" and (kind is None or r["kind"] == kind):
                yield r

    def deltas(self) -> Iterator[dict]:
        return (r for r in self.records if r["type"] == "delta")

    def to_jsonl(self) -> str:
        lines = [_dumps(self.header)]
        lines.extend(_dumps(r) for r in self.records)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> EventTrace:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise MalformedTrace("empty trace")
        try:
            rows = [json.loads(ln) for ln in lines]
        except json.JSONDecodeError as exc:
            raise MalformedTrace(f"line is not JSON: {exc}") from exc
        header, records = rows[0], rows[1:]
        if not isinstance(header, dict) or header.get("type") != "header" or header.get("schema") != TRACE_SCHEMA:
            raise MalformedTrace("missing or foreign trace header")
        for i, r in enumerate(records, start=2):
            if not isinstance(r, dict) or r.get("type") not in ("event", "delta") or "t" not in r:
                raise MalformedTrace(f"line {i}: not an event or delta record")
        return cls(header, records)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8", newline="\n")

    @classmethod
    def read(cls, path: str | Path) -> EventTrace:
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))


def _stable_id(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def materialize_random_blockages(cfg: ScenarioConfig) -> EnvironmentState:
    """Expand the random-blockage spec into concrete blockages using the seeded PRNG.

    Each vehicle pair draws from its own PCG64 stream, keyed by the scenario
    seed, the stream name and the pair, so adding a pair never perturbs the others.
    """
    env = cfg.environment
    rb = env.random_blockages
    if rb is None or rb.rate_per_min <= 0 or cfg.duration_s <= 0:
        return env
    if rb.pairs is not None:
        pairs = sorted({pair_key(a, b) for a, b in rb.pairs})
    else:
        pairs = list(itertools.combinations(sorted(v.id for v in cfg.vehicles), 2))
    stream = PRNG_STREAMS.index("random_blockages")
    extra = []
    for a, b in pairs:
        child = np.random.SeedSequence(cfg.seed, spawn_key=(stream, _stable_id(f"{a}|{b}")))
        rng = np.random.Generator(np.random.PCG64(child))
        t = 0.0
        while True:
            t += rng.exponential(60.0 / rb.rate_per_min)
            if t >= cfg.duration_s:
                break
            start = round(t, 6)
            end = round(min(t + rng.exponential(rb.mean_duration_s), cfg.duration_s), 6)
            if end > start:
                extra.append(Blockage(a, b, start, end))
    return replace(env, blockages=env.blockages + tuple(extra))


class Simulation:
    """Single-threaded kernel for one scenario run."""

    def __init__(
        self,
        scenario: ScenarioConfig | ValidatedScenario,
        *,
        seed: int | None = None,
        tick_s: float = DEFAULT_TICK_S,
        strategy: Strategy | str | None = None,
        notify_eps: float = 0.01,
    ):
        if not tick_s > 0:
            raise ValueError("tick must be positive")
        cfg = scenario.config if isinstance(scenario, ValidatedScenario) else scenario
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if strategy is not None:
            cfg = replace(cfg, strategy=Strategy(strategy))
        vs = validate_scenario(cfg)
        self.cfg = cfg
        self.tick_s = tick_s
        self.notify_eps = notify_eps
        self.vehicles = vs.vehicles
        self.rats = vs.rats
        self.requirements = vs.requirements
        self.members = tuple(sorted(self.vehicles))
        self.traces = {tr.vehicle: tr for tr in cfg.traces}
        self.env = materialize_random_blockages(cfg)
        self.backhaul_rat = next((r for r in cfg.rats if r.backhaul), None)
        self.p2p_rats = [r for r in cfg.rats if r.point_to_point]
        self.policy = cfg.election
        self._pos_cache: tuple[float, dict[str, Position]] | None = None

        self.clock = 0.0
        self._heap: list[Event] = []
        self._seq = itertools.count()
        self.trace = EventTrace(self._header())

        self.cv = cfg.cv or next(
            (v.id for v in cfg.vehicles if Role.COORDINATING_VEHICLE in v.initial_roles), None)
        self.nm = self._initial_nm()
        self.candidate: str | None = None
        self.serving: dict[str, str] = {}
        self.hstate = Stable()
        self.qualifying: dict[str, float] = {}

        self.active: dict[str, FlowSpec] = {}
        self.plan = None
        self.ctx = ContextManager(cfg.ewma_alpha)
        self.connected: bool | None = None
        self.dirty = True
        self._tick_sample = False
        self._last: dict[str, Any] = {"flows": {}, "attach": {}, "antennas": {}, "nm": None, "gateway": None}
        self._last_sent: dict[str, tuple[float, float | None]] = {}
        self._schedule_initial()

    # -- setup ---------------------------------------------------------------

    def _header(self) -> dict:
        return {
            "type": "header",
            "schema": TRACE_SCHEMA,
            "scenario_sha256": scenario_hash(self.cfg),
            "seed": self.cfg.seed,
            "duration_s": self.cfg.duration_s,
            "tick_s": self.tick_s,
            "strategy": self.cfg.strategy.value,
            "prng": {"algorithm": "numpy PCG64", "seeding": "SeedSequence(seed, spawn_key=(stream, sha256(pair)[:8]))",
                     "streams": list(PRNG_STREAMS)},
        }

    def _initial_nm(self) -> str | None:
        for v in self.cfg.vehicles:
            if Role.NETWORK_MASTER in v.initial_roles:
                return v.id
        if not self.members:
            return None
        meas = self._measurements(0.0)
        return min(self.members, key=lambda v: (-meas[v], v))

    def schedule(self, t: float, kind: str, **payload) -> None:
        heapq.heappush(self._heap, Event(t, _RANK[kind], next(self._seq), kind, payload))

    def _schedule_initial(self) -> None:
        dur = self.cfg.duration_s
        if dur <= 0:
            return
        for t in self.env.change_times():
            if 0 <= t < dur:
                self.schedule(t, "EnvChange")
        for f in self.cfg.flows:
            self.schedule(f.start_s, "FlowStart", flow=f.id)
            self.schedule(f.end_s, "FlowStop", flow=f.id)
        self.schedule(0.0, "MobilityTick", k=0)
        self.schedule(0.0, "PlacementEpoch", k=0)
        if self.members:
            self.schedule(0.0, "ElectionCheck", k=0)

    # -- kernel loop ---------------------------------------------------------

    @property
    def pending(self) -> int:
        return len(self._heap)

    def step(self) -> Simulation:
        ev = heapq.heappop(self._heap)
        self.clock = ev.t
        if self.dirty and ev.kind in ("PlacementEpoch", "ElectionCheck"):
            self._refresh()
        payload = getattr(self, "_on_" + ev.kind)(ev)
        if payload is not None:
            self.trace.records.append({"type": "event", "t": ev.t, "kind": ev.kind, **payload})
        if self.dirty and (not self._heap or self._heap[0].t > ev.t):
            self._refresh()
        return self

    def run(self) -> EventTrace:
        while self._heap:
            self.step()
        return self.trace

    # -- model helpers -------------------------------------------------------

    def _positions(self, t: float) -> dict[str, Position]:
        if self._pos_cache is None or self._pos_cache[0] != t:
            self._pos_cache = (t, {v: position_at(self.traces[v], t) for v in self.members})
        return self._pos_cache[1]

    def _measurements(self, t: float) -> dict[str, float]:
        """Backhaul capacity each vehicle could offer as gateway at time t (0 = none)."""
        env, rat = self.env, self.backhaul_rat
        up = backhaul_up(env, t)
        pos = self._positions(t)
        rain = env.rain_at(t)
        out = {}
        for v in self.members:
            cap = 0.0
            if self.vehicles[v].has_backhaul_radio and up and rat is not None and env.base_station is not None:
                q = link_quality(rat, pos[v].distance_to(env.base_station), True, rain)
                if q.available:
                    override = env.capacity_override(v, t)
                    cap = q.capacity_mbps if override is None else override
            out[v] = cap
        return out

    def _priority(self, f: FlowSpec) -> tuple:
        req = self.requirements[f.use_case]
        return (req.latency_ms, -req.throughput_mbps, f.id)

    def _grant_antennas(self, topo: GroupTopology, t: float, rain: Rain) -> tuple[set, dict[str, list[str]]]:
        """Hand out directive-antenna pairs: single-hop flow links by priority, then idle attachments."""
        pos = self._positions(t)
        free = {v: self.vehicles[v].mmw_antennas for v in self.members}
        granted: set[tuple[str, str]] = set()
        peers: dict[str, list[str]] = {v: [] for v in self.members}
        phys_cache: dict[tuple[str, str], bool] = {}

        def physical(a: str, b: str) -> bool:
            key = pair_key(a, b)
            if key not in phys_cache:
                va, vb = self.vehicles[a], self.vehicles[b]
                dist = pos[a].distance_to(pos[b])
                phys_cache[key] = any(
                    r.name in va.rats and r.name in vb.rats
                    and link_quality(r, dist, self.env.los(a, b, t), rain).available
                    for r in self.p2p_rats
                )
            return phys_cache[key]

        def try_grant(pairs) -> bool:
            new = sorted({pair_key(a, b) for a, b in pairs} - granted)
            if not all(physical(a, b) for a, b in new):
                return False
            need: dict[str, int] = {}
            for a, b in new:
                need[a] = need.get(a, 0) + 1
                need[b] = need.get(b, 0) + 1
            if any(free[v] < n for v, n in need.items()):
                return False
            for a, b in new:
                granted.add((a, b))
                free[a] -= 1
                free[b] -= 1
                peers[a].append(b)
                peers[b].append(a)
            return True

        if self.p2p_rats:
            for f in sorted(self.active.values(), key=self._priority):
                if INFRASTRUCTURE in (f.src, f.dst):
                    if topo.gateway is None:
                        continue
                    v = f.dst if f.src == INFRASTRUCTURE else f.src
                    seq = [v, topo.hub(v), topo.gateway]
                    seq = [x for i, x in enumerate(seq) if i == 0 or x != seq[i - 1]]
                    if len(seq) == 2:
                        try_grant([tuple(seq)])
                else:
                    # direct link, or the single UE-hub hop; relays use the cell
                    try_grant([(f.src, f.dst)])
            for u in self.members:
                s = topo.serving_node(u)
                if s != u:
                    try_grant([(u, s)])
        return granted, peers

    def _topology(self, gateway: str | None) -> GroupTopology:
        return GroupTopology(
            members=self.members, nm=self.nm, cv=self.cv, gateway=gateway,
            candidate=self.candidate, serving=dict(self.serving),
        )

    def _connected_now(self) -> bool:
        return bool(self.connected)

    def _service_queries(self) -> list[dict]:
        backhaul = self._connected_now()
        return [
            {"vnf": f.id, "local": f.id in self.plan.local, "backhaul": backhaul,
             "available": service_available(self.plan, f.id, backhaul)}
            for f in self.cfg.vnfs
        ]

    # -- network recomputation -----------------------------------------------

    def _refresh(self) -> None:
        t = self.clock
        self.dirty = False
        if not self.members:
            self._tick_sample = False
            return
        env = self.env
        pos = self._positions(t)
        rain = env.rain_at(t)
        up = backhaul_up(env, t)
        meas = self._measurements(t)
        gateway = self.nm if meas.get(self.nm, 0.0) > 0 else None
        topo = self._topology(gateway)
        grants, peers = self._grant_antennas(topo, t, rain)
        ls = LinkState(
            self.vehicles, self.cfg.rats, pos,
            los=lambda a, b: env.los(a, b, t), rain=rain, grants=grants,
            backhaul_mbps=meas, backhaul_up=up,
        )

        attach: dict[str, list | None] = {}
        link_samples: dict[str, tuple[float, float]] = {}
        for u in self.members:
            s = topo.serving_node(u)
            if s == u:
                continue
            opts = ls.hop_options(u, s)
            attach[u] = [s, opts[0][0].name] if opts else [s, None]
            if opts:
                a, b = pair_key(u, s)
                link_samples[f"{a}|{b}|{opts[0][0].name}"] = (opts[0][1].capacity_mbps, opts[0][1].latency_ms)

        routes: dict[str, RoutePath | Unreachable] = {}
        for fid in sorted(self.active):
            routes[fid] = route_flow(self.active[fid], topo, ls)
        pools: dict[str, float] = {}
        usage: dict[str, tuple[float, list[str]]] = {}
        for fid, r in routes.items():
            if isinstance(r, RoutePath):
                used = []
                for hop in r.hops:
                    key = hop_resource(hop, topo, self.rats)
                    pools[key] = hop.quality.capacity_mbps
                    used.append(key)
                    if hop.b != INFRASTRUCTURE and hop.a != INFRASTRUCTURE:
                        a, b = pair_key(hop.a, hop.b)
                        link_samples[f"{a}|{b}|{hop.rat}"] = (hop.quality.capacity_mbps, hop.quality.latency_ms)
                usage[fid] = (self.active[fid].demand_mbps, used)
        shares = allocate_capacity(pools, usage)

        flows_now: dict[str, dict] = {}
        current: dict[str, tuple[float, float | None]] = {}
        for fid, r in routes.items():
            if isinstance(r, RoutePath):
                state = {"ok": True, "thr": shares[fid], "lat": r.latency_ms,
                         "path": [[h.a, h.b, h.rat] for h in r.hops]}
                current[fid] = (shares[fid], r.latency_ms)
            else:
                state = {"ok": False, "reason": r.reason}
                current[fid] = (0.0, None)
            flows_now[fid] = state

        delta: dict[str, Any] = {}
        last = self._last
        changed = {}
        for fid, state in flows_now.items():
            if last["flows"].get(fid) != state:
                f = self.active[fid]
                rec = dict(state)
                if INFRASTRUCTURE not in (f.src, f.dst):
                    rec["sep_m"] = round(pos[f.src].distance_to(pos[f.dst]), 3)
                changed[fid] = rec
        for fid in last["flows"]:
            if fid not in flows_now:
                changed[fid] = None
        if changed:
            delta["flows"] = changed
        last["flows"] = flows_now

        attach_changed = {u: a for u, a in attach.items() if last["attach"].get(u) != a}
        attach_changed.update({u: None for u in last["attach"] if u not in attach})
        if attach_changed:
            delta["attach"] = attach_changed
        last["attach"] = attach

        antennas = {v: p for v, p in peers.items() if p}
        if antennas != last["antennas"]:
            delta["antennas"] = {v: antennas.get(v, []) for v in sorted(set(antennas) | set(last["antennas"]))}
            last["antennas"] = antennas
        for key in ("nm", "gateway"):
            value = self.nm if key == "nm" else gateway
            if value != last[key]:
                delta[key] = value
                last[key] = value

        connected = gateway is not None
        if connected != self.connected:
            self.connected = connected
            delta["connected"] = connected
            if self.plan is not None:
                delta["service"] = self._service_queries()

        if self._tick_sample:
            self._tick_sample = False
            self.ctx.observe_backhaul(connected)
            for lid, (cap, lat) in sorted(link_samples.items()):
                self.ctx.observe(MeasurementSample(t, lid, True, cap, lat))

        notes = emit_notifications(self.ctx.snapshot(t), current, self._last_sent, self.notify_eps)
        for n in notes:
            self._last_sent[n.flow] = (n.bandwidth_mbps, n.delay_ms)
            self.schedule(t, "Notification", flow=n.flow, bandwidth_mbps=n.bandwidth_mbps, delay_ms=n.delay_ms)
        for fid in list(self._last_sent):
            if fid not in current:
                del self._last_sent[fid]

        if delta:
            self.trace.records.append({"type": "delta", "t": t, **delta})

    # -- event handlers ------------------------------------------------------

    def _next_periodic(self, ev: Event, period: float) -> None:
        k = ev.payload["k"] + 1
        t = round(k * period, 9)
        if t < self.cfg.duration_s:
            self.schedule(t, ev.kind, k=k)

    def _on_EnvChange(self, ev: Event) -> dict:
        t, env = ev.t, self.env
        changes = []
        for b in env.blockages:
            for edge, when in (("start", b.start_s), ("end", b.end_s)):
                if when == t:
                    changes.append(f"blockage {b.a}-{b.b} {edge}")
        for name, seq in (("rain", env.rain), ("backhaul_outage", env.backhaul_outages)):
            for iv in seq:
                for edge, when in (("start", iv.start_s), ("end", iv.end_s)):
                    if when == t:
                        changes.append(f"{name} {edge}")
        for w in env.backhaul_capacity:
            for edge, when in (("start", w.start_s), ("end", w.end_s)):
                if when == t:
                    changes.append(f"backhaul_capacity {w.vehicle} {edge}")
        self.dirty = True
        return {"changes": changes}

    def _flow(self, ev: Event) -> FlowSpec:
        return next(f for f in self.cfg.flows if f.id == ev.payload["flow"])

    def _on_FlowStart(self, ev: Event) -> dict:
        f = self._flow(ev)
        self.active[f.id] = f
        self.dirty = True
        return {"flow": f.id, "use_case": f.use_case, "src": f.src, "dst": f.dst,
                "demand_mbps": f.demand_mbps, "start_s": f.start_s, "end_s": f.end_s}

    def _on_FlowStop(self, ev: Event) -> dict:
        self.active.pop(ev.payload["flow"], None)
        self.dirty = True
        return {"flow": ev.payload["flow"]}

    def _on_MobilityTick(self, ev: Event) -> dict:
        self._next_periodic(ev, self.tick_s)
        self.dirty = True
        self._tick_sample = True
        return {}

    def _on_PlacementEpoch(self, ev: Event) -> dict:
        self._next_periodic(ev, self.cfg.placement_epoch_s)
        p = min(max(self.ctx.p_hat, 0.0), 1.0)
        self.plan = plan(self.cfg.strategy, self.cfg.vnfs, p)
        snap = self.ctx.snapshot(ev.t)
        return {
            "strategy": self.cfg.strategy.value,
            "p_hat": p,
            "local": sorted(self.plan.local),
            "remote": sorted(self.plan.remote),
            "total_cost": self.plan.total_cost,
            "service": self._service_queries(),
            "links": {lid: [e.capacity_mbps, e.latency_ms] for lid, e in snap.links.items()},
        }

    def _handover(self, event: HandoverEvent) -> str:
        before = type(self.hstate).__name__
        self.hstate, actions = handover_step(self.hstate, event)
        for act in actions:
            if act.kind == "ue_switched":
                self.serving[act.subject] = self.hstate.candidate
            elif act.kind == "assign_roles":
                log.debug("NM role moves %s -> %s at t=%s", self.nm, act.subject, self.clock)
                self.nm = act.subject
                self.candidate = None
                self.serving = {}
            elif act.kind == "rollback":
                self.candidate = None
                self.serving = {}
            self.dirty = True
        return f"{before}->{type(self.hstate).__name__}"

    def _on_ElectionCheck(self, ev: Event) -> dict | None:
        self._next_periodic(ev, self.policy.check_interval_s)
        st = self.hstate
        if isinstance(st, (Switch, Complete)):
            return None
        dec = elect_nm(self._measurements(ev.t), self.nm, self.policy, ev.t, self.qualifying)
        self.qualifying = dec.qualifying
        steps = []
        if isinstance(self.hstate, Prepare):
            if self.hstate.candidate not in dec.qualifying:
                steps.append(self._handover(HandoverEvent("abort")))
        else:
            if isinstance(self.hstate, CandidateDetected) and self.hstate.candidate != dec.candidate:
                steps.append(self._handover(HandoverEvent("candidate_withdrawn")))
            if isinstance(self.hstate, Stable) and dec.candidate is not None:
                steps.append(self._handover(HandoverEvent(
                    "candidate_detected", candidate=dec.candidate, since=dec.qualifying[dec.candidate])))
            if isinstance(self.hstate, CandidateDetected) and dec.migrate:
                steps.append(self._handover(HandoverEvent("candidate_confirmed", candidate=dec.candidate)))
                self.schedule(round(ev.t + self.policy.switch_interval_s, 9), "HandoverAction",
                              action="prepare_done", candidate=dec.candidate)
        if not steps:
            return None
        return {"nm": self.nm, "decision": dec.action, "candidate": dec.candidate, "transitions": steps}

    def _on_HandoverAction(self, ev: Event) -> dict | None:
        action = ev.payload["action"]
        if action == "prepare_done":
            if not isinstance(self.hstate, Prepare) or self.hstate.candidate != ev.payload["candidate"]:
                return None  # superseded by an abort
            c = self.hstate.candidate
            ues = tuple(m for m in self.members if m not in (self.nm, c)) + (self.nm,)
            step = self._handover(HandoverEvent("prepare_done", ues=ues))
            self.candidate = c
            self.dirty = True
            for i, u in enumerate(ues, start=1):
                self.schedule(round(ev.t + i * self.policy.switch_interval_s, 9), "HandoverAction",
                              action="ue_switched", ue=u)
            return {"action": action, "candidate": c, "old_nm": self.nm, "ues": list(ues), "transition": step}
        if action == "ue_switched":
            c = self.hstate.candidate
            step = self._handover(HandoverEvent("ue_switched", ue=ev.payload["ue"]))
            if not self.hstate.remaining:
                self.schedule(ev.t, "HandoverAction", action="all_switched")
            return {"action": action, "ue": ev.payload["ue"], "candidate": c,
                    "gap_ms": self.policy.handover_gap_ms, "transition": step}
        if action == "all_switched":
            old = self.nm
            steps = [self._handover(HandoverEvent("all_switched")), self._handover(HandoverEvent("settled"))]
            self.qualifying = {}
            return {"action": "complete", "old_nm": old, "new_nm": self.nm, "transitions": steps}
        raise ValueError(f"unknown handover action {action!r}")

    def _on_Notification(self, ev: Event) -> dict:
        return dict(ev.payload)


def run(
    scenario: ScenarioConfig | ValidatedScenario,
    *,
    seed: int | None = None,
    tick_s: float = DEFAULT_TICK_S,
    strategy: Strategy | str | None = None,
):
    """Simulate a scenario from 0 to its duration; returns (trace, report)."""
    from nomadsim.report import evaluate_qos

    sim = Simulation(scenario, seed=seed, tick_s=tick_s, strategy=strategy)
    trace = sim.run()
    return trace, evaluate_qos(trace)
