"""Acceptance checks, one test per criterion; each prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the verdict lines are
printed even without ``-s``).
"""

import json
import time

import numpy as np
import pytest
from _builders import fluctuating_within_band, two_candidate_migration, with_env

from nomadsim.cli import main as cli_main
from nomadsim.engine import run
from nomadsim.links import Blockage, Interval, RandomBlockages
from nomadsim.model import NOT_APPLICABLE, Scope, requirement, requirement_catalog
from nomadsim.placement import VnfClass, VnfSpec, brute_force_plan, plan_island
from nomadsim.report import write_outputs
from nomadsim.scenario import position_at
from nomadsim.templates import agricultural_cycle, construction_cycle

P_GRID = [k / 10 for k in range(11)]


def verdict(capsys, n, title, ok, detail=""):
    with capsys.disabled():
        print(f"\nacceptance {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
    assert ok, detail


def placement_corpus(seed=20240611, count=200):
    """``count`` integer-cost and ``count`` real-cost catalogs, n <= 12."""
    rng = np.random.default_rng(seed)
    classes = list(VnfClass)
    corpus = []
    for integer in (True, False):
        for _ in range(count):
            n = int(rng.integers(0, 13))
            if integer:
                impl, opp = rng.integers(0, 101, n), rng.integers(0, 101, n)
                w = rng.integers(0, 4, n)
            else:
                impl, opp, w = rng.uniform(0, 100, n), rng.uniform(0, 100, n), rng.uniform(0, 3, n)
            cat = [VnfSpec(f"F{i}", classes[int(rng.integers(0, 3))], float(impl[i]), float(opp[i]), float(w[i]))
                   for i in range(n)]
            corpus.append((integer, cat))
    return corpus


# -- 1 -----------------------------------------------------------------------

TABLE_ROWS = {  # id: (scope, range m, throughput Mbps, latency ms, application)
    "UC1": ("global", None, 10.0, 100.0, "navigation, status info"),
    "UC1b": ("local", 100.0, 1.0, 10.0, "sensor data"),
    "UC2": ("local", 100.0, 1.0, 10.0, "coordinated driving"),
    "UC3": ("local", 500.0, 1000.0, 1.0, "remote control, video"),
    "UC4": ("local+uplink", 100.0, 1000.0, 100.0, "bulk data"),
    "UC5": ("global", None, 100.0, 10.0, "remote control, video"),
    "UC6": ("local", 300.0, 1000.0, 10.0, "sensor data / autonomy planning: distances, maps, trajectories"),
    "UC7": ("local", 5000.0, 0.256, 1000.0, "rough positioning and status information"),
    "UC8": ("local", 100.0, 150.0, 50.0, "monitoring / configuration"),
    "UC9": ("global", None, 150.0, 1000.0, "monitoring"),
}


def test_1_requirement_table_fidelity(capsys):
    t0 = time.perf_counter()
    cat = requirement_catalog()
    mismatches = []
    for r in cat:
        scope, rng, thr, lat, app = TABLE_ROWS.get(r.id, (None,) * 5)
        got_rng = None if r.range_m is NOT_APPLICABLE else r.range_m
        if (r.scope.value, got_rng, r.throughput_mbps, r.latency_ms, r.application) != (scope, rng, thr, lat, app):
            mismatches.append(r.id)
    elapsed = time.perf_counter() - t0
    ok = not mismatches and [r.id for r in cat] == list(TABLE_ROWS) and elapsed < 1.0
    verdict(capsys, 1, "requirement catalog reproduces 10 rows", ok,
            f"mismatches={mismatches} rows={len(cat)} t={elapsed:.3f}s")


# -- 2, 3 --------------------------------------------------------------------

def test_2_placement_optimality(capsys):
    t0 = time.perf_counter()
    worst_real, integer_misses, checks = 0.0, 0, 0
    for integer, cat in placement_corpus():
        for p in P_GRID:
            a, b = plan_island(cat, p).total_cost, brute_force_plan(cat, p).total_cost
            checks += 1
            if integer:
                integer_misses += a != b
            else:
                worst_real = max(worst_real, abs(a - b))
    elapsed = time.perf_counter() - t0
    ok = integer_misses == 0 and worst_real <= 1e-9 and elapsed < 30.0
    verdict(capsys, 2, "island cost equals exhaustive optimum", ok,
            f"checks={checks} integer_misses={integer_misses} worst_real_gap={worst_real:.3g} t={elapsed:.1f}s")


def test_3_monotone_escalation(capsys):
    violations = 0
    for _, cat in placement_corpus():
        locals_ = [plan_island(cat, p).local for p in P_GRID]
        violations += sum(not a <= b for a, b in zip(locals_, locals_[1:]))
    verdict(capsys, 3, "island local sets nest as p rises", violations == 0, f"violations={violations}")


# -- 4 -----------------------------------------------------------------------

def _queries_during(trace, start, end):
    """Every service query recorded at an instant inside [start, end)."""
    out = []
    for r in trace.records:
        if start <= r["t"] < end:
            if r["type"] == "event" and r["kind"] == "PlacementEpoch":
                out.extend(r["service"])
            elif r["type"] == "delta":
                out.extend(r.get("service", ()))
    return out


def _states_during(trace, fid, start, end):
    """Flow states in force over some positive stretch of [start, end)."""
    timeline = [(d["t"], d["flows"][fid]) for d in trace.deltas() if fid in d.get("flows", {})]
    out = []
    for i, (t, state) in enumerate(timeline):
        t_next = timeline[i + 1][0] if i + 1 < len(timeline) else float("inf")
        if min(t_next, end) > max(t, start) and state is not None:
            out.append(state)
    return out


def _offline_check(cfg, window):
    start, end = window
    problems = []
    for strategy in ("private", "island"):
        trace, report = run(with_env(cfg, backhaul_outages=(Interval(start, end),)), strategy=strategy)
        queries = _queries_during(trace, start, end)
        if not queries:
            problems.append(f"{strategy}: no service queries during outage")
        if strategy == "private" and not all(q["available"] for q in queries):
            problems.append("private: unavailable query during outage")
        if strategy == "island" and any(q["available"] != q["local"] for q in queries):
            problems.append("island: availability differs from plan.local")
        for f in cfg.flows:
            scope = requirement(f.use_case).scope
            if scope is Scope.GLOBAL and f.start_s < end and f.end_s > start:
                states = _states_during(trace, f.id, max(start, f.start_s), min(end, f.end_s))
                if not states or any(s["ok"] or s["reason"] != "backhaul_down" for s in states):
                    problems.append(f"{strategy}: {f.id} reachable during outage")
            if scope is Scope.LOCAL and not report.record(f.id).passed:
                problems.append(f"{strategy}: local flow {f.id} failed ({report.record(f.id).reason})")
    return problems


def test_4_offline_service(capsys):
    agri = agricultural_cycle(remote_control=True)
    cons = construction_cycle()
    problems = _offline_check(agri, (20.0, 100.0)) + _offline_check(cons, (300.0, 400.0))
    globals_seen = sorted({f.use_case for c in (agri, cons) for f in c.flows
                           if requirement(f.use_case).scope is Scope.GLOBAL})
    ok = not problems and globals_seen == ["UC1", "UC5", "UC9"]
    verdict(capsys, 4, "offline service during backhaul outage (both templates)", ok,
            f"global_uc={globals_seen} problems={problems}")


# -- 5 -----------------------------------------------------------------------

@pytest.mark.parametrize("template", ["agricultural", "construction"])
def test_5_nominal_pass(capsys, tmp_path, template):
    scenario, out = tmp_path / "s.json", tmp_path / "out"
    assert cli_main(["gen", "--template", template, "--out", str(scenario)]) == 0
    t0 = time.perf_counter()
    code = cli_main(["run", "--scenario", str(scenario), "--seed", "0", "--strategy", "island",
                     "--out", str(out), "--tick-ms", "100"])
    elapsed = time.perf_counter() - t0
    report = json.loads((out / "report.json").read_text())
    ratios = report["pass_ratio"]
    ok = code == 0 and ratios and all(v == 1.0 for v in ratios.values()) and elapsed < 60.0 \
        and report["run"]["duration_s"] == 1800.0
    verdict(capsys, 5, f"nominal {template} run passes every use case", ok,
            f"pass_ratio={ratios} t={elapsed:.1f}s")


# -- 6 -----------------------------------------------------------------------

def test_6_tanker_range(capsys):
    cfg = construction_cycle()
    trace, report = run(cfg)
    flow = next(f for f in cfg.flows if f.use_case == "UC7")
    traces = {tr.vehicle: tr for tr in cfg.traces}
    timeline = [(d["t"], d["flows"][flow.id]) for d in trace.deltas() if flow.id in d.get("flows", {})]
    far, beyond_short, bad, max_sep = 0, 0, [], 0.0
    for k in range(int(flow.start_s), int(flow.end_s)):
        t = float(k)
        state = [s for ts, s in timeline if ts <= t][-1]
        sep = position_at(traces[flow.src], t).distance_to(position_at(traces[flow.dst], t))
        max_sep = max(max_sep, sep)
        far += sep >= 5000.0 - 1e-6
        if sep > 1000.0:  # beyond mmW and local-cell reach
            beyond_short += 1
            if not (state["ok"] and {h[2] for h in state["path"]} == {"long_range"}):
                bad.append(t)
    rec = report.record(flow.id)
    ok = far > 0 and beyond_short > 0 and not bad and rec.passed and rec.latency_ms <= 1000.0 and rec.throughput_mbps >= 0.256
    verdict(capsys, 6, "tanker flow rides long_range at 5 km", ok,
            f"max_sep={max_sep:.0f}m samples_at_5km={far} samples_beyond_1km={beyond_short} off_long_range={bad[:5]} thr={rec.throughput_mbps} lat={rec.latency_ms}")


# -- 7 -----------------------------------------------------------------------

def test_7_handover_correctness(capsys):
    gap = 5.0
    cfg = two_candidate_migration(gap_ms=gap)
    trace, report = run(cfg)
    members = sorted(v.id for v in cfg.vehicles)
    k = len(members) - 1
    acts = list(trace.events("HandoverAction"))
    migrations = sum(a["action"] == "complete" for a in acts)
    switched = sum(a["action"] == "ue_switched" for a in acts)

    # replay attachments; check at every tick that each non-NM member is served over some RAT
    nm, attach, orphans = None, {}, []
    records = trace.records
    for i, r in enumerate(records):
        if r["type"] == "delta":
            nm = r.get("nm", nm)
            for u, a in r.get("attach", {}).items():
                if a is None:
                    attach.pop(u, None)
                else:
                    attach[u] = a
        last_at_t = i + 1 == len(records) or records[i + 1]["t"] > r["t"]
        if last_at_t and any(e["kind"] == "MobilityTick" for e in records[max(0, i - 40):i + 1]
                             if e["type"] == "event" and e["t"] == r["t"]):
            for u in members:
                if u != nm and not (u in attach and attach[u][0] and attach[u][1]):
                    orphans.append((r["t"], u))
    ok = (migrations == 1 and switched == k and report.handover.migrations == 1
          and report.handover.max_gap_ms == gap and not orphans)
    verdict(capsys, 7, "one migration, k ue_switched, gap as configured, no orphaned UE", ok,
            f"migrations={migrations} ue_switched={switched} k={k} max_gap={report.handover.max_gap_ms} "
            f"orphans={orphans[:3]}")


# -- 8 -----------------------------------------------------------------------

def test_8_hysteresis_stability(capsys):
    cfg = fluctuating_within_band()
    by_t = {}
    for w in cfg.environment.backhaul_capacity:
        by_t.setdefault(w.start_s, {})[w.vehicle] = w.capacity_mbps
    in_band = all(max(c["B"], c["C"]) <= cfg.election.hysteresis_ratio * c["A"] for c in by_t.values())
    changes = len(by_t)
    trace, report = run(cfg)
    migrations = sum(a["action"] == "complete" for a in trace.events("HandoverAction"))
    ok = in_band and cfg.duration_s >= 600.0 and migrations == 0 and report.handover.migrations == 0
    verdict(capsys, 8, "no migration while rivals stay inside the band", ok,
            f"duration={cfg.duration_s}s capacity_steps={changes} in_band={in_band} migrations={migrations}")


# -- 9 -----------------------------------------------------------------------

def test_9_determinism(capsys, tmp_path):
    cfg = with_env(agricultural_cycle(), random_blockages=RandomBlockages(1.0, 20.0))
    outs = {}
    for name, seed in (("a", 11), ("b", 11), ("c", 12)):
        trace, report = run(cfg, seed=seed)
        write_outputs(report, trace, tmp_path / name, formats=("json", "trace"))
        outs[name] = [(tmp_path / name / f).read_bytes() for f in ("trace.jsonl", "report.json")]
    same = outs["a"] == outs["b"]
    differ = outs["a"][0] != outs["c"][0]
    verdict(capsys, 9, "same seed byte-identical, different seed differs", same and differ,
            f"identical={same} seeds_differ={differ}")


# -- 10 ----------------------------------------------------------------------

def test_10_rat_switch_reactivity(capsys):
    t_block = 500.0
    cfg = with_env(agricultural_cycle(), blockages=(Blockage("H1", "OP", t_block, 700.0),))
    tick = 0.1
    trace, report = run(cfg, tick_s=tick)

    state, affected = {}, set()
    for d in trace.deltas():
        if d["t"] >= t_block:
            break
        state.update(d.get("flows", {}))
    affected = {fid for fid, s in state.items() if s and s["ok"]
                and any({h[0], h[1]} == {"H1", "OP"} and h[2] == "mmw26" for h in s["path"])}
    rerouted, notified = set(), set()
    for d in trace.deltas():
        if t_block <= d["t"] < t_block + tick:
            for fid, s in d.get("flows", {}).items():
                if fid in affected and s and not any({h[0], h[1]} == {"H1", "OP"} for h in s.get("path", [])):
                    rerouted.add(fid)
    for n in trace.events("Notification"):
        if t_block <= n["t"] < t_block + tick and n["flow"] in affected:
            notified.add(n["flow"])
    uc3 = [r for r in report.records if r.use_case == "UC3" and r.end_s > t_block]
    uc3_ok = bool(uc3) and all(not r.passed and r.reason == "throughput" and r.throughput_mbps == 150.0
                                for r in uc3)
    ok = bool(affected) and rerouted == affected and notified == affected and uc3_ok
    verdict(capsys, 10, "blockage reroutes and notifies within one tick, UC3 fails on throughput", ok,
            f"affected={sorted(affected)} rerouted={sorted(rerouted)} notified={sorted(notified)} "
            f"uc3={[(r.flow, r.reason, r.throughput_mbps) for r in uc3]}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
