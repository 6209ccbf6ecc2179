from dataclasses import replace

import pytest
from _builders import static_group, two_candidate_migration, with_env

from nomadsim.engine import KIND_ORDER, EventTrace, MalformedTrace, Simulation, materialize_random_blockages, run
from nomadsim.links import Blockage, Interval, RandomBlockages
from nomadsim.scenario import ScenarioConfig, with_duration
from nomadsim.templates import agricultural_cycle, construction_cycle
from nomadsim.validation import ScenarioValidationError


@pytest.fixture(scope="module")
def construction_run():
    cfg = construction_cycle()
    return cfg, *run(cfg)


def test_zero_duration_gives_empty_trace():
    trace, report = run(ScenarioConfig(duration_s=0.0))
    assert trace.records == [] and report.records == [] and report.pass_ratio == {}
    assert trace.header["schema"] == "nomadsim.trace/1"


def test_invalid_scenario_propagates():
    with pytest.raises(ScenarioValidationError):
        run(ScenarioConfig(duration_s=-1.0))


def test_tick_must_be_positive():
    with pytest.raises(ValueError):
        Simulation(ScenarioConfig(duration_s=1.0), tick_s=0.0)


def test_same_inputs_same_bytes():
    cfg = with_duration(agricultural_cycle(), 300.0)
    assert run(cfg)[0].to_jsonl() == run(cfg)[0].to_jsonl()


def test_clock_is_monotone_and_kind_order_holds(construction_run):
    _, trace, _ = construction_run
    rank = {k: i for i, k in enumerate(KIND_ORDER)}
    events = list(trace.events())
    for a, b in zip(events, events[1:]):
        assert a["t"] <= b["t"]
        if a["t"] == b["t"] and a["kind"] != "HandoverAction" and b["kind"] != "Notification":
            assert rank[a["kind"]] <= rank[b["kind"]]
    ts = [r["t"] for r in trace.records]
    assert ts == sorted(ts)


def test_every_active_flow_has_a_state(construction_run):
    """After each instant, every active flow is routed or carries an unreachable reason."""
    cfg, trace, _ = construction_run
    state, active = {}, set()
    records = trace.records
    for i, r in enumerate(records):
        if r["type"] == "delta":
            state.update(r.get("flows", {}))
        elif r["kind"] == "FlowStart":
            active.add(r["flow"])
        elif r["kind"] == "FlowStop":
            active.discard(r["flow"])
        if i + 1 == len(records) or records[i + 1]["t"] > r["t"]:
            for fid in active:
                s = state.get(fid)
                assert s is not None, (r["t"], fid)
                assert s["ok"] or s["reason"] in ("backhaul_down", "no_gateway", "no_common_rat")
    assert {f.id for f in cfg.flows} <= set(state)


def test_tanker_flow_routed_on_long_range_only(construction_run):
    _, trace, _ = construction_run
    long_only = [
        d for d in trace.deltas()
        if (s := d.get("flows", {}).get("uc7-TK-R1")) and s["ok"]
        and {h[2] for h in s["path"]} == {"long_range"} and s["lat"] == 100.0
    ]
    assert long_only


def test_step_pops_one_event_and_advances_clock():
    sim = Simulation(ScenarioConfig(duration_s=0.35))
    before = sim.pending
    sim.step()
    assert sim.clock == 0.0 and sim.pending == before
    while sim.pending:
        sim.step()
    ticks = [r["t"] for r in sim.trace.events("MobilityTick")]
    assert ticks == [0.0, 0.1, 0.2, 0.3]
    assert not list(sim.trace.deltas())


def test_backhaul_outage_makes_remote_functions_unavailable():
    cfg = with_env(with_duration(construction_cycle(), 60.0), backhaul_outages=(Interval(20.0, 40.0),))
    trace, _ = run(cfg)
    down = [d for d in trace.deltas() if d.get("connected") is False]
    assert down and down[0]["t"] == 20.0
    assert all(q["available"] == q["local"] for q in down[0]["service"])
    assert any(not q["available"] for q in down[0]["service"])


def test_blockage_reroutes_and_notifies_in_the_same_instant():
    cfg = with_env(with_duration(agricultural_cycle(), 600.0), blockages=(Blockage("H1", "OP", 500.0, 550.0),))
    trace, report = run(cfg)
    d = next(d for d in trace.deltas() if d["t"] == 500.0 and "uc3-H1-OP" in d.get("flows", {}))
    s = d["flows"]["uc3-H1-OP"]
    assert [h[2] for h in s["path"]] == ["local_cell", "local_cell"] and s["thr"] == 150.0
    notes = [e for e in trace.events("Notification") if e["t"] == 500.0]
    assert [(n["flow"], n["bandwidth_mbps"], n["delay_ms"]) for n in notes] == [("uc3-H1-OP", 150.0, 20.0)]
    assert report.record("uc3-H1-OP").reason == "throughput"


def test_migration_sequence_in_trace():
    trace, report = run(two_candidate_migration(gap_ms=5.0))
    acts = [e for e in trace.events("HandoverAction")]
    assert [a["action"] for a in acts] == ["prepare_done"] + ["ue_switched"] * 4 + ["complete"]
    assert acts[0]["ues"][-1] == "A" and acts[-1]["new_nm"] == "B"
    assert report.handover.migrations == 1 and report.handover.max_gap_ms == 5.0
    nm = [d["nm"] for d in trace.deltas() if "nm" in d]
    assert nm == ["A", "B"]


def test_candidate_dropping_out_during_prepare_aborts():
    from nomadsim.links import CapacityWindow

    windows = [CapacityWindow("A", 0.0, 30.0, 10.0), CapacityWindow("B", 0.0, 5.0, 40.0),
               CapacityWindow("B", 5.0, 30.0, 12.0)]
    cfg = static_group(ids=("A", "B", "C"), backhaul=("A", "B"), windows=windows, duration_s=30.0,
                       hold_time_s=4.0)
    cfg = replace(cfg, election=replace(cfg.election, switch_interval_s=2.0))
    trace, report = run(cfg)
    steps = [s for e in trace.events("ElectionCheck") for s in e["transitions"]]
    assert steps == ["Stable->CandidateDetected", "CandidateDetected->Prepare", "Prepare->Stable"]
    assert report.handover.migrations == 0 and report.handover.aborts == 1


def test_random_blockages_follow_the_seed():
    cfg = with_env(agricultural_cycle(), random_blockages=RandomBlockages(1.0, 20.0))
    a = materialize_random_blockages(replace(cfg, seed=1)).blockages
    b = materialize_random_blockages(replace(cfg, seed=1)).blockages
    c = materialize_random_blockages(replace(cfg, seed=2)).blockages
    assert a == b and a != c and a
    assert all(0 <= x.start_s < x.end_s <= cfg.duration_s for x in a)


def test_random_blockage_pairs_are_independent_streams():
    base = with_env(agricultural_cycle(), random_blockages=RandomBlockages(2.0, 5.0, (("H1", "OP"),)))
    more = with_env(agricultural_cycle(), random_blockages=RandomBlockages(2.0, 5.0, (("H1", "OP"), ("H1", "H2"))))
    only = [b for b in materialize_random_blockages(more).blockages if b.pair == ("H1", "OP")]
    assert only == list(materialize_random_blockages(base).blockages)


def test_trace_roundtrip(tmp_path):
    trace, _ = run(with_duration(construction_cycle(), 30.0))
    path = tmp_path / "t.jsonl"
    trace.write(path)
    again = EventTrace.read(path)
    assert again.header == trace.header and again.records == trace.records
    assert again.to_jsonl() == path.read_text()


@pytest.mark.parametrize("text", ["", "not json\n", '{"type":"event","t":0}\n',
                                  '{"type":"header","schema":"nomadsim.trace/1"}\n{"type":"oops"}\n'])
def test_malformed_traces(text):
    with pytest.raises(MalformedTrace):
        EventTrace.from_jsonl(text)


def test_header_documents_seed_and_prng():
    trace, _ = run(with_duration(agricultural_cycle(), 1.0), seed=42)
    h = trace.header
    assert h["seed"] == 42 and "PCG64" in h["prng"]["algorithm"] and len(h["scenario_sha256"]) == 64
