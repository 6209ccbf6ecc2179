"""Scenario documents: in-memory config, JSON (de)serialisation and waypoint mobility."""

from __future__ import annotations

import bisect
import hashlib
import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from nomadsim.links import (
    Blockage,
    CapacityWindow,
    EnvironmentState,
    Interval,
    RandomBlockages,
    RatSpec,
    default_rat_catalog,
)
from nomadsim.model import FlowSpec, Position, Role, VehicleSpec
from nomadsim.placement import Strategy, VnfClass, VnfSpec, default_vnf_catalog
from nomadsim.topology import ElectionPolicy

SCHEMA_ID = "nomadsim/scenario/1"


class ScenarioFormatError(ValueError):
    """The document is not well-formed JSON or violates the scenario schema."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class MobilityTrace:
    vehicle: str
    waypoints: tuple[tuple[float, Position], ...]
    _times: tuple[float, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_times", tuple(t for t, _ in self.waypoints))


def position_at(trace: MobilityTrace, t: float) -> Position:
    """Linear interpolation between bracketing waypoints, clamped at both ends."""
    wps, times = trace.waypoints, trace._times
    if t <= times[0]:
        return wps[0][1]
    if t >= times[-1]:
        return wps[-1][1]
    i = bisect.bisect_right(times, t)
    (t0, p0), (t1, p1) = wps[i - 1], wps[i]
    if t == t0:
        return p0
    f = (t - t0) / (t1 - t0)
    return Position(p0.x + f * (p1.x - p0.x), p0.y + f * (p1.y - p0.y))


@dataclass(frozen=True)
class ScenarioConfig:
    duration_s: float
    seed: int = 0
    vehicles: tuple[VehicleSpec, ...] = ()
    traces: tuple[MobilityTrace, ...] = ()
    flows: tuple[FlowSpec, ...] = ()
    rats: tuple[RatSpec, ...] = field(default_factory=lambda: tuple(default_rat_catalog()))
    vnfs: tuple[VnfSpec, ...] = field(default_factory=lambda: tuple(default_vnf_catalog()))
    strategy: Strategy = Strategy.ISLAND
    placement_epoch_s: float = 10.0
    ewma_alpha: float = 0.1
    election: ElectionPolicy = ElectionPolicy()
    environment: EnvironmentState = EnvironmentState()
    cv: str | None = None


@lru_cache(maxsize=1)
def scenario_schema() -> dict:
    text = resources.files("nomadsim").joinpath("data/scenario.schema.json").read_text()
    return json.loads(text)


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not allowed")


def _intervals(items) -> tuple[Interval, ...]:
    return tuple(Interval(float(i["start_s"]), float(i["end_s"])) for i in items)


def scenario_from_dict(doc: dict[str, Any]) -> ScenarioConfig:
    """Build a config from a parsed document; raises ScenarioFormatError on schema violations."""
    validator = jsonschema.Draft202012Validator(scenario_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise ScenarioFormatError([
            f"{'/'.join(str(p) for p in e.absolute_path) or '<root>'}: {e.message}" for e in errors
        ])

    try:
        return _build(doc)
    except ValueError as exc:
        raise ScenarioFormatError([str(exc)]) from exc


def _build(doc: dict[str, Any]) -> ScenarioConfig:
    vehicles = tuple(
        VehicleSpec(
            id=v["id"],
            rats=frozenset(v.get("rats", ())),
            mmw_antennas=int(v.get("mmw_antennas", 0)),
            has_backhaul_radio=bool(v.get("has_backhaul_radio", False)),
            initial_roles=frozenset(Role(r) for r in v.get("initial_roles", ())),
        )
        for v in doc["vehicles"]
    )
    traces = []
    for tr in doc["traces"]:
        wps = tuple((float(t), Position(float(x), float(y))) for t, x, y in tr["waypoints"])
        traces.append(MobilityTrace(tr["vehicle"], wps))
    flows = tuple(
        FlowSpec(f["id"], f["src"], f["dst"], f["use_case"], float(f["demand_mbps"]),
                 float(f["start_s"]), float(f["end_s"]))
        for f in doc["flows"]
    )
    rats = tuple(
        RatSpec(
            r["name"], float(r["max_range_m"]), float(r["capacity_mbps"]), float(r["base_latency_ms"]),
            requires_los=r.get("requires_los", False),
            point_to_point=r.get("point_to_point", False),
            weather_sensitive=r.get("weather_sensitive", False),
            backhaul=r.get("backhaul", False),
        )
        for r in doc["rats"]
    ) if "rats" in doc else tuple(default_rat_catalog())
    vnfs = tuple(
        VnfSpec(v["id"], VnfClass(v["class"]), float(v["impl_cost"]), float(v["opp_cost"]),
                float(v.get("weight", 1.0)))
        for v in doc["vnfs"]
    ) if "vnfs" in doc else tuple(default_vnf_catalog())

    strategy = doc.get("strategy", "island")
    if isinstance(strategy, str):
        strategy = {"name": strategy}
    election = ElectionPolicy(**{k: float(v) for k, v in doc.get("election", {}).items()})

    env_doc = doc.get("environment", {})
    bs = env_doc.get("base_station")
    rb = env_doc.get("random_blockages")
    environment = EnvironmentState(
        blockages=tuple(Blockage(b["a"], b["b"], float(b["start_s"]), float(b["end_s"]))
                        for b in env_doc.get("blockages", ())),
        rain=_intervals(env_doc.get("rain", ())),
        backhaul_outages=_intervals(env_doc.get("backhaul_outages", ())),
        base_station=Position(float(bs["x"]), float(bs["y"])) if bs else None,
        backhaul_capacity=tuple(
            CapacityWindow(w["vehicle"], float(w["start_s"]), float(w["end_s"]), float(w["capacity_mbps"]))
            for w in env_doc.get("backhaul_capacity", ())
        ),
        random_blockages=RandomBlockages(
            float(rb["rate_per_min"]), float(rb["mean_duration_s"]),
            tuple(tuple(p) for p in rb["pairs"]) if rb.get("pairs") is not None else None,
        ) if rb else None,
    )
    return ScenarioConfig(
        duration_s=float(doc["duration_s"]),
        seed=int(doc.get("seed", 0)),
        vehicles=vehicles,
        traces=tuple(traces),
        flows=flows,
        rats=rats,
        vnfs=vnfs,
        strategy=Strategy(strategy["name"]),
        placement_epoch_s=float(strategy.get("epoch_s", 10.0)),
        ewma_alpha=float(strategy.get("ewma_alpha", 0.1)),
        election=election,
        environment=environment,
        cv=doc.get("cv"),
    )


def _interval_dict(iv) -> dict:
    return {"start_s": iv.start_s, "end_s": iv.end_s}


def scenario_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    env = cfg.environment
    rb = env.random_blockages
    return {
        "duration_s": cfg.duration_s,
        "seed": cfg.seed,
        "vehicles": [
            {
                "id": v.id,
                "rats": sorted(v.rats),
                "mmw_antennas": v.mmw_antennas,
                "has_backhaul_radio": v.has_backhaul_radio,
                "initial_roles": sorted(r.value for r in v.initial_roles),
            }
            for v in cfg.vehicles
        ],
        "traces": [
            {"vehicle": tr.vehicle, "waypoints": [[t, p.x, p.y] for t, p in tr.waypoints]}
            for tr in cfg.traces
        ],
        "flows": [
            {"id": f.id, "src": f.src, "dst": f.dst, "use_case": f.use_case,
             "demand_mbps": f.demand_mbps, "start_s": f.start_s, "end_s": f.end_s}
            for f in cfg.flows
        ],
        "rats": [
            {"name": r.name, "max_range_m": r.max_range_m, "capacity_mbps": r.capacity_mbps,
             "base_latency_ms": r.base_latency_ms, "requires_los": r.requires_los,
             "point_to_point": r.point_to_point, "weather_sensitive": r.weather_sensitive,
             "backhaul": r.backhaul}
            for r in cfg.rats
        ],
        "vnfs": [
            {"id": v.id, "class": v.vnf_class.value, "impl_cost": v.impl_cost,
             "opp_cost": v.opp_cost, "weight": v.weight}
            for v in cfg.vnfs
        ],
        "strategy": {"name": cfg.strategy.value, "epoch_s": cfg.placement_epoch_s,
                     "ewma_alpha": cfg.ewma_alpha},
        "election": {
            "hysteresis_ratio": cfg.election.hysteresis_ratio,
            "hold_time_s": cfg.election.hold_time_s,
            "check_interval_s": cfg.election.check_interval_s,
            "handover_gap_ms": cfg.election.handover_gap_ms,
            "switch_interval_s": cfg.election.switch_interval_s,
        },
        "environment": {
            "base_station": {"x": env.base_station.x, "y": env.base_station.y} if env.base_station else None,
            "blockages": [{"a": b.a, "b": b.b, "start_s": b.start_s, "end_s": b.end_s}
                          for b in env.blockages],
            "rain": [_interval_dict(iv) for iv in env.rain],
            "backhaul_outages": [_interval_dict(iv) for iv in env.backhaul_outages],
            "backhaul_capacity": [
                {"vehicle": w.vehicle, "start_s": w.start_s, "end_s": w.end_s,
                 "capacity_mbps": w.capacity_mbps}
                for w in env.backhaul_capacity
            ],
            "random_blockages": None if rb is None else {
                "rate_per_min": rb.rate_per_min,
                "mean_duration_s": rb.mean_duration_s,
                "pairs": None if rb.pairs is None else [list(p) for p in rb.pairs],
            },
        },
        "cv": cfg.cv,
    }


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def scenario_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_json(scenario_to_dict(cfg)).encode()).hexdigest()


def loads_scenario(text: str) -> ScenarioConfig:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        raise ScenarioFormatError([f"invalid JSON: {exc}"]) from exc
    return scenario_from_dict(doc)


def load_scenario(path: str | Path) -> ScenarioConfig:
    return loads_scenario(Path(path).read_text(encoding="utf-8"))


def dump_scenario(cfg: ScenarioConfig, path: str | Path) -> None:
    text = json.dumps(scenario_to_dict(cfg), indent=2, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def with_duration(cfg: ScenarioConfig, duration_s: float) -> ScenarioConfig:
    """Shorten (or extend) a scenario, clipping everything that runs past the new end."""

    def clip(items, make):
        out = []
        for it in items:
            if it.start_s < duration_s:
                out.append(make(it, min(it.end_s, duration_s)))
        return tuple(out)

    env = cfg.environment
    env = replace(
        env,
        blockages=clip(env.blockages, lambda b, e: replace(b, end_s=e)),
        rain=clip(env.rain, lambda iv, e: replace(iv, end_s=e)),
        backhaul_outages=clip(env.backhaul_outages, lambda iv, e: replace(iv, end_s=e)),
        backhaul_capacity=clip(env.backhaul_capacity, lambda w, e: replace(w, end_s=e)),
    )
    flows = clip(cfg.flows, lambda f, e: replace(f, end_s=e))
    return replace(cfg, duration_s=duration_s, flows=flows, environment=env)
