"""Referential and invariant checks over a whole scenario."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from nomadsim.links import RatSpec
from nomadsim.model import INFRASTRUCTURE, Role, UseCaseRequirement, VehicleSpec, requirement_catalog
from nomadsim.scenario import ScenarioConfig


@dataclass(frozen=True)
class Violation:
    kind: str  # UnknownVehicle, UnknownUseCase, UnknownRat, NegativeDuration, DuplicateId, ...
    entity: str
    message: str = ""

    def __str__(self) -> str:
        text = f"{self.kind}({self.entity!r})"
        return f"{text}: {self.message}" if self.message else text


class ScenarioValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        super().__init__("\n".join(str(v) for v in violations))
        self.violations = violations

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]


@dataclass(frozen=True)
class ValidatedScenario:
    config: ScenarioConfig
    vehicles: dict[str, VehicleSpec]
    rats: dict[str, RatSpec]
    requirements: dict[str, UseCaseRequirement]


def validate_scenario(cfg: ScenarioConfig) -> ValidatedScenario:
    """Check every cross-reference and type invariant; report all problems at once."""
    out: list[Violation] = []

    def bad(kind: str, entity: str, message: str = "") -> None:
        out.append(Violation(kind, str(entity), message))

    dur = cfg.duration_s
    if not math.isfinite(dur):
        bad("InvalidValue", "duration_s", "must be finite")
    elif dur < 0:
        bad("NegativeDuration", "duration_s", f"{dur} < 0")
    if cfg.seed < 0:
        bad("InvalidValue", "seed", "must be >= 0")

    def dupes(ids) -> None:
        for ident, n in sorted(Counter(ids).items()):
            if n > 1:
                bad("DuplicateId", ident, f"appears {n} times")

    dupes(v.id for v in cfg.vehicles)
    dupes(f.id for f in cfg.flows)
    dupes(r.name for r in cfg.rats)
    dupes(v.id for v in cfg.vnfs)
    dupes(tr.vehicle for tr in cfg.traces)

    vehicles = {v.id: v for v in cfg.vehicles}
    rats = {r.name: r for r in cfg.rats}
    reqs = {r.id: r for r in requirement_catalog()}

    def in_window(entity: str, start: float, end: float) -> None:
        if not (0 <= start < end <= max(dur, 0)):
            bad("InvalidValue", entity, f"interval [{start}, {end}) not inside [0, {dur}]")

    def known_vehicle(vid: str) -> bool:
        if vid not in vehicles:
            bad("UnknownVehicle", vid)
            return False
        return True

    # RAT catalog
    for r in cfg.rats:
        if not (r.max_range_m > 0 and r.capacity_mbps > 0 and r.base_latency_ms > 0):
            bad("InvalidValue", r.name, "range, capacity and latency must be > 0")
    if sum(r.backhaul for r in cfg.rats) > 1:
        bad("InvalidValue", "rats", "at most one backhaul RAT")

    # vehicles
    nm_holders = []
    for v in cfg.vehicles:
        if v.id == INFRASTRUCTURE:
            bad("ReservedId", v.id, "reserved for the infrastructure node")
        if v.mmw_antennas < 0:
            bad("InvalidValue", v.id, "mmw_antennas must be >= 0")
        for name in sorted(v.rats):
            if name not in rats:
                bad("UnknownRat", name, f"listed by vehicle {v.id}")
            elif rats[name].backhaul:
                bad("InvalidValue", v.id, f"{name} is a backhaul RAT; use has_backhaul_radio")
            elif rats[name].point_to_point and v.mmw_antennas <= 0:
                bad("InvalidValue", v.id, f"{name} needs at least one directive antenna")
        if Role.NETWORK_MASTER in v.initial_roles:
            nm_holders.append(v.id)
    if len(nm_holders) > 1:
        bad("MultipleNetworkMasters", ",".join(nm_holders))
    if cfg.cv is not None:
        known_vehicle(cfg.cv)

    # mobility
    traced = {tr.vehicle for tr in cfg.traces}
    for tr in cfg.traces:
        known_vehicle(tr.vehicle)
        times = [t for t, _ in tr.waypoints]
        if not times:
            bad("InvalidValue", tr.vehicle, "trace has no waypoints")
        elif any(b <= a for a, b in zip(times, times[1:])):
            bad("InvalidValue", tr.vehicle, "waypoint times must be strictly increasing")
        if not all(math.isfinite(x) for t, p in tr.waypoints for x in (t, p.x, p.y)):
            bad("InvalidValue", tr.vehicle, "non-finite waypoint")
    for vid in sorted(set(vehicles) - traced):
        bad("MissingTrace", vid)

    # flows
    for f in cfg.flows:
        for end in (f.src, f.dst):
            if end != INFRASTRUCTURE:
                known_vehicle(end)
        if f.src == f.dst:
            bad("InvalidValue", f.id, "src and dst must differ")
        in_window(f.id, f.start_s, f.end_s)
        req = reqs.get(f.use_case)
        if req is None:
            bad("UnknownUseCase", f.use_case, f"referenced by flow {f.id}")
            continue
        if f.demand_mbps < req.throughput_mbps:
            bad("InvalidValue", f.id, f"demand {f.demand_mbps} below required {req.throughput_mbps} Mbps")
        touches_infra = INFRASTRUCTURE in (f.src, f.dst)
        if req.scope.needs_backhaul != touches_infra:
            bad("ScopeMismatch", f.id, f"{req.scope.value} flow {'must' if req.scope.needs_backhaul else 'must not'} "
                                       f"end at {INFRASTRUCTURE}")

    # VNFs
    for v in cfg.vnfs:
        if v.impl_cost < 0 or v.opp_cost < 0 or v.weight < 0:
            bad("InvalidValue", v.id, "costs and weight must be >= 0")

    # policies
    el = cfg.election
    if not el.hysteresis_ratio > 1:
        bad("InvalidValue", "election.hysteresis_ratio", "must be > 1")
    if el.hold_time_s < 0 or el.handover_gap_ms < 0:
        bad("InvalidValue", "election", "hold time and handover gap must be >= 0")
    if el.check_interval_s <= 0 or el.switch_interval_s <= 0:
        bad("InvalidValue", "election", "check and switch intervals must be > 0")
    if cfg.placement_epoch_s <= 0:
        bad("InvalidValue", "strategy.epoch_s", "must be > 0")
    if not 0 < cfg.ewma_alpha <= 1:
        bad("InvalidValue", "strategy.ewma_alpha", "must be in (0, 1]")

    # environment
    env = cfg.environment
    for b in env.blockages:
        known_vehicle(b.a)
        known_vehicle(b.b)
        in_window(f"blockage {b.a}-{b.b}", b.start_s, b.end_s)
    for iv in env.rain:
        in_window("rain", iv.start_s, iv.end_s)
    for iv in env.backhaul_outages:
        in_window("backhaul_outage", iv.start_s, iv.end_s)
    for w in env.backhaul_capacity:
        known_vehicle(w.vehicle)
        in_window(f"backhaul_capacity {w.vehicle}", w.start_s, w.end_s)
        if w.capacity_mbps < 0:
            bad("InvalidValue", w.vehicle, "backhaul capacity must be >= 0")
    rb = env.random_blockages
    if rb is not None:
        if rb.rate_per_min < 0 or rb.mean_duration_s <= 0:
            bad("InvalidValue", "random_blockages", "rate must be >= 0 and mean duration > 0")
        for a, b in rb.pairs or ():
            known_vehicle(a)
            known_vehicle(b)

    if out:
        raise ScenarioValidationError(out)
    return ValidatedScenario(cfg, vehicles, rats, reqs)
