"""Built-in scenario generators for the harvest and road-paving work cycles."""

from __future__ import annotations

import math
from dataclasses import replace

from nomadsim.links import BACKHAUL, LOCAL_CELL, LONG_RANGE, MMW26, EnvironmentState, default_rat_catalog
from nomadsim.model import INFRASTRUCTURE, FlowSpec, Position, Role, VehicleSpec, requirement
from nomadsim.placement import Strategy
from nomadsim.scenario import MobilityTrace, ScenarioConfig, position_at

ALL_RATS = frozenset({MMW26, LOCAL_CELL, LONG_RANGE})


class InvalidParams(ValueError):
    pass


def _rats_with_coverage(radius_m: float):
    return tuple(replace(r, max_range_m=radius_m) if r.name == BACKHAUL else r for r in default_rat_catalog())


def _trace(vehicle: str, points: list[tuple[float, float, float]]) -> MobilityTrace:
    # drop duplicate instants (a later point at the same time wins)
    merged: dict[float, tuple[float, float]] = {}
    for t, x, y in points:
        merged[round(t, 9)] = (x, y)
    return MobilityTrace(vehicle, tuple((t, Position(x, y)) for t, (x, y) in sorted(merged.items())))


def _shift(trace: MobilityTrace, dx: float, dy: float, t0: float, t1: float) -> list:
    """Waypoints following ``trace`` at an offset over [t0, t1]."""
    times = [t0] + [t for t, _ in trace.waypoints if t0 < t < t1] + [t1]
    out = []
    for t in times:
        p = position_at(trace, t)
        out.append((t, p.x + dx, p.y + dy))
    return out


def _flow(fid: str, src: str, dst: str, uc: str, start: float, end: float, duration: float,
          demand: float | None = None) -> list[FlowSpec]:
    end = min(end, duration)
    if start >= end:
        return []
    demand = requirement(uc).throughput_mbps if demand is None else demand
    return [FlowSpec(fid, src, dst, uc, demand, start, end)]


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise InvalidParams(message)


def agricultural_cycle(
    n_harvesters: int = 2,
    field_size_m: float = 400.0,
    trailer_fill_s: float = 600.0,
    depot_distance_m: float = 3000.0,
    remote_control: bool = False,
    duration_s: float = 1800.0,
    seed: int = 0,
    coverage_radius_m: float = 1500.0,
    transport_speed_mps: float = 10.0,
    harvester_speed_mps: float = 2.0,
    strategy: Strategy | str = Strategy.ISLAND,
) -> ScenarioConfig:
    """Harvest cycle: a transporter drives in from the depot, unloads alongside the
    lead harvester until its trailer is full, then drives back.

    The depot hosts the base station; the field lies outside its coverage, so the
    transporter's status flow (UC1) runs on the way out and the bulk offload (UC4)
    starts once it is back in coverage.
    """
    F, D, R = float(field_size_m), float(depot_distance_m), float(coverage_radius_m)
    n = int(n_harvesters)
    _check(n >= 2, "need at least two harvesters")
    _check(duration_s > 0, "duration must be positive")
    _check(trailer_fill_s > 0 and transport_speed_mps > 0 and harvester_speed_mps > 0,
           "fill time and speeds must be positive")
    _check(F >= 100 and 50 + 10 * (n - 1) < F - 20, "field too small for the harvester lanes")
    _check(0 < R < D, "depot must sit farther from the field than the coverage radius")
    _check(D < 10_000, "depot beyond long-range reach")

    v = transport_speed_mps
    # harvesters sweep lanes back and forth in lock-step
    lo, hi = 20.0, F - 20.0
    leg = (hi - lo) / harvester_speed_mps
    dur = float(duration_s)
    sweep = [(k * leg, hi if k % 2 else lo) for k in range(int(dur // leg) + 1)]
    if sweep[-1][0] < dur:
        t0, y0 = sweep[-1]
        y1 = lo if y0 == hi else hi
        sweep.append((dur, y0 + (dur - t0) / leg * (y1 - y0)))
    harvesters = [f"H{i}" for i in range(1, n + 1)]
    traces = [_trace(h, [(t, 50.0 + 10.0 * i, y) for t, y in sweep]) for i, h in enumerate(harvesters)]
    h1 = traces[0]

    t_entrance = D / v
    t_join = t_entrance + 60.0
    t_full = t_join + trailer_fill_s
    t_back = t_full + 60.0
    t_depot = t_back + D / v
    t_exit = R / v  # leaves coverage on the way out
    t_reenter = t_back + (D - R) / v
    pts = [(0.0, -D, 0.0), (t_entrance, 0.0, 0.0)]
    pts += _shift(h1, -8.0, 0.0, t_join, t_full)
    pts += [(t_back, 0.0, 0.0), (t_depot, -D, 0.0)]
    traces.append(_trace("T", pts))
    traces.append(_trace("OP", [(0.0, 20.0, F / 2)]))

    vehicles = [VehicleSpec(h, ALL_RATS, n + 2, initial_roles=frozenset(
        {Role.COORDINATING_VEHICLE} if h == "H1" else {Role.USER_EQUIPMENT})) for h in harvesters]
    vehicles.append(VehicleSpec("T", ALL_RATS, 2, has_backhaul_radio=True,
                                initial_roles=frozenset({Role.NETWORK_MASTER, Role.GATEWAY})))
    vehicles.append(VehicleSpec("OP", ALL_RATS, 1, initial_roles=frozenset({Role.USER_EQUIPMENT})))

    flows: list[FlowSpec] = []
    flows += _flow("uc1-T", "T", INFRASTRUCTURE, "UC1", 0.0, t_exit - 10.0, dur)
    if remote_control:
        flows += _flow("uc5-T", "T", INFRASTRUCTURE, "UC5", 0.0, t_exit - 10.0, dur)
    for h in harvesters[1:]:
        flows += _flow(f"uc2-H1-{h}", "H1", h, "UC2", 0.0, dur, dur)
    flows += _flow("uc2-H1-T", "H1", "T", "UC2", t_join, t_full, dur)
    flows += _flow("uc3-H1-OP", "H1", "OP", "UC3", 120.0, 1500.0, dur)
    flows += _flow("uc4-T", "T", INFRASTRUCTURE, "UC4", t_reenter + 10.0, t_reenter + 70.0, dur)

    return ScenarioConfig(
        duration_s=dur,
        seed=int(seed),
        vehicles=tuple(vehicles),
        traces=tuple(traces),
        flows=tuple(flows),
        rats=_rats_with_coverage(R),
        strategy=Strategy(strategy),
        environment=EnvironmentState(base_station=Position(-D, 0.0)),
        cv="H1",
    )


def _triangle(s: float, segment: float) -> float:
    s = s % (2 * segment)
    return s if s <= segment else 2 * segment - s


def construction_cycle(
    n_rollers: int = 2,
    site_length_m: float = 300.0,
    tanker_distance_km: float = 5.0,
    duration_s: float = 1800.0,
    seed: int = 0,
    segment_m: float = 100.0,
    roller_speed_mps: float = 1.5,
    transit_speed_mps: float = 6.0,
    refill_s: float = 60.0,
    detour_at_s: float = 60.0,
    strategy: Strategy | str = Strategy.ISLAND,
) -> ScenarioConfig:
    """Paving cycle: a paver creeps forward, rollers compact behind it, and the
    first roller drives off to a water tanker and back once during the run."""
    n = int(n_rollers)
    L, S = float(site_length_m), float(segment_m)
    dist = float(tanker_distance_km) * 1000.0
    dur = float(duration_s)
    _check(n >= 1, "need at least one roller")
    _check(dur > 0 and L > 0 and S > 0, "duration, site length and segment must be positive")
    _check(0 < dist <= 5000.0, "tanker distance must lie in (0, 5] km")
    _check(roller_speed_mps > 0 and transit_speed_mps > 0 and refill_s >= 0, "speeds must be positive")
    _check(0 <= detour_at_s < dur, "detour must start inside the run")

    paver_v = L / dur

    def paver_x(t: float) -> float:
        return paver_v * t

    def nominal(i: int, t: float) -> tuple[float, float]:
        phase = (i - 1) * S / n
        return paver_x(t) - 10.0 - _triangle(roller_speed_mps * t + phase, S), 4.0 * i

    def nominal_points(i: int, t0: float, t1: float) -> list[tuple[float, float, float]]:
        phase = (i - 1) * S / n
        times = [t0]
        k = math.floor((roller_speed_mps * t0 + phase) / S) + 1
        while True:
            t = (k * S - phase) / roller_speed_mps
            if t >= t1:
                break
            if t > t0:
                times.append(t)
            k += 1
        times.append(t1)
        return [(t, *nominal(i, t)) for t in times]

    traces = [_trace("P", [(0.0, 0.0, 0.0), (dur, L, 0.0)])]
    traces.append(_trace("SM", [(0.0, 0.0, 25.0), (dur, L, 25.0)]))

    # R1's trip to the tanker, placed due south of where it leaves the site
    t_d = float(detour_at_s)
    x_d, y_d = nominal(1, t_d)
    tanker = (x_d, y_d - dist)
    t_arrive = t_d + dist / transit_speed_mps
    t_leave = t_arrive + refill_s
    t_back = t_leave + dist / transit_speed_mps
    for _ in range(50):  # the slot moves while R1 drives back
        x, y = nominal(1, t_back)
        t_next = t_leave + math.hypot(x - tanker[0], y - tanker[1]) / transit_speed_mps
        if abs(t_next - t_back) < 1e-9:
            break
        t_back = t_next
    r1 = nominal_points(1, 0.0, t_d) + [(t_arrive, *tanker), (t_leave, *tanker)]
    if t_back < dur:
        r1 += nominal_points(1, t_back, dur)
    else:
        r1.append((t_back, *nominal(1, t_back)))
    traces.append(_trace("R1", r1))
    for i in range(2, n + 1):
        traces.append(_trace(f"R{i}", nominal_points(i, 0.0, dur)))
    traces.append(_trace("TK", [(0.0, *tanker)]))

    rollers = [f"R{i}" for i in range(1, n + 1)]
    vehicles = [VehicleSpec("P", ALL_RATS, n + 1, has_backhaul_radio=True, initial_roles=frozenset(
        {Role.NETWORK_MASTER, Role.COORDINATING_VEHICLE, Role.GATEWAY}))]
    vehicles += [VehicleSpec(r, ALL_RATS, n + 1, initial_roles=frozenset({Role.USER_EQUIPMENT})) for r in rollers]
    vehicles.append(VehicleSpec("TK", ALL_RATS, 1, initial_roles=frozenset({Role.USER_EQUIPMENT})))
    vehicles.append(VehicleSpec("SM", frozenset({LOCAL_CELL}), 0, initial_roles=frozenset({Role.USER_EQUIPMENT})))

    def windows(*ids: str) -> list[tuple[float, float]]:
        if "R1" in ids:
            return [(0.0, t_d), (t_back, dur)]
        return [(0.0, dur)]

    flows: list[FlowSpec] = []
    pairs = [(r, "P") for r in rollers] + [(a, b) for i, a in enumerate(rollers) for b in rollers[i + 1:]]
    for a, b in pairs:
        for k, (s, e) in enumerate(windows(a, b)):
            suffix = "" if k == 0 else f"-{k + 1}"
            flows += _flow(f"uc6-{a}-{b}{suffix}", a, b, "UC6", s, e, dur)
    flows += _flow("uc7-TK-R1", "TK", "R1", "UC7", t_d, t_back, dur)
    flows += _flow("uc8-P-SM", "P", "SM", "UC8", 0.0, dur, dur)
    flows += _flow("uc9-P", "P", INFRASTRUCTURE, "UC9", 0.0, dur, dur)

    return ScenarioConfig(
        duration_s=dur,
        seed=int(seed),
        vehicles=tuple(vehicles),
        traces=tuple(traces),
        flows=tuple(flows),
        rats=_rats_with_coverage(2000.0),
        strategy=Strategy(strategy),
        environment=EnvironmentState(base_station=Position(L / 2, -300.0)),
        cv="P",
    )


TEMPLATES = {"agricultural": agricultural_cycle, "construction": construction_cycle}
