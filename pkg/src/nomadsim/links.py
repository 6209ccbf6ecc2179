"""RAT catalog, instantaneous link quality and directive-antenna assignment.

Link quality follows a flat step model: inside range (and with LOS / dry
weather where the RAT needs it) a link offers the RAT's nominal capacity
and base latency, otherwise it is unavailable.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

from nomadsim.model import Position


class Rain(str, Enum):
    NONE = "none"
    HEAVY = "heavy"


@dataclass(frozen=True)
class RatSpec:
    name: str
    max_range_m: float
    capacity_mbps: float
    base_latency_ms: float
    requires_los: bool = False
    point_to_point: bool = False
    weather_sensitive: bool = False
    # Infrastructure uplink of a gateway vehicle; never used between vehicles.
    backhaul: bool = False


@dataclass(frozen=True)
class LinkQuality:
    available: bool
    capacity_mbps: float = 0.0
    latency_ms: float | None = None


UNAVAILABLE = LinkQuality(False)

MMW26 = "mmw26"
LOCAL_CELL = "local_cell"
LONG_RANGE = "long_range"
BACKHAUL = "backhaul"


def default_rat_catalog() -> list[RatSpec]:
    return [
        RatSpec(MMW26, 500.0, 1000.0, 1.0, requires_los=True, point_to_point=True,
                weather_sensitive=True),
        RatSpec(LOCAL_CELL, 1000.0, 150.0, 10.0),
        RatSpec(LONG_RANGE, 10_000.0, 10.0, 50.0),
        RatSpec(BACKHAUL, 2000.0, 1200.0, 5.0, backhaul=True),
    ]


def link_quality(rat: RatSpec, distance_m: float, los: bool = True, rain: Rain = Rain.NONE) -> LinkQuality:
    if distance_m < 0:
        raise ValueError("distance must be non-negative")
    if distance_m > rat.max_range_m:
        return UNAVAILABLE
    if rat.requires_los and not los:
        return UNAVAILABLE
    if rat.weather_sensitive and rain is Rain.HEAVY:
        return UNAVAILABLE
    return LinkQuality(True, rat.capacity_mbps, rat.base_latency_ms)


@dataclass(frozen=True)
class Interval:
    """Half-open time interval [start_s, end_s)."""

    start_s: float
    end_s: float

    def contains(self, t: float) -> bool:
        return self.start_s <= t < self.end_s


@dataclass(frozen=True)
class Blockage:
    a: str
    b: str
    start_s: float
    end_s: float

    @property
    def pair(self) -> tuple[str, str]:
        return pair_key(self.a, self.b)


@dataclass(frozen=True)
class CapacityWindow:
    """Override of one vehicle's backhaul capacity over [start_s, end_s)."""

    vehicle: str
    start_s: float
    end_s: float
    capacity_mbps: float


@dataclass(frozen=True)
class RandomBlockages:
    rate_per_min: float
    mean_duration_s: float
    pairs: tuple[tuple[str, str], ...] | None = None  # None: every vehicle pair


@dataclass(frozen=True)
class EnvironmentState:
    blockages: tuple[Blockage, ...] = ()
    rain: tuple[Interval, ...] = ()  # heavy-rain intervals
    backhaul_outages: tuple[Interval, ...] = ()
    base_station: Position | None = None
    backhaul_capacity: tuple[CapacityWindow, ...] = ()
    random_blockages: RandomBlockages | None = None
    _by_pair: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        by_pair: dict[tuple[str, str], list[Blockage]] = {}
        for b in self.blockages:
            by_pair.setdefault(b.pair, []).append(b)
        object.__setattr__(self, "_by_pair", by_pair)

    def los(self, a: str, b: str, t: float) -> bool:
        for blk in self._by_pair.get(pair_key(a, b), ()):
            if blk.start_s <= t < blk.end_s:
                return False
        return True

    def rain_at(self, t: float) -> Rain:
        return Rain.HEAVY if any(iv.contains(t) for iv in self.rain) else Rain.NONE

    def capacity_override(self, vehicle: str, t: float) -> float | None:
        for w in self.backhaul_capacity:
            if w.vehicle == vehicle and w.start_s <= t < w.end_s:
                return w.capacity_mbps
        return None

    def change_times(self) -> list[float]:
        """Every instant at which some piecewise-constant environment input flips."""
        times: set[float] = set()
        for seq in (self.blockages, self.rain, self.backhaul_outages, self.backhaul_capacity):
            for iv in seq:
                times.add(iv.start_s)
                times.add(iv.end_s)
        return sorted(times)


def backhaul_up(env: EnvironmentState, t: float) -> bool:
    return not any(iv.contains(t) for iv in env.backhaul_outages)


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class AntennaAssignment:
    """(vehicle, antenna index) -> peer id, or None for an idle antenna."""

    slots: dict[tuple[str, int], str | None] = field(default_factory=dict)

    def peers(self, vehicle: str) -> list[str]:
        return [p for (v, _), p in sorted(self.slots.items()) if v == vehicle and p is not None]

    def linked(self, a: str, b: str) -> bool:
        return b in self.peers(a) and a in self.peers(b)

    def merged(self, other: AntennaAssignment) -> AntennaAssignment:
        return AntennaAssignment({**self.slots, **other.slots})


def assign_antennas(vehicle: str, demands: Sequence[str], antennas: int) -> AntennaAssignment:
    """Give the first ``antennas`` distinct peers of ``demands`` one antenna each."""
    if antennas < 0:
        raise ValueError("antenna count must be >= 0")
    peers: list[str] = []
    for peer in demands:
        if peer not in peers:
            peers.append(peer)
    slots: dict[tuple[str, int], str | None] = {}
    for idx in range(antennas):
        slots[(vehicle, idx)] = peers[idx] if idx < len(peers) else None
    return AntennaAssignment(slots)


def rat_by_name(rats: Iterable[RatSpec]) -> dict[str, RatSpec]:
    return {r.name: r for r in rats}
