"""Shared domain vocabulary: roles, positions, flows and the use-case requirement catalog."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum

INFRASTRUCTURE = "infrastructure"


class Role(str, Enum):
    NETWORK_MASTER = "NetworkMaster"
    COORDINATING_VEHICLE = "CoordinatingVehicle"
    USER_EQUIPMENT = "UserEquipment"
    GATEWAY = "Gateway"


class Scope(str, Enum):
    LOCAL = "local"
    GLOBAL = "global"
    LOCAL_PLUS_UPLINK = "local+uplink"

    @property
    def needs_backhaul(self) -> bool:
        return self is not Scope.LOCAL


class _NotApplicable:
    """Marker for a range that has no meaning (global-scope use cases).

    Deliberately not a number: arithmetic on it raises TypeError.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "N/A"

    def __reduce__(self):
        return (_NotApplicable, ())


NOT_APPLICABLE = _NotApplicable()


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite position ({self.x}, {self.y})")

    def distance_to(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class VehicleSpec:
    id: str
    rats: frozenset[str] = frozenset()
    mmw_antennas: int = 0
    has_backhaul_radio: bool = False
    initial_roles: frozenset[Role] = frozenset()


@dataclass(frozen=True)
class UseCaseRequirement:
    id: str
    scope: Scope
    range_m: float | _NotApplicable
    throughput_mbps: float
    latency_ms: float
    application: str
    # Values exactly as printed in the source tables, kept for auditing.
    printed: tuple[str, str, str] = field(default=("", "", ""), compare=False)


@dataclass(frozen=True)
class FlowSpec:
    id: str
    src: str
    dst: str
    use_case: str
    demand_mbps: float
    start_s: float
    end_s: float

    def active_at(self, t: float) -> bool:
        return self.start_s <= t < self.end_s

    def endpoints(self) -> tuple[str, str]:
        return self.src, self.dst


_UNIT_SCALE = {
    "kbps": 1e-3,
    "Mbps": 1.0,
    "Gbps": 1e3,
    "ms": 1.0,
    "s": 1e3,
    "m": 1.0,
    "km": 1e3,
}
_QUANTITY = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([A-Za-z]+)\s*$")


def parse_quantity(text: str) -> float:
    """Normalise a printed quantity to Mbps, ms or m ("1 Gbps" -> 1000.0)."""
    m = _QUANTITY.match(text)
    if not m or m.group(2) not in _UNIT_SCALE:
        raise ValueError(f"cannot parse quantity {text!r}")
    value = float(m.group(1))
    scale = _UNIT_SCALE[m.group(2)]
    # 256 kbps must become exactly 0.256, not 0.25600000000000006
    return value / 1e3 if scale == 1e-3 else value * scale


def _row(uc_id: str, scope: str, rng: str, thr: str, lat: str, application: str) -> UseCaseRequirement:
    return UseCaseRequirement(
        id=uc_id,
        scope=Scope(scope),
        range_m=NOT_APPLICABLE if rng == "N/A" else parse_quantity(rng),
        throughput_mbps=parse_quantity(thr),
        latency_ms=parse_quantity(lat),
        application=application,
        printed=(rng, thr, lat),
    )


# Agricultural (UC1..UC5) and construction (UC6..UC9) rows, as printed.
_CATALOG: tuple[UseCaseRequirement, ...] = (
    _row("UC1", "global", "N/A", "10 Mbps", "100 ms", "navigation, status info"),
    _row("UC1b", "local", "100 m", "1 Mbps", "10 ms", "sensor data"),
    _row("UC2", "local", "100 m", "1 Mbps", "10 ms", "coordinated driving"),
    _row("UC3", "local", "500 m", "1 Gbps", "1 ms", "remote control, video"),
    _row("UC4", "local+uplink", "100 m", "1 Gbps", "100 ms", "bulk data"),
    _row("UC5", "global", "N/A", "100 Mbps", "10 ms", "remote control, video"),
    _row("UC6", "local", "300 m", "1 Gbps", "10 ms",
         "sensor data / autonomy planning: distances, maps, trajectories"),
    _row("UC7", "local", "5 km", "256 kbps", "1 s", "rough positioning and status information"),
    _row("UC8", "local", "100 m", "150 Mbps", "50 ms", "monitoring / configuration"),
    _row("UC9", "global", "N/A", "150 Mbps", "1 s", "monitoring"),
)
_BY_ID = {r.id: r for r in _CATALOG}


def requirement_catalog() -> list[UseCaseRequirement]:
    return list(_CATALOG)


def requirement(uc_id: str) -> UseCaseRequirement:
    try:
        return _BY_ID[uc_id]
    except KeyError:
        raise KeyError(f"unknown use case {uc_id!r}") from None
