"""Group topology: NM election, role-migration handover, RAT choice, routing, sharing."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from nomadsim.links import LinkQuality, Rain, RatSpec, link_quality, pair_key
from nomadsim.model import INFRASTRUCTURE, FlowSpec, Position, Role, VehicleSpec


@dataclass(frozen=True)
class ElectionPolicy:
    hysteresis_ratio: float = 1.5
    hold_time_s: float = 5.0
    check_interval_s: float = 1.0
    handover_gap_ms: float = 0.0
    switch_interval_s: float = 0.1


@dataclass(frozen=True)
class NmDecision:
    action: str  # "keep" or "migrate"
    candidate: str | None  # migration target, or best candidate still inside its hold time
    qualifying: dict[str, float] = field(default_factory=dict)  # candidate -> qualifying since

    @property
    def migrate(self) -> bool:
        return self.action == "migrate"


def elect_nm(
    measurements: Mapping[str, float],
    current: str,
    policy: ElectionPolicy,
    now: float,
    since: Mapping[str, float] | None = None,
) -> NmDecision:
    """Decide whether the NM role should move to a better-connected vehicle.

    A vehicle qualifies while its backhaul capacity exceeds
    ``hysteresis_ratio`` times the current NM's. ``since`` carries the instant
    each candidate started qualifying (from the previous decision's
    ``qualifying``); a candidate seen for the first time starts now.
    """
    if current not in measurements:
        raise KeyError(f"current NM {current!r} has no measurement")
    threshold = policy.hysteresis_ratio * measurements[current]
    since = since or {}
    qualifying = {
        v: since.get(v, now)
        for v, cap in sorted(measurements.items())
        if v != current and cap > threshold
    }

    def best(cands: Iterable[str]) -> str | None:
        return min(cands, key=lambda v: (-measurements[v], v), default=None)

    held = [v for v, s in qualifying.items() if now - s >= policy.hold_time_s]
    if held:
        return NmDecision("migrate", best(held), qualifying)
    return NmDecision("keep", best(qualifying), qualifying)


# -- handover state machine --------------------------------------------------

@dataclass(frozen=True)
class Stable:
    pass


@dataclass(frozen=True)
class CandidateDetected:
    candidate: str
    since: float


@dataclass(frozen=True)
class Prepare:
    candidate: str


@dataclass(frozen=True)
class Switch:
    candidate: str
    remaining: tuple[str, ...]


@dataclass(frozen=True)
class Complete:
    candidate: str


HandoverState = Stable | CandidateDetected | Prepare | Switch | Complete


@dataclass(frozen=True)
class HandoverEvent:
    kind: str
    candidate: str | None = None
    since: float | None = None
    ue: str | None = None
    ues: tuple[str, ...] = ()

    KINDS = (
        "candidate_detected", "candidate_confirmed", "candidate_withdrawn",
        "prepare_done", "ue_switched", "all_switched", "settled", "abort",
    )

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown handover event {self.kind!r}")


@dataclass(frozen=True)
class HandoverAction:
    kind: str  # "ue_switched", "assign_roles" or "rollback"
    subject: str | None = None


class IllegalTransition(Exception):
    def __init__(self, state: HandoverState, event: HandoverEvent):
        super().__init__(f"{event.kind} not allowed in {state!r}")
        self.state = state
        self.event = event


def handover_step(state: HandoverState, event: HandoverEvent) -> tuple[HandoverState, list[HandoverAction]]:
    kind = event.kind
    if kind == "abort" and isinstance(state, (CandidateDetected, Prepare, Switch)):
        return Stable(), [HandoverAction("rollback", state.candidate)]

    if isinstance(state, Stable) and kind == "candidate_detected" and event.candidate:
        return CandidateDetected(event.candidate, event.since or 0.0), []
    if isinstance(state, CandidateDetected):
        if kind == "candidate_confirmed" and event.candidate in (None, state.candidate):
            return Prepare(state.candidate), []
        if kind == "candidate_withdrawn":
            return Stable(), []
    if isinstance(state, Prepare) and kind == "prepare_done":
        ues = tuple(event.ues)
        if state.candidate not in ues and len(set(ues)) == len(ues):
            return Switch(state.candidate, ues), []
    if isinstance(state, Switch):
        if kind == "ue_switched" and event.ue in state.remaining:
            rest = tuple(u for u in state.remaining if u != event.ue)
            return Switch(state.candidate, rest), [HandoverAction("ue_switched", event.ue)]
        if kind == "all_switched" and not state.remaining:
            return Complete(state.candidate), [HandoverAction("assign_roles", state.candidate)]
    if isinstance(state, Complete) and kind == "settled":
        return Stable(), []
    raise IllegalTransition(state, event)


# -- topology ----------------------------------------------------------------

@dataclass(frozen=True)
class Attachment:
    serving: str
    rat: str | None  # None: no RAT reaches the serving node


@dataclass(frozen=True)
class GroupTopology:
    members: tuple[str, ...]
    nm: str
    cv: str | None = None
    gateway: str | None = None
    # NM-elect while UEs are being switched over to it.
    candidate: str | None = None
    serving: Mapping[str, str] = field(default_factory=dict)
    attachments: Mapping[str, Attachment] = field(default_factory=dict)

    def is_hub(self, v: str) -> bool:
        return v == self.nm or v == self.candidate

    def hub(self, v: str) -> str:
        if self.is_hub(v):
            return v
        return self.serving.get(v, self.nm)

    def serving_node(self, v: str) -> str:
        """The node a UE is attached to (the NM-elect is still served by the old NM)."""
        if v == self.candidate:
            return self.serving.get(v, self.nm)
        return self.hub(v)

    def roles(self, v: str) -> frozenset[Role]:
        roles = set()
        if v == self.nm:
            roles.add(Role.NETWORK_MASTER)
        else:
            roles.add(Role.USER_EQUIPMENT)
        if v == self.gateway:
            roles.add(Role.GATEWAY)
        if v == self.cv:
            roles.add(Role.COORDINATING_VEHICLE)
        return frozenset(roles)


def _rat_order(rat: RatSpec) -> tuple:
    return (-rat.capacity_mbps, rat.base_latency_ms, rat.name)


def select_rat(
    src: VehicleSpec,
    dst: VehicleSpec,
    distance_m: float,
    rats: Sequence[RatSpec],
    *,
    los: bool = True,
    rain: Rain = Rain.NONE,
    antennas_free: bool = True,
) -> list[str]:
    """Usable RATs between two vehicles, best first (capacity desc, latency asc).

    Point-to-point RATs additionally need a directive antenna on both ends;
    ``antennas_free`` tells whether both ends still have one to give.
    """
    usable = []
    for rat in sorted(rats, key=_rat_order):
        if rat.backhaul or rat.name not in src.rats or rat.name not in dst.rats:
            continue
        if rat.point_to_point and not (
            antennas_free and src.mmw_antennas > 0 and dst.mmw_antennas > 0
        ):
            continue
        if link_quality(rat, distance_m, los, rain).available:
            usable.append(rat.name)
    return usable


@dataclass(frozen=True)
class Hop:
    a: str
    b: str
    rat: str
    quality: LinkQuality


@dataclass(frozen=True)
class Path:
    hops: tuple[Hop, ...]

    @property
    def latency_ms(self) -> float:
        return sum(h.quality.latency_ms for h in self.hops)

    @property
    def bottleneck_mbps(self) -> float:
        return min(h.quality.capacity_mbps for h in self.hops)

    def rats(self) -> list[str]:
        return [h.rat for h in self.hops]

    def nodes(self) -> list[str]:
        return [self.hops[0].a] + [h.b for h in self.hops]


@dataclass(frozen=True)
class Unreachable:
    reason: str
    detail: str = ""


class LinkState:
    """Per-instant view of the radio environment, as seen by the router."""

    def __init__(
        self,
        vehicles: Mapping[str, VehicleSpec],
        rats: Sequence[RatSpec],
        positions: Mapping[str, Position],
        *,
        los: Callable[[str, str], bool] = lambda a, b: True,
        rain: Rain = Rain.NONE,
        grants: Iterable[tuple[str, str]] = (),
        backhaul_mbps: Mapping[str, float] | None = None,
        backhaul_up: bool = True,
    ):
        self.vehicles = vehicles
        self.rats = sorted((r for r in rats if not r.backhaul), key=_rat_order)
        self.backhaul_rat = next((r for r in rats if r.backhaul), None)
        self.positions = positions
        self.los = los
        self.rain = rain
        self.grants = {pair_key(a, b) for a, b in grants}
        self.backhaul_mbps = dict(backhaul_mbps or {})
        self.backhaul_up = backhaul_up
        self._cache: dict[tuple[str, str], list[tuple[RatSpec, LinkQuality]]] = {}

    def distance(self, a: str, b: str) -> float:
        return self.positions[a].distance_to(self.positions[b])

    def physical(self, a: str, b: str, rat: RatSpec) -> LinkQuality:
        """Quality of ``rat`` between two vehicles, ignoring antenna availability."""
        va, vb = self.vehicles[a], self.vehicles[b]
        if rat.name not in va.rats or rat.name not in vb.rats:
            return LinkQuality(False)
        if rat.point_to_point and (va.mmw_antennas <= 0 or vb.mmw_antennas <= 0):
            return LinkQuality(False)
        los = self.los(a, b) if rat.requires_los else True
        return link_quality(rat, self.distance(a, b), los, self.rain)

    def hop_options(self, a: str, b: str) -> list[tuple[RatSpec, LinkQuality]]:
        key = pair_key(a, b)
        if key not in self._cache:
            opts = []
            for rat in self.rats:
                if rat.point_to_point and key not in self.grants:
                    continue
                q = self.physical(a, b, rat)
                if q.available:
                    opts.append((rat, q))
            self._cache[key] = opts
        return self._cache[key]

    def backhaul_hop(self, gateway: str) -> LinkQuality:
        cap = self.backhaul_mbps.get(gateway, 0.0)
        if self.backhaul_rat is None or not self.backhaul_up or cap <= 0:
            return LinkQuality(False)
        return LinkQuality(True, cap, self.backhaul_rat.base_latency_ms)


def _dedupe(seq: Iterable[str]) -> list[str]:
    out: list[str] = []
    for v in seq:
        if not out or out[-1] != v:
            out.append(v)
    return out


def _common_rat_hops(seq: Sequence[str], ls: LinkState) -> list[Hop] | None:
    """Hops along ``seq`` that all use one RAT, the best one every hop offers.

    Relays through a hub (two or more hops) ride the hub's cell; point-to-point
    links only ever carry a single vehicle-to-vehicle hop.
    """
    if len(seq) < 2:
        return []
    relay = len(seq) > 2
    per_hop = [
        {r.name: (r, q) for r, q in ls.hop_options(a, b) if not (relay and r.point_to_point)}
        for a, b in zip(seq, seq[1:])
    ]
    common = set(per_hop[0]).intersection(*per_hop[1:])
    if not common:
        return None
    rat = min((per_hop[0][name][0] for name in common), key=_rat_order)
    return [Hop(a, b, rat.name, opts[rat.name][1]) for (a, b), opts in zip(zip(seq, seq[1:]), per_hop)]


def route_flow(flow: FlowSpec, topo: GroupTopology, ls: LinkState) -> Path | Unreachable:
    """Route a flow through the group.

    Local flows go direct over a granted point-to-point pair when one exists,
    otherwise hub-and-spoke through the serving node(s) on a single RAT.
    Flows to or from the infrastructure leave through the gateway's backhaul.
    """
    src, dst = flow.src, flow.dst
    if INFRASTRUCTURE in (src, dst):
        vehicle = dst if src == INFRASTRUCTURE else src
        if not ls.backhaul_up:
            return Unreachable("backhaul_down", "infrastructure link outage")
        gw = topo.gateway
        if gw is None:
            return Unreachable("no_gateway", f"NM {topo.nm} has no backhaul")
        seq = _dedupe([vehicle, topo.hub(vehicle), gw])
        hops = _common_rat_hops(seq, ls)
        if hops is None:
            return Unreachable("no_common_rat", "->".join(seq))
        bh = ls.backhaul_hop(gw)
        if not bh.available:
            return Unreachable("no_gateway", f"{gw} lost its backhaul")
        hops.append(Hop(gw, INFRASTRUCTURE, ls.backhaul_rat.name, bh))
        if src == INFRASTRUCTURE:
            hops = [Hop(h.b, h.a, h.rat, h.quality) for h in reversed(hops)]
        return Path(tuple(hops))

    for rat, q in ls.hop_options(src, dst):
        if rat.point_to_point:
            return Path((Hop(src, dst, rat.name, q),))
    seq = _dedupe([src, topo.hub(src), topo.hub(dst), dst])
    hops = _common_rat_hops(seq, ls)
    if hops is None:
        return Unreachable("no_common_rat", "->".join(seq))
    return Path(tuple(hops))


def hop_resource(hop: Hop, topo: GroupTopology, rats: Mapping[str, RatSpec]) -> str:
    """Capacity pool a hop draws from: a point-to-point link, or the hub's cell."""
    rat = rats[hop.rat]
    if rat.backhaul:
        gw = hop.a if hop.b == INFRASTRUCTURE else hop.b
        return f"{rat.name}@{gw}"
    if rat.point_to_point:
        a, b = pair_key(hop.a, hop.b)
        return f"{rat.name}:{a}|{b}"
    hubs = [v for v in (hop.a, hop.b) if topo.is_hub(v)]
    owner = topo.nm if topo.nm in hubs else (hubs[0] if hubs else min(hop.a, hop.b))
    return f"{rat.name}@{owner}"


def allocate_capacity(
    links: Mapping[str, float],
    flows: Mapping[str, tuple[float, Iterable[str]]],
) -> dict[str, float]:
    """Max-min fair rates by progressive filling.

    ``flows`` maps flow id -> (demand, link ids it crosses). Each flow's rate
    is raised in lock-step with the others until it meets its demand or one of
    its links saturates.
    """
    routes = {f: sorted(set(ls)) for f, (_, ls) in flows.items()}
    demand = {f: float(d) for f, (d, _) in flows.items()}
    remaining = {l: float(c) for l, c in links.items()}
    rate = {f: 0.0 for f in flows}
    active = {f for f in flows if demand[f] > 0}

    while active:
        users: dict[str, int] = {}
        for f in active:
            for l in routes[f]:
                users[l] = users.get(l, 0) + 1
        inc = min(demand[f] - rate[f] for f in active)
        for l, n in users.items():
            inc = min(inc, remaining[l] / n)
        inc = max(inc, 0.0)
        for f in active:
            rate[f] += inc
        for l, n in users.items():
            remaining[l] -= inc * n

        done = set()
        for f in active:
            if rate[f] >= demand[f] - 1e-12 * max(1.0, demand[f]):
                rate[f] = demand[f]
                done.add(f)
        saturated = {l for l in users if remaining[l] <= 1e-9 * max(1.0, links[l])}
        for f in active:
            if saturated.intersection(routes[f]):
                done.add(f)
        active -= done
    return rate
