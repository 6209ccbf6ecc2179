"""Local-versus-central placement of virtual network functions.

Three strategies are supported:

* ``trustzone`` - security functions move to the edge as one block when their
  combined outage-weighted opportunity cost exceeds their combined
  implementation cost.
* ``island`` - the same comparison, made for each function on its own.
* ``private`` - everything runs locally, subscriber data included.

Costs are abstract units per epoch. The cost of a plan is the implementation
cost of its local functions plus ``weight * p * opp_cost`` for each remote one.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

MAX_BRUTE_FORCE = 20


class VnfClass(str, Enum):
    SECURITY = "Security"
    SUBSCRIBER_DATA = "SubscriberData"
    OTHER = "Other"


class Strategy(str, Enum):
    TRUST_ZONE = "trustzone"
    ISLAND = "island"
    PRIVATE = "private"


@dataclass(frozen=True)
class VnfSpec:
    id: str
    vnf_class: VnfClass
    impl_cost: float
    opp_cost: float
    weight: float = 1.0


@dataclass(frozen=True)
class PlacementPlan:
    local: frozenset[str]
    remote: frozenset[str]
    total_cost: float
    strategy: Strategy | None = None


class CatalogTooLarge(ValueError):
    pass


class UnknownVnf(KeyError):
    pass


def _check_p(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"outage probability {p} outside [0, 1]")
    return float(p)


def effective_opportunity_cost(vnf: VnfSpec, p: float) -> float:
    return vnf.weight * _check_p(p) * vnf.opp_cost


def plan_cost(catalog: Iterable[VnfSpec], local: Iterable[str], p: float) -> float:
    local = set(local)
    terms = [
        f.impl_cost if f.id in local else effective_opportunity_cost(f, p)
        for f in catalog
    ]
    # fsum is order independent, so equal partitions always cost exactly the same
    return math.fsum(terms)


def _plan(catalog: Sequence[VnfSpec], local: Iterable[str], p: float, strategy: Strategy | None) -> PlacementPlan:
    local = frozenset(local)
    remote = frozenset(f.id for f in catalog) - local
    return PlacementPlan(local, remote, plan_cost(catalog, local, p), strategy)


def _check_ids(catalog: Sequence[VnfSpec]) -> None:
    ids = [f.id for f in catalog]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate VNF id in catalog")


def plan_island(catalog: Sequence[VnfSpec], p: float) -> PlacementPlan:
    _check_p(p)
    _check_ids(catalog)
    local = [f.id for f in catalog if effective_opportunity_cost(f, p) > f.impl_cost]
    return _plan(catalog, local, p, Strategy.ISLAND)


def plan_trust_zone(catalog: Sequence[VnfSpec], p: float) -> PlacementPlan:
    _check_p(p)
    _check_ids(catalog)
    security = [f for f in catalog if f.vnf_class is VnfClass.SECURITY]
    opp = math.fsum(effective_opportunity_cost(f, p) for f in security)
    impl = math.fsum(f.impl_cost for f in security)
    local = [f.id for f in security] if opp > impl else []
    return _plan(catalog, local, p, Strategy.TRUST_ZONE)


def plan_private(catalog: Sequence[VnfSpec], p: float = 0.0) -> PlacementPlan:
    _check_ids(catalog)
    return _plan(catalog, [f.id for f in catalog], _check_p(p), Strategy.PRIVATE)


def plan(strategy: Strategy, catalog: Sequence[VnfSpec], p: float) -> PlacementPlan:
    if strategy is Strategy.ISLAND:
        return plan_island(catalog, p)
    if strategy is Strategy.TRUST_ZONE:
        return plan_trust_zone(catalog, p)
    return plan_private(catalog, p)


def brute_force_plan(catalog: Sequence[VnfSpec], p: float) -> PlacementPlan:
    """Exhaustive minimum-cost partition; the reference for the greedy planners.

    Ties prefer the smaller local set, then the lexicographically smallest
    sorted tuple of local ids.
    """
    _check_p(p)
    _check_ids(catalog)
    n = len(catalog)
    if n > MAX_BRUTE_FORCE:
        raise CatalogTooLarge(f"{n} VNFs; exhaustive search is limited to {MAX_BRUTE_FORCE}")
    if n == 0:
        return PlacementPlan(frozenset(), frozenset(), 0.0, None)

    impl = np.array([f.impl_cost for f in catalog], dtype=float)
    eff = np.array([f.weight for f in catalog], dtype=float) * p * np.array(
        [f.opp_cost for f in catalog], dtype=float)
    masks = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(bool)
    costs = np.where(masks, impl, eff).sum(axis=1)

    # Float summation in numpy is order dependent; shortlist near-minimal
    # partitions, then rank them by exactly rounded cost.
    best = costs.min()
    near = np.flatnonzero(costs <= best + 1e-9 * max(1.0, abs(best)))
    ids = [f.id for f in catalog]

    def rank(row: int):
        local = tuple(sorted(ids[i] for i in range(n) if masks[row, i]))
        return (plan_cost(catalog, local, p), len(local), local)

    chosen = min(near, key=rank)
    return _plan(catalog, rank(chosen)[2], p, None)


def service_available(plan: PlacementPlan, vnf_id: str, backhaul: bool) -> bool:
    if vnf_id in plan.local:
        return True
    if vnf_id not in plan.remote:
        raise UnknownVnf(vnf_id)
    return backhaul


def default_vnf_catalog() -> list[VnfSpec]:
    return [
        VnfSpec("AAA", VnfClass.SECURITY, impl_cost=4.0, opp_cost=10.0),
        VnfSpec("SEPP", VnfClass.SECURITY, impl_cost=3.0, opp_cost=5.0),
        VnfSpec("HSS", VnfClass.SUBSCRIBER_DATA, impl_cost=8.0, opp_cost=6.0),
        VnfSpec("SMF", VnfClass.OTHER, impl_cost=2.0, opp_cost=8.0),
        VnfSpec("UPF", VnfClass.OTHER, impl_cost=5.0, opp_cost=20.0),
    ]
