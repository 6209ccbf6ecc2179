"""Context information: smoothed link state, backhaul outage estimate, app notifications."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

DEFAULT_ALPHA = 0.1
DEFAULT_EPSILON = 0.01


@dataclass(frozen=True)
class MeasurementSample:
    t: float
    link: str
    available: bool
    capacity_mbps: float
    latency_ms: float | None


@dataclass(frozen=True)
class LinkEstimate:
    capacity_mbps: float
    latency_ms: float | None


@dataclass(frozen=True)
class ContextSnapshot:
    t: float
    links: Mapping[str, LinkEstimate] = field(default_factory=dict)
    p_hat: float = 0.0


@dataclass(frozen=True)
class Notification:
    flow: str
    bandwidth_mbps: float
    delay_ms: float | None
    t: float


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"smoothing factor {alpha} outside (0, 1]")


def estimate_outage_probability(history: Iterable[bool], alpha: float = DEFAULT_ALPHA) -> float:
    """EWMA of the outage indicator over backhaul availability samples (True = up)."""
    _check_alpha(alpha)
    p = 0.0
    for up in history:
        p = alpha * (0.0 if up else 1.0) + (1.0 - alpha) * p
    return p


def _ewma(prev: float | None, value: float | None, alpha: float) -> float | None:
    if value is None:
        return prev
    if prev is None:
        return value
    return alpha * value + (1.0 - alpha) * prev


class ContextManager:
    """Incremental fusion of measurements; ``snapshot()`` freezes the current view."""

    def __init__(self, alpha: float = DEFAULT_ALPHA):
        _check_alpha(alpha)
        self.alpha = alpha
        self.p_hat = 0.0
        self._links: dict[str, LinkEstimate] = {}

    def observe_backhaul(self, up: bool) -> float:
        self.p_hat = self.alpha * (0.0 if up else 1.0) + (1.0 - self.alpha) * self.p_hat
        return self.p_hat

    def observe(self, sample: MeasurementSample) -> None:
        cap = sample.capacity_mbps if sample.available else 0.0
        lat = sample.latency_ms if sample.available else None
        prev = self._links.get(sample.link)
        if prev is None:
            self._links[sample.link] = LinkEstimate(cap, lat)
            return
        self._links[sample.link] = LinkEstimate(
            _ewma(prev.capacity_mbps, cap, self.alpha),
            _ewma(prev.latency_ms, lat, self.alpha),
        )

    def snapshot(self, t: float) -> ContextSnapshot:
        return ContextSnapshot(t, dict(sorted(self._links.items())), self.p_hat)


def snapshot(
    t: float,
    samples: Iterable[MeasurementSample],
    alpha: float = DEFAULT_ALPHA,
    backhaul: Iterable[bool] = (),
) -> ContextSnapshot:
    ctx = ContextManager(alpha)
    for s in sorted(samples, key=lambda s: s.t):
        ctx.observe(s)
    for up in backhaul:
        ctx.observe_backhaul(up)
    return ctx.snapshot(t)


def _changed(old: float | None, new: float | None, eps: float) -> bool:
    if old is None or new is None:
        return old is not new
    return abs(new - old) > eps * max(abs(old), 1e-12)


def emit_notifications(
    snap: ContextSnapshot,
    flows: Mapping[str, tuple[float, float | None]],
    last_sent: Mapping[str, tuple[float, float | None]],
    eps: float = DEFAULT_EPSILON,
) -> list[Notification]:
    """One notification per flow whose (bandwidth, delay) moved by more than ``eps`` relative.

    A delay of None means the flow is currently unreachable.
    """
    out = []
    for fid in sorted(flows):
        bw, delay = flows[fid]
        prev = last_sent.get(fid)
        if prev is None or _changed(prev[0], bw, eps) or _changed(prev[1], delay, eps):
            out.append(Notification(fid, bw, delay, snap.t))
    return out
