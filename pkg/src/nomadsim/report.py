"""QoS evaluation from a persisted trace, and CSV/JSON emission."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field
from pathlib import Path

from nomadsim.engine import EventTrace, MalformedTrace
from nomadsim.model import UseCaseRequirement, requirement_catalog

QOS_COLUMNS = ("flow", "use_case", "start", "end", "thr_mbps", "lat_ms", "req_thr", "req_lat", "pass", "reason")
PLACEMENT_COLUMNS = ("t", "strategy", "p_hat", "local", "remote", "total_cost")
REPORT_SCHEMA = "nomadsim.report/1"
ALL_FORMATS = ("json", "qos", "placement", "trace")

# Relative slack so that a value computed as e.g. 0.1 * 3 still meets a bound of 0.3.
_REL_GUARD = 1e-9


@dataclass(frozen=True)
class QosRecord:
    flow: str
    use_case: str
    start_s: float
    end_s: float
    throughput_mbps: float
    latency_ms: float | None  # None when the flow was never reachable
    required_throughput_mbps: float
    required_latency_ms: float
    passed: bool
    reason: str | None = None  # throughput, latency or unreachable


@dataclass(frozen=True)
class HandoverStats:
    migrations: int = 0
    ue_switched: int = 0
    aborts: int = 0
    max_gap_ms: float = 0.0
    strictest_budget_ms: float | None = None
    smooth: bool = True


@dataclass(frozen=True)
class PlacementRow:
    t: float
    strategy: str
    p_hat: float
    local: tuple[str, ...]
    remote: tuple[str, ...]
    total_cost: float


@dataclass
class SimReport:
    records: list[QosRecord] = field(default_factory=list)
    pass_ratio: dict[str, float] = field(default_factory=dict)
    handover: HandoverStats = field(default_factory=HandoverStats)
    placement: list[PlacementRow] = field(default_factory=list)
    p_hat: list[tuple[float, float]] = field(default_factory=list)
    service: dict[str, dict[str, int]] = field(default_factory=dict)
    notifications: int = 0
    run: dict = field(default_factory=dict)

    def record(self, flow: str) -> QosRecord:
        return next(r for r in self.records if r.flow == flow)

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "run": self.run,
            "records": [asdict(r) for r in self.records],
            "pass_ratio": self.pass_ratio,
            "handover": asdict(self.handover),
            "placement": [asdict(p) | {"local": list(p.local), "remote": list(p.remote)} for p in self.placement],
            "p_hat": [list(x) for x in self.p_hat],
            "service": self.service,
            "notifications": self.notifications,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def meets(achieved: float, required: float, *, at_most: bool = False) -> bool:
    """Bound check where equality passes."""
    slack = _REL_GUARD * max(abs(required), 1.0)
    return achieved <= required + slack if at_most else achieved >= required - slack


def _flow_timelines(trace: EventTrace) -> dict[str, list[tuple[float, dict | None]]]:
    out: dict[str, list[tuple[float, dict | None]]] = {}
    for d in trace.deltas():
        for fid, state in d.get("flows", {}).items():
            out.setdefault(fid, []).append((d["t"], state))
    return out


def _evaluate_flow(fid: str, uc: str, start: float, end: float, timeline, req: UseCaseRequirement) -> QosRecord:
    # state in force over [t_i, t_{i+1}); later records at the same instant win
    segments = []
    for i, (t, state) in enumerate(timeline):
        t_next = timeline[i + 1][0] if i + 1 < len(timeline) else end
        lo, hi = max(t, start), min(t_next, end)
        if hi > lo:
            segments.append((lo, hi, state))
    covered = start
    for lo, hi, state in segments:
        if lo > covered or state is None:
            raise MalformedTrace(f"flow {fid}: no state recorded at t={covered}")
        covered = hi
    if covered < end:
        raise MalformedTrace(f"flow {fid}: state ends at t={covered} before flow end {end}")

    reachable = all(s["ok"] for _, _, s in segments)
    thr = min((s["thr"] if s["ok"] else 0.0) for _, _, s in segments)
    lats = [s["lat"] for _, _, s in segments if s["ok"]]
    lat = max(lats) if lats else None
    if not reachable:
        reason = "unreachable"
    elif not meets(thr, req.throughput_mbps):
        reason = "throughput"
    elif not meets(lat, req.latency_ms, at_most=True):
        reason = "latency"
    else:
        reason = None
    return QosRecord(fid, uc, start, end, thr, lat, req.throughput_mbps, req.latency_ms, reason is None, reason)


def evaluate_qos(trace: EventTrace, catalog: Iterable[UseCaseRequirement] | None = None) -> SimReport:
    """Compare each flow's worst achieved throughput and latency against its use case.

    Works from the trace alone, so a persisted trace reproduces the report.
    """
    reqs = {r.id: r for r in (catalog if catalog is not None else requirement_catalog())}
    timelines = _flow_timelines(trace)

    records = []
    for ev in trace.events("FlowStart"):
        try:
            fid, uc = ev["flow"], ev["use_case"]
            start, end = float(ev["start_s"]), float(ev["end_s"])
        except KeyError as exc:
            raise MalformedTrace(f"FlowStart at t={ev['t']} lacks {exc}") from exc
        if uc not in reqs:
            raise MalformedTrace(f"flow {fid}: unknown use case {uc}")
        records.append(_evaluate_flow(fid, uc, start, end, timelines.get(fid, []), reqs[uc]))
    records.sort(key=lambda r: r.flow)

    by_uc: dict[str, list[bool]] = {}
    for r in records:
        by_uc.setdefault(r.use_case, []).append(r.passed)
    pass_ratio = {uc: sum(v) / len(v) for uc, v in sorted(by_uc.items())}

    placement, p_hat, service = [], [], {}

    def count_service(queries) -> None:
        for q in queries:
            s = service.setdefault(q["vnf"], {"queries": 0, "available": 0})
            s["queries"] += 1
            s["available"] += int(q["available"])

    for ev in trace.events("PlacementEpoch"):
        placement.append(PlacementRow(ev["t"], ev["strategy"], ev["p_hat"], tuple(ev["local"]),
                                      tuple(ev["remote"]), ev["total_cost"]))
        p_hat.append((ev["t"], ev["p_hat"]))
        count_service(ev["service"])
    for d in trace.deltas():
        count_service(d.get("service", ()))

    return SimReport(
        records=records,
        pass_ratio=pass_ratio,
        handover=_handover_stats(trace, records),
        placement=placement,
        p_hat=p_hat,
        service=dict(sorted(service.items())),
        notifications=sum(1 for _ in trace.events("Notification")),
        run={k: trace.header.get(k) for k in ("scenario_sha256", "seed", "strategy", "duration_s", "tick_s")},
    )


def _handover_stats(trace: EventTrace, records: list[QosRecord]) -> HandoverStats:
    acts = [e for e in trace.events("HandoverAction")]
    switched = [e for e in acts if e["action"] == "ue_switched"]
    aborts = sum(
        1 for e in trace.events("ElectionCheck")
        for step in e.get("transitions", ()) if step.startswith("Prepare->Stable")
    )
    max_gap = max((float(e["gap_ms"]) for e in switched), default=0.0)
    budgets = [r.required_latency_ms for r in records
               if any(r.start_s <= e["t"] < r.end_s for e in switched)]
    strictest = min(budgets) if budgets else None
    return HandoverStats(
        migrations=sum(1 for e in acts if e["action"] == "complete"),
        ue_switched=len(switched),
        aborts=aborts,
        max_gap_ms=max_gap,
        strictest_budget_ms=strictest,
        smooth=strictest is None or max_gap <= strictest,
    )


def _num(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def qos_csv(records: Iterable[QosRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(QOS_COLUMNS)
    for r in records:
        w.writerow([r.flow, r.use_case, _num(r.start_s), _num(r.end_s), _num(r.throughput_mbps),
                    _num(r.latency_ms), _num(r.required_throughput_mbps), _num(r.required_latency_ms),
                    "true" if r.passed else "false", r.reason or ""])
    return buf.getvalue()


def placement_csv(rows: Iterable[PlacementRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLACEMENT_COLUMNS)
    for p in rows:
        w.writerow([_num(p.t), p.strategy, _num(p.p_hat), " ".join(p.local), " ".join(p.remote), _num(p.total_cost)])
    return buf.getvalue()


def write_outputs(
    report: SimReport,
    trace: EventTrace | None,
    out_dir: str | Path,
    formats: Iterable[str] = ALL_FORMATS,
) -> dict[str, Path]:
    """Write the requested files; returns format -> path. Raises OSError when out_dir is unusable."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    content = {
        "json": ("report.json", report.to_json),
        "qos": ("qos.csv", lambda: qos_csv(report.records)),
        "placement": ("placement.csv", lambda: placement_csv(report.placement)),
        "trace": ("trace.jsonl", lambda: trace.to_jsonl()),
    }
    written = {}
    for fmt in formats:
        if fmt not in content:
            raise ValueError(f"unknown output format {fmt!r}")
        if fmt == "trace" and trace is None:
            continue
        name, render = content[fmt]
        path = out / name
        path.write_text(render(), encoding="utf-8", newline="\n")
        written[fmt] = path
    return written
