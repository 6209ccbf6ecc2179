"""Command-line entry point: run, gen, report, validate."""

from __future__ import annotations

import argparse
import inspect
import logging
import os
import sys
from pathlib import Path

from nomadsim.engine import DEFAULT_TICK_S, EventTrace, MalformedTrace, Simulation
from nomadsim.placement import Strategy
from nomadsim.report import evaluate_qos, write_outputs
from nomadsim.scenario import ScenarioFormatError, dump_scenario, load_scenario, with_duration
from nomadsim.templates import TEMPLATES, InvalidParams
from nomadsim.validation import ScenarioValidationError, validate_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64

log = logging.getLogger("nomadsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# template flag -> generator keyword
_TEMPLATE_PARAMS = {
    "n": ("n_harvesters", "n_rollers"),
    "field_size_m": ("field_size_m",),
    "trailer_fill_s": ("trailer_fill_s",),
    "depot_distance_m": ("depot_distance_m",),
    "coverage_radius_m": ("coverage_radius_m",),
    "remote_control": ("remote_control",),
    "site_length_m": ("site_length_m",),
    "tanker_distance_km": ("tanker_distance_km",),
    "duration_s": ("duration_s",),
    "seed": ("seed",),
    "strategy": ("strategy",),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nomadsim", description="Simulate nomadic private 5G networks of vehicle groups.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate a scenario and write trace and reports")
    run.add_argument("--scenario", required=True, type=Path)
    run.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
    run.add_argument("--strategy", choices=[s.value for s in Strategy], default=None)
    run.add_argument("--out", type=Path, default=None, help="output directory (default: $NOMADSIM_OUT)")
    run.add_argument("--duration-s", type=float, default=None)
    run.add_argument("--tick-ms", type=float, default=DEFAULT_TICK_S * 1000)

    gen = sub.add_parser("gen", help="write a built-in scenario")
    gen.add_argument("--template", required=True, choices=sorted(TEMPLATES))
    gen.add_argument("--out", required=True, type=Path)
    gen.add_argument("--n", type=int, help="harvesters or rollers")
    gen.add_argument("--field-size-m", type=float)
    gen.add_argument("--trailer-fill-s", type=float)
    gen.add_argument("--depot-distance-m", type=float)
    gen.add_argument("--coverage-radius-m", type=float)
    gen.add_argument("--remote-control", action="store_true", default=None)
    gen.add_argument("--site-length-m", type=float)
    gen.add_argument("--tanker-distance-km", type=float)
    gen.add_argument("--duration-s", type=float)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--strategy", choices=[s.value for s in Strategy])

    rep = sub.add_parser("report", help="re-evaluate QoS from a saved trace")
    rep.add_argument("--trace", required=True, type=Path)
    rep.add_argument("--out", type=Path, default=None, help="output directory (default: $NOMADSIM_OUT)")

    val = sub.add_parser("validate", help="check a scenario file")
    val.add_argument("--scenario", required=True, type=Path)
    return p


def _out_dir(arg: Path | None) -> Path:
    if arg is not None:
        return arg
    env = os.environ.get("NOMADSIM_OUT")
    if not env:
        raise UsageError("--out not given and NOMADSIM_OUT is not set")
    return Path(env)


def _cmd_run(args) -> int:
    out = _out_dir(args.out)
    cfg = load_scenario(args.scenario)
    if args.duration_s is not None:
        cfg = with_duration(cfg, args.duration_s)
    validate_scenario(cfg)
    if not args.tick_ms > 0:
        raise UsageError("--tick-ms must be positive")
    sim = Simulation(cfg, seed=args.seed, tick_s=args.tick_ms / 1000.0, strategy=args.strategy)
    trace = sim.run()
    report = evaluate_qos(trace)
    write_outputs(report, trace, out)
    for uc, ratio in report.pass_ratio.items():
        print(f"{uc}\tpass_ratio={ratio:.3f}")
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_gen(args) -> int:
    make = TEMPLATES[args.template]
    accepted = set(inspect.signature(make).parameters)
    kwargs = {}
    for flag, names in _TEMPLATE_PARAMS.items():
        value = getattr(args, flag)
        if value is None:
            continue
        name = next((n for n in names if n in accepted), None)
        if name is None:
            raise UsageError(f"--{flag.replace('_', '-')} does not apply to the {args.template} template")
        kwargs[name] = value
    cfg = make(**kwargs)
    validate_scenario(cfg)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    dump_scenario(cfg, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    out = _out_dir(args.out)
    trace = EventTrace.read(args.trace)
    report = evaluate_qos(trace)
    write_outputs(report, None, out, formats=("json", "qos", "placement"))
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = load_scenario(args.scenario)
    vs = validate_scenario(cfg)
    print(f"ok: {len(vs.vehicles)} vehicles, {len(cfg.flows)} flows, duration {cfg.duration_s} s")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "gen": _cmd_gen, "report": _cmd_report, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"nomadsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioValidationError as exc:
        print("invalid scenario:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    except (ScenarioFormatError, InvalidParams, MalformedTrace) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        log.debug("runtime failure", exc_info=True)
        print(f"nomadsim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
