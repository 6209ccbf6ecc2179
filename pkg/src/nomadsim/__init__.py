"""Discrete-event simulator for nomadic private 5G networks of off-road vehicle groups."""

from nomadsim.engine import EventTrace, Simulation, run
from nomadsim.report import SimReport, evaluate_qos, write_outputs
from nomadsim.scenario import ScenarioConfig, load_scenario, dump_scenario
from nomadsim.templates import agricultural_cycle, construction_cycle
from nomadsim.validation import validate_scenario

__all__ = [
    "EventTrace", "Simulation", "run", "SimReport", "evaluate_qos", "write_outputs",
    "ScenarioConfig", "load_scenario", "dump_scenario", "agricultural_cycle",
    "construction_cycle", "validate_scenario",
]
__version__ = "0.1.0"
