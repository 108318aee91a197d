"""Scenario files, builtin setups, the CLI and report emission."""

from .report import Report, Table, render_tables
from .runner import (
    is_penrose_topology,
    oracle_check,
    run_scenario,
    sweep,
    sweep_summary,
    sweep_values,
    with_parameter,
)
from .scenario import (
    BUILTINS,
    ElementSpec,
    Scenario,
    SweepSpec,
    builtin_text,
    load_builtin,
    load_scenario,
    parse_scenario,
)

__all__ = [
    "BUILTINS",
    "ElementSpec",
    "Report",
    "Scenario",
    "SweepSpec",
    "Table",
    "builtin_text",
    "is_penrose_topology",
    "load_builtin",
    "load_scenario",
    "oracle_check",
    "parse_scenario",
    "render_tables",
    "run_scenario",
    "sweep",
    "sweep_summary",
    "sweep_values",
    "with_parameter",
]
