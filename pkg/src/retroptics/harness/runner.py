"""Run scenarios: dispatch by regime, sweeps, and the dense-matrix oracle."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..classical import FieldState, IncoherentEnsemble, back_propagate, propagate
from ..density import count_distribution, reduce_state
from ..errors import ResourceError, ScenarioError
from ..fock import FockBasis
from ..linopt import lift_to_dense, run_circuit
from ..retrodict import PENROSE_LABELS, DetectionRecord, enumerate_histories, posterior
from .report import Report, Table, fmt
from .scenario import ELEMENT_PARAMS, Scenario

MAX_ORACLE_BASIS = 1000

SINGLE_PHOTON_LABELS = {(1, 0): "D", (0, 1): "C"}


def is_penrose_topology(scenario: Scenario) -> bool:
    """Two sources in modes 1, 2; splitters on (1,3), (2,4), then (1,2)."""
    return (
        scenario.num_modes == 4
        and scenario.photons == (0, 1)
        and tuple(e.modes for e in scenario.elements) == ((0, 2), (1, 3), (0, 1))
    )


def _is_single_photon_topology(scenario: Scenario) -> bool:
    return (
        scenario.num_modes == 2
        and scenario.photons == (0,)
        and tuple(e.modes for e in scenario.elements) == ((0, 1),)
    )


def history_labels(scenario: Scenario):
    if is_penrose_topology(scenario):
        return PENROSE_LABELS
    if _is_single_photon_topology(scenario):
        return SINGLE_PHOTON_LABELS
    return None


def _source_fields(scenario: Scenario):
    """Weighted coherent members describing the classical sources."""
    intensities = [0.0] * scenario.num_modes
    phases = [0.0] * scenario.num_modes
    for k, m in enumerate(scenario.photons):
        intensities[m] = scenario.intensity
        if scenario.source_phases is not None:
            phases[m] = scenario.source_phases[k]
    if scenario.coherence == "incoherent" and len(scenario.photons) > 1:
        return IncoherentEnsemble.phase_averaged(intensities).members
    return ((FieldState.from_intensities(intensities, phases), 1.0),)


def _run_classical(scenario: Scenario) -> Report:
    circuit = scenario.circuit
    members = _source_fields(scenario)
    report = Report(scenario)
    outputs = [(propagate(f, circuit), w) for f, w in members]
    report.forward_intensities = sum(w * f.intensities() for f, w in outputs)
    if len(outputs) == 1:
        report.forward_fields = outputs[0][0]
    if scenario.regime == "classical-backprop":
        report.backprop_complete = sum(
            w * back_propagate(f, circuit).intensities() for f, w in outputs
        )
        if scenario.observe:
            arms = [m for m, _ in scenario.observe]
            report.backprop_incomplete = sum(
                w * back_propagate(f.keep(arms), circuit).intensities() for f, w in outputs
            )
    return report


def _run_quantum(scenario: Scenario) -> Report:
    final = run_circuit(scenario.circuit, scenario.initial_state())
    report = Report(scenario, final_state=final)
    report.histories = enumerate_histories(final, history_labels(scenario))
    report.count_distributions = {
        m: count_distribution(final, m) for m in range(scenario.num_modes)
    }
    if scenario.observe:
        record = DetectionRecord.from_observed(scenario.num_modes, scenario.observed())
        report.posterior = posterior(report.histories, record)
        report.reduced = reduce_state(final, record.observed_modes)
    return report


def run_scenario(scenario: Scenario, *, oracle: bool = False) -> Report:
    if scenario.regime == "quantum":
        report = _run_quantum(scenario)
        if oracle:
            report.oracle_deviation = oracle_check(scenario)
    else:
        report = _run_classical(scenario)
    return report


def oracle_check(scenario: Scenario) -> float:
    """Max |sparse - dense| over the final-state amplitudes."""
    if scenario.regime != "quantum":
        raise ScenarioError("the dense oracle applies to the quantum regime only")
    initial = scenario.initial_state()
    basis = FockBasis(scenario.num_modes, len(scenario.photons))
    if len(basis) > MAX_ORACLE_BASIS:
        raise ResourceError(f"basis size {len(basis)} exceeds the oracle limit {MAX_ORACLE_BASIS}")
    dense = lift_to_dense(scenario.circuit, basis) @ initial.to_dense(basis)
    sparse = run_circuit(scenario.circuit, initial).to_dense(basis)
    return float(np.max(np.abs(dense - sparse)))


def _penrose_epsilon_update(scenario: Scenario, epsilon: float) -> Scenario:
    # Equal small probabilities x on both "unlikely" arms give eps = x^2/(1-x)^2.
    if epsilon < 0:
        raise ScenarioError("epsilon must be non-negative", key="epsilon")
    root = math.sqrt(epsilon)
    x = root / (1.0 + root)
    for idx in (0, 1):
        if scenario.elements[idx].matrix is not None:
            raise ScenarioError("epsilon sweeps need transmittance-specified elements", key="epsilon")
    return scenario.with_element(0, transmittance=1.0 - x).with_element(1, transmittance=x)


def with_parameter(scenario: Scenario, parameter: str, value: float) -> Scenario:
    """Copy of ``scenario`` with one parameter set.

    ``parameter`` is ``epsilon`` (two-source apparatus only) or
    ``<element>.<transmittance|r_phase|t_phase>`` where ``<element>`` is the
    element's name or ``e<k>`` (1-based position).
    """
    if parameter == "epsilon":
        if not is_penrose_topology(scenario):
            raise ScenarioError("'epsilon' is only defined for the two-source apparatus", key=parameter)
        return _penrose_epsilon_update(scenario, value)
    if "." not in parameter:
        raise ScenarioError("unknown sweep parameter", key=parameter)
    ref, attr = parameter.rsplit(".", 1)
    if attr not in ELEMENT_PARAMS:
        raise ScenarioError(f"element parameter must be one of {', '.join(ELEMENT_PARAMS)}", key=parameter)
    try:
        index = scenario.element_index(ref)
    except ScenarioError:
        raise ScenarioError("unknown element in sweep parameter", key=parameter) from None
    if scenario.elements[index].matrix is not None:
        raise ScenarioError("matrix-specified elements have no named parameters", key=parameter)
    if attr == "transmittance" and not 0.0 <= value <= 1.0:
        raise ScenarioError(f"transmittance {value} outside [0, 1]", key=parameter)
    return scenario.with_element(index, **{attr: float(value)})


def sweep_values(
    scenario: Scenario, parameter: str, values: Iterable[float], *, oracle: bool = False
) -> list[tuple[float, Report]]:
    return [
        (float(v), run_scenario(with_parameter(scenario, parameter, v), oracle=oracle))
        for v in values
    ]


def sweep(
    scenario: Scenario,
    parameter: str,
    lo: float,
    hi: float,
    steps: int,
    *,
    log: bool = False,
    oracle: bool = False,
) -> list[tuple[float, Report]]:
    if steps < 1:
        raise ScenarioError("steps must be >= 1", key="steps")
    if steps == 1:
        values = [lo]
    elif log:
        if lo <= 0 or hi <= 0:
            raise ScenarioError("log sweeps need positive bounds", key=parameter)
        values = np.geomspace(lo, hi, steps)
    else:
        values = np.linspace(lo, hi, steps)
    return sweep_values(scenario, parameter, values, oracle=oracle)


def sweep_summary(parameter: str, results: Sequence[tuple[float, Report]]) -> Table:
    """One row per grid point: posterior probabilities, or intensities."""
    first = results[0][1]
    if first.posterior is not None:
        names = [h.name for h, _ in first.posterior]
        table = Table("sweep", (parameter,) + tuple(f"posterior[{n}]" for n in names))
        for value, report in results:
            post = report.posterior.as_dict()
            table.rows.append((fmt(value), *(fmt(post.get(n, 0.0)) for n in names)))
    elif first.histories is not None:
        names = [h.name for h in first.histories]
        table = Table("sweep", (parameter,) + tuple(f"P[{n}]" for n in names))
        for value, report in results:
            probs = {h.name: h.probability for h in report.histories}
            table.rows.append((fmt(value), *(fmt(probs.get(n, 0.0)) for n in names)))
    else:
        n = first.scenario.num_modes
        table = Table("sweep", (parameter,) + tuple(f"I{m + 1}" for m in range(n)))
        for value, report in results:
            table.rows.append((fmt(value), *(fmt(x) for x in report.forward_intensities)))
    return table
