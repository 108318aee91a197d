"""Scenario files: a line-oriented ``key = value`` format with section headers.

Example::

    [scenario]
    modes = 4
    photons = 1,2            # one photon in mode 1 and one in mode 2
    regime = quantum

    [element]
    name = bs_a
    modes = 1,3
    transmittance = 0.99
    r_phase = 1.5707963267948966

    [observe]
    d1 = 1

Modes are numbered from 1 in files and on the command line, and from 0 in
the Python API.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional

import numpy as np

from ..errors import InvalidArgumentError, InvalidElementError, ScenarioError
from ..fock import OccupationVector, StateVector
from ..linopt import BeamSplitter, Circuit, beam_splitter_from_transmittance, raw_beam_splitter

REGIMES = ("quantum", "classical", "classical-backprop")
COHERENCE = ("coherent", "incoherent")
ELEMENT_PARAMS = ("transmittance", "r_phase", "t_phase")

BUILTINS = {
    "single-photon": "single_photon.scn",
    "penrose-fig3": "penrose_fig3.scn",
    "penrose-classical": "penrose_classical.scn",
}

_SECTION_KEYS = {
    "scenario": {"name", "modes", "photons", "regime", "intensity", "source_phases", "coherence"},
    "element": {"name", "modes", "transmittance", "r_phase", "t_phase", "matrix"},
    "sweep": {"parameter", "lo", "hi", "steps", "scale"},
}


@dataclass(frozen=True)
class ElementSpec:
    modes: tuple[int, int]
    name: Optional[str] = None
    transmittance: Optional[float] = None
    r_phase: float = math.pi / 2
    t_phase: float = 0.0
    matrix: Optional[tuple[complex, complex, complex, complex]] = None

    def build(self) -> BeamSplitter:
        i, j = self.modes
        if self.matrix is not None:
            return raw_beam_splitter(np.array(self.matrix).reshape(2, 2), i, j)
        return beam_splitter_from_transmittance(self.transmittance, i, j, self.r_phase, self.t_phase)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    lo: float
    hi: float
    steps: int
    scale: str = "linear"

    def values(self) -> list[float]:
        if self.steps < 1:
            raise ScenarioError("sweep needs at least one step", key="steps")
        if self.steps == 1:
            return [self.lo]
        if self.scale == "log":
            return list(np.geomspace(self.lo, self.hi, self.steps))
        return list(np.linspace(self.lo, self.hi, self.steps))


@dataclass(frozen=True)
class Scenario:
    num_modes: int
    photons: tuple[int, ...]
    elements: tuple[ElementSpec, ...] = ()
    regime: str = "quantum"
    observe: tuple[tuple[int, int], ...] = ()
    sweep: Optional[SweepSpec] = None
    name: Optional[str] = None
    intensity: float = 1.0
    source_phases: Optional[tuple[float, ...]] = None
    coherence: str = "coherent"
    _circuit: Optional[Circuit] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self._circuit is None:
            object.__setattr__(self, "_circuit", self._build_circuit())

    def _build_circuit(self) -> Circuit:
        built = []
        for k, spec in enumerate(self.elements):
            label = spec.name or f"e{k + 1}"
            try:
                built.append(spec.build())
            except InvalidElementError as exc:
                raise InvalidElementError(f"element '{label}': {exc}", exc.deviation) from None
            except InvalidArgumentError as exc:
                raise ScenarioError(f"element '{label}': {exc}") from None
        return Circuit(self.num_modes, tuple(built))

    @property
    def circuit(self) -> Circuit:
        return self._circuit

    def initial_occupation(self) -> OccupationVector:
        counts = [0] * self.num_modes
        for m in self.photons:
            counts[m] += 1
        return OccupationVector(counts)

    def initial_state(self) -> StateVector:
        return StateVector.basis_state(self.initial_occupation())

    def observed(self) -> dict[int, int]:
        return dict(self.observe)

    def with_observe(self, observe: dict[int, int]) -> "Scenario":
        for m in observe:
            if not 0 <= m < self.num_modes:
                raise ScenarioError(f"observed mode d{m + 1} does not exist in a {self.num_modes}-mode scenario")
        return replace(self, observe=tuple(sorted(observe.items())))

    def element_index(self, ref: str) -> int:
        for k, spec in enumerate(self.elements):
            if ref == spec.name or ref == f"e{k + 1}":
                return k
        raise ScenarioError(f"unknown element '{ref}'")

    def with_element(self, index: int, **changes) -> "Scenario":
        elements = list(self.elements)
        elements[index] = replace(elements[index], **changes)
        return replace(self, elements=tuple(elements), _circuit=None)

    def to_text(self) -> str:
        """Canonical scenario text; parsing it back gives an equal scenario."""
        lines = ["[scenario]"]
        if self.name:
            lines.append(f"name = {self.name}")
        lines.append(f"modes = {self.num_modes}")
        lines.append("photons = " + ",".join(str(m + 1) for m in self.photons))
        lines.append(f"regime = {self.regime}")
        if self.regime != "quantum":
            lines.append(f"intensity = {self.intensity!r}")
            if self.source_phases is not None:
                lines.append("source_phases = " + ",".join(repr(p) for p in self.source_phases))
            lines.append(f"coherence = {self.coherence}")
        for spec in self.elements:
            lines.append("")
            lines.append("[element]")
            if spec.name:
                lines.append(f"name = {spec.name}")
            lines.append(f"modes = {spec.modes[0] + 1},{spec.modes[1] + 1}")
            if spec.matrix is not None:
                parts = []
                for z in spec.matrix:
                    parts += [repr(z.real), repr(z.imag)]
                lines.append("matrix = " + ",".join(parts))
            else:
                lines.append(f"transmittance = {spec.transmittance!r}")
                lines.append(f"r_phase = {spec.r_phase!r}")
                lines.append(f"t_phase = {spec.t_phase!r}")
        if self.observe:
            lines += ["", "[observe]"]
            lines += [f"d{m + 1} = {c}" for m, c in self.observe]
        if self.sweep is not None:
            s = self.sweep
            lines += [
                "",
                "[sweep]",
                f"parameter = {s.parameter}",
                f"lo = {s.lo!r}",
                f"hi = {s.hi!r}",
                f"steps = {s.steps}",
                f"scale = {s.scale}",
            ]
        return "\n".join(lines) + "\n"


_HEADER = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_OBSERVE_KEY = re.compile(r"^d(\d+)$")


def _float(value: str, key: str, line: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ScenarioError(f"expected a number, got '{value}'", line=line, key=key) from None
    if not math.isfinite(x):
        raise ScenarioError(f"value must be finite, got '{value}'", line=line, key=key)
    return x


def _int(value: str, key: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioError(f"expected an integer, got '{value}'", line=line, key=key) from None


def _int_list(value: str, key: str, line: int) -> list[int]:
    return [_int(v.strip(), key, line) for v in value.split(",") if v.strip()]


def _tokenize(text: str):
    """Yield (section, line number, key, value) and section starts as key=None."""
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            section = header.group(1).lower()
            if section not in ("scenario", "element", "observe", "sweep"):
                raise ScenarioError(f"unknown section [{section}]", line=lineno)
            yield section, lineno, None, None
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got '{line}'", line=lineno)
        if section is None:
            raise ScenarioError("key outside of any section", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ScenarioError("empty key", line=lineno)
        yield section, lineno, key.lower(), value


def parse_scenario(text: str) -> Scenario:
    header: dict[str, tuple[str, int]] = {}
    elements: list[dict[str, tuple[str, int]]] = []
    observe: dict[str, tuple[str, int]] = {}
    sweep: dict[str, tuple[str, int]] = {}
    seen_scenario = False
    for section, lineno, key, value in _tokenize(text):
        if key is None:
            if section == "scenario":
                if seen_scenario:
                    raise ScenarioError("duplicate [scenario] section", line=lineno)
                seen_scenario = True
            elif section == "element":
                elements.append({})
            continue
        if section == "observe":
            if not _OBSERVE_KEY.match(key):
                raise ScenarioError("observe keys must look like d<mode>", line=lineno, key=key)
            target = observe
        else:
            if key not in _SECTION_KEYS[section]:
                raise ScenarioError(f"unknown key in [{section}]", line=lineno, key=key)
            if section == "element":
                target = elements[-1]
            else:
                target = header if section == "scenario" else sweep
        if key in target:
            raise ScenarioError("duplicate key", line=lineno, key=key)
        target[key] = (value, lineno)

    if not seen_scenario:
        raise ScenarioError("missing [scenario] section")
    for required in ("modes", "photons"):
        if required not in header:
            raise ScenarioError("missing required key in [scenario]", key=required)

    value, ln = header["modes"]
    num_modes = _int(value, "modes", ln)
    if num_modes < 1:
        raise ScenarioError("must be a positive integer", line=ln, key="modes")

    def mode_index(m: int, key: str, line: int) -> int:
        if not 1 <= m <= num_modes:
            raise ScenarioError(f"mode {m} does not exist in a {num_modes}-mode scenario", line=line, key=key)
        return m - 1

    value, ln = header["photons"]
    photons = tuple(sorted(mode_index(m, "photons", ln) for m in _int_list(value, "photons", ln)))

    regime = "quantum"
    if "regime" in header:
        regime, ln = header["regime"]
        if regime not in REGIMES:
            raise ScenarioError(f"regime must be one of {', '.join(REGIMES)}", line=ln, key="regime")

    intensity = 1.0
    if "intensity" in header:
        value, ln = header["intensity"]
        intensity = _float(value, "intensity", ln)
        if intensity < 0:
            raise ScenarioError("intensity must be non-negative", line=ln, key="intensity")
    source_phases = None
    if "source_phases" in header:
        value, ln = header["source_phases"]
        source_phases = tuple(_float(v.strip(), "source_phases", ln) for v in value.split(","))
        if len(source_phases) != len(photons):
            raise ScenarioError("need one phase per source in 'photons'", line=ln, key="source_phases")
    coherence = "coherent"
    if "coherence" in header:
        coherence, ln = header["coherence"]
        if coherence not in COHERENCE:
            raise ScenarioError("coherence must be 'coherent' or 'incoherent'", line=ln, key="coherence")
    if regime != "quantum" and len(set(photons)) != len(photons):
        raise ScenarioError("classical sources must be distinct modes", key="photons")

    specs = []
    for k, raw in enumerate(elements):
        label = raw.get("name", (f"e{k + 1}", 0))[0]
        if "modes" not in raw:
            raise ScenarioError(f"element '{label}' is missing 'modes'", key="modes")
        value, ln = raw["modes"]
        pair = _int_list(value, "modes", ln)
        if len(pair) != 2 or pair[0] == pair[1]:
            raise ScenarioError("element needs two distinct modes 'i,j'", line=ln, key="modes")
        pair = tuple(mode_index(m, "modes", ln) for m in pair)
        name = raw["name"][0] if "name" in raw else None
        if "matrix" in raw:
            extra = set(raw) & set(ELEMENT_PARAMS)
            if extra:
                key = sorted(extra)[0]
                raise ScenarioError("cannot combine 'matrix' with transmittance/phase keys", line=raw[key][1], key=key)
            value, ln = raw["matrix"]
            parts = [_float(v.strip(), "matrix", ln) for v in value.split(",")]
            if len(parts) != 8:
                raise ScenarioError("matrix needs 8 numbers: re,im for each of 4 entries", line=ln, key="matrix")
            matrix = tuple(complex(parts[2 * q], parts[2 * q + 1]) for q in range(4))
            specs.append(ElementSpec(pair, name=name, matrix=matrix))
            continue
        if "transmittance" not in raw:
            raise ScenarioError(f"element '{label}' needs 'transmittance' or 'matrix'", key="transmittance")
        value, ln = raw["transmittance"]
        transmittance = _float(value, "transmittance", ln)
        if not 0.0 <= transmittance <= 1.0:
            raise ScenarioError(f"transmittance {transmittance} outside [0, 1]", line=ln, key="transmittance")
        phases = {}
        for key in ("r_phase", "t_phase"):
            if key in raw:
                phases[key] = _float(raw[key][0], key, raw[key][1])
        specs.append(ElementSpec(pair, name=name, transmittance=transmittance, **phases))

    names = [s.name for s in specs if s.name]
    if len(names) != len(set(names)):
        raise ScenarioError("element names must be unique", key="name")

    observed = {}
    for key, (value, ln) in observe.items():
        m = int(_OBSERVE_KEY.match(key).group(1))
        count = _int(value, key, ln)
        if count < 0:
            raise ScenarioError("photon counts must be non-negative", line=ln, key=key)
        observed[mode_index(m, key, ln)] = count

    sweep_spec = None
    if sweep:
        for required in ("parameter", "lo", "hi", "steps"):
            if required not in sweep:
                raise ScenarioError("missing required key in [sweep]", key=required)
        scale, ln = sweep.get("scale", ("linear", 0))
        if scale not in ("linear", "log"):
            raise ScenarioError("scale must be 'linear' or 'log'", line=ln, key="scale")
        value, ln = sweep["steps"]
        steps = _int(value, "steps", ln)
        if steps < 1:
            raise ScenarioError("steps must be >= 1", line=ln, key="steps")
        sweep_spec = SweepSpec(
            parameter=sweep["parameter"][0],
            lo=_float(sweep["lo"][0], "lo", sweep["lo"][1]),
            hi=_float(sweep["hi"][0], "hi", sweep["hi"][1]),
            steps=steps,
            scale=scale,
        )
        if scale == "log" and (sweep_spec.lo <= 0 or sweep_spec.hi <= 0):
            raise ScenarioError("log sweeps need positive bounds", key="lo")

    name = header["name"][0] if "name" in header else None
    return Scenario(
        num_modes=num_modes,
        photons=photons,
        elements=tuple(specs),
        regime=regime,
        observe=tuple(sorted(observed.items())),
        sweep=sweep_spec,
        name=name,
        intensity=intensity,
        source_phases=source_phases,
        coherence=coherence,
    )


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise ScenarioError(f"unknown builtin '{name}'; choose from {', '.join(BUILTINS)}")
    return resources.files(__package__).joinpath("builtins", BUILTINS[name]).read_text()


def load_builtin(name: str) -> Scenario:
    return parse_scenario(builtin_text(name))


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
