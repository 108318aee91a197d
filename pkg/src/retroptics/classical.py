"""Classical complex fields through the same beam-splitter networks.

A field is one complex amplitude per mode (intensity = |amplitude|^2). An
element with matrix ``M`` maps the pair ``(c_i, c_j)`` to ``M^T (c_i, c_j)``,
the same rule a single photon's amplitudes follow, so classical splitting
ratios coincide with single-photon detection probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .linopt import Circuit, invert

WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class FieldState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise InvalidArgumentError("a field needs at least one mode")
        if not np.all(np.isfinite(amps)):
            raise InvalidArgumentError("field amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_intensities(
        cls, intensities: Sequence[float], phases: Optional[Sequence[float]] = None
    ) -> "FieldState":
        intensities = np.asarray(intensities, dtype=float)
        if np.any(intensities < 0):
            raise InvalidArgumentError("intensities must be non-negative")
        phases = np.zeros_like(intensities) if phases is None else np.asarray(phases, dtype=float)
        return cls(np.sqrt(intensities) * np.exp(1j * phases))

    @property
    def num_modes(self) -> int:
        return self.amplitudes.size

    def intensities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def total_intensity(self) -> float:
        return float(np.sum(self.intensities()))

    def keep(self, modes: Iterable[int]) -> "FieldState":
        """Zero every amplitude outside ``modes`` (arms that were not recorded)."""
        modes = set(modes)
        for m in modes:
            if not 0 <= m < self.num_modes:
                raise InvalidArgumentError(f"mode {m} out of range for {self.num_modes} modes")
        mask = np.array([m in modes for m in range(self.num_modes)])
        return FieldState(np.where(mask, self.amplitudes, 0))

    def allclose(self, other: "FieldState", atol: float = 1e-12) -> bool:
        return self.num_modes == other.num_modes and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol)
        )


@dataclass(frozen=True)
class IncoherentEnsemble:
    """Fields emitted with random relative phases, as weighted members."""

    members: tuple[tuple[FieldState, float], ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InvalidArgumentError("an ensemble needs at least one member")
        modes = {f.num_modes for f, _ in members}
        if len(modes) != 1:
            raise InvalidArgumentError("ensemble members disagree on the number of modes")
        weights = [w for _, w in members]
        if any(w < 0 for w in weights):
            raise InvalidArgumentError("ensemble weights must be non-negative")
        if abs(sum(weights) - 1.0) > WEIGHT_TOLERANCE:
            raise InvalidArgumentError(f"ensemble weights must sum to 1, got {sum(weights)!r}")
        object.__setattr__(self, "members", members)

    @classmethod
    def phase_averaged(
        cls, intensities: Sequence[float], num_phases: int = 4
    ) -> "IncoherentEnsemble":
        """Mutually incoherent sources.

        Each source's phase runs independently over ``num_phases`` equally
        spaced values; cross terms vanish exactly for ``num_phases >= 2``.
        """
        if num_phases < 2:
            raise InvalidArgumentError("need at least two phases to average out interference")
        intensities = list(intensities)
        lit = [m for m, i in enumerate(intensities) if i > 0]
        grid = [2 * math.pi * k / num_phases for k in range(num_phases)]
        combos = [[]]
        for _ in lit[1:]:
            combos = [c + [p] for c in combos for p in grid]
        weight = 1.0 / len(combos)
        members = []
        for combo in combos:
            phases = [0.0] * len(intensities)
            for m, p in zip(lit[1:], combo):
                phases[m] = p
            members.append((FieldState.from_intensities(intensities, phases), weight))
        return cls(tuple(members))


def _check_modes(fields: FieldState, circuit: Circuit) -> None:
    if fields.num_modes != circuit.num_modes:
        raise InvalidArgumentError(
            f"field has {fields.num_modes} modes, circuit has {circuit.num_modes}"
        )


def propagate(fields: FieldState, circuit: Circuit) -> FieldState:
    _check_modes(fields, circuit)
    amps = fields.amplitudes.copy()
    for el in circuit.elements:
        i, j = el.modes
        amps[[i, j]] = el.matrix.T @ amps[[i, j]]
    return FieldState(amps)


def back_propagate(fields_at_outputs: FieldState, circuit: Circuit) -> FieldState:
    """Run the inverse circuit on output-side fields."""
    return propagate(fields_at_outputs, invert(circuit))


def incoherent_mix(ensemble: IncoherentEnsemble, circuit: Circuit) -> np.ndarray:
    """Weight-averaged output intensities per mode."""
    return sum(w * propagate(f, circuit).intensities() for f, w in ensemble.members)
