"""Detection histories and Bayesian retrodiction from detector records.

A history is one Fock-basis outcome of the evolved state: detectors only
resolve photon counts, so every distinct count pattern is one mutually
exclusive event. A :class:`DetectionRecord` says which detectors were read and
what they showed; the posterior over histories follows from restricting to the
consistent outcomes and renormalizing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .density import DensityOperator, mixture
from .errors import ImpossibleObservationError, InvalidArgumentError
from .fock import (
    NORM_TOLERANCE,
    FockBasis,
    OccupationVector,
    StateVector,
    normalize,
)

# Count signatures of the seven events of the two-source, four-detector
# apparatus (modes ordered D1, D2, D3, D4).
PENROSE_LABELS: Mapping[tuple[int, ...], str] = {
    (2, 0, 0, 0): "a",
    (0, 2, 0, 0): "b",
    (1, 0, 0, 1): "c",
    (0, 1, 0, 1): "d",
    (1, 0, 1, 0): "e",
    (0, 1, 1, 0): "f",
    (0, 0, 1, 1): "g",
}


@dataclass(frozen=True)
class History:
    outcome: OccupationVector
    amplitude: complex
    label: Optional[str] = None

    @property
    def probability(self) -> float:
        return abs(self.amplitude) ** 2

    @property
    def name(self) -> str:
        return self.label if self.label is not None else str(self.outcome)


def enumerate_histories(
    state: StateVector, labels: Optional[Mapping[tuple[int, ...], str]] = None
) -> list[History]:
    """One history per nonzero term, in lexicographic outcome order."""
    if not state.is_normalized():
        raise InvalidArgumentError(f"state must be normalized, norm is {state.norm():.15g}")
    labels = labels or {}
    return [History(occ, amp, labels.get(tuple(occ))) for occ, amp in state]


class DetectionRecord:
    """Per-mode detector readings; ``None`` marks a detector that was not read."""

    def __init__(self, counts: Sequence[Optional[int]]):
        values = []
        for c in counts:
            if c is not None:
                if int(c) != c or c < 0:
                    raise InvalidArgumentError(f"detector counts must be non-negative integers, got {c!r}")
                c = int(c)
            values.append(c)
        if not values:
            raise InvalidArgumentError("a detection record needs at least one mode")
        if all(c is None for c in values):
            raise InvalidArgumentError("a detection record must observe at least one mode")
        self.counts: tuple[Optional[int], ...] = tuple(values)

    @classmethod
    def from_observed(cls, num_modes: int, observed: Mapping[int, int]) -> "DetectionRecord":
        """Build from a ``{mode index: count}`` mapping (0-based modes)."""
        counts: list[Optional[int]] = [None] * num_modes
        for mode, count in observed.items():
            if not 0 <= mode < num_modes:
                raise InvalidArgumentError(f"observed mode {mode} out of range for {num_modes} modes")
            counts[mode] = count
        return cls(counts)

    @property
    def num_modes(self) -> int:
        return len(self.counts)

    @property
    def observed_modes(self) -> tuple[int, ...]:
        return tuple(m for m, c in enumerate(self.counts) if c is not None)

    @property
    def unobserved_modes(self) -> tuple[int, ...]:
        return tuple(m for m, c in enumerate(self.counts) if c is None)

    def observed(self) -> dict[int, int]:
        return {m: c for m, c in enumerate(self.counts) if c is not None}

    def matches(self, outcome: Sequence[int]) -> bool:
        return all(c is None or outcome[m] == c for m, c in enumerate(self.counts))

    def excludes(self, other: "DetectionRecord") -> bool:
        """True when no outcome can satisfy both records."""
        return any(
            a is not None and b is not None and a != b for a, b in zip(self.counts, other.counts)
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, DetectionRecord) and self.counts == other.counts

    def __hash__(self) -> int:
        return hash(self.counts)

    def __str__(self) -> str:
        return ",".join(f"d{m + 1}={c}" for m, c in self.observed().items())

    def __repr__(self) -> str:
        return f"DetectionRecord({self.counts})"


@dataclass(frozen=True)
class Posterior:
    """Posterior probabilities, in the order of the consistent histories."""

    entries: tuple[tuple[History, float], ...]
    evidence: float

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, key) -> float:
        """Look up by label (``"c"``) or by outcome tuple; absent histories are 0."""
        for history, p in self.entries:
            if key == history.label or (not isinstance(key, str) and tuple(key) == tuple(history.outcome)):
                return p
        return 0.0

    def as_dict(self) -> dict[str, float]:
        return {h.name: p for h, p in self.entries}

    def total(self) -> float:
        return sum(p for _, p in self.entries)


def _check_record(record: DetectionRecord, num_modes: int) -> None:
    if record.num_modes != num_modes:
        raise InvalidArgumentError(
            f"record covers {record.num_modes} modes, state has {num_modes}"
        )


def posterior(histories: Sequence[History], record: DetectionRecord) -> Posterior:
    if not histories:
        raise InvalidArgumentError("no histories given")
    _check_record(record, len(histories[0].outcome))
    consistent = [h for h in histories if record.matches(h.outcome)]
    evidence = sum(h.probability for h in consistent)
    if not consistent or evidence == 0.0:
        raise ImpossibleObservationError(f"no history is consistent with record {record}")
    return Posterior(tuple((h, h.probability / evidence) for h in consistent), evidence)


def _project(state: StateVector, record: DetectionRecord) -> StateVector:
    """Unnormalized residual on the unobserved modes."""
    keep = record.unobserved_modes
    out: dict[OccupationVector, complex] = {}
    for occ, amp in state:
        if record.matches(occ):
            key = OccupationVector(occ[m] for m in keep)
            out[key] = out.get(key, 0j) + amp
    return StateVector(len(keep), out)


def condition(state: StateVector, record: DetectionRecord) -> tuple[StateVector, float]:
    """Project onto the observed counts.

    Returns the normalized residual state on the unobserved modes and the
    probability of the record.
    """
    _check_record(record, state.num_modes)
    if not record.unobserved_modes:
        raise InvalidArgumentError("conditioning needs at least one unobserved mode")
    residual = _project(state, record)
    probability = residual.norm() ** 2
    if len(residual) == 0:
        raise ImpossibleObservationError(f"record {record} has zero probability")
    residual, _ = normalize(residual)
    return residual, probability


def mixed_condition(
    state: StateVector, alternatives: Sequence[DetectionRecord], basis: Optional[FockBasis] = None
) -> DensityOperator:
    """Mixture of the conditioned states, weighted by the record probabilities.

    Every alternative must read the same detectors, and each pair must be
    mutually exclusive.
    """
    if not alternatives:
        raise InvalidArgumentError("at least one alternative record is required")
    observed = {rec.observed_modes for rec in alternatives}
    if len(observed) != 1:
        raise InvalidArgumentError("alternatives must observe the same set of modes")
    for a_idx, a in enumerate(alternatives):
        for b in alternatives[a_idx + 1:]:
            if not a.excludes(b):
                raise InvalidArgumentError(f"records {a} and {b} are not mutually exclusive")
    parts = []
    for rec in alternatives:
        try:
            parts.append(condition(state, rec))
        except ImpossibleObservationError:
            continue
    total = sum(p for _, p in parts)
    if not parts or total == 0.0:
        raise ImpossibleObservationError("every alternative has zero probability")
    return mixture(((p / total, s) for s, p in parts), basis)


def mixture_weights(state: StateVector, alternatives: Sequence[DetectionRecord]) -> list[float]:
    """Normalized probabilities of each alternative record (0 for impossible ones)."""
    probs = []
    for rec in alternatives:
        _check_record(rec, state.num_modes)
        probs.append(sum(abs(a) ** 2 for occ, a in state if rec.matches(occ)))
    total = sum(probs)
    if total == 0.0:
        raise ImpossibleObservationError("every alternative has zero probability")
    return [p / total for p in probs]


@dataclass(frozen=True, eq=False)
class JointState:
    """Field modes coupled to one counting register per observed mode.

    ``amplitudes`` maps ``(field occupation, register levels)`` to complex
    amplitudes; register ``k`` belongs to field mode ``register_modes[k]`` and
    has ``levels`` levels.
    """

    num_modes: int
    register_modes: tuple[int, ...]
    levels: int
    amplitudes: Mapping[tuple[OccupationVector, tuple[int, ...]], complex]

    @classmethod
    def ground(cls, state: StateVector, modes: Iterable[int]) -> "JointState":
        modes = tuple(sorted(set(int(m) for m in modes)))
        for m in modes:
            if not 0 <= m < state.num_modes:
                raise InvalidArgumentError(f"detector mode {m} out of range for {state.num_modes} modes")
        if not modes:
            raise InvalidArgumentError("at least one detector mode is required")
        levels = state.max_photons() + 1
        zero = (0,) * len(modes)
        return cls(state.num_modes, modes, levels, {(occ, zero): amp for occ, amp in state})

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values())))

    def in_ground_level(self) -> bool:
        return all(not any(levels) for _, levels in self.amplitudes)

    def field_state(self) -> StateVector:
        """The field factor; only defined while every register is in level 0."""
        if not self.in_ground_level():
            raise InvalidArgumentError("registers are not in the ground level; field is entangled with them")
        return StateVector(self.num_modes, {occ: amp for (occ, _), amp in self.amplitudes.items()})

    def register_distribution(self) -> dict[tuple[int, ...], float]:
        """Marginal probability of each register reading, field traced out."""
        dist: dict[tuple[int, ...], float] = {}
        for (_, levels), amp in self.amplitudes.items():
            dist[levels] = dist.get(levels, 0.0) + abs(amp) ** 2
        return dict(sorted(dist.items()))


def _shift_registers(joint: JointState, sign: int) -> JointState:
    out = {}
    for (occ, levels), amp in joint.amplitudes.items():
        new_levels = tuple(
            (lvl + sign * occ[m]) % joint.levels for lvl, m in zip(levels, joint.register_modes)
        )
        out[(occ, new_levels)] = amp
    return JointState(joint.num_modes, joint.register_modes, joint.levels, out)


def couple_detectors(state, modes: Optional[Iterable[int]] = None) -> JointState:
    """Number-copy coupling ``|n>|k> -> |n>|(k + n) mod L>`` for each register.

    The map permutes basis vectors, so it is unitary; from the ground level it
    leaves each register reading the photon count of its mode. ``state`` is
    either a field :class:`StateVector` (registers are attached in level 0 on
    ``modes``) or a :class:`JointState` whose registers are still in level 0.
    """
    if isinstance(state, JointState):
        if not state.in_ground_level():
            raise InvalidArgumentError("detector registers must start in the ground level")
        joint = state
    else:
        if modes is None:
            modes = range(state.num_modes)
        joint = JointState.ground(state, modes)
    return _shift_registers(joint, +1)


def decouple_detectors(joint: JointState) -> JointState:
    """Exact inverse of :func:`couple_detectors`."""
    return _shift_registers(joint, -1)


def joint_fidelity(a: JointState, b: JointState) -> float:
    if (a.num_modes, a.register_modes, a.levels) != (b.num_modes, b.register_modes, b.levels):
        raise InvalidArgumentError("joint states live in different spaces")
    overlap = sum(amp.conjugate() * b.amplitudes.get(key, 0j) for key, amp in a.amplitudes.items())
    return abs(overlap) ** 2


def register_posterior(joint: JointState, record: DetectionRecord) -> dict[tuple[int, ...], float]:
    """Posterior over full register readings given a partial reading.

    Independent route to :func:`posterior` when every mode carries a register.
    """
    if joint.register_modes != tuple(range(joint.num_modes)):
        raise InvalidArgumentError("every mode needs a register for this comparison")
    dist = joint.register_distribution()
    consistent = {levels: p for levels, p in dist.items() if record.matches(levels)}
    total = sum(consistent.values())
    if total == 0.0:
        raise ImpossibleObservationError(f"no register reading is consistent with {record}")
    return {levels: p / total for levels, p in consistent.items()}


def odds_ratio(t_a: complex, r_a: complex, t_b: complex, r_b: complex) -> float:
    """``|r_A t_B|^2 / |t_A r_B|^2``: floor-emission versus source-emission odds."""
    return abs(r_a * t_b) ** 2 / abs(t_a * r_b) ** 2


def is_normalized_distribution(probs: Iterable[float], tol: float = NORM_TOLERANCE) -> bool:
    probs = list(probs)
    return all(p >= 0 for p in probs) and abs(sum(probs) - 1.0) <= tol

