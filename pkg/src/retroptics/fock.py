"""Fock-basis bookkeeping: occupation vectors, sparse states, bases.

A :class:`StateVector` is a sparse map from occupation tuples to complex
amplitudes. Amplitudes smaller than :data:`PRUNE_THRESHOLD` in modulus are
dropped whenever a state is built, which removes exact-cancellation residue
such as the coincidence term of two-photon interference.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import BasisMismatchError, DegenerateStateError, InvalidArgumentError

PRUNE_THRESHOLD = 1e-15
NORM_TOLERANCE = 1e-12


class OccupationVector(tuple):
    """Photon count per mode. Behaves as an immutable tuple of ints."""

    def __new__(cls, counts: Iterable[int]):
        values = []
        for c in counts:
            if isinstance(c, (bool, np.bool_)) or int(c) != c:
                raise InvalidArgumentError(f"photon counts must be integers, got {c!r}")
            if c < 0:
                raise InvalidArgumentError(f"photon counts must be non-negative, got {c}")
            values.append(int(c))
        return super().__new__(cls, values)

    @property
    def num_modes(self) -> int:
        return len(self)

    def total(self) -> int:
        return sum(self)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self) + ")"

    def __repr__(self) -> str:
        return f"OccupationVector({str(self)})"


def _as_occupation(key) -> OccupationVector:
    return key if isinstance(key, OccupationVector) else OccupationVector(key)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Sparse pure state over ``num_modes`` bosonic modes.

    Instances are immutable; arithmetic returns new states.
    """

    num_modes: int
    amplitudes: Mapping[OccupationVector, complex] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.num_modes) != self.num_modes or self.num_modes < 1:
            raise InvalidArgumentError(f"num_modes must be a positive integer, got {self.num_modes!r}")
        clean = {}
        for key, amp in self.amplitudes.items():
            occ = _as_occupation(key)
            if len(occ) != self.num_modes:
                raise InvalidArgumentError(
                    f"occupation {occ} has {len(occ)} entries, state has {self.num_modes} modes"
                )
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                clean[occ] = clean.get(occ, 0j) + amp
        clean = {k: v for k, v in clean.items() if abs(v) >= PRUNE_THRESHOLD}
        object.__setattr__(self, "amplitudes", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def basis_state(cls, counts: Iterable[int], amplitude: complex = 1.0) -> "StateVector":
        occ = OccupationVector(counts)
        return cls(len(occ), {occ: amplitude})

    @classmethod
    def from_dense(cls, vector, basis: "FockBasis") -> "StateVector":
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (len(basis),):
            raise InvalidArgumentError(f"vector shape {vector.shape} does not match basis size {len(basis)}")
        return cls(basis.num_modes, {occ: a for occ, a in zip(basis, vector)})

    def to_dense(self, basis: "FockBasis") -> np.ndarray:
        if basis.num_modes != self.num_modes:
            raise BasisMismatchError(f"basis has {basis.num_modes} modes, state has {self.num_modes}")
        out = np.zeros(len(basis), dtype=complex)
        for occ, amp in self.amplitudes.items():
            if occ not in basis:
                raise BasisMismatchError(f"occupation {occ} is not in the basis")
            out[basis.index(occ)] = amp
        return out

    def __iter__(self) -> Iterator[tuple[OccupationVector, complex]]:
        return iter(self.amplitudes.items())

    def __len__(self) -> int:
        return len(self.amplitudes)

    def amplitude(self, counts: Iterable[int]) -> complex:
        return self.amplitudes.get(_as_occupation(counts), 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def is_normalized(self, tol: float = NORM_TOLERANCE) -> bool:
        return abs(sum(abs(a) ** 2 for a in self.amplitudes.values()) - 1.0) <= tol

    def photon_numbers(self) -> set[int]:
        return {occ.total() for occ in self.amplitudes}

    def max_photons(self) -> int:
        return max((occ.total() for occ in self.amplitudes), default=0)

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_modes(self, other)
        merged = dict(self.amplitudes)
        for occ, amp in other.amplitudes.items():
            merged[occ] = merged.get(occ, 0j) + amp
        return StateVector(self.num_modes, merged)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + (-1) * other

    def __mul__(self, scalar) -> "StateVector":
        scalar = complex(scalar)
        return StateVector(self.num_modes, {k: scalar * v for k, v in self.amplitudes.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "StateVector":
        return self * (1.0 / complex(scalar))

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        """Elementwise comparison of both real and imaginary parts."""
        if self.num_modes != other.num_modes:
            return False
        keys = set(self.amplitudes) | set(other.amplitudes)
        for k in keys:
            d = self.amplitude(k) - other.amplitude(k)
            if abs(d.real) > atol or abs(d.imag) > atol:
                return False
        return True

    def __repr__(self) -> str:
        terms = ", ".join(f"{occ}: {amp:.6g}" for occ, amp in self.amplitudes.items())
        return f"StateVector({self.num_modes}, {{{terms}}})"


def _check_same_modes(a: StateVector, b: StateVector) -> None:
    if a.num_modes != b.num_modes:
        raise InvalidArgumentError(f"mode-count mismatch: {a.num_modes} vs {b.num_modes}")


class FockBasis:
    """Lexicographically ordered occupation vectors.

    With ``up_to=False`` the basis holds every vector with exactly
    ``total_photons`` photons; with ``up_to=True`` it holds every vector with
    at most that many, which is what reduced density matrices need.
    """

    def __init__(self, num_modes: int, total_photons: int, *, up_to: bool = False):
        if num_modes < 1:
            raise InvalidArgumentError(f"num_modes must be >= 1, got {num_modes}")
        if total_photons < 0:
            raise InvalidArgumentError(f"total_photons must be >= 0, got {total_photons}")
        self.num_modes = int(num_modes)
        self.total_photons = int(total_photons)
        self.up_to = up_to
        states = [
            OccupationVector(c)
            for c in itertools.product(range(self.total_photons + 1), repeat=self.num_modes)
            if (sum(c) <= self.total_photons if up_to else sum(c) == self.total_photons)
        ]
        self.states: tuple[OccupationVector, ...] = tuple(states)
        self._index = {s: i for i, s in enumerate(self.states)}

    @classmethod
    def for_states(cls, *states: StateVector) -> "FockBasis":
        """Smallest basis of the two kinds that covers every given state."""
        num_modes = {s.num_modes for s in states}
        if len(num_modes) != 1:
            raise InvalidArgumentError("states disagree on the number of modes")
        numbers = set().union(*(s.photon_numbers() for s in states)) or {0}
        if len(numbers) == 1:
            return cls(num_modes.pop(), numbers.pop())
        return cls(num_modes.pop(), max(numbers), up_to=True)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[OccupationVector]:
        return iter(self.states)

    def __getitem__(self, i: int) -> OccupationVector:
        return self.states[i]

    def __contains__(self, counts) -> bool:
        return tuple(counts) in self._index

    def index(self, counts) -> int:
        try:
            return self._index[tuple(counts)]
        except KeyError:
            raise InvalidArgumentError(f"{tuple(counts)} is not in this basis") from None

    def __eq__(self, other) -> bool:
        return isinstance(other, FockBasis) and self.states == other.states

    def __hash__(self) -> int:
        return hash(self.states)

    def __repr__(self) -> str:
        kind = "<=" if self.up_to else "=="
        return f"FockBasis(modes={self.num_modes}, photons{kind}{self.total_photons}, size={len(self)})"


def fixed_basis_size(num_modes: int, total_photons: int) -> int:
    return math.comb(total_photons + num_modes - 1, num_modes - 1)


def vacuum(num_modes: int) -> StateVector:
    if num_modes < 1:
        raise InvalidArgumentError(f"num_modes must be >= 1, got {num_modes}")
    return StateVector.basis_state([0] * num_modes)


def create_photon(state: StateVector, mode: int) -> StateVector:
    """Apply the creation operator on ``mode``.

    Every term with ``n`` photons in ``mode`` picks up ``sqrt(n + 1)``. When the
    input is a single basis term the factor is divided out again, so repeated
    calls on the vacuum build the normalized number states.
    """
    if not 0 <= mode < state.num_modes:
        raise InvalidArgumentError(f"mode {mode} out of range for {state.num_modes} modes")
    out = {}
    for occ, amp in state:
        counts = list(occ)
        counts[mode] += 1
        out[OccupationVector(counts)] = amp * math.sqrt(counts[mode])
    result = StateVector(state.num_modes, out)
    if len(state) == 1:
        (occ, _), = state
        result = result / math.sqrt(occ[mode] + 1)
    return result


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``(a, b)``: antilinear in ``a``, linear in ``b``."""
    _check_same_modes(a, b)
    small, large, flip = (a, b, False) if len(a) <= len(b) else (b, a, True)
    total = 0j
    for occ, amp in small:
        other = large.amplitudes.get(occ)
        if other is not None:
            total += amp * other.conjugate() if flip else amp.conjugate() * other
    return total


def tensor(a: StateVector, b: StateVector) -> StateVector:
    out = {
        OccupationVector(occ_a + occ_b): amp_a * amp_b
        for occ_a, amp_a in a
        for occ_b, amp_b in b
    }
    return StateVector(a.num_modes + b.num_modes, out)


def normalize(state: StateVector) -> tuple[StateVector, float]:
    norm = state.norm()
    if norm == 0.0:
        raise DegenerateStateError("cannot normalize the zero state")
    return state / norm, norm


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|(a, b)|^2`` for normalized states."""
    return abs(inner_product(a, b)) ** 2
