"""Beam splitters, circuits and their action on Fock states.

An element on modes ``(i, j)`` with matrix ``M`` substitutes creation
operators as ``a_i^dag -> M[0,0] a_i^dag + M[0,1] a_j^dag`` and
``a_j^dag -> M[1,0] a_i^dag + M[1,1] a_j^dag``. Composition therefore
multiplies matrices left to right, and the inverse element uses ``M^dagger``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InvalidArgumentError, InvalidElementError
from .fock import FockBasis, OccupationVector, StateVector

UNITARITY_TOLERANCE = 1e-10


def _unitarity_deviation(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))


@dataclass(frozen=True, eq=False)
class BeamSplitter:
    """A validated 2x2 unitary bound to an ordered mode pair."""

    modes: tuple[int, int]
    matrix: np.ndarray

    def __post_init__(self):
        i, j = (int(m) for m in self.modes)
        if i == j:
            raise InvalidArgumentError(f"beam splitter needs two distinct modes, got ({i}, {j})")
        if i < 0 or j < 0:
            raise InvalidArgumentError(f"mode indices must be non-negative, got ({i}, {j})")
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise InvalidElementError(f"beam splitter matrix must be 2x2, got shape {matrix.shape}")
        deviation = _unitarity_deviation(matrix)
        if not deviation <= UNITARITY_TOLERANCE:
            raise InvalidElementError(
                f"beam splitter on modes ({i}, {j}) is not unitary: max|M^dag M - I| = {deviation:.3e}",
                deviation=deviation,
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "modes", (i, j))
        object.__setattr__(self, "matrix", matrix)

    @property
    def t(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def r(self) -> complex:
        return complex(self.matrix[0, 1])

    def adjoint(self) -> "BeamSplitter":
        return BeamSplitter(self.modes, self.matrix.conj().T)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BeamSplitter)
            and self.modes == other.modes
            and np.array_equal(self.matrix, other.matrix)
        )

    def __repr__(self) -> str:
        return f"BeamSplitter(modes={self.modes}, t={self.t:.6g}, r={self.r:.6g})"


def beam_splitter(t: complex, r: complex, i: int, j: int) -> BeamSplitter:
    """Symmetric beam splitter ``[[t, r], [r, t]]`` on modes ``i`` and ``j``.

    Unitarity needs ``|t|^2 + |r|^2 = 1`` and ``t conj(r) + r conj(t) = 0``,
    i.e. a quarter-turn phase between reflection and transmission.
    """
    t, r = complex(t), complex(r)
    return BeamSplitter((i, j), np.array([[t, r], [r, t]]))


def raw_beam_splitter(matrix, i: int, j: int) -> BeamSplitter:
    return BeamSplitter((i, j), np.asarray(matrix, dtype=complex))


def beam_splitter_from_transmittance(
    transmittance: float, i: int, j: int, r_phase: float = math.pi / 2, t_phase: float = 0.0
) -> BeamSplitter:
    """Beam splitter with ``|t|^2 = transmittance`` and the given phases.

    The second row is completed as ``[-conj(r) e^{2i t_phase}, t]``, which is
    unitary for any phases and reduces to the symmetric form whenever
    ``r_phase - t_phase = pi/2``.
    """
    if not 0.0 <= transmittance <= 1.0:
        raise InvalidArgumentError(f"transmittance must lie in [0, 1], got {transmittance}")
    t = math.sqrt(transmittance) * np.exp(1j * t_phase)
    r = math.sqrt(1.0 - transmittance) * np.exp(1j * r_phase)
    r2 = -np.conj(r) * np.exp(2j * t_phase)
    return BeamSplitter((i, j), np.array([[t, r], [r2, t]]))


@dataclass(frozen=True)
class Circuit:
    num_modes: int
    elements: tuple[BeamSplitter, ...] = ()

    def __post_init__(self):
        if self.num_modes < 1:
            raise InvalidArgumentError(f"num_modes must be >= 1, got {self.num_modes}")
        elements = tuple(self.elements)
        for k, el in enumerate(elements):
            if max(el.modes) >= self.num_modes:
                raise InvalidArgumentError(
                    f"element {k} acts on modes {el.modes}, circuit has {self.num_modes} modes"
                )
        object.__setattr__(self, "elements", elements)

    def __len__(self) -> int:
        return len(self.elements)

    def then(self, *elements: BeamSplitter) -> "Circuit":
        return Circuit(self.num_modes, self.elements + tuple(elements))

    def single_particle_matrix(self) -> np.ndarray:
        """``num_modes x num_modes`` creation-operator substitution matrix."""
        total = np.eye(self.num_modes, dtype=complex)
        for el in self.elements:
            total = total @ embed(el, self.num_modes)
        return total


def embed(element: BeamSplitter, num_modes: int) -> np.ndarray:
    i, j = element.modes
    if max(i, j) >= num_modes:
        raise InvalidArgumentError(f"element modes {element.modes} exceed {num_modes} modes")
    out = np.eye(num_modes, dtype=complex)
    out[np.ix_([i, j], [i, j])] = element.matrix
    return out


def _binomial_terms(p: int, a: complex, b: complex) -> list[tuple[int, complex]]:
    """Coefficients of ``(a x + b y)^p`` as (power of x, coefficient)."""
    return [(k, math.comb(p, k) * a**k * b ** (p - k)) for k in range(p + 1)]


def apply(element: BeamSplitter, state: StateVector) -> StateVector:
    """Expand each term's transformed creation operators and regroup."""
    i, j = element.modes
    if max(i, j) >= state.num_modes:
        raise InvalidArgumentError(
            f"element modes {element.modes} out of range for {state.num_modes} modes"
        )
    (t, r), (r2, t2) = element.matrix
    out: dict[OccupationVector, complex] = {}
    for occ, amp in state:
        p, q = occ[i], occ[j]
        if p == 0 and q == 0:
            out[occ] = out.get(occ, 0j) + amp
            continue
        norm_in = math.sqrt(math.factorial(p) * math.factorial(q))
        counts = list(occ)
        for k, ck in _binomial_terms(p, t, r):
            for l, cl in _binomial_terms(q, r2, t2):
                n_i = k + l
                n_j = p + q - n_i
                weight = math.sqrt(math.factorial(n_i) * math.factorial(n_j)) / norm_in
                counts[i], counts[j] = n_i, n_j
                key = OccupationVector(counts)
                out[key] = out.get(key, 0j) + amp * ck * cl * weight
    return StateVector(state.num_modes, out)


def run_circuit(circuit: Circuit, state: StateVector) -> StateVector:
    if circuit.num_modes != state.num_modes:
        raise InvalidArgumentError(
            f"circuit has {circuit.num_modes} modes, state has {state.num_modes}"
        )
    for element in circuit.elements:
        state = apply(element, state)
    return state


def run_stages(circuit: Circuit, state: StateVector) -> list[StateVector]:
    """Input state followed by the state after every element."""
    stages = [state]
    for k in range(len(circuit)):
        stages.append(apply(circuit.elements[k], stages[-1]))
    return stages


def invert(circuit: Circuit) -> Circuit:
    return Circuit(circuit.num_modes, tuple(el.adjoint() for el in reversed(circuit.elements)))


def permanent(matrix: np.ndarray) -> complex:
    """Ryser's formula with Gray-code subset updates, ``O(2^n n)``."""
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidArgumentError(f"permanent needs a square matrix, got {a.shape}")
    if n == 0:
        return 1.0 + 0j
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    in_subset = [False] * n
    for k in range(1, 2**n):
        col = (k & -k).bit_length() - 1
        if in_subset[col]:
            row_sums -= a[:, col]
        else:
            row_sums += a[:, col]
        in_subset[col] = not in_subset[col]
        size = sum(in_subset)
        total += (-1) ** size * np.prod(row_sums)
    return (-1) ** n * total


def _mode_list(occ: Sequence[int]) -> list[int]:
    return [m for m, c in enumerate(occ) for _ in range(c)]


def lift_to_dense(obj: Union[BeamSplitter, Circuit], basis: FockBasis) -> np.ndarray:
    """Dense Fock-space matrix of an element or circuit.

    Entries come from permanents of the single-particle substitution matrix,
    ``<m|U|n> = perm(S[n, m]) / sqrt(prod n! prod m!)``, which is independent
    of the polynomial expansion used by :func:`apply`.
    """
    if isinstance(obj, BeamSplitter):
        single = embed(obj, basis.num_modes)
    else:
        if obj.num_modes != basis.num_modes:
            raise InvalidArgumentError(
                f"circuit has {obj.num_modes} modes, basis has {basis.num_modes}"
            )
        single = obj.single_particle_matrix()
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=complex)
    factorial_norm = [
        math.prod(math.factorial(c) for c in occ) for occ in basis
    ]
    modes = [_mode_list(occ) for occ in basis]
    for col, n_occ in enumerate(basis):
        for row, m_occ in enumerate(basis):
            if n_occ.total() != m_occ.total():
                continue
            sub = single[np.ix_(modes[col], modes[row])]
            out[row, col] = permanent(sub) / math.sqrt(factorial_norm[col] * factorial_norm[row])
    return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_circuit(
    num_modes: int, num_elements: int, rng: np.random.Generator
) -> Circuit:
    if num_modes < 2:
        raise InvalidArgumentError("random circuits need at least two modes")
    elements = []
    for _ in range(num_elements):
        i, j = rng.choice(num_modes, size=2, replace=False)
        elements.append(raw_beam_splitter(random_unitary(2, rng), int(i), int(j)))
    return Circuit(num_modes, tuple(elements))

