"""Density operators over small Fock bases, partial traces, count statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import BasisMismatchError, InvalidArgumentError
from .fock import FockBasis, OccupationVector, StateVector


@dataclass(frozen=True, eq=False)
class DensityOperator:
    basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (len(self.basis), len(self.basis)):
            raise BasisMismatchError(
                f"matrix shape {matrix.shape} does not match basis size {len(self.basis)}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def num_modes(self) -> int:
        return self.basis.num_modes

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)

    def diagonal(self) -> dict[OccupationVector, float]:
        return {occ: float(self.matrix[k, k].real) for k, occ in enumerate(self.basis)}

    def element(self, row, col) -> complex:
        return complex(self.matrix[self.basis.index(row), self.basis.index(col)])

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def allclose(self, other: "DensityOperator", atol: float = 1e-12) -> bool:
        if self.basis != other.basis:
            return False
        diff = self.matrix - other.matrix
        return bool(np.all(np.abs(diff.real) <= atol) and np.all(np.abs(diff.imag) <= atol))


def dyad(state: StateVector, basis: Optional[FockBasis] = None) -> DensityOperator:
    """Projector ``[state state^dagger]`` in the given (or smallest covering) basis."""
    if basis is None:
        basis = FockBasis.for_states(state)
    vec = state.to_dense(basis)
    return DensityOperator(basis, np.outer(vec, vec.conj()))


def mixture(weighted: Iterable[tuple[float, StateVector]], basis: Optional[FockBasis] = None) -> DensityOperator:
    weighted = list(weighted)
    if not weighted:
        raise InvalidArgumentError("mixture needs at least one component")
    if basis is None:
        basis = FockBasis.for_states(*(s for _, s in weighted))
    matrix = sum(w * dyad(s, basis).matrix for w, s in weighted)
    return DensityOperator(basis, matrix)


def _validate_keep(num_modes: int, keep_modes: Iterable[int]) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(m) for m in keep_modes)))
    if not keep:
        raise InvalidArgumentError("keep_modes must not be empty; use DensityOperator.trace() to trace out everything")
    if keep[0] < 0 or keep[-1] >= num_modes:
        raise InvalidArgumentError(f"keep_modes {keep} out of range for {num_modes} modes")
    return keep


def _reduced_basis(num_keep: int, max_photons: int) -> FockBasis:
    return FockBasis(num_keep, max_photons, up_to=True)


def partial_trace(rho: DensityOperator, keep_modes: Iterable[int]) -> DensityOperator:
    """Trace out every mode not in ``keep_modes`` (dense path)."""
    keep = _validate_keep(rho.num_modes, keep_modes)
    dropped = [m for m in range(rho.num_modes) if m not in keep]
    reduced = _reduced_basis(len(keep), rho.basis.total_photons)
    kept_index = []
    env = []
    for occ in rho.basis:
        kept_index.append(reduced.index(tuple(occ[m] for m in keep)))
        env.append(tuple(occ[m] for m in dropped))
    out = np.zeros((len(reduced), len(reduced)), dtype=complex)
    groups: dict[tuple, list[int]] = {}
    for k, e in enumerate(env):
        groups.setdefault(e, []).append(k)
    for members in groups.values():
        for a in members:
            for b in members:
                out[kept_index[a], kept_index[b]] += rho.matrix[a, b]
    return DensityOperator(reduced, out)


def reduce_state(state: StateVector, keep_modes: Iterable[int]) -> DensityOperator:
    """Rank-one path: reduced operator built straight from the amplitudes."""
    keep = _validate_keep(state.num_modes, keep_modes)
    dropped = [m for m in range(state.num_modes) if m not in keep]
    reduced = _reduced_basis(len(keep), state.max_photons())
    groups: dict[tuple, list[tuple[int, complex]]] = {}
    for occ, amp in state:
        e = tuple(occ[m] for m in dropped)
        groups.setdefault(e, []).append((reduced.index(tuple(occ[m] for m in keep)), amp))
    out = np.zeros((len(reduced), len(reduced)), dtype=complex)
    for members in groups.values():
        for a, amp_a in members:
            for b, amp_b in members:
                out[a, b] += amp_a * amp_b.conjugate()
    return DensityOperator(reduced, out)


def count_distribution(state: StateVector, mode: int) -> np.ndarray:
    """``P[n]`` = probability of ``n`` photons in ``mode``, for ``n = 0..N``."""
    if not 0 <= mode < state.num_modes:
        raise InvalidArgumentError(f"mode {mode} out of range for {state.num_modes} modes")
    probs = np.zeros(state.max_photons() + 1)
    for occ, amp in state:
        probs[occ[mode]] += abs(amp) ** 2
    return probs
