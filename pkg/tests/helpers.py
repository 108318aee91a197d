import itertools
import math

import numpy as np

from retroptics.fock import StateVector
from retroptics.linopt import Circuit, beam_splitter, beam_splitter_from_transmittance

# Filled by test_acceptance, printed by conftest at the end of the session.
ACCEPTANCE_LINES = []

SQRT_HALF = 1 / math.sqrt(2)


def exact_fifty_fifty(i=0, j=1):
    return beam_splitter(SQRT_HALF, 1j * SQRT_HALF, i, j)


def penrose_circuit(transmittance_a=0.99, transmittance_b=0.04, phase_a=math.pi / 2, phase_b=math.pi / 2):
    bs_a = beam_splitter_from_transmittance(transmittance_a, 0, 2, r_phase=phase_a)
    bs_b = beam_splitter_from_transmittance(transmittance_b, 1, 3, r_phase=phase_b)
    return Circuit(4, (bs_a, bs_b, exact_fifty_fifty()))


def penrose_amplitudes(circuit):
    """(t_A, r_A, t_B, r_B) read off the first two elements."""
    bs_a, bs_b = circuit.elements[:2]
    return bs_a.t, bs_a.r, bs_b.t, bs_b.r


def random_state(rng, num_modes, photons, terms=None):
    """Normalized random superposition of fixed-photon-number basis states."""
    support = [c for c in itertools.product(range(photons + 1), repeat=num_modes) if sum(c) == photons]
    if terms is not None and terms < len(support):
        idx = rng.choice(len(support), size=terms, replace=False)
        support = [support[i] for i in idx]
    amps = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
    amps /= np.linalg.norm(amps)
    return StateVector(num_modes, dict(zip(support, amps)))
