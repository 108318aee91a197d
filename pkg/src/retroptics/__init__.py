"""Photon-number-conserving linear-optics simulator with Bayesian retrodiction.

Fock states evolve through beam-splitter networks; detector records are turned
into posteriors over the mutually exclusive detection histories, and the same
networks propagate classical fields for comparison.
"""

from .classical import FieldState, IncoherentEnsemble, back_propagate, incoherent_mix, propagate
from .density import DensityOperator, count_distribution, dyad, partial_trace, reduce_state
from .errors import (
    BasisMismatchError,
    DegenerateStateError,
    ImpossibleObservationError,
    InvalidArgumentError,
    InvalidElementError,
    ResourceError,
    RetropticsError,
    ScenarioError,
)
from .fock import (
    FockBasis,
    OccupationVector,
    StateVector,
    create_photon,
    fidelity,
    inner_product,
    normalize,
    tensor,
    vacuum,
)
from .linopt import (
    BeamSplitter,
    Circuit,
    apply,
    beam_splitter,
    beam_splitter_from_transmittance,
    invert,
    lift_to_dense,
    raw_beam_splitter,
    run_circuit,
    run_stages,
)
from .retrodict import (
    PENROSE_LABELS,
    DetectionRecord,
    History,
    JointState,
    Posterior,
    condition,
    couple_detectors,
    decouple_detectors,
    enumerate_histories,
    mixed_condition,
    posterior,
)

__version__ = "0.1.0"
