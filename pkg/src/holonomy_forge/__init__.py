"""Pulse-pair geometric phases on a four-qubit ring.

The package builds the ring model, composes the paired pulses whose
propagator splits into two U(2) holonomy blocks, checks the plane geometry
behind them, and recovers the blocks from survival-probability read-out.
"""

from .abelian_slice import (
    AbelianPulse,
    abelian_evolution,
    abelian_hamiltonian,
    abelian_orange_slice,
    dynamical_phase,
    plus_minus_states,
    sliced_abelian_evolution,
    unbiasedness_check,
)
from .chain_model import (
    BASIS_INDICES,
    BASIS_LABELS,
    CouplingSet,
    basis_embedding,
    build_full_hamiltonian,
    coupling_matrix,
    excitation_leakage,
    project_to_block,
    subspace_projector,
)
from .errors import (
    BudgetExhausted,
    ConditionUnsatisfiable,
    ConfigError,
    HolonomyForgeError,
    LeakageDetected,
    NotBlockDiagonal,
    NotHermitian,
    NotUnitary,
    NumericalConditionError,
    SingularCoupling,
)
from .evolution_engine import (
    PulseSpec,
    closed_form_evolution,
    compose_schedule,
    pulse_evolution,
    sliced_evolution,
)
from .holonomy import (
    Frame2,
    HolonomyPair,
    SliceConditions,
    SliceSpec,
    build_slice,
    couplings_from_matrix,
    design_isoclinic_pulse,
    fixed_pole_frames,
    geodesic_frame,
    holonomy_pair,
    isoclinic_slice,
    lambda_basis,
    lambda_operator,
    mutual_unbiasedness,
    rotating_plane_projector,
    validate_slice_conditions,
    z_power,
)
from .matrix_core import (
    SvdTriple,
    U2Decomposition,
    dagger,
    decompose_u2,
    exp_hermitian,
    is_hermitian,
    is_unitary,
    svd2,
)
from .measurement import (
    MeasurementConfig,
    OptimizationResult,
    ProbeSet,
    invert_holonomy,
    nnn_blocks,
    nnn_hamiltonian,
    optimize_measurement,
    prepare_initial_state,
    survival_probability,
    tomographic_probes,
    w_gates,
)

__version__ = "0.1.0"
