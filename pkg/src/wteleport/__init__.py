"""State-vector simulation of teleportation over GHZ and W channels."""

from ._kernels import available_backends, backend_name, use_backend
from .bench import (
    SweepRow,
    TrialStats,
    avg_fidelity_analytic,
    avg_fidelity_grid,
    avg_fidelity_mc,
    state_fidelity,
    sweep,
    trial_rng,
)
from .measurement import (
    OutcomeSample,
    Povm,
    PovmValidation,
    ProjectiveBasis,
    bell_basis,
    ghz_type_basis,
    measure_povm,
    measure_projective,
    outcome_distribution,
    validate_povm,
    x_basis,
    z_basis,
)
from .protocols import (
    Branch,
    CorrectionTable,
    OutcomeDistribution,
    ProtocolOutcome,
    ghz_bm_distribution,
    ghz_two_qubit_distribution,
    teleport_ghz_bm,
    teleport_ghz_two_qubit,
    teleport_w_bm,
    teleport_w_general_bm,
    teleport_w_povm,
    w_bm_distribution,
    w_general_bm_distribution,
    w_povm_distribution,
)
from .qmath import (
    DensityMatrix,
    Operator,
    StateVector,
    apply_op,
    inner,
    min_eigenvalue_hermitian,
    partial_trace,
    states_equal,
    tensor,
)
from .states import (
    BlochAngles,
    GeneralWAmplitudes,
    bell,
    ghz,
    haar_random_qubit,
    unknown_qubit,
    w,
    w_general,
)
from .wpovm import (
    DEFAULT_PARAMS,
    WMeasurementFamily,
    WPovmParams,
    build_w_povm,
    lambda_max,
    measurement_family,
    w_dual_basis,
    w_primal_basis,
)

__version__ = "0.1.0"
