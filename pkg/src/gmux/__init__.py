"""Designs, costs and Monte Carlo checks for the Gaussian multiplex channel.

N sensor outputs are summed through on/off switches into one integrator
observed in white Gaussian noise.  A design picks the switch
configurations (rows of a 0/1 matrix ``B``) and the time spent in each,
under a total time budget of N; the cost is ``Tr (B^T T B)^-1``.
"""

from .analysis import (
    GlobalOptimum,
    KCurvePoint,
    MajorizationCertificate,
    beta_sweep,
    block_weights,
    convex_combination_sweep,
    global_optimum,
    majorization_certificate,
    mse_vs_k_curve,
    optimal_k,
)
from .designs import (
    MultiKWeights,
    SingleKParams,
    complement_design,
    complement_mse,
    identity_design,
    individual_plus_joint,
    individual_plus_joint_mse,
    multi_k_design,
    multi_k_spectrum,
    single_k_design,
    single_k_mse,
)
from .errors import (
    EnumerationCapError,
    GmuxError,
    InvalidDesignError,
    SimulationError,
    SingularDesignError,
    UnsupportedOrderError,
)
from .hadamard import (
    CoreDesign,
    HadamardMatrix,
    core_design,
    hadamard,
    is_hadamard,
    normalize,
    truncated_core_design,
)
from .model import (
    Design,
    FisherInfo,
    Observation,
    Spectrum,
    estimator_covariance,
    fisher_information,
    ml_estimate,
    read_design,
    spectrum_ai_bj,
    trace_inverse,
    validate_design,
    write_design,
)
from .simulator import SimConfig, SimReport, invariance_check, sample_observation, simulate

__version__ = "0.1.0"
