"""Joint beamforming and max-min weighted SINR power control for a
coordinated multicell downlink: exact finite-system solver, statistics-only
large-system solvers, and the experiment harness tying them together."""

from .asymptotic import (
    AsymptoticState,
    EffectiveNetwork,
    algorithm_b,
    algorithm_c,
    algorithm_d,
    algorithm_e,
    build_effective,
    gamma_dual,
    gamma_primal,
    phi_derivative,
)
from .coupling import (
    DegenerateBeamformerError,
    ExtendedCouplingMatrix,
    GainMatrix,
    build_gain,
    dual_sinr,
    dual_sinr_quadratic,
    extended_matrix,
    mvdr,
    mvdr_matrix,
    primal_sinr,
)
from .finite import (
    ConvergenceError,
    PerronPair,
    SolveResult,
    algorithm_a,
    brute_force_maxmin,
    perron_pair,
    verify_optimality,
)
from .model import (
    BeamformingMatrix,
    ChannelRealization,
    GeometrySpec,
    LargeScaleProfile,
    Layout,
    LayoutError,
    NetworkConfig,
    PowerVector,
    flatten_index,
    generate_large_scale,
    generate_layout,
    sample_channel,
    unflatten_index,
)
from .scenario import Scenario, load_scenario

__version__ = "0.1.0"
