"""Prescribed-time zero-gradient-sum distributed optimization.

Simulates two sliding-mode consensus optimization flows over undirected
agent networks, with the Lyapunov diagnostics and decay envelopes that
certify convergence by the prescribed deadlines.
"""

from .config import ScenarioConfig, build_config, load_config
from .diagnostics import (
    DiagnosticsSample,
    DiagnosticsTable,
    EnvelopeReport,
    TheoryConstants,
    compute_diagnostics,
    envelope_check,
    lyapunov_Vi,
    lyapunov_VM,
    lyapunov_VS,
    residual_Er,
    theory_constants,
)
from .dynamics import (
    VARIANT_MS,
    VARIANT_SS,
    AgentState,
    AlgorithmParams,
    StateDerivative,
    SystemState,
    VectorField,
    gradient_sum,
    ms_rhs,
    sliding_surface,
    ss_rhs,
    zgs_weighted_velocity_sum,
)
from .graph import (
    Graph,
    SpectralInfo,
    assert_connected,
    complete_graph,
    complete_graph_laplacian,
    consensus_quadratic_form,
    laplacian,
    path_graph,
    ring_graph,
    spectrum,
)
from .integrator import (
    IntegratorConfig,
    Trajectory,
    build_time_grid,
    integrate,
    reference_integrate,
    simulate,
)
from .objective import (
    ModelSet,
    ObjectiveModel,
    QuadraticObjective,
    convexity_bounds,
    global_minimizer,
    strong_convexity_property_check,
)
from .presets import PAPER_SEC4, preset_config, preset_dict, preset_names
from .runner import RunReport, RunResult, run, write_trajectory_csv
from .scaling import ScalingSpec, StageSchedule, envelope, rho, rho_ratio

__version__ = "0.1.0"
