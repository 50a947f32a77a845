"""Upper bounds and exact optima for unambiguous discrimination of pure states."""

from .closed_forms import (
    ClosedFormResult,
    applicable_forms,
    three_state_invariant_phase,
    three_state_one_orthogonal,
    three_state_symmetric_real,
    two_state_bound,
)
from .estimators import OptimalUSD, PhaseBound
from .phase_bound import (
    BoundResult,
    MinimizerConfig,
    minimize_bound,
    norm_objective,
    objective,
    objective_gradient,
)
from .schmidt import (
    EtaFamily,
    SchmidtSpectrum,
    check_phase_shift_equivalence,
    conversion_probability,
    eta_family,
    minimize_eta_norm,
    schmidt_spectrum,
    vidal_probability,
)
from .solver import (
    GammaPoint,
    SolutionClass,
    SolutionLabel,
    SolverConfig,
    SolverResult,
    brute_force_oracle,
    classify,
    reconstruct_povm,
    sigma_min,
    sigma_min_gradient,
    solve_optimal,
)
from .statesets import (
    GramData,
    InstanceError,
    StateSet,
    gram,
    load_stateset,
    make_stateset,
    parse_stateset,
)

__version__ = "0.1.0"
