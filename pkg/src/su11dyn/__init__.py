"""Exactly solvable time-dependent su(1,1) two-level dynamics with a numerical oracle."""

__version__ = "0.1.0"

from .closed_forms import (
    CONVENTIONS,
    KAPPA_COUPLING,
    TAU_COUPLING,
    Example1Model,
    NuFamilyModel,
    Regime,
    classify_regime_and_spectrum,
    ex1_gamma,
    ex1_solution,
    ex2_hamiltonian,
    ex2_model,
    ex2_omega_big,
    ex2_solution,
    fig2_preset,
    nu_phi,
    nu_solution,
    nu_x_function,
    regime_of,
)
from .core import (
    RHO_MINUS,
    CayleyKlein,
    DensityMatrix2,
    PtModel,
    SpectrumKind,
    Su11Hamiltonian,
    assemble_hamiltonian,
    check_su11_membership,
    constant,
    eigenvalues,
    evolve_density,
    expectations,
    is_pseudo_hermitian,
    spectrum_kind,
    transition_probability,
)
from .errors import (
    ConfigError,
    DegenerateCouplingError,
    DomainError,
    NormalizationError,
    SingularityError,
    SolvabilityError,
    StiffnessError,
    Su11Error,
    ToleranceError,
)
from .oracle import (
    ComparisonReport,
    PropagationResult,
    compare_solutions,
    integrate_schrodinger,
    nonlinear_residual,
    nonlinear_rhs,
)
from .scenarios import (
    FieldTrajectory,
    WaveguideParams,
    propagate_fields,
    sink_source_model,
    waveguide_coupling,
    waveguide_transform,
)
from .solver import SolvableModel, ThetaSchedule, x_function
