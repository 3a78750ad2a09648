"""Cloning of coherent states from phase-conjugate input pairs.

A simulation toolkit for the linear-optics cloning machines that take n
replicas of a coherent state together with n phase-conjugate replicas and
produce m clones (plus m anticlones when an EPR ancilla makes the machine
reversible).  Three independent computation paths -- exact Heisenberg
operator algebra, Gaussian phase-space propagation, and seeded Wigner
Monte Carlo -- are checked against each other and against the closed-form
variance and fidelity laws.
"""

from .circuits import (
    BeamSplitter,
    Circuit,
    CircuitError,
    CircuitFragment,
    ClonerParams,
    Distribute,
    FeedForward,
    Homodyne,
    build_concentration,
    build_pci_cloner,
    build_reversible_cloner,
    build_standard_cloner_reference,
    reflect_amplitude,
    solve_epr_gain,
    solve_gain,
    solve_reflectivity,
)
from .cloning import (
    CloneReport,
    PciComparison,
    clone_report,
    compare_pci_vs_standard,
    fidelity_general,
    fidelity_unity_gain,
    ref_anticlone_fidelity,
    ref_anticlone_variance,
    ref_clone_fidelity,
    ref_clone_variance,
)
from .engines import (
    EngineMoments,
    HeisenbergResult,
    PhaseSpaceResult,
    run_heisenberg,
    run_phase_space,
)
from .gaussian import (
    GaussianState,
    SymplecticMap,
    apply_symplectic,
    beamsplitter_map,
    coherent_state,
    condition_on_homodyne,
    epr_state,
    mixing_map,
    orthogonal_map,
    reduced_state,
    sample_homodyne_distribution,
    symplectic_eigenvalues,
    symplectic_form,
    vacuum_state,
)
from .heisenberg import (
    InputCatalog,
    InputSpec,
    ModeExpansion,
    Moments,
    QuadratureExpansion,
    beam_split,
    coherent_input,
    commutator_form,
    conjugate_input,
    cross_covariance,
    distribute,
    distribution_matrix,
    epr_input,
    evaluate_moments,
    feed_forward,
    homodyne_expansion,
    vacuum_input,
)
from .montecarlo import (
    McConfig,
    McEstimate,
    McOutput,
    estimate_fidelity_ci,
    run_monte_carlo,
)
from .verification import CheckResult, run_all_checks

__version__ = "0.1.0"

__all__ = [
    "BeamSplitter",
    "Circuit",
    "CircuitError",
    "CircuitFragment",
    "ClonerParams",
    "CloneReport",
    "CheckResult",
    "Distribute",
    "EngineMoments",
    "FeedForward",
    "GaussianState",
    "HeisenbergResult",
    "Homodyne",
    "InputCatalog",
    "InputSpec",
    "McConfig",
    "McEstimate",
    "McOutput",
    "ModeExpansion",
    "Moments",
    "PciComparison",
    "PhaseSpaceResult",
    "QuadratureExpansion",
    "SymplecticMap",
    "apply_symplectic",
    "beam_split",
    "beamsplitter_map",
    "build_concentration",
    "build_pci_cloner",
    "build_reversible_cloner",
    "build_standard_cloner_reference",
    "clone_report",
    "coherent_input",
    "coherent_state",
    "commutator_form",
    "compare_pci_vs_standard",
    "condition_on_homodyne",
    "conjugate_input",
    "cross_covariance",
    "distribute",
    "distribution_matrix",
    "epr_input",
    "epr_state",
    "estimate_fidelity_ci",
    "evaluate_moments",
    "feed_forward",
    "fidelity_general",
    "fidelity_unity_gain",
    "homodyne_expansion",
    "mixing_map",
    "orthogonal_map",
    "reduced_state",
    "ref_anticlone_fidelity",
    "ref_anticlone_variance",
    "ref_clone_fidelity",
    "ref_clone_variance",
    "reflect_amplitude",
    "run_all_checks",
    "run_heisenberg",
    "run_monte_carlo",
    "run_phase_space",
    "sample_homodyne_distribution",
    "solve_epr_gain",
    "solve_gain",
    "solve_reflectivity",
    "symplectic_eigenvalues",
    "symplectic_form",
    "vacuum_input",
    "vacuum_state",
]
