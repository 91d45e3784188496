"""cliffordlab: a finite-mode fermionic laboratory.

Exact matrix models of n fermionic modes (n <= 12): the field algebra with
its trace, the standard form with its positive cone, relative entropy and
spectral tail diagnostics, energy and Dirichlet forms, logarithmic Sobolev
certificates with ground-state degeneracy bounds, Gibbs perturbation theory,
and a physical-Hamiltonian pipeline.  The HTTP service lives in
``cliffordlab.service`` and is imported only on demand.
"""

from ._version import __version__
from .algebra import (
    CliffordElement,
    duality_transform,
    hilbert_inner,
    trace_product,
)
from .entropy import (
    RNOperator,
    SequenceDiagnostics,
    convergence_theorems,
    default_k_grid,
    entropy_sublevel_separation,
    entropy_tail_bound_check,
    relative_entropy,
    relative_vanishing,
    rn_operator,
    support_entropy_bound,
    uniform_integrability,
)
from .fock import (
    FockOperator,
    annihilation_operator,
    annihilator,
    creation_operator,
    creator,
    field_operator,
    gamma,
    number_operator,
    parity,
    second_quantize,
)
from .forms import (
    DerivationStack,
    EnergyForm,
    check_beurling_deny,
    check_leibniz,
    check_markovian,
    check_positivity_preserving,
    check_real,
    clifford_dirichlet_form,
    cone_escape_form,
    degenerate_number_form,
    dirichlet_report,
    number_form,
    second_quantized_form,
)
from .lsi import (
    GroundStateReport,
    LsiCertificate,
    deficiency,
    degeneracy_bound_check,
    ground_state,
    lsi_best_constants,
    lsi_check,
    measure_gamma,
    nondegeneracy_criterion,
)
from .modes import MAX_MODES, ModeSpace
from .perturbation import (
    OneParticleOperator,
    PerturbationReport,
    closed_form_c_beta,
    gibbs_state,
    log_partition,
    number_domination_margin,
    perturbed_form,
    perturbed_lsi_and_stability,
    physical_hamiltonian,
    trace_norm_distance,
    variational_c_beta,
)
from .runner import (
    RunResult,
    car_identity_suite,
    element_from_spec,
    execute,
    form_from_spec,
    random_interaction,
    random_one_particle,
    validate_config,
    write_payload,
)
from .sampling import (
    constant_family,
    corner_cone_vectors,
    escaping_mass_family,
    random_cone_vector,
    random_element,
    random_real_vector,
    random_selfadjoint,
    random_state,
    scale_family,
    sub_rng,
    two_point_state,
)
from .standard_form import (
    ConePair,
    L2Vector,
    State,
    cone_defect,
    cone_membership,
    conjugation,
    left_action,
    modulus,
    positive_decomposition,
    right_action,
    standard_form_axioms,
    state_vector,
    support_projection,
    trace_vector,
    trace_wedge,
    wedge,
)

__all__ = [
    "__version__",
    "MAX_MODES",
    "ModeSpace",
    "FockOperator",
    "annihilator",
    "creator",
    "creation_operator",
    "annihilation_operator",
    "field_operator",
    "number_operator",
    "second_quantize",
    "gamma",
    "parity",
    "CliffordElement",
    "trace_product",
    "hilbert_inner",
    "duality_transform",
    "L2Vector",
    "ConePair",
    "State",
    "trace_vector",
    "conjugation",
    "left_action",
    "right_action",
    "cone_defect",
    "cone_membership",
    "positive_decomposition",
    "modulus",
    "wedge",
    "trace_wedge",
    "state_vector",
    "support_projection",
    "standard_form_axioms",
    "sub_rng",
    "random_element",
    "random_selfadjoint",
    "random_state",
    "random_cone_vector",
    "random_real_vector",
    "corner_cone_vectors",
    "two_point_state",
    "scale_family",
    "constant_family",
    "escaping_mass_family",
    "RNOperator",
    "rn_operator",
    "relative_entropy",
    "support_entropy_bound",
    "entropy_tail_bound_check",
    "SequenceDiagnostics",
    "relative_vanishing",
    "uniform_integrability",
    "convergence_theorems",
    "entropy_sublevel_separation",
    "default_k_grid",
    "EnergyForm",
    "second_quantized_form",
    "number_form",
    "clifford_dirichlet_form",
    "degenerate_number_form",
    "cone_escape_form",
    "DerivationStack",
    "check_real",
    "check_positivity_preserving",
    "check_beurling_deny",
    "check_markovian",
    "check_leibniz",
    "dirichlet_report",
    "LsiCertificate",
    "lsi_check",
    "lsi_best_constants",
    "measure_gamma",
    "deficiency",
    "GroundStateReport",
    "ground_state",
    "degeneracy_bound_check",
    "nondegeneracy_criterion",
    "gibbs_state",
    "log_partition",
    "closed_form_c_beta",
    "variational_c_beta",
    "perturbed_form",
    "PerturbationReport",
    "perturbed_lsi_and_stability",
    "OneParticleOperator",
    "number_domination_margin",
    "physical_hamiltonian",
    "trace_norm_distance",
    "RunResult",
    "car_identity_suite",
    "element_from_spec",
    "execute",
    "form_from_spec",
    "random_interaction",
    "random_one_particle",
    "validate_config",
    "write_payload",
]
