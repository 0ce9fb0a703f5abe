"""Gaussian-state toolkit for conditional entropy power inequalities.

Covariance matrices follow the quadrature ordering ``(Q1, P1, ..., Qn, Pn)``
with the vacuum normalised to the identity. Entropies are in nats.
"""

from .capacity import (
    ChannelParams,
    capacity_record,
    capacity_sweep,
    epi_capacity_bound,
    holevo_werner_capacity,
    naive_capacity_bound,
)
from .channels import (
    apply_symplectic,
    beam_splitter_by_conjugation,
    beam_splitter_combine,
    beam_splitter_matrix,
    beam_splitter_stabilized,
    diffuse,
    displace,
    mutual_information,
)
from .epi import (
    EpiInstance,
    PerturbationReport,
    asymptotic_residual,
    delta_trajectory,
    epi_gap,
    epi_sweep,
    fisher_combination,
    perturb_check_first_infinite,
    perturb_check_first_infinitesimal,
    perturb_check_zeroth,
    random_epi_instance,
)
from .exceptions import DecompositionError, InvariantViolation, PreconditionError, PureModeError, ValidationError
from .fisher import (
    FisherReport,
    conditional_fisher,
    debruijn_residual,
    debruijn_sweep,
    entropy_rate,
    fisher_direction,
    fisher_total,
    relative_entropy_displaced,
)
from .state import (
    GaussianState,
    conditional_entropy,
    entropy,
    g_function,
    inverse_temperature,
    mean_photon_number,
    purify,
    reduce,
    tensor,
    thermal,
    two_mode_squeezed,
    vacuum,
)
from .symplectic import (
    random_gaussian_covariance,
    random_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_gap,
    validate_covariance,
    williamson,
)

__version__ = "0.1.0"
