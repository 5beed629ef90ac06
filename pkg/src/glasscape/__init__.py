"""glasscape: analytic landscape theory of mixed spherical spin glasses.

Complexity surfaces, pair complexity and Condition M, band free energies
and phase quantities, plus desk-scale Monte Carlo verification of the
geometric picture (ground state, Kac-Rice counts, 1-RSB bands,
temperature chaos).
"""

__version__ = "0.1.0"

from .mixture import (
    Classification,
    Mixture,
    MixtureKind,
    classify,
    load_mixture,
    norm_distance,
    parse_mixture_text,
    perturb_pure,
)
from .complexity import (
    GroundStateSolution,
    e_infinity,
    e0_pure,
    ground_state_solution,
    sup_theta_x,
    theta,
    theta_pure,
)
from .paircomplexity import (
    CondMVerdict,
    PairCovariance,
    assemble,
    check_condition_m,
    psi,
    psi0,
)
from .semicircle import density, goe_rate_i1, omega
from .thermo import (
    PhaseSummary,
    alpha_k,
    free_energy,
    gap,
    lambda_F_2minus,
    lambda_Z,
    phase_summary,
    q_c,
    q_star,
)
from .hamiltonian import HamiltonianInstance, evaluate, sample_hamiltonian
from .montecarlo import (
    CriticalPoint,
    OverlapHistogram,
    chaos_experiment,
    crt_count_experiment,
    find_q_critical,
    gibbs_experiment,
    goe_check,
    track_critical_path,
)
