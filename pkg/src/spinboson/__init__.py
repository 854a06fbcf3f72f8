"""Exact coherent-product decoherence dynamics for spin-boson registers.

Library layout:

* bath      - spectral weight, thermal factors, quadrature grids, Hurwitz
              zeta and the closed-form stationary dissipative factor
* coherent  - displacement trajectories, Gamma/Phi/Theta, eta, reduced
              register state, overlap read-out probabilities
* registers - the three register families and the decoherence-free
              propagation condition checkers
* pulses    - bang-bang (standard and symmetrized Carr-Purcell) dynamics,
              stroboscopic recurrences, closed forms, revival diagnostics
* fock      - truncated-Fock brute-force oracle for eta
* cli       - deterministic experiment runner (CSV/JSON artifacts)

Units: hbar = k_B = omega_c = 1 throughout; see bath module docstring.
"""

from .bath import (
    DIVERGENT,
    BathSpec,
    ConvergenceVerdict,
    FrequencyGrid,
    bath_integral,
    classify_convergence,
    gamma0_closed_form,
    hurwitz_zeta2,
    is_divergent,
    thermal_coth,
    weight,
)
from .coherent import (
    BranchProfile,
    CoherenceTrace,
    DisplacementTrajectory,
    delta_theta,
    eta,
    evolve_displacement,
    gamma_dissipative,
    gamma_rate,
    phi_phase,
    readout_probability,
    reduced_density_matrix,
    theta_phase,
)
from .fock import (
    DiscreteBranch,
    FockOracleConfig,
    OracleResult,
    discrete_eta,
    fock_oracle_eta,
)
from .pulses import (
    PulseSchedule,
    StroboscopicState,
    displacement_with_pulses,
    eta_readout,
    gamma_continuous,
    gamma_continuous_many,
    gamma_strob,
    gamma_sym,
    revival_diagnostics,
    strobe_closed_form,
    strobe_step,
)
from .registers import (
    ConditionReport,
    IndividualLinear,
    SingleQubit,
    WeakCollective,
    branch_profiles,
    check_energy_shift_condition,
    check_phasing_condition,
    check_quasi_unitary_conditions,
    cyclic_permutation,
    energy_shift,
    full_df_report,
    gamma0_pair,
    mirror_permutation,
)

__version__ = "0.1.0"
