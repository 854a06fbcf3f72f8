"""Coherent-product dynamics: displacements, phase/dissipative factors, eta.

Every decoherence-free-subspace branch drags a displaced Gaussian bath factor
along with it.  A branch is described by its normalized coupling m(x, sigma)
and the initial normalized displacement b0(x, sigma), defined as the offset
from the stationary point, so b0 = 0 means the bath factor is an eigenstate
of the branch Hamiltonian.  Free evolution is a circle around the stationary
point,

    b(x, sigma, tau) = b0(x, sigma) * exp(-i*x*tau) - m(x, sigma),

and b(tau=0) recovers the physical initial displacement b0 - m.

Between two branches A, B the reduced register matrix element is multiplied
by the bath correlation

    eta(tau) = exp(i*[Theta_A - Theta_B - Phi]) * exp(-Gamma),

with the calibrated mode-sum convention (see bath.py for the anchors):

    Gamma = (1/4) int w_d(x) coth(x/2theta) <|b_A - b_B|^2>_sigma dx
    Phi   = (i/2) int w_d(x) <b_A b_B* - b_A* b_B>_sigma dx
    Theta = -(1/2) int_0^tau dtau' int w_d(x) <m* b + m b*>_sigma dx

The tau' integral in Theta is done in closed form (free evolution integrates
exactly); only the frequency integral is numerical.  A divergent Gamma means
the two displaced vacua are unitarily inequivalent and maps to eta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .bath import (
    DIVERGENT,
    BathSpec,
    FrequencyGrid,
    classify_convergence,
    is_divergent,
    thermal_coth,
    weight,
)

__all__ = [
    "BranchProfile",
    "DisplacementTrajectory",
    "CoherenceTrace",
    "evolve_displacement",
    "gamma_dissipative",
    "gamma_rate",
    "phi_phase",
    "theta_phase",
    "delta_theta",
    "eta",
    "reduced_density_matrix",
    "readout_probability",
]

# Net prefactor of the Gamma integral in the w_d convention.  Fixed (not 1/2)
# by the two paper anchors: the stationary single-qubit pair at d=3, theta=0
# must give Gamma0 = lam, and free decay at d=1, theta=0 must give
# lam*ln(1+tau^2).  Both anchors pin the same value.
PAIR_CALIBRATION = 0.25

# |constant|^2 below this counts as an exact zero when deciding the
# low-frequency exponent of a pair integrand.
_LIMIT_TOL = 1e-24

ProfileFunc = Callable[[np.ndarray, object], np.ndarray]


def _as_func(value: Union[complex, ProfileFunc]) -> ProfileFunc:
    if callable(value):
        return value
    const = complex(value)

    def _const(x, sigma, _c=const):
        return np.full(np.shape(x), _c, dtype=complex)

    return _const


@dataclass(frozen=True)
class BranchProfile:
    """One DFS branch: normalized coupling and initial displacement offset.

    m, b0 : complex constants or callables (x_array, sigma) -> complex array.
    directions / dir_weights : the discrete degenerate-direction set sigma
        and its normalized averaging weights.  1-d baths use sigma = (+1, -1)
        with weights (1/2, 1/2); isotropic 3-d couplings use a trivial set.
    m_limits, b0_limits : x -> 0 limits per direction, used for the analytic
        convergence classification.  Default: probed at x = 1e-9, which is
        exact for the bounded, continuous couplings in scope.
    """

    label: str
    m: Union[complex, ProfileFunc]
    b0: Union[complex, ProfileFunc] = 0.0
    directions: tuple = (0,)
    dir_weights: tuple = (1.0,)
    m_limits: tuple | None = None
    b0_limits: tuple | None = None

    def __post_init__(self):
        if len(self.directions) != len(self.dir_weights):
            raise ValueError("directions and dir_weights must align")
        if abs(sum(self.dir_weights) - 1.0) > 1e-12:
            raise ValueError("direction weights must sum to 1")
        object.__setattr__(self, "m", _as_func(self.m))
        object.__setattr__(self, "b0", _as_func(self.b0))
        if self.m_limits is None:
            probe = np.array([1e-9])
            lims = tuple(complex(self.m(probe, s)[0]) for s in self.directions)
            object.__setattr__(self, "m_limits", lims)
        if self.b0_limits is None:
            probe = np.array([1e-9])
            lims = tuple(complex(self.b0(probe, s)[0]) for s in self.directions)
            object.__setattr__(self, "b0_limits", lims)

    def m_array(self, x: np.ndarray) -> np.ndarray:
        """Coupling sampled per direction, shape (n_sigma, n_x)."""
        return np.stack([np.asarray(self.m(x, s), dtype=complex) for s in self.directions])

    def b0_array(self, x: np.ndarray) -> np.ndarray:
        return np.stack([np.asarray(self.b0(x, s), dtype=complex) for s in self.directions])

    def displacement(self, x: np.ndarray, tau: float) -> np.ndarray:
        """b(x, sigma, tau) = b0*exp(-i*x*tau) - m, shape (n_sigma, n_x)."""
        phase = np.exp(-1j * np.asarray(x, dtype=float) * tau)
        return self.b0_array(x) * phase[None, :] - self.m_array(x)

    def dir_average(self, values: np.ndarray) -> np.ndarray:
        """<.>_sigma over axis 0."""
        w = np.asarray(self.dir_weights, dtype=float)
        return np.tensordot(w, values, axes=(0, 0))


@dataclass(frozen=True)
class DisplacementTrajectory:
    """Branch displacement field frozen at one time."""

    branch: BranchProfile
    tau: float

    def b(self, x: np.ndarray) -> np.ndarray:
        return self.branch.displacement(np.asarray(x, dtype=float), self.tau)


def evolve_displacement(branch: BranchProfile, tau: float) -> DisplacementTrajectory:
    """Free displacement evolution; stationary branches (b0 = 0) stay at -m."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return DisplacementTrajectory(branch=branch, tau=float(tau))


def _check_pair_directions(brA: BranchProfile, brB: BranchProfile):
    if brA.directions != brB.directions or brA.dir_weights != brB.dir_weights:
        raise ValueError("branch pair must share the same direction set")


def _pair_exponent(brA: BranchProfile, brB: BranchProfile) -> int:
    """Low-frequency exponent of <|b_A - b_B|^2>_sigma, any tau.

    The x -> 0 limit of b_A - b_B is (b0_A - b0_B) - (m_A - m_B) regardless
    of tau (the rotating phase tends to 1).  Nonzero limit: exponent 0;
    otherwise the next order is generically O(x), exponent 2.
    """
    w = np.asarray(brA.dir_weights, dtype=float)
    const = np.array(
        [
            (brA.b0_limits[i] - brB.b0_limits[i]) - (brA.m_limits[i] - brB.m_limits[i])
            for i in range(len(brA.directions))
        ]
    )
    if float(np.dot(w, np.abs(const) ** 2)) > _LIMIT_TOL:
        return 0
    return 2


def gamma_dissipative(
    brA: BranchProfile,
    brB: BranchProfile,
    tau: float,
    bath: BathSpec,
    grid: FrequencyGrid,
) -> float:
    """Dissipative factor Gamma(tau) >= 0 for a branch pair; inf if divergent."""
    _check_pair_directions(brA, brB)
    verdict = classify_convergence(_pair_exponent(brA, brB), bath, with_coth=True)
    if not verdict.finite:
        return DIVERGENT
    x = grid.nodes
    diff = brA.displacement(x, tau) - brB.displacement(x, tau)
    avg = brA.dir_average(np.abs(diff) ** 2)
    integrand = weight(x, bath) * thermal_coth(x, bath.theta) * avg
    return PAIR_CALIBRATION * grid.integrate(integrand)


def gamma_rate(
    brA: BranchProfile,
    brB: BranchProfile,
    tau: float,
    bath: BathSpec,
    grid: FrequencyGrid,
) -> float:
    """Analytic dGamma/dtau at a free-evolution time.

    d|b_A - b_B|^2/dtau = -2x*Im[(b_A - b_B) * conj(m_A - m_B)], so the rate
    carries one extra power of x relative to Gamma itself.
    """
    _check_pair_directions(brA, brB)
    verdict = classify_convergence(_pair_exponent(brA, brB), bath, with_coth=True)
    if not verdict.finite:
        return DIVERGENT
    x = grid.nodes
    diff = brA.displacement(x, tau) - brB.displacement(x, tau)
    dm = brA.m_array(x) - brB.m_array(x)
    avg = brA.dir_average(np.imag(diff * np.conj(dm)))
    integrand = weight(x, bath) * thermal_coth(x, bath.theta) * x * avg
    return -2.0 * PAIR_CALIBRATION * grid.integrate(integrand)


def phi_phase(
    brA: BranchProfile,
    brB: BranchProfile,
    tau: float,
    bath: BathSpec,
    grid: FrequencyGrid,
) -> float:
    """Phase factor Phi(tau) = (i/2) int w_d <b_A b_B* - b_A* b_B>_sigma dx.

    Computed through the manifestly real form -Im(b_A conj(b_B)), so the
    result carries no spurious imaginary part.  Divergence (possible only
    when Gamma also diverges) returns inf.
    """
    _check_pair_directions(brA, brB)
    w = np.asarray(brA.dir_weights, dtype=float)
    const = np.array(
        [
            (brA.b0_limits[i] - brA.m_limits[i]) * np.conj(brB.b0_limits[i] - brB.m_limits[i])
            for i in range(len(brA.directions))
        ]
    )
    exponent = 0 if abs(float(np.dot(w, np.imag(const)))) > 1e-12 else 1
    verdict = classify_convergence(exponent, bath, with_coth=False)
    if not verdict.finite:
        return DIVERGENT
    x = grid.nodes
    bA = brA.displacement(x, tau)
    bB = brB.displacement(x, tau)
    avg = brA.dir_average(-np.imag(bA * np.conj(bB)))
    return grid.integrate(weight(x, bath) * avg)


def _theta_q0(branch: BranchProfile) -> float:
    """x -> 0 constant of the (time-integrated) Theta integrand / tau."""
    w = np.asarray(branch.dir_weights, dtype=float)
    vals = np.array(
        [
            abs(branch.m_limits[i]) ** 2 - (np.conj(branch.m_limits[i]) * branch.b0_limits[i]).real
            for i in range(len(branch.directions))
        ]
    )
    return float(np.dot(w, vals))


def _theta_integrand(branch: BranchProfile, tau: float, x: np.ndarray) -> np.ndarray:
    """Per-direction-averaged Theta integrand with the tau' integral closed.

    Theta(tau) = int w_d(x) * [ <|m|^2> tau
                  - <Re(m* b0) sin(x tau) + Im(m* b0) (1 - cos(x tau))>/x ] dx
    """
    m = branch.m_array(x)
    b0 = branch.b0_array(x)
    mb0 = np.conj(m) * b0
    part = np.abs(m) ** 2 * tau - (
        mb0.real * np.sin(x * tau)[None, :] + mb0.imag * (1.0 - np.cos(x * tau))[None, :]
    ) / x[None, :]
    return branch.dir_average(part)


def theta_phase(
    branch: BranchProfile, tau: float, bath: BathSpec, grid: FrequencyGrid
) -> float:
    """Branch phase Theta(tau); Theta = Omega0*tau for stationary branches.

    Finite whenever the energy shift Omega0 is; the d = 1 divergence of an
    individual branch phase (constant |m|^2 at low x) returns inf.  Pair
    differences that cancel pointwise should use delta_theta instead.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    exponent = 0 if abs(_theta_q0(branch)) > 1e-12 else 1
    verdict = classify_convergence(exponent, bath, with_coth=False)
    if not verdict.finite:
        return DIVERGENT
    x = grid.nodes
    return grid.integrate(weight(x, bath) * _theta_integrand(branch, tau, x))


def delta_theta(
    brA: BranchProfile,
    brB: BranchProfile,
    tau: float,
    bath: BathSpec,
    grid: FrequencyGrid,
) -> float:
    """Theta_A(tau) - Theta_B(tau) integrated on the subtracted integrand.

    Pointwise cancellation (equal-|m| branches, symmetric pairs) keeps the
    difference finite even where the individual phases diverge.
    """
    _check_pair_directions(brA, brB)
    q0 = _theta_q0(brA) - _theta_q0(brB)
    exponent = 0 if abs(q0) > 1e-12 else 1
    verdict = classify_convergence(exponent, bath, with_coth=False)
    if not verdict.finite:
        return DIVERGENT
    x = grid.nodes
    diff = _theta_integrand(brA, tau, x) - _theta_integrand(brB, tau, x)
    return grid.integrate(weight(x, bath) * diff)


def eta(
    brA: BranchProfile,
    brB: BranchProfile,
    tau: float,
    bath: BathSpec,
    grid: FrequencyGrid,
) -> complex:
    """Bath correlation eta = exp(i*[dTheta - Phi]) * exp(-Gamma).

    A divergent Gamma (unitarily inequivalent vacua) gives exactly 0.
    """
    g = gamma_dissipative(brA, brB, tau, bath, grid)
    if is_divergent(g):
        return 0.0 + 0.0j
    dth = delta_theta(brA, brB, tau, bath, grid)
    ph = phi_phase(brA, brB, tau, bath, grid)
    return complex(np.exp(1j * (dth - ph)) * math.exp(-g))


@dataclass(frozen=True)
class CoherenceTrace:
    """Time series of Gamma, Phi, dTheta and eta for one branch pair.

    Invariants: |eta| = exp(-gamma) and arg(eta) = dtheta - phi by
    construction at every sample.
    """

    times: np.ndarray
    gamma: np.ndarray
    phi: np.ndarray
    dtheta: np.ndarray
    eta: np.ndarray

    CSV_COLUMNS = ("tau", "gamma", "phi", "dtheta", "eta_re", "eta_im", "eta_abs")

    @classmethod
    def compute(
        cls,
        brA: BranchProfile,
        brB: BranchProfile,
        times: Sequence[float],
        bath: BathSpec,
        grid: FrequencyGrid,
    ) -> "CoherenceTrace":
        times = np.asarray(times, dtype=float)
        n = times.size
        gam = np.empty(n)
        phi = np.empty(n)
        dth = np.empty(n)
        for k, t in enumerate(times):
            gam[k] = gamma_dissipative(brA, brB, t, bath, grid)
            if is_divergent(gam[k]):
                phi[k] = 0.0
                dth[k] = 0.0
            else:
                phi[k] = phi_phase(brA, brB, t, bath, grid)
                dth[k] = delta_theta(brA, brB, t, bath, grid)
        et = np.exp(1j * (dth - phi)) * np.exp(-gam)
        return cls(times=times, gamma=gam, phi=phi, dtheta=dth, eta=et)

    def to_csv(self, stream) -> None:
        """Fixed column order, 17 significant digits (round-trip exact)."""
        stream.write(",".join(self.CSV_COLUMNS) + "\n")
        for k in range(self.times.size):
            row = (
                self.times[k],
                self.gamma[k],
                self.phi[k],
                self.dtheta[k],
                self.eta[k].real,
                self.eta[k].imag,
                abs(self.eta[k]),
            )
            stream.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _check_hermitian(mat: np.ndarray, name: str, tol: float = 1e-10):
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(mat))))
    if float(np.max(np.abs(mat - mat.conj().T))) > tol * scale:
        raise ValueError(f"{name} must be hermitian")


def reduced_density_matrix(
    rho_param: np.ndarray,
    eta_matrix: np.ndarray,
    phases: Sequence[float],
    tau: float,
) -> np.ndarray:
    """Assemble rho^R(tau)_AB = exp(-i*(phi_A - phi_B)*tau) * eta_AB * rho_AB.

    rho_param is the register parametrization matrix (hermitian, unit trace,
    PSD); eta_matrix is hermitian with unit diagonal.  Diagonal entries and
    the trace are preserved exactly.  When the eta matrix is a Gram-type
    matrix (PSD), the output is PSD by the Schur product theorem.
    """
    rho = np.asarray(rho_param, dtype=complex)
    em = np.asarray(eta_matrix, dtype=complex)
    _check_hermitian(rho, "rho_param")
    _check_hermitian(em, "eta_matrix")
    if rho.shape != em.shape:
        raise ValueError("rho_param and eta_matrix must have the same shape")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise ValueError("rho_param must have unit trace")
    if float(np.min(np.linalg.eigvalsh(rho))) < -1e-10:
        raise ValueError("rho_param must be positive semidefinite")
    if float(np.max(np.abs(np.diag(em) - 1.0))) > 1e-10:
        raise ValueError("eta_matrix must have unit diagonal")
    ph = np.asarray(phases, dtype=float)
    if ph.shape != (rho.shape[0],):
        raise ValueError("one unperturbed phase per branch label is required")
    u = np.exp(-1j * ph * tau)
    return (u[:, None] * u.conj()[None, :]) * em * rho


def readout_probability(
    overlap: complex, basis_phase: str = "real", normalized: bool = True
) -> float:
    """Probability of the two-branch overlap read-out test state.

    basis_phase "real" projects on (|a> + |b>)/sqrt(2) and measures
    Re<beta_1|beta_2>; "imaginary" projects on (|a> + i|b>)/sqrt(2) and
    measures Im<beta_1|beta_2>.  With the explicitly normalized test state
    the probability is p = 1/2 + (1/2)*Re (resp. Im) of the overlap, always
    inside [0, 1].  normalized=False reproduces the literature form
    p = 1/2 + Re(overlap), which can leave [0, 1] for |overlap| > 1/2; it is
    exposed for comparison and deliberately not range-checked.
    """
    ov = complex(overlap)
    if abs(ov) > 1.0 + 1e-12:
        raise ValueError("|overlap| must not exceed 1")
    if basis_phase == "real":
        part = ov.real
    elif basis_phase == "imaginary":
        part = ov.imag
    else:
        raise ValueError("basis_phase must be 'real' or 'imaginary'")
    if not normalized:
        return 0.5 + part
    p = 0.5 + 0.5 * part
    if p < 0.0:
        if p < -1e-12:
            raise ValueError("probability below range beyond floating error")
        p = 0.0
    elif p > 1.0:
        if p > 1.0 + 1e-12:
            raise ValueError("probability above range beyond floating error")
        p = 1.0
    return p
