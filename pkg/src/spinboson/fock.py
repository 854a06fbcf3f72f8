"""Truncated-Fock brute-force oracle for the bath correlation eta.

For a small discrete mode set the correlation
eta = exp(i*dTheta) * Tr[U_A rho_T U_B^dagger] is evaluated literally:
per-mode displacement operators are matrix exponentials on a truncated Fock
basis, the thermal state is the truncated (renormalized) Gibbs product, and
the trace factorizes exactly over tensor factors, so each mode contributes
one dense matrix trace.  The analytic Theta phase multiplies both the oracle
and the discrete-sum reference, which checks the Gamma and Phi content of
the closed-form eta against raw operator algebra.

Discrete conventions mirror the continuum ones: mode q has frequency x_q,
coupling magnitude g_q, per-branch normalized coupling m_q and displacement
offset b0_q, so the physical displacement is

    beta_q(tau) = (g_q / x_q) * (b0_q * exp(-i*x_q*tau) - m_q),

and the discrete sums read

    Gamma  = (1/2) sum_q |beta_A - beta_B|^2 coth(x_q / 2 theta)
    Phi    = -sum_q Im(beta_A conj(beta_B))
    Theta  = sum_q (g_q^2/x_q) [ |m_q|^2 tau
             - (Re(m* b0) sin(x tau) + Im(m* b0)(1 - cos(x tau))) / x_q ].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import expm

from .bath import thermal_coth

__all__ = [
    "FockOracleConfig",
    "DiscreteBranch",
    "OracleResult",
    "discrete_eta",
    "fock_oracle_eta",
    "displacement_matrix",
    "thermal_state_matrix",
]

MAX_MODES = 4
# occupation of the highest kept level in any mode must fall below this
TRUNCATION_TOL = 1e-10


@dataclass(frozen=True)
class FockOracleConfig:
    """Discrete mode set: frequencies x_q > 0, coupling magnitudes g_q >= 0,
    temperature theta and the per-mode Fock truncation n_max (None: choose
    automatically from the thermal tail and the displacement magnitude)."""

    mode_freqs: tuple
    mode_weights: tuple
    theta: float = 0.0
    n_max: int | None = None

    def __post_init__(self):
        freqs = tuple(float(v) for v in self.mode_freqs)
        wts = tuple(float(v) for v in self.mode_weights)
        if not 1 <= len(freqs) <= MAX_MODES:
            raise ValueError(f"need between 1 and {MAX_MODES} modes")
        if len(wts) != len(freqs):
            raise ValueError("one coupling magnitude per mode is required")
        if any(f <= 0 for f in freqs):
            raise ValueError("mode frequencies must be positive")
        if any(w < 0 for w in wts):
            raise ValueError("coupling magnitudes must be >= 0")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        object.__setattr__(self, "mode_freqs", freqs)
        object.__setattr__(self, "mode_weights", wts)

    @property
    def n_modes(self) -> int:
        return len(self.mode_freqs)

    def auto_n_max(self, branches: Sequence["DiscreteBranch"]) -> int:
        """Truncation from the thermal tail, exp(-x*n/theta) < tol, and the
        coherent support of the largest displacement."""
        n_thermal = 0
        if self.theta > 0:
            x_min = min(self.mode_freqs)
            n_thermal = int(math.ceil(-self.theta / x_min * math.log(TRUNCATION_TOL)))
        beta_max = 0.0
        for br in branches:
            for q in range(self.n_modes):
                reach = (abs(br.b0[q]) + abs(br.m[q])) * self.mode_weights[q] / self.mode_freqs[q]
                beta_max = max(beta_max, reach)
        n_coh = int(math.ceil(beta_max**2 + 10.0 * beta_max + 10.0))
        return max(1, n_thermal + n_coh)


@dataclass(frozen=True)
class DiscreteBranch:
    """Per-mode normalized couplings and displacement offsets of one branch."""

    label: str
    m: tuple
    b0: tuple

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(complex(v) for v in self.m))
        object.__setattr__(self, "b0", tuple(complex(v) for v in self.b0))

    def beta(self, config: FockOracleConfig, q: int, tau: float) -> complex:
        x = config.mode_freqs[q]
        g = config.mode_weights[q]
        return (g / x) * (self.b0[q] * np.exp(-1j * x * tau) - self.m[q])


def _theta_analytic(config: FockOracleConfig, branch: DiscreteBranch, tau: float) -> float:
    th = 0.0
    for q in range(config.n_modes):
        x = config.mode_freqs[q]
        g = config.mode_weights[q]
        mb0 = np.conj(branch.m[q]) * branch.b0[q]
        th += (g * g / x) * (
            abs(branch.m[q]) ** 2 * tau
            - (mb0.real * math.sin(x * tau) + mb0.imag * (1.0 - math.cos(x * tau))) / x
        )
    return th


def discrete_eta(
    config: FockOracleConfig, brA: DiscreteBranch, brB: DiscreteBranch, tau: float
) -> complex:
    """Closed-form eta for the discrete mode set (the reference the oracle is
    compared against)."""
    gamma = 0.0
    phi = 0.0
    for q in range(config.n_modes):
        ba = brA.beta(config, q, tau)
        bb = brB.beta(config, q, tau)
        cth = 1.0 if config.theta == 0 else float(thermal_coth(config.mode_freqs[q], config.theta))
        gamma += 0.5 * abs(ba - bb) ** 2 * cth
        phi += -float(np.imag(ba * np.conj(bb)))
    dtheta = _theta_analytic(config, brA, tau) - _theta_analytic(config, brB, tau)
    return complex(np.exp(1j * (dtheta - phi)) * math.exp(-gamma))


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """exp(beta a^dag - beta* a) on the first dim Fock levels."""
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    return expm(beta * a.conj().T - np.conj(beta) * a)


def thermal_state_matrix(x: float, theta: float, dim: int) -> np.ndarray:
    """Truncated per-mode Gibbs state, renormalized to unit trace (keeps the
    oracle state a valid density matrix)."""
    if theta == 0.0:
        rho = np.zeros((dim, dim))
        rho[0, 0] = 1.0
        return rho
    p = np.exp(-x * np.arange(dim, dtype=float) / theta)
    return np.diag(p / p.sum())


class OracleResult(NamedTuple):
    eta: complex
    converged: bool
    n_max: int
    shift: float  # |eta(n_max) - eta(n_max + 2)|, the truncation movement


def _trace_eta(
    config: FockOracleConfig,
    brA: DiscreteBranch,
    brB: DiscreteBranch,
    tau: float,
    n_max: int,
) -> complex:
    dim = n_max + 1
    trace = 1.0 + 0.0j
    for q in range(config.n_modes):
        ua = displacement_matrix(brA.beta(config, q, tau), dim)
        ub = displacement_matrix(brB.beta(config, q, tau), dim)
        rho = thermal_state_matrix(config.mode_freqs[q], config.theta, dim)
        trace *= np.trace(ua @ rho @ ub.conj().T)
    dtheta = _theta_analytic(config, brA, tau) - _theta_analytic(config, brB, tau)
    return complex(np.exp(1j * dtheta) * trace)


def fock_oracle_eta(
    config: FockOracleConfig,
    brA: DiscreteBranch,
    brB: DiscreteBranch,
    tau: float,
    convergence_tol: float = 1e-8,
) -> OracleResult:
    """Brute-force eta from truncated displacement matrices and the thermal
    trace, with a truncation-invariance check: the value must move less than
    convergence_tol when n_max grows by 2, otherwise the result is flagged
    unconverged."""
    if len(brA.m) != config.n_modes or len(brB.m) != config.n_modes:
        raise ValueError("branch data must cover every configured mode")
    n_max = config.n_max if config.n_max is not None else config.auto_n_max((brA, brB))
    val = _trace_eta(config, brA, brB, tau, n_max)
    val2 = _trace_eta(config, brA, brB, tau, n_max + 2)
    shift = abs(val - val2)
    return OracleResult(eta=val2, converged=shift <= convergence_tol, n_max=n_max, shift=shift)
