"""Register families, their DFS branch profiles, and the decoherence-free
propagation checkers.

Three hardcoded families cover every worked example:

* SingleQubit: two branches (up/down) with m = +1/-1.
* WeakCollective: N identically coupled qubits; branches are eigenspaces of
  the total z-spin, labelled by J in {-N, -N+2, ..., N}, with m_J = J.
* IndividualLinear: a linear chain with site-dependent coupling phases.
  Branches are the computational-basis spin patterns; the base pattern has
  m(x, sigma) = sum_n exp(i*sigma*n*x*t_s) * s_n over sigma = +/-1 (the
  two-fold degenerate 1-d modes).  Cyclic and mirror images of the base
  carry couplings that differ from the base only by the translation phase
  factors exp(i*sigma*m*x*t_s), which keeps |m(x)| invariant per shell.

Decoherence-free propagation of a multi-DFS distribution needs
(i) matched energy shifts Omega0, (ii) per-shell phasing of the initial
displacements, and (iii) a finite stationary dissipative factor Gamma0.
Energy-shift comparisons integrate the subtracted integrand, which stays
finite for permutation pairs even where the individual Omega0 diverge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

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
from .coherent import PAIR_CALIBRATION, BranchProfile, ProfileFunc

__all__ = [
    "SingleQubit",
    "WeakCollective",
    "IndividualLinear",
    "RegisterModel",
    "ConditionReport",
    "cyclic_permutation",
    "mirror_permutation",
    "branch_profiles",
    "energy_shift",
    "check_energy_shift_condition",
    "check_phasing_condition",
    "check_quasi_unitary_conditions",
    "gamma0_pair",
    "full_df_report",
]


def cyclic_permutation(spins: Sequence[int], shift: int) -> list:
    """s^(n) -> s^(n - shift mod N)."""
    n = len(spins)
    if not 0 <= shift < n:
        raise ValueError("shift must lie in [0, N)")
    return [spins[(i - shift) % n] for i in range(n)]


def mirror_permutation(spins: Sequence[int], shift: int) -> list:
    """s^(n) -> s^(N - n + shift mod N)."""
    n = len(spins)
    if not 0 <= shift < n:
        raise ValueError("shift must lie in [0, N)")
    return [spins[(n - i + shift) % n] for i in range(n)]


Displacement = Union[complex, ProfileFunc]


@dataclass(frozen=True)
class SingleQubit:
    """One qubit; DFS labels 'up' and 'down' with m = +1 and -1."""

    epsilon: float = 0.0

    def labels(self) -> tuple:
        return ("up", "down")

    def coupling(self, label: str) -> float:
        if label == "up":
            return 1.0
        if label == "down":
            return -1.0
        raise KeyError(f"unknown single-qubit label {label!r}")

    def profile(self, label: str, b0: Displacement = 0.0) -> BranchProfile:
        m = self.coupling(label)
        return BranchProfile(label=label, m=m, b0=b0, m_limits=(m,), b0_limits=None)


@dataclass(frozen=True)
class WeakCollective:
    """N qubits coupled identically; DFS labels are total-spin values J."""

    n_qubits: int
    epsilon: float = 0.0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")

    def labels(self) -> tuple:
        return tuple(range(-self.n_qubits, self.n_qubits + 1, 2))

    def coupling(self, label: int) -> float:
        if label not in self.labels():
            raise KeyError(f"J = {label} is not a spin-sum of {self.n_qubits} qubits")
        return float(label)

    def profile(self, label: int, b0: Displacement = 0.0) -> BranchProfile:
        m = self.coupling(label)
        return BranchProfile(label=str(label), m=m, b0=b0, m_limits=(m,), b0_limits=None)


@dataclass(frozen=True)
class IndividualLinear:
    """Linear register with individual decoherence; branches are the direct
    ('c<shift>') and mirror ('m<shift>') permutation images of a base spin
    pattern.  t_s is the dimensionless transit time omega_c*a/v.
    """

    spins: tuple
    t_s: float
    epsilon: float = 0.0

    def __post_init__(self):
        spins = tuple(int(s) for s in self.spins)
        if not spins or any(s not in (-1, 1) for s in spins):
            raise ValueError("spins must be a nonempty tuple of +-1")
        if self.t_s <= 0:
            raise ValueError("transit time t_s must be positive")
        object.__setattr__(self, "spins", spins)

    @property
    def n_qubits(self) -> int:
        return len(self.spins)

    def labels(self) -> tuple:
        n = self.n_qubits
        return tuple(f"c{k}" for k in range(n)) + tuple(f"m{k}" for k in range(n))

    def pattern(self, label: str) -> list:
        kind, shift = self._parse(label)
        if kind == "c":
            return cyclic_permutation(self.spins, shift)
        return mirror_permutation(self.spins, shift)

    def _parse(self, label: str):
        if len(label) >= 2 and label[0] in ("c", "m") and label[1:].isdigit():
            shift = int(label[1:])
            if 0 <= shift < self.n_qubits:
                return label[0], shift
        raise KeyError(f"unknown individual-decoherence label {label!r}")

    def _base(self, x: np.ndarray, sigma: int) -> np.ndarray:
        out = np.zeros(np.shape(x), dtype=complex)
        for n, s in enumerate(self.spins):
            out += s * np.exp(1j * sigma * n * x * self.t_s)
        return out

    def coupling_func(self, label: str) -> ProfileFunc:
        """Normalized coupling m_label(x, sigma), sigma in {+1, -1}.

        Direct image c<k>: exp(i*sigma*k*x*t_s) * m_base(x, sigma).
        Mirror image m<k>: exp(i*sigma*(N-k)*x*t_s) * m_base(x, -sigma),
        i.e. the base conjugated in sigma, so the shell modulus is shared by
        all 2N images.
        """
        kind, shift = self._parse(label)
        n = self.n_qubits
        t_s = self.t_s

        if kind == "c":

            def m_func(x, sigma, _k=shift):
                x = np.asarray(x, dtype=float)
                return np.exp(1j * sigma * _k * x * t_s) * self._base(x, sigma)

        else:

            def m_func(x, sigma, _k=shift):
                x = np.asarray(x, dtype=float)
                return np.exp(1j * sigma * (n - _k) * x * t_s) * self._base(x, -sigma)

        return m_func

    def profile(self, label: str, b0: Displacement = 0.0) -> BranchProfile:
        m0 = complex(sum(self.spins))
        return BranchProfile(
            label=label,
            m=self.coupling_func(label),
            b0=b0,
            directions=(1, -1),
            dir_weights=(0.5, 0.5),
            m_limits=(m0, m0),
            b0_limits=None,
        )


RegisterModel = Union[SingleQubit, WeakCollective, IndividualLinear]


def branch_profiles(
    model: RegisterModel,
    labels: Sequence,
    displacements: Optional[Mapping] = None,
) -> list:
    """Branch profiles for the requested DFS labels.

    Initial displacements default to stationary (b0 = 0); ``displacements``
    maps label -> constant or (x, sigma) callable to override.
    """
    displacements = displacements or {}
    out = []
    for lab in labels:
        b0 = displacements.get(lab, 0.0)
        out.append(model.profile(lab, b0=b0))
    return out


def _omega_exponent(profile: BranchProfile) -> int:
    w = np.asarray(profile.dir_weights, dtype=float)
    m0sq = float(np.dot(w, [abs(v) ** 2 for v in profile.m_limits]))
    return 0 if m0sq > 1e-24 else 2


def energy_shift(profile: BranchProfile, bath: BathSpec, grid: FrequencyGrid) -> float:
    """Omega0 = int w_d(x) <|m(x, sigma)|^2>_sigma dx; inf when divergent
    (d = 1 with |m(0)| > 0)."""
    verdict = classify_convergence(_omega_exponent(profile), bath, with_coth=False)
    if not verdict.finite:
        return DIVERGENT
    x = grid.nodes
    avg = profile.dir_average(np.abs(profile.m_array(x)) ** 2)
    return grid.integrate(weight(x, bath) * avg)


def check_energy_shift_condition(
    profA: BranchProfile,
    profB: BranchProfile,
    bath: BathSpec,
    grid: FrequencyGrid,
    tol: float = 1e-8,
) -> Optional[bool]:
    """Equal energy shifts Omega0_A = Omega0_B, evaluated on the subtracted
    integrand <|m_A|^2 - |m_B|^2>_sigma.

    Permutation pairs cancel pointwise and pass even at d = 1 where the
    individual shifts diverge.  A divergent difference returns None
    (indeterminate).
    """
    x = grid.nodes
    avgA = profA.dir_average(np.abs(profA.m_array(x)) ** 2)
    avgB = profB.dir_average(np.abs(profB.m_array(x)) ** 2)
    diff = avgA - avgB
    wA = np.asarray(profA.dir_weights, dtype=float)
    wB = np.asarray(profB.dir_weights, dtype=float)
    c0 = float(np.dot(wA, [abs(v) ** 2 for v in profA.m_limits])) - float(
        np.dot(wB, [abs(v) ** 2 for v in profB.m_limits])
    )
    pointwise_zero = float(np.max(np.abs(diff))) <= tol
    exponent = 2 if (abs(c0) <= 1e-24 or pointwise_zero) else 0
    verdict = classify_convergence(exponent, bath, with_coth=False)
    if not verdict.finite:
        return None
    if pointwise_zero:
        return True
    delta = grid.integrate(weight(x, bath) * diff)
    omega_a = energy_shift(profA, bath, grid)
    scale = max(1.0, abs(omega_a)) if not is_divergent(omega_a) else 1.0
    return abs(delta) <= tol * scale


def check_phasing_condition(
    profiles: Sequence[BranchProfile], grid: FrequencyGrid, tol: float = 1e-10
) -> bool:
    """Per-shell phasing constraint for every ordered branch pair:

        |sum_sigma w_sigma * b0_A(x, sigma) * (m_A* - m_B*)(x, sigma)| <= tol

    at every grid node x.  The trivial solution b0 = 0 always passes; for
    1-d baths the sigma sum runs over exactly the two degenerate directions.
    """
    x = grid.nodes
    for i, prA in enumerate(profiles):
        mA = prA.m_array(x)
        b0A = prA.b0_array(x)
        w = np.asarray(prA.dir_weights, dtype=float)
        for j, prB in enumerate(profiles):
            if i == j:
                continue
            if prA.directions != prB.directions:
                raise ValueError("profiles must share one direction set")
            mB = prB.m_array(x)
            shell = np.tensordot(w, b0A * np.conj(mA - mB), axes=(0, 0))
            if float(np.max(np.abs(shell))) > tol:
                return False
    return True


def check_quasi_unitary_conditions(
    profiles: Sequence[BranchProfile], grid: FrequencyGrid, tol: float = 1e-10
) -> bool:
    """Weaker (quasi-unitary) constraints on every shell and pair:

        |sum_sigma (b0_A - b0_B)(m_A* - m_B*)| <= tol
        |sum_sigma (m_A* b0_B - m_B* b0_A)| <= tol

    Stationary displacements pass trivially; both sums follow from the
    phasing condition for direction-independent coupling families.
    """
    x = grid.nodes
    for i, prA in enumerate(profiles):
        mA = prA.m_array(x)
        b0A = prA.b0_array(x)
        w = np.asarray(prA.dir_weights, dtype=float)
        for j, prB in enumerate(profiles):
            if j <= i:
                continue
            mB = prB.m_array(x)
            b0B = prB.b0_array(x)
            s1 = np.tensordot(w, (b0A - b0B) * np.conj(mA - mB), axes=(0, 0))
            s2 = np.tensordot(w, np.conj(mA) * b0B - np.conj(mB) * b0A, axes=(0, 0))
            if float(np.max(np.abs(s1))) > tol or float(np.max(np.abs(s2))) > tol:
                return False
    return True


def gamma0_pair(
    profA: BranchProfile, profB: BranchProfile, bath: BathSpec, grid: FrequencyGrid
) -> float:
    """Stationary dissipative factor of a branch pair,

        Gamma0 = (1/4) int w_d(x) coth(x/2theta) <|m_A - m_B|^2>_sigma dx,

    under the calibrated convention (single qubit at d=3, theta=0 gives
    exactly lam; weak-collective (J, -J) pairs scale as J^2).  Divergence is
    classified analytically and returned as inf.
    """
    w = np.asarray(profA.dir_weights, dtype=float)
    c0 = float(
        np.dot(
            w,
            [abs(profA.m_limits[i] - profB.m_limits[i]) ** 2 for i in range(len(w))],
        )
    )
    exponent = 0 if c0 > 1e-24 else 2
    verdict = classify_convergence(exponent, bath, with_coth=True)
    if not verdict.finite:
        return DIVERGENT
    x = grid.nodes
    diff = profA.m_array(x) - profB.m_array(x)
    avg = profA.dir_average(np.abs(diff) ** 2)
    integrand = weight(x, bath) * thermal_coth(x, bath.theta) * avg
    return PAIR_CALIBRATION * grid.integrate(integrand)


@dataclass(frozen=True)
class ConditionReport:
    """Aggregated verdict of the three decoherence-free conditions."""

    model: str
    labels: tuple
    energy_shift_ok: Optional[bool]
    phasing_ok: bool
    gamma0: float
    overall_df: bool

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "labels": list(self.labels),
            "energy_shift_ok": self.energy_shift_ok,
            "phasing_ok": self.phasing_ok,
            "gamma0": "divergent" if is_divergent(self.gamma0) else self.gamma0,
            "overall_df": self.overall_df,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _model_name(model: RegisterModel) -> str:
    return {
        SingleQubit: "single_qubit",
        WeakCollective: "weak_collective",
        IndividualLinear: "individual_linear",
    }[type(model)]


def full_df_report(
    model: RegisterModel,
    labels: Sequence,
    displacements: Optional[Mapping],
    bath: BathSpec,
    grid: FrequencyGrid,
    tol: float = 1e-8,
) -> ConditionReport:
    """Run all three decoherence-free conditions for a label set.

    gamma0 reports the binding (largest) pair value; overall_df requires all
    conditions to pass with every pair's Gamma0 finite.
    """
    profiles = branch_profiles(model, labels, displacements)
    es_ok: Optional[bool] = True
    worst_gamma = 0.0
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            ok = check_energy_shift_condition(profiles[i], profiles[j], bath, grid, tol)
            if ok is None:
                es_ok = None
            elif not ok and es_ok is not None:
                es_ok = False
            g = gamma0_pair(profiles[i], profiles[j], bath, grid)
            worst_gamma = max(worst_gamma, g)
    ph_ok = check_phasing_condition(profiles, grid)
    overall = bool(es_ok) and ph_ok and not is_divergent(worst_gamma)
    return ConditionReport(
        model=_model_name(model),
        labels=tuple(str(l) for l in labels),
        energy_shift_ok=es_ok,
        phasing_ok=ph_ok,
        gamma0=worst_gamma,
        overall_df=overall,
    )
