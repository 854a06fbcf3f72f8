"""Bang-bang pulse dynamics for the single-qubit register.

Instantaneous pi-pulses flip the sign of every entangled bath displacement.
Starting from an uncorrelated thermal state (b = 0) the up/down branches stay
opposite, all phase factors vanish, and the qubit coherence is
eta(tau) = exp(-Gamma(tau)) with

    Gamma(tau) = int w_d(x) coth(x/2theta) |b(x, tau)|^2 dx,

where b is the up-branch displacement evolved piecewise (normalized coupling
m = 1): free segments b -> (b + 1)*exp(-i*x*dt_seg) - 1, a sign flip at each
pulse.  The calibration matches gamma_dissipative for the up/down pair, so
the free protocol reproduces the lam*ln(1+tau^2) anchor.

Protocols (read-outs at tau_k = 2k*dt for both):

* standard:   flips at dt, 2dt, 3dt, ...; stroboscopic recurrence
              b_{n+1} = b_n e^{-2ix dt} + (e^{-ix dt}-1)^2, closed form
              |b_n| = |tan(x dt/2)| * |e^{-2inx dt}-1|.
* sym_cp:     symmetrized Carr-Purcell, flips at (k+1/2)dt; recurrence
              increment (e^{-ix dt/2}-1)^2 (e^{-ix dt}-1), closed form with
              tan(x dt/2) replaced by (1-cos(x dt/2))/cos(x dt/2).

The tan/cos poles at x*dt = (2k+1)*pi are removable against the sin^2 zeros
of the free factor; quadrature nodes landing within 1e-9 of a pole are
shifted by half the local node gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bath import BathSpec, FrequencyGrid, thermal_coth, weight

__all__ = [
    "PulseSchedule",
    "StroboscopicState",
    "displacement_with_pulses",
    "strobe_step",
    "strobe_closed_form",
    "gamma_strob",
    "gamma_sym",
    "gamma_continuous",
    "gamma_continuous_many",
    "eta_readout",
    "revival_diagnostics",
]

PROTOCOLS = ("free", "standard", "sym_cp")

_POLE_TOL = 1e-9


@dataclass(frozen=True)
class PulseSchedule:
    """Pulse protocol with half-cycle dt; read-outs at 2k*dt.

    free: no pulses.  standard: flips at every multiple of dt.  sym_cp:
    flips at half-integer multiples of dt, so read-outs fall midway between
    pulses and are never flip times.  Pulses are instantaneous.
    """

    protocol: str
    dt: float = 0.0
    n_cycles: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        if self.protocol != "free":
            if self.dt <= 0:
                raise ValueError("pulsed protocols need dt > 0")
            if self.n_cycles < 1:
                raise ValueError("pulsed protocols need n_cycles >= 1")

    def flip_times(self) -> np.ndarray:
        if self.protocol == "free":
            return np.empty(0)
        j = np.arange(1, 2 * self.n_cycles + 1, dtype=float)
        if self.protocol == "standard":
            return j * self.dt
        return (j - 0.5) * self.dt

    def readout_times(self) -> np.ndarray:
        if self.protocol == "free":
            return np.empty(0)
        return 2.0 * self.dt * np.arange(self.n_cycles + 1, dtype=float)


@dataclass(frozen=True)
class StroboscopicState:
    """Read-out-time displacement per frequency node; n = 0 is b = 0."""

    n: int
    b: np.ndarray


def displacement_with_pulses(schedule: PulseSchedule, x, tau: float) -> np.ndarray:
    """Up-branch displacement at time tau under the schedule (b(0) = 0).

    Flips at times <= tau are applied, so at an exact flip time the
    post-flip value is returned; |b| (hence Gamma) is continuous there.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    b = np.zeros_like(x, dtype=complex)
    t_prev = 0.0
    for t_flip in schedule.flip_times():
        if t_flip > tau * (1 + 1e-15) + 1e-300:
            break
        b = (b + 1.0) * np.exp(-1j * x * (t_flip - t_prev)) - 1.0
        b = -b
        t_prev = t_flip
    return (b + 1.0) * np.exp(-1j * x * (tau - t_prev)) - 1.0


def strobe_step(state: StroboscopicState, schedule: PulseSchedule, x) -> StroboscopicState:
    """One read-out period of the stroboscopic recurrence.

    standard: b_{n+1} = b_n e^{-2ix dt} + (e^{-ix dt} - 1)^2
    sym_cp:   b_{n+1} = b_n e^{-2ix dt} + (e^{-ix dt/2} - 1)^2 (e^{-ix dt} - 1)
    """
    if schedule.protocol == "free":
        raise ValueError("the free protocol has no stroboscopic recurrence")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.exp(-1j * x * schedule.dt)
    if schedule.protocol == "standard":
        inc = (z - 1.0) ** 2
    else:
        inc = (np.exp(-1j * x * schedule.dt / 2.0) - 1.0) ** 2 * (z - 1.0)
    return StroboscopicState(n=state.n + 1, b=state.b * z**2 + inc)


def strobe_closed_form(schedule: PulseSchedule, n: int, x) -> np.ndarray:
    """Closed-form solution of the recurrence from b_0 = 0 after n periods.

    standard: b_n = -i tan(x dt/2) * (e^{-2inx dt} - 1)
    sym_cp:   b_n = (e^{-ix dt/2}-1)^2 / (1 + e^{-ix dt}) * (e^{-2inx dt} - 1)

    Evaluate on pole-shifted nodes (see shift_nodes_from_poles).
    """
    if schedule.protocol == "free":
        raise ValueError("the free protocol has no stroboscopic recurrence")
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    # reduce x*dt mod 2*pi before scaling by n: keeps the phase argument (and
    # the tan cancellation) conditioned at machine level up to n ~ 100
    v = np.mod(x * schedule.dt, 2.0 * math.pi)
    free = np.exp(-2j * n * v) - 1.0
    if schedule.protocol == "standard":
        return -1j * np.tan(0.5 * v) * free
    # the half-angle factors have period 4*pi, not 2*pi
    v4 = np.mod(x * schedule.dt, 4.0 * math.pi)
    half = (np.exp(-0.5j * v4) - 1.0) ** 2
    return half / (1.0 + np.exp(-1j * v4)) * free


def shift_nodes_from_poles(nodes: np.ndarray, dt: float) -> np.ndarray:
    """Move nodes within 1e-9 of a tan/cos pole (x*dt = odd multiple of pi)
    by half the local node gap; the poles are removable, the shift only
    avoids evaluating tan at them."""
    x = np.array(nodes, dtype=float, copy=True)
    k = np.round((x * dt / math.pi - 1.0) / 2.0)
    poles = (2.0 * k + 1.0) * math.pi / dt
    near = np.abs(x - poles) < _POLE_TOL
    if np.any(near):
        gaps = np.empty_like(x)
        gaps[:-1] = np.diff(x)
        gaps[-1] = gaps[-2]
        x[near] += 0.5 * gaps[near]
    return x


def _gamma_readout(schedule: PulseSchedule, n: int, bath: BathSpec, grid: FrequencyGrid) -> float:
    x = shift_nodes_from_poles(grid.nodes, schedule.dt)
    b = strobe_closed_form(schedule, n, x)
    integrand = weight(x, bath) * thermal_coth(x, bath.theta) * np.abs(b) ** 2
    return float(np.dot(grid.weights, integrand))


def gamma_strob(schedule: PulseSchedule, n: int, bath: BathSpec, grid: FrequencyGrid) -> float:
    """Standard-protocol stroboscopic dissipative factor at read-out 2n*dt."""
    if schedule.protocol != "standard":
        raise ValueError("gamma_strob requires the standard protocol")
    return _gamma_readout(schedule, n, bath, grid)


def gamma_sym(schedule: PulseSchedule, n: int, bath: BathSpec, grid: FrequencyGrid) -> float:
    """Symmetrized Carr-Purcell stroboscopic dissipative factor at 2n*dt."""
    if schedule.protocol != "sym_cp":
        raise ValueError("gamma_sym requires the sym_cp protocol")
    return _gamma_readout(schedule, n, bath, grid)


def gamma_continuous(schedule: PulseSchedule, tau: float, bath: BathSpec, grid: FrequencyGrid) -> float:
    """Continuous-time Gamma(tau) from the piecewise displacement evolution.

    Continuous across flips (|-b| = |b|); at read-out times it must agree
    with the stroboscopic closed forms (independent code path).
    """
    b = displacement_with_pulses(schedule, grid.nodes, tau)
    integrand = weight(grid.nodes, bath) * thermal_coth(grid.nodes, bath.theta) * np.abs(b) ** 2
    return float(np.dot(grid.weights, integrand))


def gamma_continuous_many(
    schedule: PulseSchedule, taus: Sequence[float], bath: BathSpec, grid: FrequencyGrid
) -> np.ndarray:
    """Gamma on an ascending time grid, marching displacements through the
    flip/sample event sequence once."""
    taus = np.asarray(taus, dtype=float)
    if np.any(np.diff(taus) < 0):
        raise ValueError("tau samples must be ascending")
    x = grid.nodes
    wq = grid.weights * weight(x, bath) * thermal_coth(x, bath.theta)
    flips = list(schedule.flip_times())
    out = np.empty(taus.size)
    b = np.zeros_like(x, dtype=complex)
    t_prev = 0.0
    fi = 0
    for k, tau in enumerate(taus):
        while fi < len(flips) and flips[fi] <= tau * (1 + 1e-15) + 1e-300:
            b = (b + 1.0) * np.exp(-1j * x * (flips[fi] - t_prev)) - 1.0
            b = -b
            t_prev = flips[fi]
            fi += 1
        bt = (b + 1.0) * np.exp(-1j * x * (tau - t_prev)) - 1.0
        out[k] = float(np.dot(wq, np.abs(bt) ** 2))
    return out


def eta_readout(schedule: PulseSchedule, n: int, bath: BathSpec, grid: FrequencyGrid) -> float:
    """Read-out coherence eta(2n*dt) = exp(-Gamma); phases vanish for the
    opposite-displacement up/down pair."""
    if schedule.protocol == "standard":
        return math.exp(-gamma_strob(schedule, n, bath, grid))
    if schedule.protocol == "sym_cp":
        return math.exp(-gamma_sym(schedule, n, bath, grid))
    raise ValueError("eta_readout is defined for pulsed protocols")


def revival_diagnostics(
    schedule: PulseSchedule, bath: BathSpec, grid: FrequencyGrid, n: int
) -> dict:
    """One-sided dGamma/dtau at the two revival points of cycle n (standard
    protocol): just after the mid-cycle pulse at (2n-1)dt and just before
    the second pulse at 2n*dt.  Closed integrands:

        dGamma/dtau((2n-1)dt + 0) = -4 int w_d x coth cos^2((n-1/2) x dt)
                                          tan(x dt / 2) dx       (< 0, d <= 3)
        dGamma/dtau(2n dt - 0)    = +4 int w_d x coth sin^2(n x dt)
                                          tan(x dt / 2) dx       (> 0, d <= 3)
    """
    if schedule.protocol != "standard":
        raise ValueError("revival diagnostics apply to the standard protocol")
    if not 1 <= n <= schedule.n_cycles:
        raise ValueError("cycle index n out of range")
    x = shift_nodes_from_poles(grid.nodes, schedule.dt)
    base = grid.weights * weight(x, bath) * thermal_coth(x, bath.theta) * x * np.tan(
        x * schedule.dt / 2.0
    )
    after = -4.0 * float(np.dot(base, np.cos((n - 0.5) * x * schedule.dt) ** 2))
    before = 4.0 * float(np.dot(base, np.sin(n * x * schedule.dt) ** 2))
    return {"d_gamma_after_midpulse": after, "d_gamma_before_second": before}
