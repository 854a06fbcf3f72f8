"""Coherence revivals under bang-bang control.

Every pi-pulse flips the sign of the entangled bath displacements, which
reverses the decay of the dissipative factor: the coherence eta climbs right
after the mid-cycle pulse and is still climbing when the second pulse fires.
The symmetrized Carr-Purcell variant reads out midway between pulses, near
the revival maxima, and beats the standard sequence at every read-out.
"""

import math

import numpy as np

from spinboson import (
    BathSpec,
    FrequencyGrid,
    PulseSchedule,
    eta_readout,
    gamma_continuous_many,
    revival_diagnostics,
)


def main():
    bath = BathSpec(d=1, lam=0.25, theta=0.01)
    grid = FrequencyGrid.build(bath, x_max=60.0, tau_max=60.0)
    dt, n_cycles = 1.0, 5

    std = PulseSchedule(protocol="standard", dt=dt, n_cycles=n_cycles)
    diag = revival_diagnostics(std, bath, grid, n=1)
    print("one-sided dGamma/dtau at the first cycle's revival points:")
    print(f"  after mid-cycle pulse : {diag['d_gamma_after_midpulse']:+.6f}  (< 0)")
    print(f"  before second pulse   : {diag['d_gamma_before_second']:+.6f}  (> 0)")

    # locate the coherence maximum inside each inter-pulse interval
    flips = std.flip_times()
    print("\nstandard protocol: eta maxima drift into the intervals")
    for a, b in list(zip(flips[:-1], flips[1:]))[:6]:
        ts = np.linspace(a, b, 101)[1:-1]
        gam = gamma_continuous_many(std, ts, bath, grid)
        k = int(np.argmin(gam))
        print(
            f"  interval ({a:4.1f}, {b:4.1f}): max eta = {math.exp(-gam[k]):.6f} "
            f"at tau = {ts[k]:.3f}"
        )

    print("\nread-out comparison (eta at tau = 2 n dt):")
    print(f"{'n':>3} {'standard':>12} {'symmetrized':>12}")
    sym = PulseSchedule(protocol="sym_cp", dt=dt, n_cycles=n_cycles)
    for n in range(1, n_cycles + 1):
        es = eta_readout(std, n, bath, grid)
        ey = eta_readout(sym, n, bath, grid)
        print(f"{n:3d} {es:12.8f} {ey:12.8f}")


if __name__ == "__main__":
    main()
