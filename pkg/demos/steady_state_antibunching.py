"""Steady-state photon statistics of one emitter in a waveguide.

A weak CW field passes an emitter that scatters a fraction beta_r of its
emission forward. Forward light is the coherent input interfering with the
scattered field, so its statistics change with beta_r: antibunched at 0.25,
strongly bunched at 0.5 where the coherent part cancels. At 0.25 the weak-drive
limit of g2(0) is exactly zero; the small residue printed here is the turn-on
transient of an emitter started in its ground state.

Run: python3 demos/steady_state_antibunching.py
"""

import numpy as np

from photoncorr import DriveEnvelope, SystemParams, TimeGrid, g2_normalized_steady


def weak_drive_limit(beta_r, tau):
    """Two-photon interference of the transmitted light for vanishing drive."""
    t = 1.0 - 2.0 * beta_r
    return np.abs(t ** 2 - (1 - t) ** 2 * np.exp(-tau / 2)) ** 2 / t ** 4


def main():
    grid = TimeGrid(0.0, 26.0, 2600)
    drive = DriveEnvelope.cw(0.01)
    delays = np.array([0.0, 0.5, 1.0, 2.0, 4.0, 8.0])
    print("beta_r   tau    g2 (ansatz)   g2 (weak-drive limit)")
    for beta_r in (0.1, 0.25, 0.4):
        bl = min(beta_r, 1 - beta_r)
        res = g2_normalized_steady(SystemParams(beta_r, bl, 1 - beta_r - bl), drive, grid)
        idx = np.searchsorted(res.delays, delays - 1e-9)
        for tau, k in zip(delays, idx):
            print(f"{beta_r:5.2f} {tau:6.1f} {res.g2_normalized[k]:13.5g} {weak_drive_limit(beta_r, tau):18.5g}")
        print()
    res = g2_normalized_steady(SystemParams(0.5, 0.5, 0.0), drive, grid)
    print(f"beta_r = 0.50: g2(0) = {res.g2_normalized[0]:.4g} (coherent transmission cancelled)")


if __name__ == "__main__":
    main()
