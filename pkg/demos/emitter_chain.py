"""Correlations behind a chain of five emitters.

With half-wavelength spacing and strong coupling the chain nearly reflects
the weak CW field, so the little transmitted light is dominated by photon
pairs: g2(0) is large and g2 drops through a node shortly after. A chain with
quarter-wavelength spacing is shown for comparison.

Run: python3 demos/emitter_chain.py
"""

import numpy as np

from photoncorr import (ChainParams, DriveEnvelope, TimeGrid, g2_normalized_from_solution,
                        solve_chain)


def chain_g2(beta, spacing):
    params = ChainParams.regular(5, spacing, beta, beta)
    sol = solve_chain(params, DriveEnvelope.cw(5e-4), TimeGrid(0.0, 26.0, 1500))
    res = g2_normalized_from_solution(sol)
    return res.delays, res.g2_normalized


def main():
    for beta, spacing, label in ((0.45, np.pi, "pi"), (0.45, np.pi / 4, "pi/4"), (0.15, np.pi / 4, "pi/4")):
        tau, g2 = chain_g2(beta, spacing)
        early = (tau > 0) & (tau < 5)
        k = np.argmin(np.where(early, g2, np.inf))
        print(f"beta = {beta}, spacing phase {label}: g2(0) = {g2[0]:.4g}, "
              f"minimum {g2[k]:.3g} at zeta = {tau[k]:.2f}")
        for t in (0.5, 1.0, 2.0, 4.0, 8.0):
            print(f"    g2({t:3.1f}) = {g2[np.searchsorted(tau, t - 1e-9)]:.4g}")


if __name__ == "__main__":
    main()
