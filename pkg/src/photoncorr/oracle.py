"""Density-matrix reference for a single driven emitter.

A Lindblad master equation with decay rate 1 and the Hamiltonian coupling
``H_eg = -(Omega/2) exp(-i Delta zeta)``, integrated with the same RK4 grid as
the amplitude solver. Two-time correlations follow from the regression
theorem: after a detection at ``zeta`` the emitter is left in ``|g><g|`` with
weight ``rho_ee(zeta)``, and that conditional state is propagated forward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drive import DriveEnvelope
from .exceptions import IntegrationError
from .grid import TimeGrid, trapz, triangle_integral
from .propagation import drive_coupling, integrate_linear, rk4_step_matrices, sweep_emissions

TRACE_TOL = 1e-9
HERM_TOL = 1e-12
POS_TOL = 1e-7  # RK4 is not positivity preserving; coarse steps dip slightly below rho_ee = 0

# basis order (g, e); vec(rho) is the row-major flattening [gg, ge, eg, ee]
_SIGMA = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
_SIGMA_DAG = _SIGMA.conj().T
_I2 = np.eye(2, dtype=complex)
EE = 3


def _left_right(a, b):
    """Superoperator of rho -> a rho b for row-major vec."""
    return np.kron(a, b.T)


def _liouvillian_parts():
    n = _SIGMA_DAG @ _SIGMA
    K = _left_right(_SIGMA, _SIGMA_DAG) - 0.5 * (_left_right(n, _I2) + _left_right(_I2, n))
    # -i[H, rho] with H = i s sigma^+ - i s* sigma gives s [sigma^+, rho] - s* [sigma, rho]
    P = _left_right(_SIGMA_DAG, _I2) - _left_right(_I2, _SIGMA_DAG)
    return K, P


K_LIOUV, P_LIOUV = _liouvillian_parts()


@dataclass(frozen=True)
class DensityState:
    """2x2 density matrix in the (g, e) basis."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {rho.shape}")
        object.__setattr__(self, "rho", rho)
        problem = invariant_violation(rho)
        if problem:
            raise ValueError(f"invalid density matrix: {problem}")

    @classmethod
    def ground(cls) -> "DensityState":
        return cls(np.array([[1.0, 0.0], [0.0, 0.0]]))

    @classmethod
    def excited(cls) -> "DensityState":
        return cls(np.array([[0.0, 0.0], [0.0, 1.0]]))

    @property
    def rho_ee(self) -> float:
        return float(self.rho[1, 1].real)


def invariant_violation(rho: np.ndarray, trace_target: float = 1.0) -> str:
    """Describe the first violated density-matrix invariant, or return ''."""
    tr = np.trace(rho)
    if abs(tr - trace_target) > TRACE_TOL:
        return f"trace {tr.real:.12g} differs from {trace_target}"
    if np.max(np.abs(rho - rho.conj().T)) > HERM_TOL:
        return "not Hermitian"
    ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if ev.min() < -POS_TOL:
        return f"negative eigenvalue {ev.min():.3g}"
    return ""


def step_matrices(drive: DriveEnvelope, delta: float, grid: TimeGrid) -> np.ndarray:
    # the oracle treats the Rabi frequency as given, so the coupling weight is 1
    s_nodes, s_mid = drive_coupling(drive, grid, 1.0, delta)
    return rk4_step_matrices(K_LIOUV, P_LIOUV, s_nodes, s_mid, grid.h)


def evolve_density(drive: DriveEnvelope, delta: float, grid: TimeGrid,
                   initial: DensityState = None) -> np.ndarray:
    """Density matrices on every node, shape ``(n_nodes, 2, 2)``.

    The drive's Rabi frequency is taken at unit coupling weight, so a waveguide
    drive should be converted to the equivalent side drive first.

    Raises:
        IntegrationError: if trace, Hermiticity or positivity is lost.
    """
    initial = DensityState.ground() if initial is None else initial
    M = step_matrices(drive, delta, grid)
    vec = integrate_linear(M, initial.rho.reshape(4), 0, "evolve_density")
    rhos = vec.reshape(-1, 2, 2)
    for k, rho in enumerate(rhos):
        problem = invariant_violation(rho)
        if problem:
            raise IntegrationError("evolve_density", f"node {k}: {problem}")
    return rhos


def _conditional_populations(M: np.ndarray, rho_ee: np.ndarray) -> np.ndarray:
    """``table[i2, i1] = rho_ee(i1) * P(e at i2 | g at i1)`` for ``i1 < i2``."""
    n_nodes = M.shape[0] + 1
    init = np.zeros((n_nodes, 1, 4), dtype=complex)
    init[:, 0, 0] = rho_ee
    # jump row picks the ee population; the sweep multiplies by i * phase
    pick = np.zeros(3, dtype=complex)
    pick[EE - 1] = 1.0
    phase = np.full(n_nodes, -1j, dtype=complex)
    _, tables, _ = sweep_emissions(M, init, jump_rows={"ee": pick}, phase_nodes=phase,
                                   operation="regression_pulsed_g2")
    return tables["ee"][0].real


def regression_photon_number(drive: DriveEnvelope, delta: float, grid: TimeGrid) -> float:
    """``int rho_ee dzeta``: photons emitted at unit branching ratio."""
    rhos = evolve_density(drive, delta, grid)
    return float(trapz(rhos[:, 1, 1].real, grid.h))


def regression_pulsed_g2(drive: DriveEnvelope, delta: float, grid: TimeGrid,
                         return_parts: bool = False):
    """Pulsed g2 from the regression theorem.

    ``G2 = 2 int_{zeta < zeta'} <s+(zeta) s+(zeta') s(zeta') s(zeta)>`` and
    ``<n> = int rho_ee``; returns ``G2 / <n>^2`` (or ``(g2p, G2, n)``).

    Raises:
        ValueError: if no photon is emitted.
    """
    rhos = evolve_density(drive, delta, grid)
    rho_ee = rhos[:, 1, 1].real
    n = float(trapz(rho_ee, grid.h))
    if not n > 1e-300:
        raise ValueError("mean photon number is zero; pulsed g2 is undefined")
    table = _conditional_populations(step_matrices(drive, delta, grid), rho_ee)
    G2 = 2.0 * triangle_integral(table, grid.h)
    g2p = G2 / n ** 2
    return (g2p, G2, n) if return_parts else g2p


def regression_cw_g2(drive: DriveEnvelope, delta: float, grid: TimeGrid,
                     branch_fraction: float = 0.4):
    """Steady-state g2(tau) of the fluorescence from a single branch node.

    Returns ``(delays, g2)``.
    """
    rhos = evolve_density(drive, delta, grid)
    b = int(round(branch_fraction * grid.n_steps))
    M = step_matrices(drive, delta, grid)
    start = np.zeros(4, dtype=complex)
    start[0] = 1.0
    cond = integrate_linear(M, start, b, "regression_cw_g2")
    pop = rhos[:, 1, 1].real
    g2 = cond[b:, EE].real / pop[b:]
    return grid.nodes[b:] - grid.nodes[b], g2


def steady_state_excited(rabi: float, delta: float = 0.0) -> float:
    """Closed-form ``rho_ee`` of the driven emitter, ``Omega^2 / (1 + 4 Delta^2 + 2 Omega^2)``."""
    w2 = abs(rabi) ** 2
    return w2 / (1.0 + 4.0 * delta ** 2 + 2.0 * w2)
