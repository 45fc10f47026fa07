"""Shared fixed-step propagation for the linear amplitude equations.

Every sector of the truncated wave function obeys a linear system

    dy/dzeta = A(zeta) y,   A = K + s(zeta) P - conj(s(zeta)) P^H,
    s(zeta) = (i/2) Omega(zeta) exp(-i Delta zeta),

where ``K`` holds decay and photon-mediated couplings, ``P`` raises the
excitation number by one and ``Omega`` is the zero-phase Rabi frequency. Since
the system is linear, one classical RK4 step is a fixed matrix ``M_i`` acting on
the state; computing ``M_i`` once per step lets the before-emission trajectory
and all after-emission rows share the same step matrices.
"""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from .drive import DriveEnvelope
from .exceptions import IntegrationError
from .grid import TimeGrid


def drive_coupling(drive: DriveEnvelope, grid: TimeGrid, beta_r: float, delta: float):
    """Return s(zeta) on nodes and midpoints."""
    samples = drive.sample(grid, beta_r)
    s_nodes = 0.5j * samples.nodes * np.exp(-1j * delta * grid.nodes)
    s_mid = 0.5j * samples.midpoints * np.exp(-1j * delta * grid.midpoints)
    return s_nodes, s_mid


def rk4_step_matrices(K: np.ndarray, P: np.ndarray, s_nodes: np.ndarray,
                      s_mid: np.ndarray, h: float) -> np.ndarray:
    """RK4 propagators for every step, shape ``(n_steps, d, d)``.

    ``M_i y_i`` equals the classical RK4 update of ``y' = A(zeta) y`` from node
    ``i`` to node ``i + 1`` with A evaluated at the two nodes and the midpoint.
    """
    d = K.shape[0]
    eye = np.eye(d, dtype=complex)
    Ph = P.conj().T

    def a_of(s):
        return K[None] + s[:, None, None] * P[None] - np.conj(s)[:, None, None] * Ph[None]

    a0 = a_of(s_nodes[:-1])
    am = a_of(s_mid)
    a1 = a_of(s_nodes[1:])
    k1 = a0
    k2 = am @ (eye + 0.5 * h * k1)
    k3 = am @ (eye + 0.5 * h * k2)
    k4 = a1 @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_linear(M: np.ndarray, y0: np.ndarray, start: int = 0,
                     operation: str = "integrate") -> np.ndarray:
    """Apply the step propagators from node ``start``; rows before it stay zero.

    Returns an array of shape ``(n_nodes, d)``.
    """
    n_steps, d, _ = M.shape
    out = np.zeros((n_steps + 1, d), dtype=complex)
    y = np.asarray(y0, dtype=complex).reshape(d)
    out[start] = y
    for i in range(start, n_steps):
        y = M[i] @ y
        out[i + 1] = y
    if not np.all(np.isfinite(out)):
        bad = int(np.argmax(~np.all(np.isfinite(out), axis=1)))
        raise IntegrationError(operation, f"non-finite amplitude at node {bad}")
    return out


def sweep_emissions(M1: np.ndarray, init: np.ndarray, *,
                    jump_rows: Optional[Mapping[str, np.ndarray]] = None,
                    phase_nodes: Optional[np.ndarray] = None,
                    store_panes: bool = False,
                    operation: str = "propagate_after_emission"):
    """Propagate one after-emission row per emission node, all rows together.

    Args:
        M1: step propagators of the one-photon sector, ``(n_steps, d1, d1)``.
        init: initial rows, ``(n_nodes, C, d1)`` for C first-photon channels;
            ``init[r]`` starts at node ``r``.
        jump_rows: second-photon channel -> row vector over the excited
            components (length ``d1 - 1``). For each entry the two-photon table
            ``i * phase * (jump . phi_e)`` is filled as the sweep passes each
            node. The diagonal holds the equal-time limit, which is zero
            unless the first emission leaves an excited emitter behind.
        phase_nodes: ``exp(i Delta zeta)`` on the nodes (required with
            ``jump_rows``).
        store_panes: keep the full ``(zeta, zeta_e)`` history.

    Returns:
        ``(final, two_photon, panes)``. ``final`` is ``(n_nodes, C, d1)`` at
        the last node; ``two_photon[ch2]`` is ``(C, n_nodes, n_nodes)`` indexed
        ``[c1, i2, i1]`` with entries only for ``i1 <= i2``; ``panes`` is
        ``(n_nodes, n_nodes, C, d1)`` indexed ``[k, r]`` or None.
    """
    n_steps = M1.shape[0]
    n_nodes = n_steps + 1
    n_ch = init.shape[1]
    jump_rows = dict(jump_rows or {})
    Y = np.zeros_like(init, dtype=complex)
    tables = {ch: np.zeros((n_ch, n_nodes, n_nodes), dtype=complex) for ch in jump_rows}
    panes = np.zeros((n_nodes, n_nodes) + init.shape[1:], dtype=complex) if store_panes else None

    def fill_diagonal(i):
        for ch, row in jump_rows.items():
            tables[ch][:, i, i] = 1j * phase_nodes[i] * (init[i, :, 1:] @ row)

    for i in range(n_steps):
        Y[i] = init[i]
        fill_diagonal(i)
        if panes is not None:
            panes[i, : i + 1] = Y[: i + 1]
        Y[: i + 1] = Y[: i + 1] @ M1[i].T
        for ch, row in jump_rows.items():
            # second photon at node i+1, first photon at an earlier node
            vals = 1j * phase_nodes[i + 1] * (Y[: i + 1, :, 1:] @ row)
            tables[ch][:, i + 1, : i + 1] = vals.T
    Y[n_steps] = init[n_steps]
    fill_diagonal(n_steps)
    if panes is not None:
        panes[n_steps] = Y
    if not np.all(np.isfinite(Y)):
        raise IntegrationError(operation, "non-finite amplitude in the after-emission sweep")
    return Y, tables, panes
