"""Intensity and photon-photon correlations of the right-going output.

Everything is reported per unit group velocity. Times are emission times: a
detector at fixed distance only adds a constant retardation.

Two evaluation orders are provided. The leading-order forms keep terms up to
second order in the drive intensity. The full-order forms evaluate the exact
normally ordered expectation values in the truncated state at ``zeta_T``,
assuming that state is normalized (the truncated equations conserve norm).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import AnsatzSolution, SystemParams, solve
from .exceptions import ConvergenceError
from .grid import TimeGrid, trapezoid_weights, trapz, triangle_integral


@dataclass
class CorrelationResult:
    """Correlation outputs; fields not computed by a routine stay None.

    Attributes:
        g1: intensity G1 over emission nodes.
        g2_grid: G2 table over (zeta'_e, zeta_e), or one row of it.
        delays: delays matching ``g2_normalized`` for the steady state.
        g2_normalized: normalized g2 over ``delays``.
        mean_n: mean photon number of a pulse.
        g2p: pulsed, delay-integrated g2.
    """

    g1: Optional[np.ndarray] = None
    g2_grid: Optional[np.ndarray] = None
    delays: Optional[np.ndarray] = None
    g2_normalized: Optional[np.ndarray] = None
    mean_n: Optional[float] = None
    g2p: Optional[float] = None


def _coherent(solution: AnsatzSolution) -> np.ndarray:
    return np.asarray(solution.field_amplitude(), dtype=complex)


def g1_leading(solution: AnsatzSolution, use_cg_substitution: bool = False) -> np.ndarray:
    """Leading-order intensity ``|phi_gR(zeta_T, zeta_e) + E(zeta_e)|^2``.

    With ``use_cg_substitution`` the bare coherent term ``|E|^2`` is weighted by
    ``|c_g(zeta_T)|^2``. This agrees to second order in the intensity and tracks
    the depletion of the ground state the same way the emitted field does.
    """
    phi = solution.fields["R"].phi_g
    E = _coherent(solution)
    out = np.abs(phi) ** 2 + 2.0 * np.real(np.conj(phi) * E)
    weight = np.abs(solution.trajectory.c_g[-1]) ** 2 if use_cg_substitution else 1.0
    return out + weight * np.abs(E) ** 2


def g2_leading(solution: AnsatzSolution, use_cg_substitution: bool = False,
               rows: Optional[Sequence[int]] = None) -> np.ndarray:
    """Leading-order G2(zeta'_e, zeta_e), symmetric in its arguments.

    Args:
        rows: if given, only the columns ``zeta_e = grid.nodes[rows]`` are
            evaluated and the result has shape ``(n_nodes, len(rows))``.
            Otherwise the full ``(n_nodes, n_nodes)`` table is returned.
    """
    phi = solution.fields["R"].phi_g
    E = _coherent(solution)
    sym = solution.pair("R", "R").symmetric()
    cg = solution.trajectory.c_g[-1] if use_cg_substitution else 1.0
    cols = np.arange(len(phi)) if rows is None else np.asarray(rows, dtype=int)
    amp = (sym[:, cols] + E[cols][None, :] * phi[:, None] + phi[cols][None, :] * E[:, None]
           + cg * cg * E[:, None] * E[cols][None, :])
    return np.abs(amp) ** 2


def _leftover(solution: AnsatzSolution, include_cross_channel: bool):
    """One-photon remainders after annihilating a right-going photon.

    Returns ``{channel: L}`` with ``L[z, x]`` the amplitude of a photon of that
    channel at ``x`` left behind by detecting a right-going photon at ``z``.
    """
    out = {}
    for (ch2, ch1), tp in solution.two_photon.items():
        if "R" not in (ch2, ch1):
            continue
        other = ch1 if ch2 == "R" else ch2
        if other != "R" and not include_cross_channel:
            continue
        acc = out.setdefault(other, np.zeros_like(tp.table))
        if ch2 == "R":
            # R photon later (z is the row), other photon earlier
            acc += np.tril(tp.table)
        if ch1 == "R":
            # R photon earlier (z is the column), other photon later
            acc += np.tril(tp.table, -1).T
    if "R" not in out:
        raise KeyError("full-order correlations need the RR two-photon amplitude")
    return out


def _full_pieces(solution: AnsatzSolution, include_cross_channel: bool):
    f = solution.fields["R"]
    grid = solution.grid
    w = trapezoid_weights(grid.n_nodes, grid.h)
    traj = solution.trajectory
    c_final = traj.states[-1]
    left = _leftover(solution, include_cross_channel)
    # <Psi| E_R(z) |Psi> and || E_R(z) Psi ||^2
    m = np.conj(c_final[0]) * f.phi_g + f.phi_e @ np.conj(c_final[1: 1 + f.phi_e.shape[1]])
    nrm = np.abs(f.phi_g) ** 2 + np.sum(np.abs(f.phi_e) ** 2, axis=1)
    for ch, L in left.items():
        if ch not in solution.fields:
            raise KeyError(f"full-order correlations need the one-photon field of channel {ch}")
        m = m + L @ (w * np.conj(solution.fields[ch].phi_g))
        nrm = nrm + (np.abs(L) ** 2) @ w
    return f, w, m, nrm, left


def g1_full(solution: AnsatzSolution, include_cross_channel: bool = False) -> np.ndarray:
    """Full-order intensity ``<(E_R^+ + E*)(E_R + E)>`` in the truncated state.

    ``include_cross_channel`` adds overlaps between photons left in the L or S
    channels and the one-photon sectors of those channels; it requires the
    matching two-photon tables. Experimental: the weighting of these terms is
    not cross-checked by any independent reference, so it is off by default.
    """
    E = _coherent(solution)
    _, _, m, nrm, _ = _full_pieces(solution, include_cross_channel)
    return np.abs(E) ** 2 + 2.0 * np.real(np.conj(E) * m) + nrm


def g2_full(solution: AnsatzSolution, rows: Optional[Sequence[int]] = None,
            include_cross_channel: bool = False) -> np.ndarray:
    """Full-order G2(zeta'_e, zeta_e) in the truncated state.

    Cost is O(n^2) per requested column; the default (all columns) is O(n^3).
    Shape conventions follow :func:`g2_leading`. ``include_cross_channel`` is
    experimental, as in :func:`g1_full`.
    """
    E = _coherent(solution)
    f, w, m, nrm, left = _full_pieces(solution, include_cross_channel)
    cg = solution.trajectory.states[-1][0]
    sym = solution.pair("R", "R").symmetric()
    cols = np.arange(solution.grid.n_nodes) if rows is None else np.asarray(rows, dtype=int)
    # <E(z') Psi | E(z) Psi>, rows z', columns z
    bc = np.conj(f.phi_g)[:, None] * f.phi_g[cols][None, :] + np.conj(f.phi_e) @ f.phi_e[cols].T
    for L in left.values():
        bc = bc + np.conj(L) @ (w[:, None] * L[cols].T)
    a = sym[:, cols]
    Ep = E[:, None]      # E(z')
    Ez = E[cols][None, :]  # E(z)
    total = (np.abs(a) ** 2
             + np.abs(Ez) ** 2 * nrm[:, None] + np.abs(Ep) ** 2 * nrm[cols][None, :]
             + np.abs(Ez * Ep) ** 2
             + 2.0 * np.real(
                 np.conj(a) * (Ez * f.phi_g[:, None] + Ep * f.phi_g[cols][None, :] + Ez * Ep * cg)
                 + np.conj(Ez) * Ep * bc
                 + np.abs(Ez) ** 2 * Ep * np.conj(m)[:, None]
                 + np.abs(Ep) ** 2 * Ez * np.conj(m[cols])[None, :]))
    return total


def check_steady(trajectory, operation: str, tol: float = 1e-2) -> None:
    """Raise if ``|c_e|`` still drifts between 0.9 zeta_T and zeta_T."""
    grid = trajectory.grid
    k = int(round(0.9 * grid.n_steps))
    ce = np.abs(trajectory.states[:, 1:]).sum(axis=1)
    ref = ce[-1]
    drift = abs(ce[-1] - ce[k])
    if not np.isfinite(drift) or drift > tol * max(ref, 1e-300):
        raise ConvergenceError(
            operation,
            f"excited amplitude drifts by {drift:.3g} (relative {drift / max(ref, 1e-300):.3g}) "
            "over the last tenth of the grid; lengthen the grid or lower the drive")


def g2_normalized_from_solution(solution: AnsatzSolution, branch_fraction: float = 0.4,
                                order: str = "leading", use_cg_substitution: bool = True,
                                include_cross_channel: bool = False) -> CorrelationResult:
    """Steady-state g2 over delays from a single branch node.

    Args:
        branch_fraction: branch node as a fraction of the grid span; delays run
            from 0 to the end of the grid.
        order: ``"leading"`` or ``"full"``.
    """
    grid = solution.grid
    b = int(round(branch_fraction * grid.n_steps))
    if not 0 <= b < grid.n_steps:
        raise ValueError(f"branch_fraction {branch_fraction} outside the grid")
    if order == "leading":
        g1 = g1_leading(solution, use_cg_substitution)
        col = g2_leading(solution, use_cg_substitution, rows=[b])[:, 0]
    elif order == "full":
        g1 = g1_full(solution, include_cross_channel)
        col = g2_full(solution, rows=[b], include_cross_channel=include_cross_channel)[:, 0]
    else:
        raise ValueError(f"order must be 'leading' or 'full', got {order!r}")
    g2 = col[b:] / (g1[b:] * g1[b])
    delays = grid.nodes[b:] - grid.nodes[b]
    return CorrelationResult(g1=g1, g2_grid=col, delays=delays, g2_normalized=g2)


def g2_normalized_steady(params, drive, grid: TimeGrid, branch_fraction: float = 0.4,
                         order: str = "leading", use_cg_substitution: bool = True,
                         steady_tol: float = 1e-2) -> CorrelationResult:
    """Solve a CW scenario and return the steady-state g2 over delays.

    Raises:
        ConvergenceError: when the emitter has not reached steady state.
    """
    if drive.kind != "constant":
        raise ValueError("steady-state g2 needs a constant drive")
    pairs = (("R", "R"),)
    solution = solve(params, drive, grid, channels=("R",), pairs=pairs)
    check_steady(solution.trajectory, "g2_normalized_steady", steady_tol)
    return g2_normalized_from_solution(solution, branch_fraction, order, use_cg_substitution)


def pair_right_photons(solution: AnsatzSolution) -> float:
    """Expected number of right-going photons held in the two-photon sectors.

    A pair with one right-going photon counts once, an RR pair twice. For a
    single emitter every pair table is the RR table scaled by
    ``sqrt(beta_2 beta_1) / beta_r``, so the sum closes to ``2 P_RR / beta_r``.
    Chains have no such scaling and need every pair holding an R photon.
    """
    h = solution.grid.h
    rr = triangle_integral(np.abs(solution.pair("R", "R").table) ** 2, h)
    params = solution.params
    if isinstance(params, SystemParams):
        return 2.0 * rr / params.beta_r if params.beta_r > 0 else 0.0
    # channels with zero branching ratio carry no amplitude
    others = [ch for ch in params.channels
              if ch != "R" and (params.beta_l if ch == "L" else params.beta_s) > 0]
    total = 2.0 * rr
    for ch2, ch1 in (p for x in others for p in ((x, "R"), ("R", x))):
        total += triangle_integral(np.abs(solution.pair(ch2, ch1).table) ** 2, h)
    return total


def mean_photons(solution: AnsatzSolution) -> float:
    """Mean right-going photon number of a pulse (side drive, no coherent part)."""
    f = solution.fields["R"]
    single = float(trapz(np.abs(f.phi_g) ** 2 + np.sum(np.abs(f.phi_e) ** 2, axis=1),
                         solution.grid.h))
    return single + pair_right_photons(solution)


def pulsed_g2_unnormalized(solution: AnsatzSolution) -> float:
    """``2 * int int_{zeta_e1 < zeta_e2} |phi_RR|^2``, i.e. <n(n - 1)>."""
    return 2.0 * triangle_integral(np.abs(solution.pair("R", "R").table) ** 2, solution.grid.h)


def pulsed_g2(solution: AnsatzSolution) -> float:
    """Delay-integrated g2 of a pulse normalized by the squared mean photon number."""
    n = mean_photons(solution)
    if not n > 0:
        raise ValueError("mean photon number is zero; pulsed g2 is undefined")
    return pulsed_g2_unnormalized(solution) / n ** 2


def pulsed_result(solution: AnsatzSolution) -> CorrelationResult:
    n = mean_photons(solution)
    return CorrelationResult(g1=g1_leading(solution), mean_n=n, g2p=pulsed_g2(solution))
