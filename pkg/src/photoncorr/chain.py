"""Chains of identical emitters sharing one waveguide.

Emitter ``j`` sits at propagation phase ``k0 z_j`` (nondecreasing in j). A
right-going photon from emitter ``l`` reaches every emitter ``j > l`` with phase
``exp(i k0 (z_j - z_l))``, a left-going one reaches every ``j < l``; retardation
across the chain is neglected. Each emitter has its own side-loss reservoir,
named ``S1`` .. ``SN``.

The before-emission state is ``[c_g, c_e^1..c_e^N, c_ee^{jl} (j < l)]``; the
one-photon sectors keep ``[phi_g, phi_e^1..phi_e^N]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .drive import DriveEnvelope
from .dynamics import (AnsatzSolution, BETA_TOL, EmissionSlice, SinglePhotonField,
                       TwoPhotonAmplitude, _resolve_channels)
from .grid import TimeGrid
from .propagation import drive_coupling, integrate_linear, rk4_step_matrices, sweep_emissions


@dataclass(frozen=True)
class ChainParams:
    """Parameters of N identical emitters.

    Attributes:
        phases: ``k0 z_j`` in radians, one per emitter, nondecreasing.
        beta_r, beta_l, beta_s: shared branching ratios, summing to 1.
        delta: drive detuning in units of the single-emitter decay rate.
    """

    phases: Tuple[float, ...]
    beta_r: float = 0.5
    beta_l: float = 0.5
    beta_s: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        ph = tuple(float(p) for p in np.atleast_1d(np.asarray(self.phases, dtype=float)))
        if len(ph) < 1:
            raise ValueError("a chain needs at least one emitter")
        if not all(np.isfinite(ph)):
            raise ValueError("phases must be finite")
        if any(b < a for a, b in zip(ph, ph[1:])):
            raise ValueError("phases must be nondecreasing (emitter index increases to the right)")
        object.__setattr__(self, "phases", ph)
        for name in ("beta_r", "beta_l", "beta_s"):
            b = getattr(self, name)
            if not (0.0 <= b <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {b}")
        total = self.beta_r + self.beta_l + self.beta_s
        if abs(total - 1.0) > BETA_TOL:
            raise ValueError(f"beta_r + beta_l + beta_s must equal 1, got {total!r}")
        if not np.isfinite(self.delta):
            raise ValueError("delta must be finite")

    @classmethod
    def regular(cls, n: int, spacing_phase: float, beta_r: float, beta_l: float,
                beta_s: float = None, delta: float = 0.0) -> "ChainParams":
        """Evenly spaced chain, ``k0 z_j = j * spacing_phase``."""
        if beta_s is None:
            beta_s = 1.0 - beta_r - beta_l
        return cls(tuple(spacing_phase * np.arange(n)), beta_r, beta_l, beta_s, delta)

    @property
    def n(self) -> int:
        return len(self.phases)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return list(combinations(range(self.n), 2))

    @property
    def channels(self) -> Tuple[str, ...]:
        return ("R", "L") + tuple(f"S{m + 1}" for m in range(self.n))


@dataclass(frozen=True)
class ChainTrajectory:
    """Before-emission amplitudes; ``c_ee[:, p]`` belongs to ``pairs[p]``."""

    grid: TimeGrid
    c_g: np.ndarray
    c_e: np.ndarray
    c_ee: np.ndarray
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def states(self) -> np.ndarray:
        return np.concatenate([self.c_g[:, None], self.c_e, self.c_ee], axis=1)

    @property
    def n_emitters(self) -> int:
        return self.c_e.shape[1]

    def excited(self, k: int = -1) -> np.ndarray:
        return self.c_e[k]

    def norm(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)


# -- matrices -----------------------------------------------------------------

def coupling_matrix(params: ChainParams) -> np.ndarray:
    """Single-excitation block: decay plus photon-mediated couplings."""
    n = params.n
    z = np.asarray(params.phases)
    K1 = -0.5 * np.eye(n, dtype=complex)
    for j in range(n):
        for l in range(n):
            if l < j:
                K1[j, l] = -params.beta_r * np.exp(1j * (z[j] - z[l]))
            elif l > j:
                K1[j, l] = -params.beta_l * np.exp(1j * (z[l] - z[j]))
    return K1


def _pair_index(params: ChainParams) -> Dict[Tuple[int, int], int]:
    return {p: 1 + params.n + k for k, p in enumerate(params.pairs)}


def chain_matrices(params: ChainParams, geometry: str = "waveguide"):
    """Full-space ``K`` and raising operator ``P`` of dimension 1 + N + N(N-1)/2."""
    n = params.n
    idx = _pair_index(params)
    d = 1 + n + len(idx)
    K1 = coupling_matrix(params)
    K = np.zeros((d, d), dtype=complex)
    K[1:1 + n, 1:1 + n] = K1
    for (a, b), row in idx.items():
        K[row, row] = -1.0
        # one excitation hops between emitters while the other stays put
        for stay, move in ((b, a), (a, b)):
            for x in range(n):
                if x in (a, b):
                    continue
                col = idx[tuple(sorted((x, stay)))]
                K[row, col] += K1[move, x]
    p = np.exp(1j * np.asarray(params.phases)) if geometry == "waveguide" else np.ones(n)
    P = np.zeros((d, d), dtype=complex)
    P[1:1 + n, 0] = p
    for (a, b), row in idx.items():
        P[row, 1 + a] = p[b]
        P[row, 1 + b] = p[a]
    return K, P


def jump_matrix(params: ChainParams, channel: str) -> np.ndarray:
    """Map from the full state to the one-photon sector for an emission into ``channel``.

    Multiplied by ``i exp(i Delta zeta_e)`` this gives the branching conditions.
    """
    n = params.n
    idx = _pair_index(params)
    z = np.asarray(params.phases)
    J = np.zeros((1 + n, 1 + n + len(idx)), dtype=complex)
    if channel in ("R", "L"):
        beta = params.beta_r if channel == "R" else params.beta_l
        q = np.sqrt(beta) * np.exp((-1j if channel == "R" else 1j) * z)
        J[0, 1:1 + n] = q
        for (a, b), col in idx.items():
            J[1 + a, col] = q[b]
            J[1 + b, col] = q[a]
    elif channel.startswith("S") and channel[1:].isdigit() and 1 <= int(channel[1:]) <= n:
        m = int(channel[1:]) - 1
        s = np.sqrt(params.beta_s)
        J[0, 1 + m] = s
        for (a, b), col in idx.items():
            if m == a:
                J[1 + b, col] = s
            elif m == b:
                J[1 + a, col] = s
    else:
        raise ValueError(f"unknown channel {channel!r}; expected one of {params.channels}")
    return J


def step_matrices(params: ChainParams, drive: DriveEnvelope, grid: TimeGrid, size: int = None):
    K, P = chain_matrices(params, drive.geometry)
    if size is not None:
        K, P = K[:size, :size], P[:size, :size]
    s_nodes, s_mid = drive_coupling(drive, grid, params.beta_r, params.delta)
    return rk4_step_matrices(K, P, s_nodes, s_mid, grid.h)


# -- operations -----------------------------------------------------------------

def integrate_chain(params: ChainParams, drive: DriveEnvelope, grid: TimeGrid,
                    initial: Sequence[complex] = None) -> ChainTrajectory:
    """Integrate the chain from the all-ground state (or ``initial``)."""
    M = step_matrices(params, drive, grid)
    d = M.shape[1]
    y0 = np.zeros(d, dtype=complex)
    if initial is None:
        y0[0] = 1.0
    else:
        y0[:] = np.asarray(initial, dtype=complex)
    y = integrate_linear(M, y0, 0, "integrate_chain")
    n = params.n
    return ChainTrajectory(grid, y[:, 0], y[:, 1:1 + n], y[:, 1 + n:], tuple(params.pairs))


def branch_chain_emission(trajectory: ChainTrajectory, params: ChainParams, channel: str,
                          zeta_e: float):
    """Initial ``(phi_g, phi_e^1..N)`` for emission into ``channel`` at ``zeta_e``."""
    k = trajectory.grid.index_of(zeta_e)
    J = jump_matrix(params, channel)
    v = 1j * np.exp(1j * params.delta * trajectory.grid.nodes[k]) * (J @ trajectory.states[k])
    return complex(v[0]), v[1:]


def propagate_chain_after_emission(params: ChainParams, drive: DriveEnvelope, grid: TimeGrid,
                                   zeta_e: float, init, channel: str = "R") -> EmissionSlice:
    """Evolve the one-photon sector from ``init = (phi_g, phi_e)`` at ``zeta_e``."""
    jump_matrix(params, channel)
    k = grid.index_of(zeta_e)
    M = step_matrices(params, drive, grid, size=1 + params.n)
    g0, e0 = init
    y0 = np.concatenate([[g0], np.asarray(e0, dtype=complex).reshape(params.n)])
    y = integrate_linear(M, y0, k, "propagate_chain_after_emission")
    return EmissionSlice(channel, k, float(grid.nodes[k]), y[:, 0], y[:, 1:])


def second_photon_row(params: ChainParams, channel2: str) -> np.ndarray:
    """Row over ``phi_e^j`` whose product gives the two-photon amplitude (before ``i e^{i Delta zeta}``)."""
    return jump_matrix(params, channel2)[0, 1:1 + params.n]


def assemble_chain_two_photon(field: SinglePhotonField, params: ChainParams,
                              channel2: str) -> TwoPhotonAmplitude:
    """Two-photon table from a stored one-photon history (``store_panes=True``)."""
    if field.panes is None:
        raise ValueError("assemble_chain_two_photon needs the full (zeta, zeta_e) history; "
                         "solve with store_panes=True")
    n = field.grid.n_nodes
    if field.panes.shape[:2] != (n, n) or field.panes.shape[2] != 1 + params.n:
        raise ValueError(f"pane shape {field.panes.shape} does not match {n} nodes and "
                         f"{params.n} emitters")
    row = second_photon_row(params, channel2)
    pref = 1j * np.exp(1j * params.delta * field.grid.nodes)
    table = np.tril(pref[:, None] * (field.panes[:, :, 1:] @ row))
    return TwoPhotonAmplitude(channel2, field.channel, field.grid, table)


def solve_chain(params: ChainParams, drive: DriveEnvelope, grid: TimeGrid,
                channels: Iterable[str] = ("R",), pairs=(("R", "R"),),
                store_panes: bool = False, initial: Sequence[complex] = None) -> AnsatzSolution:
    """Full O(n^2) emission sweep for a chain; mirrors :func:`dynamics.solve`."""
    firsts, pairs = _resolve_channels(channels, pairs, params.channels)
    n = params.n
    traj = integrate_chain(params, drive, grid, initial)
    M1 = step_matrices(params, drive, grid, size=1 + n)
    phase = np.exp(1j * params.delta * grid.nodes)
    states = traj.states
    init = np.zeros((grid.n_nodes, len(firsts), 1 + n), dtype=complex)
    for c, ch in enumerate(firsts):
        init[:, c, :] = 1j * phase[:, None] * (states @ jump_matrix(params, ch).T)
    seconds = tuple(dict.fromkeys(p[0] for p in pairs))
    jumps = {ch: second_photon_row(params, ch) for ch in seconds}
    final, tables, panes = sweep_emissions(M1, init, jump_rows=jumps, phase_nodes=phase,
                                           store_panes=store_panes,
                                           operation="propagate_chain_after_emission")
    fields = {}
    for c, ch in enumerate(firsts):
        fields[ch] = SinglePhotonField(ch, grid, final[:, c, 0].copy(), final[:, c, 1:].copy(),
                                       None if panes is None else panes[:, :, c, :].copy())
    two = {(ch2, ch1): TwoPhotonAmplitude(ch2, ch1, grid, tables[ch2][firsts.index(ch1)])
           for ch2, ch1 in pairs}
    return AnsatzSolution(grid, drive, params, traj, fields, two)
