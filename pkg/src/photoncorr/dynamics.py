"""Single-emitter wave-function ansatz truncated at two emitted photons.

The state at time zeta is

    c_g |g> + c_e |e>
    + sum_ch  int dzeta_e [phi_g,ch(zeta, zeta_e) |g, 1_ch> + phi_e,ch |e, 1_ch>]
    + sum_ch2,ch1  int int_{zeta_e1 < zeta_e2} phi_ch2ch1(zeta_e2, zeta_e1) |g, 1_ch1 1_ch2>

with channels R (right-going, towards the detector), L (left-going) and S
(side loss). Emission at ``zeta_e`` seeds the next sector with
``i sqrt(beta_ch) exp(i Delta zeta_e)`` times the excited amplitude, and every
sector with an emitter degree of freedom evolves with the same 2x2 equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .drive import DriveEnvelope
from .grid import TimeGrid
from .propagation import drive_coupling, integrate_linear, rk4_step_matrices, sweep_emissions

CHANNELS = ("R", "L", "S")
BETA_TOL = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless single-emitter parameters.

    Attributes:
        beta_r: fraction of the decay rate into the right-going mode.
        beta_l: fraction into the left-going mode.
        beta_s: fraction lost to the side.
        delta: drive detuning in units of the total decay rate.
    """

    beta_r: float = 1.0
    beta_l: float = 0.0
    beta_s: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("beta_r", "beta_l", "beta_s"):
            b = getattr(self, name)
            if not (0.0 <= b <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {b}")
        total = self.beta_r + self.beta_l + self.beta_s
        if abs(total - 1.0) > BETA_TOL:
            raise ValueError(f"beta_r + beta_l + beta_s must equal 1, got {total!r}")
        if not np.isfinite(self.delta):
            raise ValueError("delta must be finite")

    def beta(self, channel: str) -> float:
        try:
            return {"R": self.beta_r, "L": self.beta_l, "S": self.beta_s}[channel]
        except KeyError:
            raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}") from None


@dataclass(frozen=True)
class EmitterTrajectory:
    """Before-emission amplitudes on the grid."""

    grid: TimeGrid
    c_g: np.ndarray
    c_e: np.ndarray

    @property
    def states(self) -> np.ndarray:
        return np.stack([self.c_g, self.c_e], axis=1)

    @property
    def n_emitters(self) -> int:
        return 1

    def excited(self, k: int = -1) -> np.ndarray:
        return np.atleast_1d(self.c_e[k])

    def norm(self) -> np.ndarray:
        return np.abs(self.c_g) ** 2 + np.abs(self.c_e) ** 2


@dataclass(frozen=True)
class EmissionSlice:
    """After-emission amplitudes for a single emission time, over all zeta.

    ``phi_g[k]`` and ``phi_e[k]`` are zero for ``k < index``.
    """

    channel: str
    index: int
    zeta_e: float
    phi_g: np.ndarray
    phi_e: np.ndarray


@dataclass(frozen=True)
class SinglePhotonField:
    """One-photon sector for a first-photon channel.

    Attributes:
        channel: channel of the emitted photon.
        phi_g: ``phi_g,ch(zeta_T, zeta_e)`` over emission nodes, shape (n,).
        phi_e: ``phi_e,ch(zeta_T, zeta_e)``, shape (n, n_emitters).
        panes: optional full history indexed ``[k, r, component]`` with
            component 0 the ground amplitude and 1.. the excited ones; zero for
            ``k < r``.
    """

    channel: str
    grid: TimeGrid
    phi_g: np.ndarray
    phi_e: np.ndarray
    panes: Optional[np.ndarray] = field(default=None, repr=False)


ChainPhotonField = SinglePhotonField


@dataclass(frozen=True)
class TwoPhotonAmplitude:
    """Frozen two-photon amplitudes ``phi_ch2ch1(zeta_e2, zeta_e1)``.

    ``table[i2, i1]`` is populated for ``i1 <= i2`` (second emission later)
    and the upper triangle is zero. The diagonal holds the equal-time limit:
    zero for one emitter, since it cannot emit twice at once, but not for a
    chain, where a doubly excited pair can.
    """

    channel2: str
    channel1: str
    grid: TimeGrid
    table: np.ndarray = field(repr=False)

    def symmetric(self) -> np.ndarray:
        """Full square table with both time orderings, ``phi(x, y) + phi(y, x)``.

        The diagonal carries the equal-time limit once.
        """
        return np.tril(self.table) + np.tril(self.table, -1).T


@dataclass
class AnsatzSolution:
    """Everything the correlation and filter routines read."""

    grid: TimeGrid
    drive: DriveEnvelope
    params: object
    trajectory: object
    fields: Dict[str, SinglePhotonField]
    two_photon: Dict[Tuple[str, str], TwoPhotonAmplitude]

    def field_amplitude(self) -> np.ndarray:
        """Coherent right-going field reaching the detector, over emission nodes."""
        return self.drive.field(self.grid.nodes, self.params.beta_r)

    def pair(self, channel2: str = "R", channel1: str = "R") -> TwoPhotonAmplitude:
        try:
            return self.two_photon[(channel2, channel1)]
        except KeyError:
            raise KeyError(
                f"two-photon amplitude {channel2}{channel1} was not materialized; "
                "request it through the pairs argument"
            ) from None

    def norm(self) -> float:
        """Total probability carried by the materialized sectors at zeta_T."""
        from .grid import trapz, triangle_integral

        h = self.grid.h
        total = float(np.sum(np.abs(self.trajectory.states[-1]) ** 2))
        for f in self.fields.values():
            dens = np.abs(f.phi_g) ** 2 + np.sum(np.abs(f.phi_e) ** 2, axis=1)
            total += float(trapz(dens, h))
        for tp in self.two_photon.values():
            total += triangle_integral(np.abs(tp.table) ** 2, h)
        return total


# -- single-emitter matrices -------------------------------------------------

K_SINGLE = np.array([[0.0, 0.0], [0.0, -0.5]], dtype=complex)
P_SINGLE = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


def step_matrices(params: SystemParams, drive: DriveEnvelope, grid: TimeGrid) -> np.ndarray:
    s_nodes, s_mid = drive_coupling(drive, grid, params.beta_r, params.delta)
    return rk4_step_matrices(K_SINGLE, P_SINGLE, s_nodes, s_mid, grid.h)


def integrate_emitter(params: SystemParams, drive: DriveEnvelope, grid: TimeGrid,
                      initial: Sequence[complex] = (1.0, 0.0)) -> EmitterTrajectory:
    """Integrate ``(c_g, c_e)`` from ``initial`` at ``grid.zeta_start``."""
    M = step_matrices(params, drive, grid)
    y = integrate_linear(M, np.asarray(initial, dtype=complex), 0, "integrate_emitter")
    return EmitterTrajectory(grid, y[:, 0], y[:, 1])


def linear_steady_start(params: SystemParams, drive: DriveEnvelope,
                        zeta_start: float = 0.0) -> Tuple[complex, complex]:
    """Weak-drive stationary ``(c_g, c_e)`` of a constant drive at ``zeta_start``.

    Starting here instead of the ground state removes the ``exp(-zeta/2)``
    turn-on transient; the state is stationary to first order in the drive.
    """
    if drive.kind != "constant":
        raise ValueError("a stationary start needs a constant drive")
    rabi = complex(drive.rabi(zeta_start, params.beta_r))
    c_e = 1j * rabi / (1.0 - 2j * params.delta) * np.exp(-1j * params.delta * zeta_start)
    if abs(c_e) >= 1.0:
        raise ValueError("drive too strong for a weak-drive stationary start")
    return complex(np.sqrt(1.0 - abs(c_e) ** 2)), complex(c_e)


def branch_single_photon(trajectory: EmitterTrajectory, params: SystemParams,
                         channel: str, zeta_e: float) -> complex:
    """Initial ground amplitude of the one-photon sector for emission at ``zeta_e``."""
    k = trajectory.grid.index_of(zeta_e)
    zeta = trajectory.grid.nodes[k]
    return complex(1j * np.sqrt(params.beta(channel)) * trajectory.c_e[k]
                   * np.exp(1j * params.delta * zeta))


def propagate_after_emission(params: SystemParams, drive: DriveEnvelope, grid: TimeGrid,
                             zeta_e: float, init: complex, channel: str = "R") -> EmissionSlice:
    """Evolve ``(phi_g, phi_e)`` from ``(init, 0)`` at ``zeta_e`` to the grid end."""
    params.beta(channel)
    k = grid.index_of(zeta_e)
    M = step_matrices(params, drive, grid)
    y = integrate_linear(M, np.array([init, 0.0], dtype=complex), k, "propagate_after_emission")
    return EmissionSlice(channel, k, float(grid.nodes[k]), y[:, 0], y[:, 1])


def two_photon_prefactor(params: SystemParams, grid: TimeGrid, channel2: str) -> np.ndarray:
    """``i sqrt(beta_ch2) exp(i Delta zeta_e2)`` on the nodes."""
    return 1j * np.sqrt(params.beta(channel2)) * np.exp(1j * params.delta * grid.nodes)


def assemble_two_photon(field: SinglePhotonField, params: SystemParams,
                        channel2: str) -> TwoPhotonAmplitude:
    """Two-photon table from the stored one-photon history of ``field``.

    Requires ``field.panes`` (solve with ``store_panes=True``).
    """
    if field.panes is None:
        raise ValueError("assemble_two_photon needs the full (zeta, zeta_e) history; "
                         "solve with store_panes=True")
    n = field.grid.n_nodes
    if field.panes.shape[:2] != (n, n):
        raise ValueError(f"pane shape {field.panes.shape} does not match a grid of {n} nodes")
    pref = np.sqrt(params.beta(channel2)) * 1j * np.exp(1j * params.delta * field.grid.nodes)
    # phi_e(zeta_e2, zeta_e1) sits at panes[i2, i1, 1]
    table = np.tril(pref[:, None] * field.panes[:, :, 1])
    return TwoPhotonAmplitude(channel2, field.channel, field.grid, table)


def _resolve_channels(channels: Iterable[str], pairs, valid) -> Tuple[Tuple[str, ...], Tuple[Tuple[str, str], ...]]:
    channels = tuple(dict.fromkeys(channels))
    pairs = tuple((str(a), str(b)) for a, b in pairs)
    for ch in channels + tuple(c for p in pairs for c in p):
        if ch not in valid:
            raise ValueError(f"unknown channel {ch!r}; expected one of {tuple(valid)}")
    firsts = tuple(dict.fromkeys(channels + tuple(p[1] for p in pairs)))
    return firsts, pairs


def solve(params: SystemParams, drive: DriveEnvelope, grid: TimeGrid,
          channels: Iterable[str] = ("R",), pairs=(("R", "R"),),
          store_panes: bool = False, initial: Sequence[complex] = (1.0, 0.0)) -> AnsatzSolution:
    """Run the full O(n^2) emission sweep.

    Args:
        channels: first-photon channels whose one-photon sector is kept.
        pairs: ``(channel2, channel1)`` two-photon tables to assemble; their
            first-photon channels are propagated as well.
        store_panes: keep ``phi(zeta, zeta_e)`` for all ``zeta``, O(n^2) per
            channel.
        initial: emitter amplitudes ``(c_g, c_e)`` at the grid start.
    """
    firsts, pairs = _resolve_channels(channels, pairs, CHANNELS)
    M = step_matrices(params, drive, grid)
    y = integrate_linear(M, np.asarray(initial, dtype=complex), 0, "integrate_emitter")
    traj = EmitterTrajectory(grid, y[:, 0], y[:, 1])
    phase = np.exp(1j * params.delta * grid.nodes)
    init = np.zeros((grid.n_nodes, len(firsts), 2), dtype=complex)
    for c, ch in enumerate(firsts):
        init[:, c, 0] = 1j * np.sqrt(params.beta(ch)) * phase * traj.c_e
    seconds = tuple(dict.fromkeys(p[0] for p in pairs))
    jumps = {ch: np.array([np.sqrt(params.beta(ch))], dtype=complex) for ch in seconds}
    final, tables, panes = sweep_emissions(M, init, jump_rows=jumps, phase_nodes=phase,
                                           store_panes=store_panes)
    fields = {}
    for c, ch in enumerate(firsts):
        fields[ch] = SinglePhotonField(ch, grid, final[:, c, 0].copy(), final[:, c, 1:].copy(),
                                       None if panes is None else panes[:, :, c, :].copy())
    two = {}
    for ch2, ch1 in pairs:
        two[(ch2, ch1)] = TwoPhotonAmplitude(ch2, ch1, grid, tables[ch2][firsts.index(ch1)])
    return AnsatzSolution(grid, drive, params, traj, fields, two)
