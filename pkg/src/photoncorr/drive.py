"""Classical drive envelopes in dimensionless units.

The emitter equations use the Rabi frequency Omega(zeta) with a factor 1/2,

    dc_g/dzeta = i Omega^*/2 e^{i Delta zeta} c_e
    dc_e/dzeta = i Omega/2 e^{-i Delta zeta} c_g - c_e/2,

so a pulse of area pi (``integral Omega dzeta = pi``) fully inverts the emitter.
A coherent waveguide field of dimensionless amplitude E couples with
``Omega/2 = sqrt(beta_R) E``; a side field couples with ``Omega/2 = E``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import TimeGrid

KINDS = ("constant", "gaussian-pulse", "tabulated")
GEOMETRIES = ("waveguide", "side")


@dataclass(frozen=True)
class DriveEnvelope:
    """Drive definition.

    Attributes:
        kind: ``"constant"`` (CW field of amplitude ``amplitude``),
            ``"gaussian-pulse"`` (Omega^2 is a Gaussian of standard deviation
            ``sigma`` centred on ``center``, scaled to ``area``) or
            ``"tabulated"`` (Omega sampled at ``times``, linearly interpolated,
            zero outside the table).
        amplitude: complex field amplitude E for the constant kind.
        sigma: pulse width sigma*Gamma (standard deviation of Omega^2).
        area: pulse area, ``integral Omega dzeta``.
        geometry: ``"waveguide"`` if the field travels in the right-going mode
            and therefore reaches the detector, ``"side"`` otherwise.
    """

    kind: str = "constant"
    amplitude: complex = 0.0
    sigma: Optional[float] = None
    area: float = np.pi
    geometry: str = "waveguide"
    center: float = 0.0
    times: Optional[np.ndarray] = field(default=None, compare=False)
    values: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown drive kind {self.kind!r}; expected one of {KINDS}")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry!r}; expected one of {GEOMETRIES}")
        if self.kind == "gaussian-pulse":
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("gaussian-pulse drive needs sigma > 0")
        if self.kind == "tabulated":
            if self.times is None or self.values is None:
                raise ValueError("tabulated drive needs times and values")
            t = np.asarray(self.times, dtype=float)
            v = np.asarray(self.values, dtype=complex)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2:
                raise ValueError("tabulated drive: times and values must be 1-D of equal length >= 2")
            if np.any(np.diff(t) <= 0):
                raise ValueError("tabulated drive: times must be strictly increasing")
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "values", v)
        if not np.isfinite(complex(self.amplitude)):
            raise ValueError("drive amplitude must be finite")

    @classmethod
    def cw(cls, amplitude: complex, geometry: str = "waveguide") -> "DriveEnvelope":
        return cls(kind="constant", amplitude=amplitude, geometry=geometry)

    @classmethod
    def gaussian(cls, sigma: float, area: float = np.pi, center: float = 0.0,
                 geometry: str = "side") -> "DriveEnvelope":
        return cls(kind="gaussian-pulse", sigma=sigma, area=area, center=center, geometry=geometry)

    @classmethod
    def zero(cls) -> "DriveEnvelope":
        return cls(kind="constant", amplitude=0.0, geometry="side")

    def _coupling(self, beta_r: float) -> float:
        return np.sqrt(beta_r) if self.geometry == "waveguide" else 1.0

    def rabi(self, zeta, beta_r: float = 1.0) -> np.ndarray:
        """Rabi frequency Omega(zeta) seen by an emitter at zero propagation phase."""
        z = np.asarray(zeta, dtype=float)
        if self.kind == "constant":
            return np.full(z.shape, 2.0 * self._coupling(beta_r) * complex(self.amplitude))
        if self.kind == "gaussian-pulse":
            # Omega^2 ~ exp(-t^2 / 2 sigma^2)  =>  Omega ~ exp(-t^2 / 4 sigma^2)
            s = np.sqrt(2.0) * self.sigma
            peak = self.area / (np.sqrt(2.0 * np.pi) * s)
            return (peak * np.exp(-0.5 * ((z - self.center) / s) ** 2)).astype(complex)
        re = np.interp(z, self.times, self.values.real, left=0.0, right=0.0)
        im = np.interp(z, self.times, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def field(self, zeta, beta_r: float = 1.0) -> np.ndarray:
        """Coherent field amplitude reaching the detector in the right-going mode."""
        z = np.asarray(zeta, dtype=float)
        if self.geometry == "side":
            return np.zeros(z.shape, dtype=complex)
        if self.kind == "constant":
            return np.full(z.shape, complex(self.amplitude))
        if beta_r <= 0:
            raise ValueError("a pulsed waveguide drive with beta_r = 0 has no defined field amplitude")
        return self.rabi(z, beta_r) / (2.0 * np.sqrt(beta_r))

    def sample(self, grid: TimeGrid, beta_r: float = 1.0) -> "DriveSamples":
        nodes = self.rabi(grid.nodes, beta_r)
        mids = self.rabi(grid.midpoints, beta_r)
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(mids))):
            raise ValueError("drive is not finite on every grid node")
        return DriveSamples(nodes=nodes, midpoints=mids)

    def suggested_grid(self, n_steps: int, tail: float = 12.0, lead: float = 6.0) -> TimeGrid:
        """Grid covering a pulse (``lead`` widths before its centre) plus ``tail`` lifetimes."""
        if self.kind != "gaussian-pulse":
            raise ValueError("suggested_grid is defined for gaussian pulses only")
        s = np.sqrt(2.0) * self.sigma
        start = self.center - lead * s
        return TimeGrid(start, self.center + lead * s + tail, n_steps)


@dataclass(frozen=True)
class DriveSamples:
    """Omega on the nodes and step midpoints of a grid (what RK4 needs)."""

    nodes: np.ndarray
    midpoints: np.ndarray
