"""Uniform dimensionless time grid and the quadratures used on it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid over dimensionless time zeta = Gamma * t.

    Node ``i`` sits at ``zeta_start + i * h`` for ``i = 0 .. n_steps``, so a grid
    with ``n_steps`` steps has ``n_steps + 1`` nodes.
    """

    zeta_start: float
    zeta_end: float
    n_steps: int

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ValueError(f"n_steps must be an integer >= 2, got {self.n_steps!r}")
        if not (np.isfinite(self.zeta_start) and np.isfinite(self.zeta_end)):
            raise ValueError("grid bounds must be finite")
        if self.zeta_end <= self.zeta_start:
            raise ValueError(
                f"step size must be positive: zeta_end={self.zeta_end} <= zeta_start={self.zeta_start}"
            )
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def h(self) -> float:
        return (self.zeta_end - self.zeta_start) / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    @property
    def span(self) -> float:
        return self.zeta_end - self.zeta_start

    @property
    def nodes(self) -> np.ndarray:
        return self.zeta_start + self.h * np.arange(self.n_nodes)

    @property
    def midpoints(self) -> np.ndarray:
        return self.zeta_start + self.h * (np.arange(self.n_steps) + 0.5)

    def index_of(self, zeta: float) -> int:
        """Return the node index of ``zeta``; raise if it is not a grid node."""
        x = (zeta - self.zeta_start) / self.h
        i = int(round(x))
        if not (0 <= i <= self.n_steps) or abs(x - i) > 1e-9:
            raise ValueError(f"zeta={zeta} is not a node of {self}")
        return i

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.zeta_start, self.zeta_end, self.n_steps * factor)


def trapezoid_weights(n_nodes: int, h: float) -> np.ndarray:
    w = np.full(n_nodes, h)
    w[0] = w[-1] = 0.5 * h
    return w


def trapz(values: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Trapezoidal rule on a uniform grid along ``axis``."""
    v = np.moveaxis(np.asarray(values), axis, -1)
    if v.shape[-1] < 2:
        return np.zeros(v.shape[:-1], dtype=v.dtype)
    return h * (v.sum(axis=-1) - 0.5 * (v[..., 0] + v[..., -1]))


def triangle_integral(table: np.ndarray, h: float) -> float:
    """Trapezoidal double integral over the ordered region zeta_e1 <= zeta_e2.

    ``table[i2, i1]`` holds the integrand at (zeta_e2, zeta_e1); only the lower
    triangle ``i1 <= i2`` (diagonal included) is read.
    """
    f = np.tril(np.asarray(table))
    n = f.shape[0]
    inner = h * (f.sum(axis=1) - 0.5 * f[:, 0] - 0.5 * np.diagonal(f))
    inner[0] = 0.0
    if n < 2:
        return 0.0
    return float(np.real(trapz(inner, h)))
