"""Momentum-space wave packets on an extended uniform grid.

The grid is the union of one Brillouin zone q in [-1/2, 1/2) hbar K shifted
by every diffraction order n in [-n_max, n_max]:  samples sit at
p = n + q_j with spacing h = 1 / grid_points, so a shift by an integer
number of hbar K maps grid points onto grid points.  Normalization is
``sum |psi|^2 h = 1`` (the trapezoidal rule on the uniform grid, with
vanishing tails).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ladder import G


class GridMismatchError(ValueError):
    pass


def brillouin_grid(grid_points: int) -> np.ndarray:
    """Base quasi-momentum samples q in [-1/2, 1/2), spacing 1/grid_points."""
    if grid_points < 2:
        raise ValueError("need at least 2 grid points per hbar K")
    return -0.5 + np.arange(grid_points) / grid_points


@dataclass
class WavePacket:
    """Complex momentum-space amplitudes, one per internal state.

    ``psi`` has shape (n_states, 2*n_max + 1, grid_points); axis 1 is the
    diffraction order, axis 2 the quasi-momentum sample.
    """

    grid_points: int
    psi: np.ndarray

    @property
    def n_states(self) -> int:
        return self.psi.shape[0]

    @property
    def n_max(self) -> int:
        return (self.psi.shape[1] - 1) // 2

    @property
    def spacing(self) -> float:
        return 1.0 / self.grid_points

    @property
    def q(self) -> np.ndarray:
        return brillouin_grid(self.grid_points)

    def momenta(self) -> np.ndarray:
        """Flattened, strictly increasing momentum samples (hbar K)."""
        n = np.arange(-self.n_max, self.n_max + 1)
        return (n[:, None] + self.q[None, :]).ravel()

    def flat(self) -> np.ndarray:
        """Amplitudes ordered like :meth:`momenta`, shape (n_states, M)."""
        return self.psi.reshape(self.n_states, -1)

    def density(self) -> np.ndarray:
        """|psi|^2 summed over internal states, ordered like momenta()."""
        return np.sum(np.abs(self.flat()) ** 2, axis=0)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.spacing)

    def project(self, state: int | None = None,
                window=None) -> "WavePacket":
        """Zero all amplitudes outside the given internal state and/or the
        momentum window.

        ``window`` is a half-open interval ``(a, b)`` or a set of disjoint
        intervals ``((a1, b1), (a2, b2), ...)``.
        """
        psi = np.zeros_like(self.psi)
        if state is None:
            psi[:] = self.psi
        else:
            psi[state] = self.psi[state]
        if window is not None:
            intervals = window if hasattr(window[0], "__len__") else (window,)
            p = self.momenta()
            keep = np.zeros(p.shape, dtype=bool)
            for a, b in intervals:
                keep |= (p >= a) & (p < b)
            psi *= keep.reshape(1, 2 * self.n_max + 1, self.grid_points)
        return WavePacket(self.grid_points, psi)

    def copy(self) -> "WavePacket":
        return WavePacket(self.grid_points, self.psi.copy())


def gaussian_packet(grid_points: int, n_max: int, p0: float, delta_p: float,
                    n_states: int = 1, state: int = G) -> WavePacket:
    """Normalized Gaussian exp[-(p - p0)^2 / (4 delta_p^2)] in one internal
    state."""
    if delta_p <= 0:
        raise ValueError("delta_p must be positive")
    q = brillouin_grid(grid_points)
    n = np.arange(-n_max, n_max + 1)
    p = n[:, None] + q[None, :]
    amp = np.exp(-((p - p0) ** 2) / (4.0 * delta_p ** 2)).astype(complex)
    psi = np.zeros((n_states, 2 * n_max + 1, grid_points), dtype=complex)
    psi[state] = amp
    packet = WavePacket(grid_points, psi)
    nrm = packet.norm()
    if nrm <= 0:
        raise ValueError("packet has no support on the grid")
    packet.psi /= np.sqrt(nrm)
    return packet


def integrate_interval(p: np.ndarray, y: np.ndarray, a: float, b: float
                       ) -> float:
    """Trapezoidal integral of samples y(p) over [a, b], with linear
    interpolation at the interval endpoints."""
    if b <= a:
        raise ValueError("empty interval")
    lo, hi = max(a, p[0]), min(b, p[-1])
    if hi <= lo:
        return 0.0
    grid = p[(p > lo) & (p < hi)]
    xs = np.concatenate(([lo], grid, [hi]))
    ys = np.interp(xs, p, y)
    return float(np.trapezoid(ys, xs))
