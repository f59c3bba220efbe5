"""Coupled momentum-ladder equations for Raman/Bragg diffraction.

The amplitudes live on a truncated ladder of diffraction orders
n = -n_max .. n_max around a quasi-momentum q in [-1/2, 1/2) hbar K;
order n holds the amplitude of the momentum state |q + n hbar K>.  Raman
carries two internal states (g, e), Bragg only g.  The right-hand sides are
formulated in the interaction picture with a general two-photon detuning, so
off-resonant and higher-order couplings appear as oscillating phase factors.
Couplings across the ladder edge are dropped (truncation); convergence in
n_max is enforced by the solver layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import (ConfigError, DiffractionConfig, Envelope, Geometry,
                     Mechanism)

G, E = 0, 1  # internal-state indices


@dataclass
class AmplitudeState:
    """Complex amplitudes on the truncated ladder.

    ``amps`` has shape (n_states, 2*n_max + 1); column j is diffraction
    order ``j - n_max``.  ``quasi_momentum`` is the fixed offset of the
    ladder within one Brillouin zone.
    """

    quasi_momentum: float
    amps: np.ndarray

    @property
    def n_states(self) -> int:
        return self.amps.shape[0]

    @property
    def n_max(self) -> int:
        return (self.amps.shape[1] - 1) // 2

    def amplitude(self, state: int, order: int) -> complex:
        return self.amps[state, order + self.n_max]

    def population(self, state: int, order: int) -> float:
        return float(np.abs(self.amplitude(state, order)) ** 2)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def padded(self, n_max: int) -> "AmplitudeState":
        """Embed into a larger ladder (same quasi-momentum)."""
        extra = n_max - self.n_max
        if extra < 0:
            raise ValueError("cannot pad to a smaller ladder")
        amps = np.pad(self.amps, ((0, 0), (extra, extra)))
        return AmplitudeState(self.quasi_momentum, amps)


def eigenstate(n_states: int, n_max: int, quasi_momentum: float,
               order: int = 0, state: int = G) -> AmplitudeState:
    """Momentum eigenstate |state, quasi_momentum + order * hbar K>."""
    if abs(order) > n_max:
        raise ValueError("order outside the truncated ladder")
    if state >= n_states:
        raise ValueError("internal state not carried by this mechanism")
    amps = np.zeros((n_states, 2 * n_max + 1), dtype=complex)
    amps[state, order + n_max] = 1.0
    return AmplitudeState(quasi_momentum, amps)


class LadderSystem:
    """Vectorized right-hand side d(amplitudes)/dt for one pulse.

    Evaluation is pure and broadcasts over arbitrary leading batch axes:
    ``quasi_momentum`` and ``peak`` may be scalars or arrays whose shape
    matches the leading axes of the state array (state shape
    ``batch + (n_states, 2 n_max + 1)``).  Batching over quasi-momenta (for
    transition-function columns) or peak couplings (for pulse-area scans)
    therefore costs a single adaptive solve.
    """

    def __init__(self, config: DiffractionConfig, n_max: int,
                 quasi_momentum=0.0, peak=None, grating_weights=(1.0, 1.0)):
        if n_max < 1:
            raise ConfigError("n_max must be at least 1")
        self.config = config
        self.n_max = n_max
        self.n_states = config.n_states
        q = np.asarray(quasi_momentum, dtype=float)
        self.quasi_momentum = q
        self.peak = np.asarray(config.peak_coupling if peak is None else peak,
                               dtype=float)
        # weight on the extra grating (w1) and the single-geometry grating
        # (w2); (0, 1) reduces a double system termwise to the single one
        self.w1, self.w2 = grating_weights

        n = np.arange(-n_max, n_max + 1, dtype=float)
        wd = 2.0 * q[..., np.newaxis] if q.ndim else 2.0 * q
        d = config.two_photon_detuning
        mech, geom = config.mechanism, config.geometry

        # Phase-factor frequencies, one entry per coupled pair of adjacent
        # orders (length 2 n_max).  All couplings come in conjugate pairs, so
        # the generator is anti-Hermitian and the evolution unitary.
        if mech is Mechanism.RAMAN:
            # g_n <-> e_{n+1}: present in both geometries
            self.theta_a = wd - d + 1.0 + 2.0 * n[:-1]
            if geom is Geometry.DOUBLE:
                # g_n <-> e_{n-1}: the counterpropagating grating
                self.theta_b = wd + d - 1.0 + 2.0 * n[1:]
        else:
            # g_n <-> g_{n+1} via the single-geometry grating
            self.theta_a = wd - d + 1.0 + 2.0 * n[:-1]
            if geom is Geometry.DOUBLE:
                # same pair driven by the counterpropagating grating
                self.theta_b = wd + d + 1.0 + 2.0 * n[:-1]

        self._is_raman = mech is Mechanism.RAMAN
        self._is_double = geom is Geometry.DOUBLE
        self._gaussian = config.envelope is Envelope.GAUSSIAN
        self._dtau2 = config.delta_tau ** 2
        self._half_box = 0.5 * config.delta_tau

    # -- coupling strength -------------------------------------------------
    def coupling(self, t: float):
        if self._gaussian:
            return self.peak * np.exp(-t * t / (2.0 * self._dtau2))
        return self.peak if abs(t) <= self._half_box else 0.0 * self.peak

    # -- right-hand side ---------------------------------------------------
    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        """d(amps)/dt at time t; y has shape batch + (n_states, 2n_max+1)."""
        if y.shape[-2] != self.n_states:
            raise ConfigError(
                "state/mechanism mismatch: expected %d internal state(s), "
                "got %d" % (self.n_states, y.shape[-2]))
        omega = self.coupling(t)
        if omega.ndim:
            omega = omega[..., np.newaxis]
        dy = np.zeros_like(y)
        pha = np.exp((-1j * t) * self.theta_a)
        if self._is_raman:
            g, e = y[..., G, :], y[..., E, :]
            dg, de = dy[..., G, :], dy[..., E, :]
            w = self.w2 if self._is_double else 1.0
            dg[..., :-1] += (1j * w) * omega * pha * e[..., 1:]
            de[..., 1:] += (1j * w) * omega * np.conj(pha) * g[..., :-1]
            if self._is_double:
                phb = np.exp((1j * t) * self.theta_b)
                dg[..., 1:] += (1j * self.w1) * omega * phb * e[..., :-1]
                de[..., :-1] += (1j * self.w1) * omega * np.conj(phb) * g[..., 1:]
        else:
            g, dg = y[..., G, :], dy[..., G, :]
            if self._is_double:
                phb = np.exp((-1j * t) * self.theta_b)
                ph = self.w2 * pha + self.w1 * phb
            else:
                ph = pha  # exp(-i theta_a t), conjugate pair below
            dg[..., :-1] += 1j * omega * ph * g[..., 1:]
            dg[..., 1:] += 1j * omega * np.conj(ph) * g[..., :-1]
        return dy
