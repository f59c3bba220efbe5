"""Pulse configuration and elementary frequency relations.

Everything here is dimensionless (see :mod:`matterwave.units`): momenta in
units of hbar K, frequencies in units of omega_K, times in units of
1/omega_K.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)


class Mechanism(enum.Enum):
    RAMAN = "raman"
    BRAGG = "bragg"


class Geometry(enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"


class Envelope(enum.Enum):
    GAUSSIAN = "gaussian"
    #: Constant coupling on [-delta_tau/2, +delta_tau/2]; test hook for
    #: comparing against the closed-form two-level Rabi solution.
    BOX = "box"


class ConfigError(ValueError):
    """Raised for malformed pulse configurations."""


def gaussian_envelope(t, peak, delta_tau):
    """Coupling strength peak * exp(-t^2 / (2 delta_tau^2))."""
    if delta_tau <= 0:
        raise ConfigError("delta_tau must be positive")
    t = np.asarray(t)
    return peak * np.exp(-(t * t) / (2.0 * delta_tau * delta_tau))


def box_envelope(t, peak, delta_tau):
    """Constant coupling `peak` for |t| <= delta_tau / 2, zero outside."""
    if delta_tau <= 0:
        raise ConfigError("delta_tau must be positive")
    t = np.asarray(t)
    return np.where(np.abs(t) <= 0.5 * delta_tau, peak, 0.0)


def effective_rabi_factor(geometry: Geometry) -> float:
    """Ratio Omega_R / Omega: 2 for single diffraction, sqrt(2) for double."""
    return 2.0 if geometry is Geometry.SINGLE else math.sqrt(2.0)


def peak_coupling_from_area(area, delta_tau, geometry,
                            envelope=Envelope.GAUSSIAN):
    """Peak coupling Omega_0 that gives pulse area ``integral Omega_R dt``.

    The pulse area is defined with the effective Rabi frequency
    Omega_R = c * Omega, c = 2 (single) or sqrt(2) (double).  For the
    Gaussian envelope ``integral Omega dt = Omega_0 delta_tau sqrt(2 pi)``,
    for the box envelope it is ``Omega_0 delta_tau``.
    """
    if delta_tau <= 0:
        raise ConfigError("delta_tau must be positive")
    if np.any(np.asarray(area) < 0):
        raise ConfigError("pulse area must be non-negative")
    c = effective_rabi_factor(geometry)
    if envelope is Envelope.GAUSSIAN:
        return np.asarray(area) / (c * delta_tau * SQRT_2PI)
    return np.asarray(area) / (c * delta_tau)


def doppler_frequency(p):
    """Doppler detuning omega_D = p K / M = 2 p in recoil units."""
    return 2.0 * np.asarray(p)


def resonance_detuning(mechanism: Mechanism, p0: float = 0.0) -> float:
    """Two-photon detuning that makes |p0> -> |p0 + hbar K> resonant.

    Expressed in the combined-detuning convention: for Raman this is
    Delta_omega - omega_eg - omega_AC, for Bragg it is Delta_omega itself.
    Both reduce to omega_K + p0 K / M = 1 + 2 p0.
    """
    del mechanism  # identical in the combined convention
    return 1.0 + 2.0 * p0


#: Sentinel for automatic truncation-order control.
AUTO = None


@dataclass(frozen=True)
class DiffractionConfig:
    """All parameters of a single diffraction pulse.

    Attributes
    ----------
    mechanism, geometry : which of the four coupled equation systems to use.
    delta_tau : pulse width, units 1/omega_K.
    pulse_area : radians, via the effective Rabi frequency.
    p0 : mean initial momentum in hbar K (bookkeeping for analyses).
    two_photon_detuning : combined two-photon detuning in omega_K.  Defaults
        to the p0 = 0 resonance.
    n_max : largest retained diffraction order, or None for automatic
        convergence control.
    time_window_factor : integrate over t in [-f delta_tau, +f delta_tau].
    envelope : Gaussian (default) or box (test hook).
    area_geometry : geometry used in the area -> Omega_0 conversion.  Defaults
        to ``geometry``; the double-to-single transition scan measures areas
        in the single-diffraction convention while evolving double-diffraction
        dynamics.
    """

    mechanism: Mechanism
    geometry: Geometry
    delta_tau: float
    pulse_area: float
    p0: float = 0.0
    two_photon_detuning: float = 1.0
    n_max: Optional[int] = AUTO
    time_window_factor: float = 5.0
    envelope: Envelope = Envelope.GAUSSIAN
    area_geometry: Optional[Geometry] = None

    def __post_init__(self):
        if self.delta_tau <= 0:
            raise ConfigError("delta_tau must be positive")
        if self.pulse_area < 0:
            raise ConfigError("pulse_area must be non-negative")
        if self.n_max is not AUTO and self.n_max < 2:
            raise ConfigError("explicit n_max must be at least 2")
        if self.time_window_factor <= 0:
            raise ConfigError("time_window_factor must be positive")

    @property
    def n_states(self) -> int:
        """Internal states carried on the ladder: (g, e) for Raman, g only
        for Bragg."""
        return 2 if self.mechanism is Mechanism.RAMAN else 1

    @property
    def peak_coupling(self) -> float:
        """Peak coupling Omega_0 of the envelope."""
        geom = self.area_geometry or self.geometry
        return float(peak_coupling_from_area(
            self.pulse_area, self.delta_tau, geom, self.envelope))

    @property
    def epsilon(self) -> float:
        """Regime parameter epsilon = Omega_0 / omega_K.  epsilon << 1 is the
        Bragg regime, epsilon >~ 1 the Raman-Nath regime."""
        return self.peak_coupling

    @property
    def time_window(self) -> tuple[float, float]:
        """Integration window.  The box envelope is integrated exactly over
        its support; the Gaussian over +- time_window_factor * delta_tau."""
        if self.envelope is Envelope.BOX:
            half = 0.5 * self.delta_tau
        else:
            half = self.time_window_factor * self.delta_tau
        return (-half, half)

    def coupling(self, t):
        """Time-dependent coupling strength Omega(t)."""
        env = gaussian_envelope if self.envelope is Envelope.GAUSSIAN \
            else box_envelope
        return env(t, self.peak_coupling, self.delta_tau)

    def with_(self, **changes) -> "DiffractionConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "mechanism": self.mechanism.value,
            "geometry": self.geometry.value,
            "delta_tau": self.delta_tau,
            "pulse_area": self.pulse_area,
            "p0": self.p0,
            "two_photon_detuning": self.two_photon_detuning,
            "n_max": self.n_max,
            "time_window_factor": self.time_window_factor,
            "envelope": self.envelope.value,
            "area_geometry":
                None if self.area_geometry is None else self.area_geometry.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiffractionConfig":
        d = dict(d)
        d["mechanism"] = Mechanism(d["mechanism"])
        d["geometry"] = Geometry(d["geometry"])
        d["envelope"] = Envelope(d.get("envelope", "gaussian"))
        if d.get("area_geometry") is not None:
            d["area_geometry"] = Geometry(d["area_geometry"])
        return cls(**d)
