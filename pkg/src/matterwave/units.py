"""Unit conventions.

All internal computation is dimensionless: momenta are measured in units of
the two-photon recoil ``hbar*K``, frequencies in units of the recoil
frequency ``omega_K = hbar*K**2 / (2*M)``, and times in units of
``1/omega_K``.  An atom preset (mass and laser wavelength) is only needed to
convert physical seconds to dimensionless time and back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s (CODATA 2018)


@dataclass(frozen=True)
class AtomPreset:
    """Atomic species parameters used for the seconds <-> dimensionless map."""

    name: str
    mass: float        # kg
    wavelength: float  # m, single-photon wavelength of the diffraction light

    @property
    def recoil_frequency(self) -> float:
        """Two-photon recoil frequency omega_K = hbar K^2 / (2 M) in rad/s."""
        k = 2.0 * math.pi / self.wavelength
        big_k = 2.0 * k  # counterpropagating pair: K = k_b + k_r ~ 2k
        return HBAR * big_k**2 / (2.0 * self.mass)


# 87Rb on the D2 line.  1/omega_K ~ 10.55 us, i.e. omega_K ~ 2pi x 15.08 kHz.
RB87 = AtomPreset(name="Rb87", mass=1.4432e-25, wavelength=780.241e-9)


@dataclass(frozen=True)
class UnitSystem:
    """Converter between physical seconds and dimensionless time.

    Momenta (hbar K) and frequencies (omega_K) are 1 by construction and
    need no conversion.
    """

    atom: AtomPreset = RB87

    @property
    def omega_k(self) -> float:
        return self.atom.recoil_frequency

    def seconds_to_time(self, seconds: float) -> float:
        return seconds * self.omega_k

    def time_to_seconds(self, time: float) -> float:
        return time / self.omega_k

    def microseconds_to_time(self, us: float) -> float:
        return self.seconds_to_time(us * 1e-6)

    def time_to_microseconds(self, time: float) -> float:
        return self.time_to_seconds(time) * 1e6
