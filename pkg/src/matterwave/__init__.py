"""Atomic Raman and Bragg diffraction from retroreflected optical gratings.

Dimensionless conventions throughout: momenta in units of hbar K, frequencies
in units of the (two-photon) recoil frequency omega_K = hbar K^2 / 2M, times
in 1/omega_K.  See :mod:`matterwave.units` for conversions.
"""

from .analysis import (FlatObjectiveError, IntervalSet, NoResonanceError,
                       TransitionScanResult, diffract_packet, efficiency,
                       fwhm, losses, mirror_transfer_curve,
                       optimal_pulse_area, populations, resonance_width,
                       transition_scan)
from .cache import build_cached, cache_dir_from_env, content_key
from .config import (AUTO, ConfigError, DiffractionConfig, Envelope, Geometry,
                     Mechanism, doppler_frequency, peak_coupling_from_area,
                     resonance_detuning)
from .interferometer import (ArmSpec, ArmStep, DegenerateSignalError,
                             InterferogramResult, InterferometerMap,
                             amplitude_map, build_pulses, interfere,
                             propagate_arm, signal, standard_arms)
from .ladder import AmplitudeState, E, G, LadderSystem, eigenstate
from .solver import (SolverError, SolverSettings, StepSizeUnderflow,
                     TruncationError, evolve, evolve_converged, integrate)
from .transition import (BEAM_SPLITTER_AREA, MIRROR_AREA, TransitionFunction,
                         build, prepared_input)
from .units import HBAR, RB87, AtomPreset, UnitSystem
from .wavepacket import (GridMismatchError, WavePacket, brillouin_grid,
                         gaussian_packet, integrate_interval)

__version__ = "0.1.0"

__all__ = [
    "AUTO", "AmplitudeState", "ArmSpec", "ArmStep", "AtomPreset",
    "BEAM_SPLITTER_AREA", "ConfigError", "DegenerateSignalError",
    "DiffractionConfig", "E", "Envelope", "FlatObjectiveError", "G",
    "Geometry", "GridMismatchError", "HBAR", "InterferogramResult",
    "InterferometerMap", "IntervalSet", "LadderSystem", "MIRROR_AREA",
    "Mechanism", "NoResonanceError", "RB87", "SolverError", "SolverSettings",
    "StepSizeUnderflow", "TransitionFunction", "TransitionScanResult",
    "TruncationError", "UnitSystem", "WavePacket", "amplitude_map",
    "brillouin_grid", "build", "build_cached", "build_pulses",
    "cache_dir_from_env", "content_key", "diffract_packet",
    "doppler_frequency", "efficiency", "eigenstate", "evolve",
    "evolve_converged", "fwhm", "gaussian_packet", "integrate",
    "integrate_interval", "interfere", "losses", "mirror_transfer_curve",
    "optimal_pulse_area", "peak_coupling_from_area", "populations",
    "prepared_input", "propagate_arm", "resonance_detuning",
    "resonance_width", "signal", "standard_arms", "transition_scan",
]
