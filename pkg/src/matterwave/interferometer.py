"""Mach-Zehnder interferometer composed of three diffraction pulses.

The beam-splitter / mirror / beam-splitter sequence is propagated along the
two main arms only; spurious paths are removed by projecting the wave
packet onto each arm's designated internal-state block and momentum window
between pulses.  Free-evolution phases (and the internal-state phase for
Raman) cancel between the two arms and are therefore not applied; the scan
phase delta_phi is injected into the upper arm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cache import build_cached
from .config import DiffractionConfig, Geometry, Mechanism
from .ladder import E, G
from .solver import SolverSettings
from .transition import BEAM_SPLITTER_AREA, MIRROR_AREA, TransitionFunction
from .wavepacket import WavePacket

EXIT_WINDOW = (-0.5, 0.5)


class DegenerateSignalError(RuntimeError):
    pass


class EmptyArmError(ValueError):
    pass


@dataclass(frozen=True)
class ArmStep:
    """One pulse of an arm: which internal block it uses and which
    momentum-order window the arm occupies afterwards."""

    pulse: str                     # "bs" or "mirror"
    state_in: int
    state_out: int
    #: single half-open interval (a, b) or a set ((a1, b1), (a2, b2), ...)
    window_out: tuple


@dataclass(frozen=True)
class ArmSpec:
    steps: tuple[ArmStep, ...]

    def __post_init__(self):
        if len(self.steps) != 3:
            raise ValueError("a Mach-Zehnder arm has exactly three pulses")
        for a, b in zip(self.steps, self.steps[1:]):
            if a.state_out != b.state_in:
                raise EmptyArmError("internal-state blocks do not chain")


def standard_arms(mechanism: Mechanism, geometry: Geometry
                  ) -> tuple[ArmSpec, ArmSpec]:
    """The two main paths of the beam-splitter/mirror/beam-splitter
    sequence, ending in the ground-state exit port around p = 0.

    The first beam splitter separates the arms, so its window is a single
    order slot.  The double-geometry mirror keeps the whole diffracted
    block ±ħK: its quasi-resonant leakage (the part that fails to reverse
    the momentum) stays in the arm and distorts the two wave packets
    asymmetrically, which is what degrades the contrast for broad packets.
    """
    e = E if mechanism is Mechanism.RAMAN else G
    up, dn, exit_w = (0.5, 1.5), (-1.5, -0.5), EXIT_WINDOW
    both = (dn, up)
    if geometry is Geometry.SINGLE:
        upper = ArmSpec((
            ArmStep("bs", G, e, up),
            ArmStep("mirror", e, G, exit_w),
            ArmStep("bs", G, G, exit_w),
        ))
        lower = ArmSpec((
            ArmStep("bs", G, G, exit_w),
            ArmStep("mirror", G, e, up),
            ArmStep("bs", e, G, exit_w),
        ))
    else:
        upper = ArmSpec((
            ArmStep("bs", G, e, up),
            ArmStep("mirror", e, e, both),
            ArmStep("bs", e, G, exit_w),
        ))
        lower = ArmSpec((
            ArmStep("bs", G, e, dn),
            ArmStep("mirror", e, e, both),
            ArmStep("bs", e, G, exit_w),
        ))
    return upper, lower


def build_pulses(mechanism: Mechanism, geometry: Geometry, delta_tau: float,
                 grid_points: int = 256,
                 settings: SolverSettings = SolverSettings(),
                 cache_dir=None) -> tuple[TransitionFunction,
                                          TransitionFunction]:
    """Calibrated beam-splitter (pi/2) and mirror (pi) transition functions
    with all input columns the standard arms need."""
    e = E if mechanism is Mechanism.RAMAN else G
    if geometry is Geometry.SINGLE:
        bs_cols = [(G, 0), (e, 1)]
        m_cols = [(G, 0), (e, 1)]
    else:
        bs_cols = [(G, 0), (e, -1), (e, 1)]
        m_cols = [(e, -1), (e, 1)]
    bs_cols, m_cols = sorted(set(bs_cols)), sorted(set(m_cols))

    def cfg(area):
        return DiffractionConfig(mechanism, geometry, delta_tau=delta_tau,
                                 pulse_area=area)

    bs = build_cached(cfg(BEAM_SPLITTER_AREA), grid_points, bs_cols,
                      settings, cache_dir=cache_dir)
    mirror = build_cached(cfg(MIRROR_AREA), grid_points, m_cols, settings,
                          cache_dir=cache_dir)
    common = max(bs.n_max, mirror.n_max)
    return bs.padded(common), mirror.padded(common)


def propagate_arm(psi: WavePacket, arm: ArmSpec,
                  pulses: tuple[TransitionFunction, TransitionFunction]
                  ) -> WavePacket:
    """Propagate through bs-mirror-bs, projecting onto the arm's designated
    block and window after every pulse."""
    bs, mirror = pulses
    window = EXIT_WINDOW  # initial packet is centered at p0 = 0
    for step in arm.steps:
        pulse = mirror if step.pulse == "mirror" else bs
        psi = pulse.apply(psi.project(step.state_in, window))
        window = step.window_out
        psi = psi.project(step.state_out, window)
    return psi


@dataclass
class InterferogramResult:
    phases: np.ndarray
    intensities: np.ndarray
    amplitude: float
    contrast: float
    fit_residual: float      # relative rms deviation from A/2 (1 + C cos)


def interfere(psi_up: WavePacket, psi_low: WavePacket,
              phase_samples: int = 64) -> InterferogramResult:
    """Exit-port signal I(dphi) = integral |psi_up e^{i dphi} + psi_low|^2
    over the exit window, with amplitude and contrast from the sampled
    extrema."""
    if phase_samples < 32:
        raise ValueError("need at least 32 phase samples")
    h = psi_up.spacing
    u, low = psi_up.flat(), psi_low.flat()
    base = float(np.sum(np.abs(u) ** 2 + np.abs(low) ** 2)) * h
    cross = complex(np.sum(u * np.conj(low))) * h

    phases = np.linspace(0.0, 2.0 * math.pi, phase_samples)
    intensities = base + 2.0 * np.real(np.exp(1j * phases) * cross)

    amplitude = float(np.max(intensities) + np.min(intensities))
    if amplitude < 1e-9:
        raise DegenerateSignalError("interference signal vanishes "
                                    f"(A = {amplitude:.3e})")
    contrast = float((np.max(intensities) - np.min(intensities)) / amplitude)

    basis = np.column_stack([np.ones_like(phases), np.cos(phases),
                             np.sin(phases)])
    coef, *_ = np.linalg.lstsq(basis, intensities, rcond=None)
    resid = intensities - basis @ coef
    fit_residual = float(np.sqrt(np.mean(resid ** 2)) / amplitude)
    return InterferogramResult(phases=phases, intensities=intensities,
                               amplitude=amplitude, contrast=contrast,
                               fit_residual=fit_residual)


def signal(mechanism: Mechanism, geometry: Geometry, delta_tau: float,
           delta_p: float, phase_samples: int = 64, grid_points: int = 256,
           settings: SolverSettings = SolverSettings(), cache_dir=None
           ) -> InterferogramResult:
    """Full interferogram for a Gaussian packet at rest."""
    pulses = build_pulses(mechanism, geometry, delta_tau, grid_points,
                          settings, cache_dir)
    return signal_from_pulses(pulses, mechanism, geometry, delta_p,
                              phase_samples)


def signal_from_pulses(pulses, mechanism: Mechanism, geometry: Geometry,
                       delta_p: float, phase_samples: int = 64
                       ) -> InterferogramResult:
    bs, _ = pulses
    psi_i = bs.gaussian_input(0.0, delta_p, state=G)
    upper, lower = standard_arms(mechanism, geometry)
    psi_up = propagate_arm(psi_i, upper, pulses)
    psi_low = propagate_arm(psi_i, lower, pulses)
    return interfere(psi_up, psi_low, phase_samples)


@dataclass
class InterferometerMap:
    mechanism: Mechanism
    geometry: Geometry
    delta_p: np.ndarray
    delta_tau: np.ndarray
    amplitude: np.ndarray    # (n_dp, n_dtau)
    contrast: np.ndarray     # (n_dp, n_dtau)


def amplitude_map(mechanism: Mechanism, geometry: Geometry, delta_p_grid,
                  delta_tau_grid, phase_samples: int = 64,
                  grid_points: int = 256,
                  settings: SolverSettings = SolverSettings(),
                  cache_dir=None) -> InterferometerMap:
    """Sweep of `signal` over momentum width and pulse duration; pulses are
    built once per duration and reused for every width."""
    delta_p_grid = np.asarray(delta_p_grid, dtype=float)
    delta_tau_grid = np.asarray(delta_tau_grid, dtype=float)
    amp = np.empty((len(delta_p_grid), len(delta_tau_grid)))
    con = np.empty_like(amp)
    for j, dtau in enumerate(delta_tau_grid):
        pulses = build_pulses(mechanism, geometry, float(dtau), grid_points,
                              settings, cache_dir)
        for i, dp in enumerate(delta_p_grid):
            try:
                res = signal_from_pulses(pulses, mechanism, geometry,
                                         float(dp), phase_samples)
            except DegenerateSignalError:
                amp[i, j] = 0.0     # blocked path, no signal
                con[i, j] = 0.0
                continue
            amp[i, j] = res.amplitude
            con[i, j] = res.contrast
    return InterferometerMap(mechanism=mechanism, geometry=geometry,
                             delta_p=delta_p_grid, delta_tau=delta_tau_grid,
                             amplitude=amp, contrast=con)
