"""Scalar diagnostics of a diffraction pulse.

Resonance width (velocity selectivity), diffraction efficiency, losses to
spurious momentum states, per-order populations of double-diffraction
mirrors, the optimal pulse area for a Doppler-detuned eigenstate, and the
double-to-single diffraction transition scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cache import build_cached
from .config import (ConfigError, DiffractionConfig, Geometry, Mechanism,
                     peak_coupling_from_area, resonance_detuning)
from .ladder import G
from .solver import SolverSettings, _converged_solve, _solve_arrays
from .transition import build, prepared_input
from .wavepacket import integrate_interval


class NoResonanceError(RuntimeError):
    pass


class FlatObjectiveError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint closed momentum intervals, units hbar K."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        iv = sorted(self.intervals)
        for (a, b) in iv:
            if b <= a:
                raise ValueError("empty interval")
        for (_, b), (a2, _) in zip(iv, iv[1:]):
            if a2 < b:
                raise ValueError("intervals overlap")

    def shifted(self, dp: float) -> "IntervalSet":
        return IntervalSet(tuple((a + dp, b + dp) for a, b in self.intervals))

    def integrate(self, p: np.ndarray, y: np.ndarray) -> float:
        return sum(integrate_interval(p, y, a, b) for a, b in self.intervals)


#: Target interval of the diffraction efficiency, around |+hbar K>.
TARGET_INTERVAL = IntervalSet(((0.5, 1.5),))


def loss_interval(geometry: Geometry, mirror: bool) -> IntervalSet:
    """Integration interval around the states a perfect pulse may occupy."""
    if geometry is Geometry.SINGLE:
        return IntervalSet(((-0.5, 1.5),))
    if mirror:
        return IntervalSet(((-1.5, -0.5), (0.5, 1.5)))
    return IntervalSet(((-1.5, 1.5),))




# ---------------------------------------------------------------------------
# FWHM / resonance width
# ---------------------------------------------------------------------------

def fwhm(x: np.ndarray, y: np.ndarray, all_peaks: bool = True) -> float:
    """Full width at half maximum with linear interpolation.

    With ``all_peaks`` (default) the width spans the outermost half-maximum
    crossings, so several peaks above half maximum merge into one width.
    The single-peak variant only follows the peak containing the maximum.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    half = np.max(y) / 2.0
    above = y >= half

    def crossing(i, j):
        # half-max point between samples i and j
        return x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i])

    idx = np.nonzero(above)[0]
    if not all_peaks:
        peak = int(np.argmax(y))
        lo = peak
        while lo > 0 and above[lo - 1]:
            lo -= 1
        hi = peak
        while hi < len(y) - 1 and above[hi + 1]:
            hi += 1
    else:
        lo, hi = idx[0], idx[-1]
    left = x[lo] if lo == 0 else crossing(lo - 1, lo)
    right = x[hi] if hi == len(y) - 1 else crossing(hi, hi + 1)
    return float(right - left)


def resonant_final_state(config: DiffractionConfig, transfer_orders: int,
                         input_state: int = G) -> int:
    """Internal state reached by the resonant transfer: each hbar K hop of a
    Raman pulse flips g <-> e; Bragg never leaves g."""
    if config.mechanism is Mechanism.BRAGG:
        return G
    return input_state ^ (transfer_orders % 2)


def mirror_transfer_curve(config: DiffractionConfig, grid_points: int = 1024,
                          settings: SolverSettings = SolverSettings(),
                          extend: int = 1, center_order: int = 0,
                          cache_dir=None):
    """Resonant mirror transfer probability as a function of the initial
    momentum argument p.

    Single geometry: |G(p + hbar K, p)|^2; double: |G(p + hbar K,
    p - hbar K)|^2 (the momentum argument p is the midpoint convention of the
    double mirror).  Stitches transition-function columns of adjacent input
    orders, so the curve may span several hbar K.
    """
    double = config.geometry is Geometry.DOUBLE
    in_off, out_off, hops = (-1, 1, 2) if double else (0, 1, 1)
    s_i, _ = prepared_input(config, mirror=True)
    s_f = resonant_final_state(config, hops, s_i)
    ms = range(center_order - extend, center_order + extend + 1)
    cols = [(s_i, m + in_off) for m in ms]
    tf = build_cached(config, grid_points, cols, settings,
                      cache_dir=cache_dir)
    p = np.concatenate([tf.q + m for m in ms])
    y = np.concatenate(
        [np.abs(tf.element(s_f, m + out_off, s_i, m + in_off)) ** 2
         for m in ms])
    return p, y, tf


def resonance_width(config: DiffractionConfig, grid_points: int = 1024,
                    settings: SolverSettings = SolverSettings(),
                    all_peaks: bool = True, cache_dir=None) -> float:
    """FWHM in the initial momentum of the resonant mirror transfer."""
    extend = 1
    while True:
        p, y, _ = mirror_transfer_curve(config, grid_points, settings,
                                        extend=extend, cache_dir=cache_dir)
        if np.max(y) < 1e-6:
            raise NoResonanceError(
                "no resonance: peak transfer probability below 1e-6")
        half = np.max(y) / 2.0
        if (y[0] < half and y[-1] < half) or extend >= 4:
            return fwhm(p, y, all_peaks=all_peaks)
        extend += 1  # curve clipped above half maximum: widen the window


# ---------------------------------------------------------------------------
# Efficiency, losses, populations
# ---------------------------------------------------------------------------

def _support_orders(center: float, delta_p: float) -> list[int]:
    # 5 sigma in amplitude: the neglected probability mass is below 1e-6
    reach = 5.0 * delta_p
    lo = math.floor(center - reach + 0.5)
    hi = math.ceil(center + reach - 0.5)
    return list(range(lo, hi + 1))


def _support_subset(grid_points: int, center: float, delta_p: float
                    ) -> Optional[np.ndarray]:
    h = 1.0 / grid_points
    reach = 5.0 * delta_p + 2 * h
    if reach >= 0.5:
        return None
    q = -0.5 + np.arange(grid_points) * h
    frac = (q - center + 0.5) % 1.0 - 0.5
    return np.nonzero(np.abs(frac) <= reach)[0]


def diffract_packet(config: DiffractionConfig, delta_p: float,
                    center: float, state: int = G, grid_points: int = 256,
                    settings: SolverSettings = SolverSettings(),
                    cache_dir=None):
    """Send a Gaussian packet through the pulse; returns (psi_i, psi_f, tf)."""
    cols = [(state, m) for m in _support_orders(center, delta_p)]
    tf = build_cached(config, grid_points, cols, settings,
                      cache_dir=cache_dir)
    psi_i = tf.gaussian_input(center, delta_p, state=state)
    return psi_i, tf.apply(psi_i), tf


def efficiency(config: DiffractionConfig, delta_p: float,
               center: Optional[float] = None,
               target: Optional[IntervalSet] = None,
               grid_points: int = 256,
               settings: SolverSettings = SolverSettings(),
               cache_dir=None) -> float:
    """Probability integrated over the target interval after the pulse."""
    mirror = config.pulse_area >= 0.75 * math.pi
    state, conv_center = prepared_input(config, mirror)
    if center is None:
        center = conv_center
    if target is None:
        target = TARGET_INTERVAL
    _, psi_f, _ = diffract_packet(config, delta_p, center, state,
                                  grid_points, settings, cache_dir)
    return target.integrate(psi_f.momenta(), psi_f.density())


def losses(config: DiffractionConfig, delta_p: float, mirror: bool,
           grid_points: int = 256,
           settings: SolverSettings = SolverSettings(),
           cache_dir=None) -> float:
    """Population ending up outside the states a perfect pulse would occupy."""
    state, center = prepared_input(config, mirror)
    interval = loss_interval(config.geometry, mirror)
    _, psi_f, _ = diffract_packet(config, delta_p, center, state,
                                  grid_points, settings, cache_dir)
    return 1.0 - interval.integrate(psi_f.momenta(), psi_f.density())


def populations(config: DiffractionConfig, delta_p: float,
                grid_points: int = 256,
                settings: SolverSettings = SolverSettings(),
                cache_dir=None) -> dict[str, float]:
    """Double-mirror bins: P(-hbar K), P(0), P(+hbar K) and everything else."""
    if config.geometry is not Geometry.DOUBLE:
        raise ConfigError("populations() is a double-geometry mirror preset")
    state, center = prepared_input(config, mirror=True)
    _, psi_f, _ = diffract_packet(config, delta_p, center, state,
                                  grid_points=grid_points, settings=settings,
                                  cache_dir=cache_dir)
    p, dens = psi_f.momenta(), psi_f.density()
    bins = {
        "minus": integrate_interval(p, dens, -1.5, -0.5),
        "zero": integrate_interval(p, dens, -0.5, 0.5),
        "plus": integrate_interval(p, dens, 0.5, 1.5),
    }
    bins["other"] = 1.0 - sum(bins.values())
    return bins


# ---------------------------------------------------------------------------
# Optimal pulse area and the double-to-single transition
# ---------------------------------------------------------------------------

def wrap_to_zone(p: float) -> tuple[float, int]:
    """Split p into quasi-momentum q in [-1/2, 1/2) and integer order."""
    q = (p + 0.5) % 1.0 - 0.5
    return q, round(p - q)


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a, b, tol):
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def eigenstate_transfer(mechanism: Mechanism, p0: float, delta_tau: float,
                        areas, settings: SolverSettings = SolverSettings(),
                        geometry: Geometry = Geometry.DOUBLE,
                        n_max: Optional[int] = None):
    """Transfer probability |p0> -> |p0 + hbar K> for a batch of pulse areas.

    Areas are measured in the single-diffraction convention regardless of
    the geometry of the dynamics (the two-to-one comparison of the
    double-to-single transition).  Returns (probabilities, n_max_used).
    """
    areas = np.atleast_1d(np.asarray(areas, dtype=float))
    q, m0 = wrap_to_zone(p0)
    config = DiffractionConfig(
        mechanism, geometry, delta_tau=delta_tau, pulse_area=float(areas[0]),
        p0=p0, two_photon_detuning=resonance_detuning(mechanism, p0),
        area_geometry=Geometry.SINGLE)
    peaks = peak_coupling_from_area(areas, delta_tau, Geometry.SINGLE,
                                    config.envelope)
    s_f = resonant_final_state(config, 1)
    floor = max(3, abs(m0) + 2)

    def y0_for(n):
        y0 = np.zeros((len(areas), config.n_states, 2 * n + 1),
                      dtype=complex)
        y0[:, G, m0 + n] = 1.0
        return y0

    if n_max is None:
        y, n_used = _converged_solve(config, y0_for, q, settings,
                                     peak=peaks, floor=floor)
    else:
        n_used = max(n_max, floor)
        y = _solve_arrays(config, n_used, y0_for(n_used), q, settings,
                          peak=peaks)
    prob = np.abs(y[:, s_f, m0 + 1 + n_used]) ** 2
    return prob, n_used


def optimal_pulse_area(mechanism: Mechanism, p0: float, delta_tau: float,
                       settings: SolverSettings = SolverSettings(),
                       geometry: Geometry = Geometry.DOUBLE,
                       bounds: tuple[float, float] = (0.5 * math.pi,
                                                     1.5 * math.pi),
                       coarse_points: int = 64, tol: float = 1e-3
                       ) -> tuple[float, float]:
    """Pulse area maximizing the eigenstate transfer |p0> -> |p0 + hbar K>.

    Deterministic: a coarse scan followed by golden-section refinement.
    Returns (area, transfer probability at the optimum).
    """
    areas = np.linspace(bounds[0], bounds[1], coarse_points)
    probs, n_used = eigenstate_transfer(mechanism, p0, delta_tau, areas,
                                        settings, geometry)
    if np.max(probs) - np.min(probs) < 1e-6:
        raise FlatObjectiveError("transfer probability is flat in the "
                                 "pulse area; nothing to optimize")
    best = int(np.argmax(probs))
    lo = areas[max(best - 1, 0)]
    hi = areas[min(best + 1, coarse_points - 1)]

    def objective(area):
        prob, _ = eigenstate_transfer(mechanism, p0, delta_tau, [area],
                                      settings, geometry, n_max=n_used)
        return float(prob[0])

    a_opt = _golden_max(objective, lo, hi, tol)
    return a_opt, objective(a_opt)


@dataclass
class TransitionScanResult:
    """Double-to-single transition map for one mechanism."""

    mechanism: Mechanism
    delta_tau: float
    p0: np.ndarray
    delta_p: np.ndarray
    optimal_area: np.ndarray        # (n_p0,)
    efficiency: np.ndarray          # (n_p0, n_dp)
    width: np.ndarray               # (n_p0,)


def transition_scan(mechanism: Mechanism, p0_grid, delta_p_grid,
                    delta_tau: float, grid_points: int = 512,
                    settings: SolverSettings = SolverSettings(),
                    cache_dir=None, width_grid_points: int = 256
                    ) -> TransitionScanResult:
    """Efficiency of the p0-calibrated double-diffraction pulse.

    For each mean momentum p0 the resonance condition and the optimal pulse
    area (single-diffraction convention) are applied, then Gaussian packets
    of every width are sent through the same transition function with the
    target interval shifted to [p0 + 1/2, p0 + 3/2].
    """
    p0_grid = np.asarray(p0_grid, dtype=float)
    delta_p_grid = np.asarray(delta_p_grid, dtype=float)
    areas = np.empty_like(p0_grid)
    widths = np.empty_like(p0_grid)
    eff = np.empty((len(p0_grid), len(delta_p_grid)))

    for i, p0 in enumerate(p0_grid):
        area, _ = optimal_pulse_area(mechanism, p0, delta_tau, settings)
        areas[i] = area
        config = DiffractionConfig(
            mechanism, Geometry.DOUBLE, delta_tau=delta_tau, pulse_area=area,
            p0=p0, two_photon_detuning=resonance_detuning(mechanism, p0),
            area_geometry=Geometry.SINGLE)

        dp_max = float(np.max(delta_p_grid))
        cols = [(G, m) for m in _support_orders(p0, dp_max)]
        subset = _support_subset(grid_points, p0, dp_max)
        tf = build_cached(config, grid_points, cols, settings,
                          cache_dir=cache_dir) if subset is None else \
            build(config, grid_points, cols, settings, q_subset=subset)
        for j, dp in enumerate(delta_p_grid):
            psi_f = tf.apply(tf.gaussian_input(p0, dp))
            eff[i, j] = integrate_interval(
                psi_f.momenta(), psi_f.density(), p0 + 0.5, p0 + 1.5)

        _, m0 = wrap_to_zone(p0)
        p, y, _ = _scan_transfer_curve(config, width_grid_points, settings,
                                       m0)
        widths[i] = fwhm(p, y)

    return TransitionScanResult(mechanism=mechanism, delta_tau=delta_tau,
                                p0=p0_grid, delta_p=delta_p_grid,
                                optimal_area=areas, efficiency=eff,
                                width=widths)


def _scan_transfer_curve(config: DiffractionConfig, grid_points: int,
                         settings: SolverSettings, center_order: int):
    """Transfer probability p -> p + hbar K of the calibrated scan pulse."""
    s_f = resonant_final_state(config, 1)
    ms = range(center_order - 1, center_order + 2)
    tf = build(config, grid_points, [(G, m) for m in ms], settings)
    p = np.concatenate([tf.q + m for m in ms])
    y = np.concatenate([np.abs(tf.element(s_f, m + 1, G, m)) ** 2
                        for m in ms])
    return p, y, tf
