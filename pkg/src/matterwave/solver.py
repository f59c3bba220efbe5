"""Adaptive time integration of the momentum-ladder equations.

An embedded Dormand-Prince 5(4) pair with a PI step-size controller
integrates the complex amplitude arrays.  The Butcher tableau below is the
classic DOPRI5 one (Dormand & Prince 1980); the coefficients are spelled out
as exact rationals so the scheme is reproducible bit-for-bit.

Error control uses a mixed absolute/relative criterion per complex
component, max-norm over all components (and over the whole batch for
batched solves).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import AUTO, ConfigError, DiffractionConfig
from .ladder import AmplitudeState, LadderSystem

# Dormand-Prince 5(4): nodes, stage coefficients, 5th-order weights and the
# embedded error-estimate weights (b5 - b4).
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_ERR = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525,
        -1 / 40)

_ORDER = 5
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
# PI controller exponents (Gustafsson-style)
_ALPHA = 0.7 / _ORDER
_BETA = 0.4 / _ORDER


class SolverError(RuntimeError):
    pass


class StepSizeUnderflow(SolverError):
    def __init__(self, t, norm):
        super().__init__(
            f"step size underflow at t={t:.6g} (state norm {norm:.6g})")
        self.t = t
        self.norm = norm


class NonFiniteState(SolverError):
    def __init__(self, t):
        super().__init__(f"NaN/Inf encountered in state at t={t:.6g}")
        self.t = t


class TruncationError(SolverError):
    def __init__(self, n_max, difference):
        super().__init__(
            f"momentum truncation did not converge by n_max={n_max} "
            f"(last difference {difference:.3e}); Raman-Nath-regime "
            "parameters may need manual n_max control")
        self.n_max = n_max
        self.difference = difference


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances of the adaptive integrator.

    ``convergence_norm_tol`` bounds the allowed change of any amplitude when
    the truncation order n_max is increased by one; it defaults to rel_tol.
    """

    rel_tol: float = 1e-3
    abs_tol: float = 1e-6
    max_step: float = math.inf
    convergence_norm_tol: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.abs_tol <= self.rel_tol < 1.0):
            raise ConfigError("need 0 < abs_tol <= rel_tol < 1")

    @property
    def truncation_tol(self) -> float:
        return self.rel_tol if self.convergence_norm_tol is None \
            else self.convergence_norm_tol

    def to_dict(self) -> dict:
        return {"rel_tol": self.rel_tol, "abs_tol": self.abs_tol,
                "max_step": self.max_step,
                "convergence_norm_tol": self.convergence_norm_tol}


def integrate(rhs: Callable[[float, np.ndarray], np.ndarray],
              t0: float, t1: float, y0: np.ndarray,
              settings: SolverSettings, first_step: Optional[float] = None
              ) -> np.ndarray:
    """Integrate dy/dt = rhs(t, y) from t0 to t1 (forward or backward)."""
    if t1 == t0:
        return y0.copy()
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    h = min(first_step if first_step else span / 100.0, span,
            settings.max_step) * direction

    t = t0
    y = np.asarray(y0, dtype=complex).copy()
    k = [None] * 7
    err_prev = 1.0
    tiny = 1e-14 * max(abs(t0), abs(t1), 1.0)

    while (t1 - t) * direction > 0:
        if abs(h) < tiny:
            raise StepSizeUnderflow(t, float(np.sum(np.abs(y) ** 2)))
        if (t + h - t1) * direction > 0:
            h = t1 - t

        k[0] = rhs(t, y)
        for i in range(1, 7):
            yi = y + h * sum(a * k[j] for j, a in enumerate(_A[i]) if a)
            k[i] = rhs(t + _C[i] * h, yi)

        y_new = y + h * sum(b * k[j] for j, b in enumerate(_B5) if b)
        err_vec = h * sum(e * k[j] for j, e in enumerate(_ERR) if e)

        scale = settings.abs_tol + settings.rel_tol * np.maximum(
            np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale))

        if not math.isfinite(err) or not np.all(np.isfinite(y_new)):
            if abs(h) < 2 * tiny:
                raise NonFiniteState(t)
            h *= 0.5
            continue

        if err <= 1.0:
            t = t + h
            y = y_new
            factor = _SAFETY * (err + 1e-16) ** -_ALPHA \
                * (err_prev + 1e-16) ** _BETA
            err_prev = err
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            h = direction * min(abs(h) * factor, settings.max_step)
        else:
            factor = max(_MIN_FACTOR, _SAFETY * err ** -_ALPHA)
            h *= min(1.0, factor)
    return y


def _solve_arrays(config: DiffractionConfig, n_max: int, y0: np.ndarray,
                  quasi_momentum, settings: SolverSettings, peak=None,
                  grating_weights=(1.0, 1.0), backward: bool = False
                  ) -> np.ndarray:
    system = LadderSystem(config, n_max, quasi_momentum, peak=peak,
                          grating_weights=grating_weights)
    t0, t1 = config.time_window
    if backward:
        t0, t1 = t1, t0
    return integrate(system.rhs, t0, t1, y0, settings,
                     first_step=config.delta_tau / 100.0)


def evolve(initial: AmplitudeState, config: DiffractionConfig,
           settings: SolverSettings = SolverSettings()) -> AmplitudeState:
    """Evolve one state through the full pulse at the configured n_max."""
    if config.n_max is AUTO:
        raise ConfigError("evolve() needs an explicit n_max; "
                          "use evolve_converged() for automatic control")
    if initial.n_states != config.n_states:
        raise ConfigError("state/mechanism mismatch")
    y0 = initial.padded(config.n_max).amps
    y1 = _solve_arrays(config, config.n_max, y0, initial.quasi_momentum,
                       settings)
    return AmplitudeState(initial.quasi_momentum, y1)


def _converged_solve(config: DiffractionConfig, y0_for: Callable[[int], np.ndarray],
                     quasi_momentum, settings: SolverSettings, peak=None,
                     floor: int = 3, ceiling: int = 32):
    """Increase n_max until amplitudes stop changing; returns (y, n_max).

    ``y0_for(n_max)`` must supply the initial array embedded in a ladder of
    the requested size.  The comparison is the max-norm difference of the
    overlapping amplitudes of consecutive solves.
    """
    tol = settings.truncation_tol
    n = floor
    y = _solve_arrays(config, n, y0_for(n), quasi_momentum, settings, peak)
    while True:
        y_next = _solve_arrays(config, n + 1, y0_for(n + 1), quasi_momentum,
                               settings, peak)
        diff = float(np.max(np.abs(y_next[..., 1:-1] - y)))
        if diff <= tol:
            return y, n
        n += 1
        y = y_next
        if n >= ceiling:
            raise TruncationError(n, diff)


def evolve_converged(initial: AmplitudeState, config: DiffractionConfig,
                     settings: SolverSettings = SolverSettings()
                     ) -> tuple[AmplitudeState, int]:
    """Evolve with automatic truncation-order control.

    Starting from n_max = 3, the ladder is enlarged until the max-norm
    difference of the overlapping amplitudes between consecutive solves
    drops below the convergence tolerance.
    """
    if initial.n_states != config.n_states:
        raise ConfigError("state/mechanism mismatch")
    if config.pulse_area == 0.0:
        n0 = max(initial.n_max, 3)
        return initial.padded(n0), n0

    floor = max(3, initial.n_max)
    y, n_used = _converged_solve(
        config, lambda n: initial.padded(n).amps, initial.quasi_momentum,
        settings, floor=floor)
    return AmplitudeState(initial.quasi_momentum, y), n_used
