import math

import numpy as np
import pytest

from matterwave.config import (ConfigError, DiffractionConfig, Envelope,
                               Geometry, Mechanism)
from matterwave.ladder import E, G, LadderSystem, eigenstate
from matterwave.solver import (NonFiniteState, SolverSettings,
                               TruncationError, _converged_solve,
                               _solve_arrays, evolve, evolve_converged,
                               integrate)

TIGHT = SolverSettings(rel_tol=1e-10, abs_tol=1e-13)


def rabi_excited_population(area: float, detuning: float, tau: float,
                            peak_rabi: float) -> float:
    """Closed-form two-level Rabi formula for a box pulse of length tau."""
    del area
    omega_eff = math.hypot(peak_rabi, detuning)
    return (peak_rabi / omega_eff) ** 2 \
        * math.sin(0.5 * omega_eff * tau) ** 2


def box_config(area: float, delta_tau: float = 2.0) -> DiffractionConfig:
    return DiffractionConfig(Mechanism.RAMAN, Geometry.SINGLE,
                             delta_tau=delta_tau, pulse_area=area,
                             envelope=Envelope.BOX, n_max=3)


@pytest.mark.parametrize("area", [math.pi / 2, math.pi, 2.7])
def test_resonant_box_rabi_oracle(area):
    # resonant pair (g,0) <-> (e,1) at q = 0: P_e = sin^2(area / 2)
    final = evolve(eigenstate(2, 3, 0.0), box_config(area), TIGHT)
    assert final.population(E, 1) == pytest.approx(
        math.sin(area / 2.0) ** 2, abs=1e-9)
    assert final.norm() == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("q", [-0.35, -0.1, 0.2, 0.45])
def test_detuned_box_rabi_oracle(q):
    # off resonance the pair is detuned by the Doppler shift 2q
    config = box_config(math.pi)
    final = evolve(eigenstate(2, 3, q), config, TIGHT)
    peak_rabi = 2.0 * config.peak_coupling
    expected = rabi_excited_population(math.pi, 2.0 * q, config.delta_tau,
                                       peak_rabi)
    assert final.population(E, 1) == pytest.approx(expected, abs=1e-9)


def test_integrate_linear_oracle():
    # dy/dt = i w y has the exact solution y0 exp(i w t)
    w = 1.7

    def rhs(t, y):
        return 1j * w * y
    y0 = np.array([1.0 + 0.0j])
    y1 = integrate(rhs, 0.0, 2.0, y0, TIGHT)
    assert abs(y1[0] - np.exp(1j * w * 2.0)) < 1e-8


def test_integrate_backward_reverses_forward(rng):
    config = DiffractionConfig(Mechanism.BRAGG, Geometry.DOUBLE,
                               delta_tau=1.5, pulse_area=np.pi)
    y0 = rng.normal(size=(1, 9)) + 1j * rng.normal(size=(1, 9))
    y0 /= np.linalg.norm(y0)
    settings = SolverSettings(rel_tol=1e-9, abs_tol=1e-12)
    forward = _solve_arrays(config, 4, y0, 0.1, settings)
    back = _solve_arrays(config, 4, forward, 0.1, settings, backward=True)
    assert np.max(np.abs(back - y0)) < 1e-6


def test_norm_preserved_gaussian_pulse():
    config = DiffractionConfig(Mechanism.RAMAN, Geometry.DOUBLE,
                               delta_tau=2.4, pulse_area=np.pi, n_max=6)
    final = evolve(eigenstate(2, 6, 0.05), config)
    assert abs(final.norm() - 1.0) <= 10 * SolverSettings().rel_tol


def test_solver_linearity(rng):
    config = DiffractionConfig(Mechanism.BRAGG, Geometry.SINGLE,
                               delta_tau=1.0, pulse_area=2.0, n_max=4)
    a = rng.normal(size=(1, 9)) + 1j * rng.normal(size=(1, 9))
    b = rng.normal(size=(1, 9)) + 1j * rng.normal(size=(1, 9))
    settings = SolverSettings(rel_tol=1e-9, abs_tol=1e-12)
    both = _solve_arrays(config, 4, a + 2j * b, 0.0, settings)
    ya = _solve_arrays(config, 4, a, 0.0, settings)
    yb = _solve_arrays(config, 4, b, 0.0, settings)
    assert np.max(np.abs(both - ya - 2j * yb)) < 1e-6


def test_self_convergence_on_tolerance():
    config = DiffractionConfig(Mechanism.BRAGG, Geometry.SINGLE,
                               delta_tau=1.18465, pulse_area=np.pi, n_max=5)
    coarse = evolve(eigenstate(1, 5, 0.0), config, SolverSettings())
    fine = evolve(eigenstate(1, 5, 0.0), config,
                  SolverSettings(rel_tol=1e-10, abs_tol=1e-13))
    assert np.max(np.abs(coarse.amps - fine.amps)) < 10 * 1e-3


def test_evolve_requires_explicit_n_max():
    config = DiffractionConfig(Mechanism.RAMAN, Geometry.SINGLE,
                               delta_tau=1.0, pulse_area=1.0)
    with pytest.raises(ConfigError):
        evolve(eigenstate(2, 3, 0.0), config)


def test_evolve_converged_single_raman_floor():
    # the single Raman pair is closed, so the automatic truncation control
    # accepts the smallest ladder
    config = DiffractionConfig(Mechanism.RAMAN, Geometry.SINGLE,
                               delta_tau=1.18465, pulse_area=np.pi)
    final, n_used = evolve_converged(eigenstate(2, 3, 0.0), config)
    assert n_used == 3
    assert final.population(E, 1) > 0.99


def test_evolve_converged_grows_for_strong_coupling():
    config = DiffractionConfig(Mechanism.BRAGG, Geometry.SINGLE,
                               delta_tau=0.3, pulse_area=2 * np.pi)
    final, n_used = evolve_converged(eigenstate(1, 3, 0.0), config)
    assert n_used > 3
    assert abs(final.norm() - 1.0) < 0.01


def test_truncation_error_reported():
    config = DiffractionConfig(Mechanism.BRAGG, Geometry.SINGLE,
                               delta_tau=0.1, pulse_area=30 * np.pi)

    def y0_for(n):
        return eigenstate(1, n, 0.0).amps
    with pytest.raises(TruncationError):
        _converged_solve(config, y0_for, 0.0, SolverSettings(), ceiling=5)


def test_area_zero_is_identity():
    config = DiffractionConfig(Mechanism.RAMAN, Geometry.DOUBLE,
                               delta_tau=1.0, pulse_area=0.0)
    initial = eigenstate(2, 3, 0.2, order=1, state=E)
    final, n_used = evolve_converged(initial, config)
    assert final.population(E, 1) == 1.0
    assert n_used >= 3


def test_settings_validation():
    with pytest.raises(ConfigError):
        SolverSettings(rel_tol=2.0)
    with pytest.raises(ConfigError):
        SolverSettings(rel_tol=1e-6, abs_tol=1e-3)
    assert SolverSettings(convergence_norm_tol=1e-5).truncation_tol == 1e-5
    assert SolverSettings(rel_tol=1e-4).truncation_tol == 1e-4


def test_non_finite_state_detected():
    def bad(t, y):
        return np.full_like(y, np.nan)
    with pytest.raises(NonFiniteState):
        integrate(bad, 0.0, 1.0, np.array([1.0 + 0j]), SolverSettings())
