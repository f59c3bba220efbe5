import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matterwave.config import (ConfigError, DiffractionConfig, Envelope,
                               Geometry, Mechanism, box_envelope,
                               doppler_frequency, effective_rabi_factor,
                               gaussian_envelope, peak_coupling_from_area,
                               resonance_detuning)


def numeric_pulse_area(config: DiffractionConfig) -> float:
    """Oracle: quadrature of Omega_R(t) = c * Omega(t) over the window."""
    t0, t1 = config.time_window
    t = np.linspace(t0, t1, 200001)
    c = effective_rabi_factor(config.area_geometry or config.geometry)
    return float(np.trapezoid(c * config.coupling(t), t))


@pytest.mark.parametrize("geometry", list(Geometry))
@pytest.mark.parametrize("envelope", list(Envelope))
def test_peak_coupling_reproduces_area(geometry, envelope):
    config = DiffractionConfig(Mechanism.BRAGG, geometry, delta_tau=2.0,
                               pulse_area=math.pi, envelope=envelope)
    assert numeric_pulse_area(config) == pytest.approx(math.pi, rel=1e-6)


def test_area_geometry_override():
    # double dynamics, single-convention area: Omega_R = 2 Omega
    config = DiffractionConfig(Mechanism.BRAGG, Geometry.DOUBLE,
                               delta_tau=2.0, pulse_area=math.pi,
                               area_geometry=Geometry.SINGLE)
    assert numeric_pulse_area(config) == pytest.approx(math.pi, rel=1e-6)
    plain = DiffractionConfig(Mechanism.BRAGG, Geometry.DOUBLE,
                              delta_tau=2.0, pulse_area=math.pi)
    assert config.peak_coupling == pytest.approx(
        plain.peak_coupling * math.sqrt(2.0) / 2.0, rel=1e-12)


def test_effective_rabi_factors():
    assert effective_rabi_factor(Geometry.SINGLE) == 2.0
    assert effective_rabi_factor(Geometry.DOUBLE) == pytest.approx(
        math.sqrt(2.0))


def test_envelope_shapes():
    t = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
    box = box_envelope(t, 1.5, 1.0)
    assert list(box) == [0.0, 1.5, 1.5, 1.5, 0.0]
    gauss = gaussian_envelope(t, 2.0, 1.0)
    assert gauss[2] == 2.0
    assert gauss[1] == pytest.approx(2.0 * math.exp(-0.125))


def test_doppler_and_resonance():
    assert doppler_frequency(0.25) == 0.5
    assert resonance_detuning(Mechanism.RAMAN, 0.0) == 1.0
    assert resonance_detuning(Mechanism.BRAGG, 0.3) == pytest.approx(1.6)


def test_time_window():
    config = DiffractionConfig(Mechanism.RAMAN, Geometry.SINGLE,
                               delta_tau=2.0, pulse_area=1.0)
    assert config.time_window == (-10.0, 10.0)
    box = config.with_(envelope=Envelope.BOX)
    assert box.time_window == (-1.0, 1.0)


def test_n_states():
    raman = DiffractionConfig(Mechanism.RAMAN, Geometry.SINGLE,
                              delta_tau=1.0, pulse_area=1.0)
    bragg = raman.with_(mechanism=Mechanism.BRAGG)
    assert raman.n_states == 2
    assert bragg.n_states == 1


@pytest.mark.parametrize("kwargs", [
    {"delta_tau": 0.0},
    {"delta_tau": -1.0},
    {"pulse_area": -0.1},
    {"n_max": 1},
    {"time_window_factor": 0.0},
])
def test_invalid_configs_rejected(kwargs):
    base = {"mechanism": Mechanism.RAMAN, "geometry": Geometry.SINGLE,
            "delta_tau": 1.0, "pulse_area": 1.0}
    base.update(kwargs)
    with pytest.raises(ConfigError):
        DiffractionConfig(**base)


@given(st.floats(min_value=1e-3, max_value=1e2),
       st.floats(min_value=0.0, max_value=50.0))
def test_dict_roundtrip(delta_tau, area):
    config = DiffractionConfig(Mechanism.BRAGG, Geometry.DOUBLE,
                               delta_tau=delta_tau, pulse_area=area,
                               p0=0.25, two_photon_detuning=1.5)
    assert DiffractionConfig.from_dict(config.to_dict()) == config
