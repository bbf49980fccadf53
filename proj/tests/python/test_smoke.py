import math
import pathlib

import pytest

import polariton as p

FIXTURE = pathlib.Path(__file__).resolve().parents[2] / "configs" / "flux5.yaml"
TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def config():
    return p.load_config(str(FIXTURE))


def test_polariton_params(config):
    bare = p.polariton_params(config.system)
    g = p.polariton_params(config.system, p.QubitState.g)
    assert 0 < bare.theta < math.pi / 2
    assert bare.omega_l < bare.omega_u
    assert g.kappa_u + g.kappa_l == pytest.approx(config.system.kappa_a + config.system.kappa_c, rel=1e-12)


def test_cubic_roots_satisfy_the_cubic():
    coef = p.CubicCoefficients(A=1.0, B=-4.0, C=1.0, D=complex(2.0, 0.0))
    roots = p.duffing_cubic_photon_numbers(coef)
    assert len(roots) == 3
    for r in roots:
        assert r.x * (1.0 + (-4.0 + r.x) ** 2) == pytest.approx(4.0, rel=1e-10)
    assert [r.stable for r in roots] == [True, False, True]


def test_power_round_trip(config):
    w = TWO_PI * 7.508e9
    amp = p.power_to_amplitude(-89.0, w, config.system.kappa_c, -15.0)
    assert p.amplitude_to_power(amp, w, config.system.kappa_c, -15.0) == pytest.approx(-89.0, abs=1e-12)
    with pytest.raises(p.ParameterError):
        p.power_to_amplitude(float("nan"), w, config.system.kappa_c)


def test_error_budget(config):
    relax, latched = p.error_budget(config.system, 500e-9, 12e-9)
    assert relax == pytest.approx(1 - math.exp(-500e-9 / (2 * config.system.T1)), rel=1e-12)
    assert 0 <= latched < relax


def test_config_errors_are_value_errors():
    text = FIXTURE.read_text().replace("U_a: 13.5 MHz", "U_a: 13.5")
    with pytest.raises(p.ConfigError) as info:
        p.parse_config(text)
    assert isinstance(info.value, ValueError)
    assert "system.U_a" in str(info.value)


def test_small_deg_map(config):
    c = p.parse_config(FIXTURE.read_text())
    c.frequency_hz = [7.50e9, 7.55e9]
    c.power_dbm = [-120.0]
    a = p.sweep_deg_map(c)
    assert len(a.values) == 2
    assert all(v >= 0 for v in a.values)
    assert p.artifact_metadata(a)["config_hash"] == c.hash()


def test_single_shot(config):
    sim = p.ReadoutSimulator(config.system, p.readout_pulse(config))
    noise = p.readout_noise(config)
    e = sim.simulate_forced(noise, p.QubitState.e, [], 0)
    g = sim.simulate_forced(noise, p.QubitState.g, [], 0)
    assert e.latched and not g.latched
    assert abs(e.noiseless_iq - g.noiseless_iq) > 0
