import math

import numpy as np
import pytest
from hypothesis import given, settings

import oracles
from conftest import network_params, random_params
from slh_netsim import ModeRegistry, NetworkParams, build_network, series
from slh_netsim.components import (
    PLANT_CONTROLLER,
    controller_detuning,
    loss_beamsplitter,
    opo_port,
    passive_port,
    phase_shifter,
)
from slh_netsim.errors import ParameterError
from slh_netsim.slh import concatenate_all


def test_opo_port_table1_values():
    gamma_T = 18e6 + 36e6 + 2e6 + 0.45e6 + 9e6
    eps = 0.33 * gamma_T / 2
    g = opo_port("a", 18e6, 0.0, eps, PLANT_CONTROLLER)
    np.testing.assert_allclose(g.coupling, [[math.sqrt(18e6), 0.0]])
    assert g.hamiltonian.pump[0, 0] == pytest.approx(1.0799e7, rel=1e-4)


def test_opo_port_zero_hamiltonian_is_passive():
    assert opo_port("a", 3.0, 0.0, 0.0).isclose(passive_port("a", 3.0), atol=0)


def test_opo_port_keeps_complex_pump():
    eps = 0.3 - 0.7j
    assert opo_port("a", 1.0, 0.0, eps).hamiltonian.pump[0, 0] == eps


def test_negative_rate_rejected():
    with pytest.raises(ParameterError):
        opo_port("a", -1.0)


def test_passive_port_zero_rate():
    g = passive_port("a", 0.0)
    np.testing.assert_array_equal(g.coupling, [[0.0]])
    np.testing.assert_array_equal(g.scattering, [[1.0]])


def test_passive_ports_reproduce_plant_rows():
    rates = [2e6, 0.45e6, 9e6]
    g = concatenate_all([passive_port("a", r) for r in rates])
    np.testing.assert_allclose(g.coupling[:, 0], np.sqrt(rates))
    assert np.all(g.hamiltonian.omega == 0)


def test_controller_loss_port():
    g = passive_port("b", 5.7e6, PLANT_CONTROLLER)
    np.testing.assert_allclose(g.coupling, [[0.0, math.sqrt(5.7e6)]])


@pytest.mark.parametrize("phi,expected", [(0.0, 1.0), (math.pi, -1.0)])
def test_phase_shifter(phi, expected):
    assert phase_shifter(phi).scattering[0, 0] == pytest.approx(expected)


def test_phase_shifters_add():
    p1, p2 = 2.1, 5.3
    combined = series(phase_shifter(p2), phase_shifter(p1))
    assert combined.isclose(phase_shifter((p1 + p2) % (2 * math.pi)), atol=1e-12)


def test_beamsplitter_values():
    np.testing.assert_array_equal(loss_beamsplitter(0.0).scattering, np.eye(2))
    S = loss_beamsplitter(0.27).scattering
    assert S[0, 0] == pytest.approx(0.8544, abs=1e-4)
    assert S[0, 1] == pytest.approx(0.5196, abs=1e-4)
    assert S[1, 0] == pytest.approx(-0.5196, abs=1e-4)
    np.testing.assert_allclose(S @ S.conj().T, np.eye(2), atol=1e-15)
    assert np.linalg.det(S) == pytest.approx(1.0)


@pytest.mark.parametrize("l", [-0.1, 1.0, 1.2])
def test_beamsplitter_range(l):
    with pytest.raises(ParameterError, match="loss out of range"):
        loss_beamsplitter(l)


def test_derived_quantities(table1):
    assert table1.gamma_T == pytest.approx(65.45e6)
    assert table1.kappa_T == pytest.approx(66.7e6)
    # plant half-linewidth in Hz
    assert table1.gamma_T / (4 * math.pi) == pytest.approx(5.21e6, rel=1e-3)
    assert controller_detuning(16e6) == pytest.approx(1.00531e8, rel=1e-5)
    assert table1.alpha(2) * table1.beta(2) == pytest.approx(math.sqrt(0.27 * 0.73))


def test_params_validation():
    with pytest.raises(ParameterError):
        NetworkParams(kappa=-1.0)
    with pytest.raises(ParameterError):
        NetworkParams(l3=1.2)
    with pytest.raises(ParameterError):
        NetworkParams(input_amplitudes=(1.0,))


def test_network_coupling_term_lossless():
    g1, g2, k = 1.3, 2.2, 0.8
    p = NetworkParams(gamma1=g1, gamma2=g2, kappa=k, l1=0, l2=0, l3=0, phi=0.0)
    w = build_network(p).hamiltonian.omega
    coeff = math.sqrt(k) / 2j * (math.sqrt(g2) - math.sqrt(g1))
    # exchange term (sqrt(k)/2i)(sqrt(g2) - sqrt(g1)) (a^dag b - a b^dag)
    assert w[0, 1] == pytest.approx(coeff, abs=1e-14)
    assert w[1, 0] == pytest.approx(-coeff, abs=1e-14)


def test_network_table1_detuning_vanishes(table1):
    w = build_network(table1).hamiltonian.omega
    assert abs(w[0, 0]) <= 1e-12 * table1.gamma_T


def test_network_shape(table1):
    g = build_network(table1)
    assert g.ports == 8 and g.n_modes == 2
    assert g.registry == ModeRegistry(("a", "b"))


def test_network_matches_closed_form_random(rng):
    worst = 0.0
    for _ in range(100):
        p = random_params(rng)
        g = build_network(p)
        omega, pump = oracles.network_hamiltonian(p)
        for got, want in [(g.scattering, oracles.network_S(p)),
                          (g.coupling, oracles.network_coupling(p)),
                          (g.hamiltonian.omega, omega),
                          (g.hamiltonian.pump, pump)]:
            worst = max(worst, np.max(np.abs(got - want)))
    assert worst <= 1e-12


def test_network_matches_closed_form_table1(table1):
    for x, y, phi in [(0.33, 0.0, math.pi), (0.32, -0.09, 5.6)]:
        p = table1.replace(x=x, y=y, phi=phi, delta=controller_detuning(16e6))
        g = build_network(p)
        omega, _ = oracles.network_hamiltonian(p)
        scale = p.gamma_T
        np.testing.assert_allclose(g.scattering, oracles.network_S(p), atol=1e-14)
        np.testing.assert_allclose(g.coupling, oracles.network_coupling(p), atol=1e-12 * math.sqrt(scale))
        np.testing.assert_allclose(g.hamiltonian.omega, omega, atol=1e-12 * scale)


def test_oracle_hamiltonian_consistent_with_drift(rng):
    # the oracle's H and L must reproduce the closed-form drift matrix on their own
    for _ in range(20):
        p = random_params(rng)
        omega, _ = oracles.network_hamiltonian(p)
        L = oracles.network_coupling(p)
        A_minus = -1j * omega - 0.5 * L.conj().T @ L
        np.testing.assert_allclose(A_minus, oracles.network_A_minus(p), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(network_params())
def test_network_invariants(p):
    g = build_network(p)
    assert g.ports == 8 and g.n_modes == 2
    S = g.scattering
    np.testing.assert_allclose(np.linalg.norm(S, axis=0), 1.0, atol=1e-10)
    np.testing.assert_allclose(np.linalg.norm(S, axis=1), 1.0, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(network_params())
def test_no_pump_means_passive(p):
    g = build_network(p.replace(x=0.0, y=0.0))
    assert np.all(g.hamiltonian.pump == 0)


@settings(max_examples=30, deadline=None)
@given(network_params(), network_params())
def test_open_loop_plant_independent_of_controller(p, q):
    base = p.replace(l1=1.0, l2=1.0)
    other = base.replace(kappa=q.kappa, delta=q.delta, y=q.y)
    g0, g1 = build_network(base), build_network(other)
    assert g0.hamiltonian.omega[0, 0] == g1.hamiltonian.omega[0, 0]
    np.testing.assert_array_equal(g0.coupling[:, 0], g1.coupling[:, 0])
    np.testing.assert_array_equal(g0.hamiltonian.omega[0, 1], g1.hamiltonian.omega[0, 1])
