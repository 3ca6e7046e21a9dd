import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qetsim import linalg
from qetsim.errors import InvalidParams
from qetsim.system import (
    IDENTITY_2,
    SIGMA_X,
    SystemParams,
    analytic_spectrum,
    basis_transform,
    build_hamiltonian,
    eigenprojector,
    transition_set,
)

from conftest import random_density

params_strategy = st.builds(
    SystemParams,
    eps_a=st.floats(0.05, 20.0),
    eps_b=st.floats(0.05, 20.0),
    kappa=st.floats(0.1, 5.0).flatmap(lambda k: st.sampled_from((k, -k))),
)


def test_hamiltonian_matrix_reference_point():
    h = build_hamiltonian(SystemParams(2.0, 2.0, 1.0))
    expected = np.array(
        [
            [4.0, 0.0, 0.0, 2.0],
            [0.0, 0.0, 2.0, 0.0],
            [0.0, 2.0, 0.0, 0.0],
            [2.0, 0.0, 0.0, -4.0],
        ],
        dtype=complex,
    )
    assert_allclose(h, expected, atol=0)


def test_param_guards():
    with pytest.raises(InvalidParams):
        SystemParams(-1.0, 2.0, 1.0)
    with pytest.raises(InvalidParams):
        SystemParams(1.0, 0.0, 1.0)
    with pytest.raises(InvalidParams):
        SystemParams(1.0, 1.0, 0.0)


@given(params_strategy)
@settings(max_examples=50, deadline=None)
def test_hamiltonian_traceless_and_hermitian(p):
    h = build_hamiltonian(p)
    assert abs(np.trace(h)) < 1e-12
    assert np.abs(h - h.conj().T).max() == 0.0


def test_spectrum_reference_point():
    spec = analytic_spectrum(SystemParams(2.0, 2.0, 1.0))
    assert_allclose(spec.energies, (-math.sqrt(20), -2.0, 2.0, math.sqrt(20)), atol=1e-14)
    assert spec.energies[0] == pytest.approx(-4.47214, abs=1e-5)
    assert spec.phi1 == pytest.approx(0.231824, abs=1e-6)
    assert spec.phi2 == pytest.approx(math.pi / 4, abs=0)


def test_decoupled_limit_angles_vanish():
    spec = analytic_spectrum(SystemParams(3.0, 1.0, 1e-9))
    assert spec.phi1 == pytest.approx(0.0, abs=1e-9)
    assert spec.phi2 == pytest.approx(0.0, abs=1e-9)
    assert_allclose(np.abs(spec.eigenbasis), np.eye(4)[:, [3, 2, 1, 0]], atol=1e-8)


@given(params_strategy)
@settings(max_examples=50, deadline=None)
def test_spectral_symmetry_and_double_angle_identities(p):
    spec = analytic_spectrum(p)
    e1, e2, e3, e4 = spec.energies
    assert e1 == -e4 and e2 == -e3
    assert math.tan(2 * spec.phi1) == pytest.approx(2 * p.kappa / p.omega, rel=1e-12, abs=1e-12)
    if p.delta != 0.0:
        assert math.tan(2 * spec.phi2) == pytest.approx(2 * p.kappa / p.delta, rel=1e-12, abs=1e-9)


@given(params_strategy)
@settings(max_examples=30, deadline=None)
def test_eigenbasis_columns_are_eigenvectors(p):
    h = build_hamiltonian(p)
    spec = analytic_spectrum(p)
    for k in range(4):
        col = spec.eigenbasis[:, k]
        assert np.abs(h @ col - spec.energies[k] * col).max() < 1e-12 * max(1.0, abs(spec.energies[k]))


def test_numeric_spectrum_matches_analytic(rng):
    for _ in range(20):
        p = SystemParams(rng.uniform(0.1, 10), rng.uniform(0.1, 10), rng.uniform(-4, 4) or 1.0)
        numeric = linalg.hermitian_eigendecomposition(build_hamiltonian(p)).values
        assert_allclose(numeric, analytic_spectrum(p).energies, atol=1e-10)


def test_transition_frequencies_reference_point():
    trans = transition_set(SystemParams(2.0, 2.0, 1.0))
    assert trans.eps_minus == pytest.approx(2.47214, abs=1e-5)
    assert trans.eps_plus == pytest.approx(6.47214, abs=1e-5)
    assert trans.eps_minus == pytest.approx(math.sqrt(20) - 2.0, abs=1e-12)


@given(params_strategy)
@settings(max_examples=50, deadline=None)
def test_transition_frequency_identities(p):
    trans = transition_set(p)
    spec = analytic_spectrum(p)
    assert trans.eps_plus > trans.eps_minus > 0.0
    assert trans.eps_plus + trans.eps_minus == pytest.approx(spec.energies[3] - spec.energies[0], rel=1e-12)
    assert trans.eps_plus - trans.eps_minus == pytest.approx(spec.energies[2] - spec.energies[1], rel=1e-12)


@given(params_strategy)
@settings(max_examples=30, deadline=None)
def test_jump_operators_connect_only_their_pairs(p):
    trans = transition_set(p)
    spec = analytic_spectrum(p)
    v = spec.eigenbasis
    eta_a = v.conj().T @ trans.eta_a @ v
    xi_a = v.conj().T @ trans.xi_a @ v
    eta_mask = np.zeros((4, 4), dtype=bool)
    eta_mask[0, 1] = eta_mask[2, 3] = True  # |E1><E2| and |E3><E4|
    xi_mask = np.zeros((4, 4), dtype=bool)
    xi_mask[0, 2] = xi_mask[1, 3] = True  # |E1><E3| and |E2><E4|
    assert np.abs(eta_a[~eta_mask]).max() < 1e-12
    assert np.abs(xi_a[~xi_mask]).max() < 1e-12


@given(params_strategy)
@settings(max_examples=50, deadline=None)
def test_jump_operators_reassemble_sigma_x(p):
    # eta_j + xi_j is the energy-lowering part of the qubit's sigma_x coupling
    # operator, so adding its adjoint must reproduce sigma_x exactly; this
    # pins every sign convention in the transition set
    trans = transition_set(p)
    lowering_a = trans.eta_a + trans.xi_a
    lowering_b = trans.eta_b + trans.xi_b
    assert np.abs(lowering_a + lowering_a.conj().T - np.kron(SIGMA_X, IDENTITY_2)).max() < 1e-12
    assert np.abs(lowering_b + lowering_b.conj().T - np.kron(IDENTITY_2, SIGMA_X)).max() < 1e-12


def test_jump_operators_lower_energy(rng):
    p = SystemParams(1.7, 0.9, 1.3)
    trans = transition_set(p)
    spec = analytic_spectrum(p)
    v = spec.eigenbasis
    energies = np.array(spec.energies)
    for op in (trans.eta_a, trans.eta_b, trans.xi_a, trans.xi_b):
        in_eigen = v.conj().T @ op @ v
        rows, cols = np.nonzero(np.abs(in_eigen) > 1e-12)
        assert (energies[rows] < energies[cols]).all()


def test_basis_transform_round_trip_and_spectrum(rng):
    p = SystemParams(1.3, 2.6, 0.8)
    spec = analytic_spectrum(p)
    rho = random_density(rng)
    rho_eigen = basis_transform(rho, spec, "to_eigen")
    assert_allclose(basis_transform(rho_eigen, spec, "to_local"), rho, atol=1e-14)
    assert_allclose(
        np.linalg.eigvalsh(rho_eigen), np.linalg.eigvalsh(rho), atol=1e-12
    )


def test_basis_transform_fixed_points():
    p = SystemParams(2.0, 2.0, 1.0)
    spec = analytic_spectrum(p)
    mixed = np.eye(4, dtype=complex) / 4
    assert_allclose(basis_transform(mixed, spec, "to_eigen"), mixed, atol=1e-14)
    ground = eigenprojector(spec, 1)
    assert_allclose(
        basis_transform(ground, spec, "to_eigen"), np.diag([1.0, 0, 0, 0]).astype(complex), atol=1e-14
    )
