import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qetsim.errors import InvalidIndex, InvalidOutcome, InvalidState
from qetsim.protocol import (
    ProtocolResult,
    XStateParams,
    d_coef_half_coherence,
    e_out_closed_form,
    eigenstate_eout,
    injected_energy,
    optimal_angles,
    protocol_coefficients,
    protocol_operators,
    simulate_protocol,
    x_state_coefficients,
)
from qetsim.system import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    SystemParams,
    analytic_spectrum,
    eigenprojector,
)

from conftest import random_density

P_REF = SystemParams(2.0, 2.0, 1.0)
MIXED = np.eye(4, dtype=complex) / 4


def ground_state(params=P_REF) -> np.ndarray:
    return eigenprojector(analytic_spectrum(params), 1)


# -------------------------------------------------------------- operators

def test_projectors_complete_and_idempotent():
    p_plus, _ = protocol_operators(+1, 0.3)
    p_minus, _ = protocol_operators(-1, 0.3)
    assert_allclose(p_plus + p_minus, np.eye(4), atol=0)
    for proj in (p_plus, p_minus):
        assert_allclose(proj @ proj, proj, atol=1e-15)
        assert_allclose(proj, proj.conj().T, atol=0)
        assert np.trace(proj).real == pytest.approx(2.0)  # rank 2


def test_projector_commutes_with_receiver_and_interaction_terms():
    h_b = 2.0 * np.kron(IDENTITY_2, SIGMA_Z)
    interaction = 2.0 * np.kron(SIGMA_X, SIGMA_X)
    for u in (+1, -1):
        proj, _ = protocol_operators(u, 0.0)
        assert np.abs(proj @ h_b - h_b @ proj).max() < 1e-15
        assert np.abs(proj @ interaction - interaction @ proj).max() < 1e-15


@given(st.floats(-10.0, 10.0), st.sampled_from((+1, -1)))
@settings(max_examples=40, deadline=None)
def test_correction_is_unitary(theta, u):
    _, unitary = protocol_operators(u, theta)
    assert np.abs(unitary @ unitary.conj().T - np.eye(4)).max() < 1e-14


def test_zero_angle_correction_is_identity():
    _, unitary = protocol_operators(+1, 0.0)
    assert_allclose(unitary, np.eye(4), atol=0)


def test_invalid_outcome_rejected():
    with pytest.raises(InvalidOutcome):
        protocol_operators(2, 0.1)


# ---------------------------------------------------------------- energies

def test_maximally_mixed_state_yields_nothing(rng):
    for theta in (0.1, 0.9, 2.5):
        result = simulate_protocol(MIXED, theta, P_REF)
        assert result.e_out == pytest.approx(0.0, abs=1e-14)
    assert protocol_coefficients(MIXED, P_REF) == (pytest.approx(0.0, abs=1e-14),) * 2


def test_zero_angle_extracts_nothing(rng):
    rho = random_density(rng)
    assert simulate_protocol(rho, 0.0, P_REF).e_out == pytest.approx(0.0, abs=1e-14)


def test_ground_state_reference_output():
    result = simulate_protocol(ground_state(), math.pi / 4, P_REF)
    assert result.e_out == pytest.approx(-8.0 / math.sqrt(20), abs=1e-12)
    assert result.e_out == pytest.approx(-1.78885, abs=1e-5)


def test_measurement_preserves_receiver_energy_terms(rng):
    # the measurement touches only the sender's local term: <H_B> and <V>
    # are unchanged between rho and the averaged post-measurement state
    h_b = 2.0 * np.kron(IDENTITY_2, SIGMA_Z)
    interaction = 2.0 * np.kron(SIGMA_X, SIGMA_X)
    for _ in range(20):
        rho = random_density(rng)
        post = sum(
            protocol_operators(u, 0.0)[0] @ rho @ protocol_operators(u, 0.0)[0] for u in (+1, -1)
        )
        for op in (h_b, interaction):
            assert np.trace(op @ post).real == pytest.approx(np.trace(op @ rho).real, abs=1e-12)


def test_invalid_state_rejected():
    with pytest.raises(InvalidState):
        simulate_protocol(np.eye(4, dtype=complex), 0.1, P_REF)  # trace 4
    rho = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
    with pytest.raises(InvalidState):
        simulate_protocol(rho, 0.1, P_REF)


# ------------------------------------------------------------- coefficients

def test_ground_state_coefficients():
    d_coef, f_coef = protocol_coefficients(ground_state(), P_REF)
    assert d_coef == pytest.approx(4.0 / math.sqrt(20), abs=1e-12)
    assert f_coef == pytest.approx(12.0 / math.sqrt(20), abs=1e-12)
    assert (d_coef, f_coef) == (pytest.approx(0.894427, abs=1e-6), pytest.approx(2.683282, abs=1e-6))


def test_product_state_coefficients():
    # A in the lower level, B excited: population c = 1
    rho = np.diag([0.0, 0.0, 1.0, 0.0]).astype(complex)
    d_coef, f_coef = protocol_coefficients(rho, P_REF)
    assert (d_coef, f_coef) == (pytest.approx(-2.0), pytest.approx(-2.0))
    *_, e_max = optimal_angles(d_coef, f_coef)
    assert e_max == pytest.approx(2.0 * math.sqrt(2) + 2.0, abs=1e-12)


def test_closed_form_matches_oracle_on_random_states(rng):
    params = SystemParams(1.7, 0.9, 1.3)
    worst = 0.0
    for _ in range(300):
        rho = random_density(rng)
        theta = rng.uniform(0.0, math.pi)
        result = simulate_protocol(rho, theta, params)
        closed = e_out_closed_form(result.d_coef, result.f_coef, theta)
        worst = max(worst, abs(closed - result.e_out))
    assert worst < 1e-10


def test_pi_periodicity(rng):
    rho = random_density(rng)
    a = simulate_protocol(rho, 0.7, P_REF).e_out
    b = simulate_protocol(rho, 0.7 + math.pi, P_REF).e_out
    assert a == pytest.approx(b, abs=1e-12)


def test_half_coherence_variant_differs_on_coherent_states():
    d_full, _ = protocol_coefficients(ground_state(), P_REF)
    d_half = d_coef_half_coherence(ground_state(), P_REF)
    assert d_half != pytest.approx(d_full, abs=1e-3)


# ------------------------------------------------------------------ angles

def test_equal_positive_coefficients_give_pi_over_8():
    theta1, theta2, theta_star, _ = optimal_angles(1.0, 1.0)
    assert theta1 == pytest.approx(math.pi / 8)
    assert theta2 == pytest.approx(math.pi / 8 + math.pi / 2)
    assert theta_star == theta1


def test_three_four_five_maximum():
    *_, e_max = optimal_angles(3.0, 4.0)
    assert e_max == pytest.approx(1.0, abs=1e-14)


def test_degenerate_coefficients_convention():
    theta1, theta2, theta_star, e_max = optimal_angles(0.0, 0.0)
    assert (theta1, theta2, theta_star, e_max) == (0.0, math.pi / 2, 0.0, 0.0)


coef_strategy = st.floats(-1e6, 1e6, allow_nan=False)


@given(coef_strategy, coef_strategy)
@settings(max_examples=200, deadline=None)
def test_angle_properties(d_coef, f_coef):
    theta1, theta2, theta_star, e_max = optimal_angles(d_coef, f_coef)
    assert 0.0 <= theta1 < math.pi and 0.0 <= theta2 < math.pi
    assert e_max >= 0.0
    scale = max(1.0, abs(d_coef), abs(f_coef))
    # both angles are stationary values, summing to -2F
    out1 = e_out_closed_form(d_coef, f_coef, theta1)
    out2 = e_out_closed_form(d_coef, f_coef, theta2)
    assert out1 + out2 == pytest.approx(-2.0 * f_coef, abs=1e-9 * scale)
    assert max(out1, out2) == pytest.approx(e_max, abs=1e-9 * scale)
    assert e_out_closed_form(d_coef, f_coef, theta_star) == pytest.approx(e_max, abs=1e-9 * scale)


@given(coef_strategy, coef_strategy)
@settings(max_examples=100, deadline=None)
def test_e_max_vanishes_only_without_gain(d_coef, f_coef):
    *_, e_max = optimal_angles(d_coef, f_coef)
    scale = max(1.0, abs(d_coef), abs(f_coef))
    if e_max < 1e-12 * scale:
        assert abs(d_coef) < 1e-5 * scale
        assert f_coef > -1e-5 * scale


def test_ground_state_maximum_output():
    d_coef, f_coef = protocol_coefficients(ground_state(), P_REF)
    *_, e_max = optimal_angles(d_coef, f_coef)
    assert e_max == pytest.approx(math.sqrt(8) - 12.0 / math.sqrt(20), abs=1e-12)
    # brute-force maximization of the operator-algebra route
    grid = np.linspace(0.0, math.pi, 2001)
    brute = max(simulate_protocol(ground_state(), float(t), P_REF).e_out for t in grid)
    assert e_max == pytest.approx(brute, abs=1e-5)


def test_purely_local_extraction_limit(rng):
    # diagonal state and near-zero coupling: the optimum reduces to max(0, -2F)
    params = SystemParams(1.4, 0.8, 1e-9)
    pops = rng.dirichlet(np.ones(4))
    rho = np.diag(pops).astype(complex)
    d_coef, f_coef = protocol_coefficients(rho, params)
    *_, e_max = optimal_angles(d_coef, f_coef)
    assert e_max == pytest.approx(max(0.0, -2.0 * f_coef), abs=1e-8)


# -------------------------------------------------------------- eigenstates

def test_eigenstate_antisymmetry_is_exact(rng):
    for _ in range(20):
        params = SystemParams(rng.uniform(0.1, 5), rng.uniform(0.1, 5), rng.uniform(0.2, 3))
        for theta in rng.uniform(0.0, math.pi, size=10):
            assert eigenstate_eout(params, 1, theta) == -eigenstate_eout(params, 4, theta)
            assert eigenstate_eout(params, 2, theta) == -eigenstate_eout(params, 3, theta)


def test_eigenstate_output_vanishes_at_zero_angle():
    for k in (1, 2, 3, 4):
        assert eigenstate_eout(P_REF, k, 0.0) == 0.0


def test_eigenstate_closed_form_matches_projector_simulation():
    params = SystemParams(1.2, 2.3, 0.7)
    spec = analytic_spectrum(params)
    for k in (1, 2, 3, 4):
        rho = eigenprojector(spec, k)
        for theta in (0.3, 1.1, 2.8):
            assert eigenstate_eout(params, k, theta) == pytest.approx(
                simulate_protocol(rho, theta, params).e_out, abs=1e-10
            )


def test_eigenstate_reference_value():
    assert eigenstate_eout(P_REF, 1, math.pi / 4) == pytest.approx(-1.78885, abs=1e-5)


def test_eigenstate_index_guard():
    with pytest.raises(InvalidIndex):
        eigenstate_eout(P_REF, 5, 0.1)


# ---------------------------------------------------------------- injection

def test_injected_energy_reference_points(rng):
    gg = np.diag([0.0, 0.0, 0.0, 1.0]).astype(complex)
    assert injected_energy(gg, P_REF) == pytest.approx(P_REF.eps_a)
    assert injected_energy(MIXED, P_REF) == pytest.approx(0.0, abs=1e-14)
    spec = analytic_spectrum(P_REF)
    assert injected_energy(ground_state(), P_REF) == pytest.approx(
        2.0 * math.cos(2 * spec.phi1), abs=1e-12
    )
    rho = random_density(rng)
    result = simulate_protocol(rho, 0.4, P_REF)
    assert injected_energy(rho, P_REF) == pytest.approx(result.e_a - result.e0, abs=1e-12)


# ----------------------------------------------------------------- X states

@given(
    st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4),
    st.floats(0.0, 0.999),
    st.floats(0.0, 0.999),
    st.floats(0.0, 2 * math.pi),
    st.floats(0.0, 2 * math.pi),
)
@settings(max_examples=60, deadline=None)
def test_x_state_formulas_match_expectation_route(raw, fa, fd, beta, eps_phase):
    total = sum(raw)
    a, b, c, d = (x / total for x in raw)
    x = XStateParams(
        a=a, b=b, c=c, d=d,
        alpha=fa * math.sqrt(a * d), beta=beta,
        delta=fd * math.sqrt(b * c), eps_phase=eps_phase,
    )
    params = SystemParams(1.9, 0.6, 1.1)
    from_entries = x_state_coefficients(x, params)
    from_expectations = protocol_coefficients(x.to_density(), params)
    assert from_entries == (
        pytest.approx(from_expectations[0], abs=1e-12),
        pytest.approx(from_expectations[1], abs=1e-12),
    )


def test_x_state_round_trip():
    x = XStateParams(a=0.4, b=0.3, c=0.2, d=0.1, alpha=0.15, beta=1.0, delta=0.2, eps_phase=-0.5)
    back = XStateParams.from_density(x.to_density())
    assert back.a == pytest.approx(x.a)
    assert back.alpha == pytest.approx(x.alpha)
    assert math.cos(back.eps_phase) == pytest.approx(math.cos(x.eps_phase))


def test_x_state_guards():
    with pytest.raises(InvalidState):
        XStateParams(a=0.5, b=0.5, c=0.2, d=-0.2)
    with pytest.raises(InvalidState):
        XStateParams(a=0.25, b=0.25, c=0.25, d=0.25, alpha=0.5)  # alpha^2 > a*d
    with pytest.raises(InvalidState):
        XStateParams.from_density(np.full((4, 4), 0.25, dtype=complex))


def test_result_invariants(rng):
    rho = random_density(rng)
    result = simulate_protocol(rho, 1.2, P_REF)
    assert isinstance(result, ProtocolResult)
    assert result.e_out == pytest.approx(result.e_a - result.e_b, abs=1e-12)
    assert result.e_max == pytest.approx(
        math.hypot(result.d_coef, result.f_coef) - result.f_coef, abs=1e-12
    )
