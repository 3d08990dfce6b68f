from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wbgrp import (
    LinearSystem,
    SpaceTimePolynomial,
    StepFailure,
    UsageError,
    burgers_riemann,
    compute_dt,
    interface_fluctuations,
    predictor_fixed_point,
    segment_path_integral,
    time_integrated_fluctuations,
    update_cell,
    volume_terms,
)
from wbgrp.harness import build, load_config
from wbgrp.quadrature import fine_points_per_cell, nodes
from wbgrp.stationary import march_chain
from wbgrp.update import timestep

import oracles
from conftest import rest_state

F = lambda q: 0.5 * q * q


def constant_poly(P, Q):
    Q = np.atleast_1d(np.asarray(Q, dtype=float))
    vals = np.tile(Q, (P * P, 1))
    return SpaceTimePolynomial(P, vals, np.zeros_like(vals))


# -- fluctuations -----------------------------------------------------------

def test_equal_states_have_zero_fluctuations(burgers, s1):
    f = interface_fluctuations(burgers, [0.7], [0.7])
    assert f.minus[0] == 0.0 and f.plus[0] == 0.0
    Q = rest_state(s1, 3.0, 1.1, q=2.0)
    f = interface_fluctuations(s1, Q, Q)
    assert np.all(f.minus == 0.0) and np.all(f.plus == 0.0)


def test_burgers_right_moving_shock(burgers):
    f = interface_fluctuations(burgers, [1.0], [0.0])
    assert f.minus[0] == 0.0
    assert f.plus[0] == -0.5


def test_burgers_flux_identity_on_random_pairs(burgers):
    rng = np.random.default_rng(20240611)
    pairs = rng.uniform(-10.0, 10.0, size=(10_000, 2))
    for qL, qR in pairs:
        f = interface_fluctuations(burgers, [qL], [qR])
        jump = F(qR) - F(qL)
        assert abs(f.minus[0] + f.plus[0] - jump) <= 4e-16 * max(F(qL), F(qR), 1e-300)
        qG = burgers_riemann(qL, qR)
        assert f.minus[0] == F(qG) - F(qL)
        assert f.plus[0] == F(qR) - F(qG)


@pytest.mark.parametrize("P", [2, 3])
def test_bfe_stationary_interface_has_zero_fluctuations(bfe_any_gravity, P):
    """Traces of one C0 stationary chain meet at the interface with equal states."""
    model = bfe_any_gravity
    dx = 0.5
    Fp = fine_points_per_cell(P)
    x0 = 3.0
    chain = march_chain(model, x0 + dx * np.arange(2 * Fp + 1) / Fp, rest_state(model, x0, 1.1, q=4.0), P)
    left_trace, right_trace = chain[0, -1], chain[1, 0]
    assert np.array_equal(left_trace, right_trace)
    f = interface_fluctuations(model, left_trace, right_trace)
    assert np.all(f.minus == 0.0) and np.all(f.plus == 0.0)


def test_bfe_parameter_rows_of_fluctuations_vanish(s1):
    QL = rest_state(s1, 1.0, 1.05, q=3.0)
    QR = rest_state(s1, 1.0, 0.97, q=-1.0, psi=0.4)
    f = interface_fluctuations(s1, QL, QR)
    assert np.all(f.minus[3:] == 0.0) and np.all(f.plus[3:] == 0.0)
    assert np.any(f.minus[:3] != 0.0)


def test_linear_segment_path_integral_is_matrix_times_jump():
    model = LinearSystem([[1.0, 2.0], [0.5, -1.0]])
    QL, QR = np.array([0.3, -0.2]), np.array([1.1, 0.4])
    np.testing.assert_allclose(segment_path_integral(model, QL, QR), model.A @ (QR - QL), rtol=1e-14)


@given(qL=st.floats(-5, 5), qR=st.floats(-5, 5))
def test_burgers_segment_path_matches_flux_jump(qL, qR):
    from wbgrp import BurgersModel

    got = segment_path_integral(BurgersModel(), [qL], [qR])[0]
    assert got == pytest.approx(F(qR) - F(qL), abs=1e-13 * max(F(qL), F(qR), 1.0))


# -- time integration ----------------------------------------------------------

@pytest.mark.parametrize("P", [2, 3])
def test_time_constant_equal_traces(burgers, P):
    Dm, Dp, Qm, Qp = time_integrated_fluctuations(burgers, constant_poly(P, 0.4), constant_poly(P, 0.4))
    assert Dm[0] == 0.0 and Dp[0] == 0.0
    assert Qm[0] == 0.4 and Qp[0] == 0.4


@pytest.mark.parametrize("P", [2, 3])
def test_time_constant_shock(burgers, P):
    Dm, Dp, _, _ = time_integrated_fluctuations(burgers, constant_poly(P, 1.0), constant_poly(P, 0.0))
    assert Dm[0] == 0.0
    assert Dp[0] == pytest.approx(-0.5, abs=1e-16)


@pytest.mark.parametrize("P", [2, 3])
@given(coef=st.lists(st.floats(-2, 2), min_size=6, max_size=6))
def test_time_quadrature_is_exact_for_polynomial_traces(P, coef):
    model = LinearSystem([[-1.0, 0.4], [0.4, 2.0]])
    tau = nodes(P)
    deg = P - 1
    c = np.array(coef).reshape(3, 2)[: deg + 1]
    left_edge = lambda t: sum(c[k] * t**k for k in range(deg + 1))
    right_edge = lambda t: 0.5 * left_edge(t) + 0.1
    L = np.zeros((P * P, 2))
    R = np.zeros((P * P, 2))
    for b, t in enumerate(tau):
        L[b * P + P - 1] = left_edge(t)
        R[b * P] = right_edge(t)
    left = SpaceTimePolynomial(P, L, np.zeros_like(L))
    right = SpaceTimePolynomial(P, R, np.zeros_like(R))
    Dm, Dp, _, _ = time_integrated_fluctuations(model, left, right)
    # time mean of the jump, integrated analytically
    mean_left = sum(c[k] / (k + 1) for k in range(deg + 1))
    jump = (0.5 * mean_left + 0.1) - mean_left
    lam, Rv = np.linalg.eig(model.A)
    Am = Rv @ np.diag(np.minimum(lam, 0)) @ np.linalg.inv(Rv)
    Ap = Rv @ np.diag(np.maximum(lam, 0)) @ np.linalg.inv(Rv)
    np.testing.assert_allclose(Dm, Am @ jump, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(Dp, Ap @ jump, rtol=1e-13, atol=1e-13)


# -- volume terms ---------------------------------------------------------------

@pytest.mark.parametrize("P", [2, 3])
def test_prediction_equal_to_stationary_gives_equal_volume_terms(bfe_any_gravity, P):
    model = bfe_any_gravity
    dx = 0.5
    Fp = fine_points_per_cell(P)
    Qs = march_chain(model, 2.0 + dx * np.arange(Fp + 1) / Fp, rest_state(model, 2.0, 1.1, q=3.0), P)[0]
    poly = predictor_fixed_point(model, Qs, Qs, dx, 1e-4, x_left=2.0)
    vt = volume_terms(model, poly, Qs, dx, 1e-4, x_left=2.0)
    assert np.array_equal(vt.B, vt.B_star)
    assert np.array_equal(vt.S, vt.S_star)


def test_constant_prediction_has_no_nonconservative_term():
    model = LinearSystem([[2.0, 1.0], [1.0, -3.0]])
    vt = volume_terms(model, constant_poly(3, [1.0, -2.0]), None, 0.1, 0.01)
    assert np.all(vt.B == 0.0) and np.all(vt.S == 0.0)


def test_burgers_linear_prediction_volume_terms(burgers):
    # q = xi on the P = 2 element, constant in time
    vals = np.array([[0.0], [1.0], [0.0], [1.0]])
    poly = SpaceTimePolynomial(2, vals, np.zeros_like(vals))
    dt = 0.03
    vt = volume_terms(burgers, poly, None, 0.2, dt)
    assert vt.B[0] == pytest.approx(dt / 2, rel=1e-14)
    # trapezoid on xi² (the analytic mean would be 1/3)
    assert vt.S[0] == pytest.approx(0.5, rel=1e-14)
    assert vt.B_star[0] == 0.0 and vt.S_star[0] == 0.0


# -- cell update ------------------------------------------------------------------

def test_update_with_balanced_terms_is_identity():
    Q = np.array([1.5, -0.25, 3.0])
    B = np.array([0.1, 0.2, 0.3])
    S = np.array([4.0, 5.0, 6.0])
    z = np.zeros(3)
    assert np.array_equal(update_cell(Q, B, B, z, z, S, S, 0.1, 0.01), Q)


def test_update_rejects_non_finite():
    with pytest.raises(StepFailure):
        update_cell([1.0], [np.inf], [0.0], [0.0], [0.0], [0.0], [0.0], 0.1, 0.01)


def test_first_order_update_matches_godunov(burgers):
    """Piecewise-constant data with no volume terms reduce to Godunov's method."""
    N, dx, dt, left = 10, 0.1, 0.04, 1.0
    q = np.where(np.arange(N) < 3, 1.0, 0.0)
    want = oracles.godunov_first_order(q, left, dx, dt, 5)
    z = np.zeros(1)
    for _ in range(5):
        ext = np.concatenate(([left], q, [q[-1]]))
        fl = [interface_fluctuations(burgers, [a], [b]) for a, b in zip(ext[:-1], ext[1:])]
        q = np.array([update_cell([q[i]], z, z, fl[i + 1].minus, fl[i].plus, z, z, dx, dt)[0]
                      for i in range(N)])
    np.testing.assert_allclose(q, want, rtol=0, atol=1e-15)


def test_bfe_parameters_never_change():
    cfg = replace(load_config("bfe-s2"), ic="rest", cells=16)
    setup = build(cfg)
    P0 = setup.state.Qbar[:, 3:].copy()
    setup.solver.advance(setup.state, np.inf, max_steps=50, record=False)
    assert setup.state.steps == 50
    assert np.any(setup.state.Qbar[:, 1] != 0.0)
    assert np.array_equal(setup.state.Qbar[:, 3:], P0)


# -- time step ------------------------------------------------------------------

def test_timestep_examples():
    assert timestep(2.0, 0.04, 0.9) == pytest.approx(0.018, rel=1e-15)
    assert timestep(2.0, 0.04, 0.9, remaining=0.010) == 0.010
    assert timestep(400.0, 1.0, 0.8) == pytest.approx(0.002, rel=1e-15)


def test_compute_dt_burgers(burgers):
    Qbar = np.array([[0.5], [2.0], [-1.0]])
    cache = np.array([[0.5], [1.0], [1.5], [-1.0]])
    assert compute_dt(burgers, Qbar, cache, cache, 0.04, 0.9) == pytest.approx(0.018, rel=1e-15)
    assert compute_dt(burgers, Qbar, cache, cache, 0.04, 0.9, t=0.5, t_final=0.51) == pytest.approx(0.01, rel=1e-12)


def test_compute_dt_lands_on_final_time(burgers):
    Qbar = np.array([[2.0]])
    cache = np.array([[2.0], [2.0]])
    t, t_final = 0.0, 0.05
    while t < t_final:
        t += compute_dt(burgers, Qbar, cache, cache, 0.04, 0.9, t=t, t_final=t_final)
    assert t == t_final


def test_compute_dt_bfe_rest(s1):
    Q = rest_state(s1, 5.0)
    c = s1.sound_speed(Q)
    Qbar = np.tile(Q, (4, 1))
    dt = compute_dt(s1, Qbar, np.tile(Q, (5, 1)), np.tile(Q, (5, 1)), 1.0, 0.8)
    assert dt == pytest.approx(0.8 / c, rel=1e-14)


def test_compute_dt_zero_speed(burgers):
    zero = np.zeros((3, 1))
    assert compute_dt(burgers, zero, np.zeros((4, 1)), np.zeros((4, 1)), 0.1, 0.9, dt_max=0.25) == 0.25
    with pytest.raises(UsageError):
        compute_dt(burgers, zero, np.zeros((4, 1)), np.zeros((4, 1)), 0.1, 0.9)
    with pytest.raises(UsageError):
        compute_dt(burgers, zero, np.zeros((4, 1)), np.zeros((4, 1)), 0.1, 1.5)


# -- global well-balance -------------------------------------------------------

def _drift_after(cfg, steps):
    setup = build(cfg)
    Q0 = setup.state.Qbar.copy()
    setup.solver.advance(setup.state, np.inf, max_steps=steps, record=False)
    assert setup.state.steps == steps
    return setup, Q0, setup.state.Qbar


@pytest.mark.parametrize("P", [2, 3])
def test_global_well_balance_burgers(P):
    cfg = replace(load_config("burgers-stationary"), order=P)
    _, Q0, Q = _drift_after(cfg, 1000)
    assert np.all(np.abs(Q - Q0) <= 5e-13 * np.abs(Q0))


@pytest.mark.parametrize("P", [2, 3])
@pytest.mark.parametrize("scenario", ["bfe-s1", "bfe-s2", "bfe-s3"])
def test_global_well_balance_bfe(P, scenario):
    cfg = replace(load_config(scenario), order=P, ic="stationary", cells=16)
    setup, Q0, Q = _drift_after(cfg, 1000)
    assert np.all(np.abs(Q[:, 0] - Q0[:, 0]) <= 5e-13 * Q0[:, 0])
    # q starts at 0; measured against the natural flow scale A c
    flow_scale = Q0[:, 0] * setup.model.derived(Q0)["c"]
    assert np.all(np.abs(Q[:, 1]) <= 5e-13 * flow_scale)
    assert np.array_equal(Q[:, 3:], Q0[:, 3:])
