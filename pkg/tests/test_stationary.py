import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wbgrp import match_cell_average, rk_march
from wbgrp.bfe import BFEModel, Constant
from wbgrp.quadrature import fine_points_per_cell, weights
from wbgrp.stationary import FALLBACK_SINGULAR, march_chain

import oracles
from conftest import LENGTH, rest_state, s1_profile


def one_cell_chain(model, x_left, dx, anchor, P):
    F = fine_points_per_cell(P)
    return march_chain(model, x_left + dx * np.arange(F + 1) / F, anchor, P)[0]


def test_zero_gravity_march_keeps_anchor():
    model = BFEModel(s1_profile(Constant(0.0)))
    Q0 = rest_state(model, 2.0, 1.1)
    for P in (2, 3):
        assert np.array_equal(rk_march(model, 2.0, Q0, 0.3, P), Q0)


@pytest.mark.parametrize("P", [2, 3])
@pytest.mark.parametrize("dx", [0.5, 0.1, 0.01])
def test_burgers_anchor_inverts_quadrature_average(burgers, P, dx):
    qbar = 1.7
    sp = match_cell_average(burgers, (0.0, dx), [qbar], P)
    assert sp.converged
    assert sp.average[0] == pytest.approx(qbar, rel=1e-12)
    # exact exponential differs from the RK profile by the one-step truncation
    h = dx / (P - 1)
    if P == 2:
        expected = oracles.trapezoid_anchor(qbar, dx)
        assert sp.anchor == pytest.approx(expected, rel=h**3)
        # closed form for Heun: node 1 is anchor * (1 + h + h²/2)
        assert sp.anchor == pytest.approx(2 * qbar / (2 + h + h * h / 2), rel=1e-13)
    else:
        e = math.exp(h)
        exact = qbar / ((1 + 4 * e + e * e) / 6)
        assert sp.anchor == pytest.approx(exact, rel=h**4)


def test_burgers_zero_average_gives_zero_profile(burgers):
    for P in (2, 3):
        sp = match_cell_average(burgers, (0.3, 0.1), [0.0], P)
        assert sp.converged
        assert np.all(sp.nodes == 0.0)


def test_bfe_flat_rest_profile_is_constant():
    model = BFEModel(s1_profile(Constant(0.0)))
    Qbar = rest_state(model, 4.0, 1.05)
    for P in (2, 3):
        sp = match_cell_average(model, (4.0, 0.5), Qbar, P)
        assert sp.converged
        np.testing.assert_allclose(sp.nodes, np.tile(Qbar, (P, 1)), rtol=1e-12, atol=0)


@pytest.mark.parametrize("P", [2, 3])
@given(x=st.floats(0.0, LENGTH - 0.5), ratio=st.floats(0.8, 1.3), mach=st.floats(-0.3, 0.3),
       dx=st.sampled_from([0.5, 0.125, 0.03125]))
def test_exact_recovery_of_stationary_averages(bfe_any_gravity, P, x, ratio, mach, dx):
    model = bfe_any_gravity
    Q0 = rest_state(model, x, ratio)
    Q0[1] = mach * model.sound_speed(Q0) * Q0[0]
    chain = one_cell_chain(model, x, dx, Q0, P)
    Qbar = weights(P) @ chain
    sp = match_cell_average(model, (x, dx), Qbar, P)
    assert sp.converged
    scale = np.maximum(np.abs(chain).max(axis=0), 1e-300)
    assert np.all(np.abs(sp.nodes - chain) <= 1e-11 * scale)


@pytest.mark.parametrize("P", [2, 3])
@given(qbar=st.floats(-5, 5), x=st.floats(-1, 1))
def test_burgers_exact_recovery(burgers, P, qbar, x):
    dx = 0.05
    chain = one_cell_chain(burgers, x, dx, [qbar], P)
    sp = match_cell_average(burgers, (x, dx), weights(P) @ chain, P)
    assert np.all(np.abs(sp.nodes - chain) <= 1e-11 * max(abs(qbar), 1e-300))


@pytest.mark.parametrize("P", [2, 3])
@given(ratio=st.floats(0.7, 1.5), q=st.floats(-5.0, 5.0), psi=st.floats(-2, 2), x=st.floats(0, 9))
def test_profile_is_a_genuine_stationary_chain(s1, P, ratio, q, psi, x):
    dx = 1.0
    Qbar = rest_state(s1, x, ratio, q=q, psi=psi)
    sp = match_cell_average(s1, (x, dx), Qbar, P)
    assert sp.converged
    assert np.all(sp.nodes[:, 2] == 0.0)
    assert np.all(sp.nodes[:, 1] == Qbar[1])
    assert sp.average[0] == pytest.approx(Qbar[0], rel=1e-12)
    # re-marching from the anchor reproduces every node bitwise
    h = dx / (P - 1)
    Q = sp.nodes[0]
    for p in range(1, P):
        Q = rk_march(s1, sp.x[p - 1], Q, h, P)
        assert np.array_equal(Q, sp.nodes[p])


def test_warm_start_reaches_same_profile(s1):
    Qbar = rest_state(s1, 3.0, 1.2)
    cold = match_cell_average(s1, (3.0, 0.5), Qbar, 3)
    warm = match_cell_average(s1, (3.0, 0.5), Qbar, 3, warm_start=cold.anchor)
    assert warm.iterations <= cold.iterations
    np.testing.assert_allclose(warm.nodes, cold.nodes, rtol=1e-13)


def test_sonic_cell_falls_back_to_constant(s1):
    Qbar = rest_state(s1, 1.0, 1.0)
    Qbar[1] = s1.sound_speed(Qbar) * Qbar[0]
    sp = match_cell_average(s1, (1.0, 0.5), Qbar, 3)
    assert sp.flag == FALLBACK_SINGULAR
    assert not sp.converged
    assert np.all(sp.nodes[:, 0] == Qbar[0])
    assert np.all(sp.nodes[:, 1] == Qbar[1])
