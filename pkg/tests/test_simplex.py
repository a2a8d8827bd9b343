import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from fdao.models import BOLTZMANN2, HILL4, Dataset, DomainError, ModelError, ParamVector
from fdao.simplex import CONVERGED, LOOP_CAP, SimplexConfig, fit, initial_simplex, objective_sr

V = np.array([-100, -80, -60, -40, -20, 0, 20, 40, 50, 80, 100], dtype=float)


def boltz_data(noise_sd=0.0, r=1, seed=0):
    x = np.repeat(V, r)
    y = BOLTZMANN2.curve(x, (-40.0, 10.0))
    if noise_sd:
        y = y + np.random.default_rng(seed).normal(0, noise_sd, x.size)
    return Dataset(x, y)


def cfg(theta, **kw):
    return SimplexConfig(BOLTZMANN2.params(theta), **kw)


def test_initial_simplex_layout():
    s = initial_simplex(np.array([2.0, 0.0, -4.0]), 0.5)
    assert s.shape == (4, 3)
    assert np.array_equal(s[0], [2.0, 0.0, -4.0])
    assert np.array_equal(s[1], [3.0, 0.0, -4.0])
    assert np.array_equal(s[2], [2.0, 0.5, -4.0])
    assert np.array_equal(s[3], [2.0, 0.0, -6.0])


def test_recovers_noiseless_parameters():
    res = fit(BOLTZMANN2, boltz_data(), cfg((-20.0, 1.0), delta_init=0.5, epsilon_stop=1e-12))
    assert res.stop_reason == CONVERGED
    assert np.allclose(res.theta_opt.values, (-40.0, 10.0), atol=1e-5)


def test_start_at_exact_optimum_stops_immediately():
    res = fit(BOLTZMANN2, boltz_data(), cfg((-40.0, 10.0)))
    assert res.sr == 0.0
    assert res.loops == 0
    assert res.stop_reason == CONVERGED


def test_loop_cap():
    res = fit(BOLTZMANN2, boltz_data(0.05, 5), cfg((-20.0, 1.0), loop_cap=3))
    assert res.loops == 3
    assert res.stop_reason == LOOP_CAP


def test_best_sr_never_increases():
    trace = []
    fit(BOLTZMANN2, boltz_data(0.05, 5), cfg((-20.0, 1.0), delta_init=0.5),
        on_loop=lambda k, sr: trace.append(sr))
    assert trace
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_sr_at_optimum_not_worse_than_reference_optimizer():
    data = boltz_data(0.05, 20, seed=3)
    ours = fit(BOLTZMANN2, data, cfg((-20.0, 1.0), delta_init=0.5, epsilon_stop=1e-12))
    ref = minimize(lambda t: objective_sr(BOLTZMANN2, data, t), ours.theta_opt.values,
                   method="Nelder-Mead", options=dict(xatol=1e-10, fatol=1e-12))
    assert ours.sr <= ref.fun * (1 + 1e-6)


def test_residuals_in_input_order():
    data = boltz_data(0.05, 3, seed=1)
    res = fit(BOLTZMANN2, data, cfg((-30.0, 5.0)))
    assert np.allclose(res.residuals, data.y - BOLTZMANN2.curve(data.x, res.theta_opt.values))
    assert res.sr == pytest.approx(np.abs(res.residuals).sum(), rel=1e-12)


@settings(max_examples=15)
@given(st.randoms(use_true_random=False))
def test_row_permutation_invariant(rnd):
    data = boltz_data(0.05, 4, seed=2)
    perm = list(range(data.m))
    rnd.shuffle(perm)
    shuffled = Dataset(data.x[perm], data.y[perm])
    a = fit(BOLTZMANN2, data, cfg((-30.0, 5.0)))
    b = fit(BOLTZMANN2, shuffled, cfg((-30.0, 5.0)))
    assert a.theta_opt == b.theta_opt
    assert a.loops == b.loops


def test_hill_fit():
    d = np.repeat([0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0], 3)
    y = HILL4.curve(d, (-5.0, 100.0, 0.1, 2.0))
    res = fit(HILL4, Dataset(d, y), SimplexConfig(HILL4.params((-10.0, 90.0, 0.2, 1.5)), epsilon_stop=1e-12))
    assert np.allclose(res.theta_opt.values, (-5.0, 100.0, 0.1, 2.0), rtol=1e-3, atol=1e-3)


def test_errors():
    data = boltz_data()
    with pytest.raises(ModelError):
        fit(BOLTZMANN2, data, SimplexConfig(ParamVector(("a", "b"), (1.0, 2.0))))
    with pytest.raises(ValueError):
        fit(BOLTZMANN2, Dataset(V[:1], V[:1]), cfg((-30.0, 5.0)))
    with pytest.raises(DomainError):
        fit(HILL4, Dataset(np.array([0.0, 1, 2, 3]), np.ones(4)),
            SimplexConfig(HILL4.params((0, 1, 1, 1))))
    for bad in (dict(delta_init=0.0), dict(epsilon_stop=-1.0), dict(loop_cap=0)):
        with pytest.raises(ValueError):
            cfg((-30.0, 5.0), **bad)


def test_nonfinite_start_is_domain_error():
    data = Dataset(np.array([1e-300, 1.0, 2.0, 3.0]), np.ones(4))
    with pytest.raises(DomainError):
        fit(HILL4, data, SimplexConfig(HILL4.params((1e308, 1e308, 1.0, 1.0))))
