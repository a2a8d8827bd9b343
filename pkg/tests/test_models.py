import numpy as np
import pytest
from hypothesis import given, strategies as st

from fdao.models import (BOLTZMANN2, HILL4, BoltzmannParams, Dataset, DomainError, HillParams,
                         ModelError, ParamVector, boltzmann_curve, boltzmann_eval,
                         boltzmann_grad, boltzmann_param_gradient_sum, get_model, hill_curve,
                         hill_eval, hill_grad, hill_hessian, hill_jacobian, model_eval)


def fd_jacobian(curve, x, theta, rel=1e-6):
    theta = np.asarray(theta, dtype=float)
    cols = []
    for j in range(theta.size):
        h = rel * max(abs(theta[j]), 1.0)
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        cols.append((curve(x, up) - curve(x, dn)) / (2 * h))
    return np.array(cols)


hill_theta = st.tuples(st.floats(-50, 50), st.floats(1, 200), st.floats(0.01, 10), st.floats(0.3, 6))
boltz_theta = st.tuples(st.floats(-80, 80), st.floats(2, 40) | st.floats(-40, -2))


@given(hill_theta, st.floats(0.001, 100))
def test_hill_jacobian_matches_central_differences(theta, d):
    a = hill_jacobian(np.array([d]), theta)[:, 0]
    fd = fd_jacobian(hill_curve, np.array([d]), theta)[:, 0]
    assert np.allclose(a, fd, rtol=1e-5, atol=1e-7 * abs(theta[1]))


@given(boltz_theta, st.floats(-100, 100))
def test_boltzmann_jacobian_matches_central_differences(theta, v):
    a = boltzmann_grad(np.array([v]), BoltzmannParams(*theta))[:, 0]
    fd = fd_jacobian(boltzmann_curve, np.array([v]), theta)[:, 0]
    assert np.allclose(a, fd, rtol=1e-5, atol=1e-10)


def test_hill_curve_closed_form():
    p = HillParams(-5, 100, 0.1, 2)
    d = np.array([0.01, 0.1, 1.0])
    assert np.allclose(hill_eval(d, p), -5 + 100 / (1 + (0.1 / d) ** 2), rtol=1e-14)


def test_hill_gradient_structure_at_km():
    p = HillParams(1.0, 80.0, 0.5, 3.0)
    g = hill_grad(0.5, p)
    assert g[0] == 1.0
    assert g[1] == 0.5
    assert g[3] == 0.0
    assert g[2] == pytest.approx(-0.25 * 3 * 80 / 0.5)


def test_hill_n_weaker_at_steeper_slope():
    d = 0.05
    lo = hill_grad(d, HillParams(0, 100, 0.1, 2))[3]
    hi = hill_grad(d, HillParams(0, 100, 0.1, 10))[3]
    assert abs(hi) < abs(lo)


@pytest.mark.parametrize("d", [0.03, 0.1, 0.4, 2.0])
def test_hill_hessian_matches_jacobian_differences(d):
    theta = np.array([-5.0, 100.0, 0.1, 2.0])
    h = hill_hessian(d, HillParams(*theta))
    fd = np.empty((4, 4))
    for j in range(4):
        step = 1e-6 * max(abs(theta[j]), 1e-3)
        up, dn = theta.copy(), theta.copy()
        up[j] += step
        dn[j] -= step
        fd[:, j] = (hill_jacobian(np.array([d]), up)[:, 0] - hill_jacobian(np.array([d]), dn)[:, 0]) / (2 * step)
    assert np.allclose(h, h.T)
    assert np.allclose(h, fd, rtol=1e-5, atol=1e-6)


def test_hill_hessian_degenerate_at_km():
    assert abs(np.linalg.det(hill_hessian(0.1, HillParams(-5, 100, 0.1, 2)))) < 1e-10


@pytest.mark.parametrize("kappa", [1.0, 2.0, 3.0, 10.0, -4.0])
def test_boltzmann_sum_at_half_point(kappa):
    p = BoltzmannParams(-40.0, kappa)
    assert boltzmann_param_gradient_sum(-40.0, p) == pytest.approx(-1 / (4 * kappa), abs=1e-12)


@given(boltz_theta, st.floats(-100, 100))
def test_boltzmann_sum_equals_row_sum(theta, v):
    p = BoltzmannParams(*theta)
    assert boltzmann_param_gradient_sum(v, p) == pytest.approx(boltzmann_grad(v, p).sum(), rel=1e-9, abs=1e-15)


@given(boltz_theta, st.floats(-100, 100))
def test_boltzmann_bounded(theta, v):
    y = boltzmann_eval(v, BoltzmannParams(*theta))
    assert 0.0 <= y <= 1.0


def test_boltzmann_half_at_vhalf():
    assert boltzmann_eval(-40.0, BoltzmannParams(-40.0, 10.0)) == 0.5


@given(hill_theta, st.floats(0.001, 10), st.floats(0.001, 10))
def test_hill_monotone_in_dose(theta, a, b):
    lo, hi = sorted((a, b))
    p = HillParams(*theta)
    assert hill_eval(lo, p) <= hill_eval(hi, p) + 1e-12


def test_extreme_inputs_stay_finite():
    assert np.all(np.isfinite(hill_eval(np.array([1e-300, 1e300]), HillParams(0, 1, 1, 50))))
    assert np.all(np.isfinite(boltzmann_grad(np.array([-1e6, 1e6]), BoltzmannParams(0, 0.01))))


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_hill_rejects_nonpositive_dose(d):
    with pytest.raises(DomainError):
        hill_eval(d, HillParams(0, 1, 1, 1))
    with pytest.raises(DomainError):
        HILL4.check_x([0.1, d])


def test_param_validation():
    with pytest.raises(ModelError):
        HillParams(0, 1, 0.0, 1)
    with pytest.raises(ModelError):
        BoltzmannParams(0, 0.0)
    with pytest.raises(ModelError):
        ParamVector(("a", "a"), (1.0, 2.0))
    with pytest.raises(ModelError):
        ParamVector(("a",), (np.nan,))
    with pytest.raises(ModelError):
        get_model("logistic5")


def test_dispatch_matches_direct():
    x = np.array([-20.0, 0.0, 33.0])
    theta = BOLTZMANN2.params((-40.0, 10.0))
    assert np.array_equal(model_eval(BOLTZMANN2, x, theta), boltzmann_eval(x, BoltzmannParams(-40, 10)))
    assert theta["kappa"] == 10.0


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.array([1.0, 2.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        Dataset(np.array([1.0]), np.array([np.inf]))
    assert Dataset.from_pairs([(1, 2), (3, 4)]).m == 2
