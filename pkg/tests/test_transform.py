import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import shared_corpus, shared_plan
from jacobiharm.errors import DomainError
from jacobiharm.specfun import JacobiParams, jacobi_phi
from jacobiharm.transform import (
    RadialFunction,
    SpectralFunction,
    TransformPlan,
    default_lambda_grid,
    forward,
    heat_spectrum,
    inverse,
    norm_kappa,
    norm_mu,
    plancherel_defect,
    read_radial_csv,
    read_spectral_csv,
    translate_spherical,
    write_radial_csv,
    write_spectral_csv,
)

GAUSS = RadialFunction.closed_form(lambda t: np.exp(-np.asarray(t) ** 2))
ZERO_R = RadialFunction.closed_form(lambda t: np.zeros_like(np.asarray(t, dtype=float)))
ZERO_S = SpectralFunction.closed_form(lambda lam: np.zeros_like(np.asarray(lam, dtype=float)))


def test_grid_shape():
    g = default_lambda_grid()
    assert g[0] == 0 and g[-1] == 60 and np.all(np.diff(g) > 0)
    assert np.diff(g)[1] < 1e-4  # dense near the origin


def test_plan_validation():
    with pytest.raises(DomainError):
        TransformPlan(JacobiParams(1, 0), lambda_grid=np.array([0.0, 2.0, 1.0]))
    with pytest.raises(DomainError):
        RadialFunction.sampled([0.1, 0.2], [1.0, 2.0])
    with pytest.raises(DomainError):
        RadialFunction()


def test_zero_maps_to_zero(plan_10):
    assert np.all(forward(ZERO_R, plan_10).values == 0)
    assert np.all(inverse(ZERO_S, plan_10).values == 0)
    assert norm_mu(ZERO_R, 2, plan_10) == 0
    assert norm_kappa(ZERO_S, 2, plan_10) == 0
    with pytest.raises(ZeroDivisionError):
        plancherel_defect(ZERO_R, plan_10)


def test_forward_linearity(plan_10):
    g = RadialFunction.closed_form(lambda t: (1 + np.asarray(t) ** 2) * np.exp(-2 * np.asarray(t) ** 2))
    both = RadialFunction.closed_form(lambda t: 2 * GAUSS(t) + g(t))
    lhs = forward(both, plan_10).values
    rhs = 2 * forward(GAUSS, plan_10).values + forward(g, plan_10).values
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * np.max(np.abs(rhs))


def test_forward_rejects_slow_decay(plan_10):
    f = RadialFunction.closed_form(lambda t: np.exp(-np.asarray(t)), decay_hint=1.0)
    with pytest.raises(DomainError):
        forward(f, plan_10)


def test_forward_matches_pointwise_quadrature(plan_2h):
    # independent evaluation of one transform value with mpmath quadrature
    import mpmath as mp
    p = plan_2h.params
    lam = 3.0
    mp.mp.dps = 20
    r = p.rho

    def integrand(t):
        phi = mp.re(mp.hyp2f1((r - 1j * lam) / 2, (r + 1j * lam) / 2, p.alpha + 1, -mp.sinh(t) ** 2))
        return mp.exp(-t * t) * phi * (2 * mp.sinh(t)) ** (2 * p.alpha + 1) * (2 * mp.cosh(t)) ** (2 * p.beta + 1)

    ref = float(mp.quad(integrand, [0, 2, 4, 6, 8, 12]))
    F = forward(GAUSS, plan_2h)
    assert abs(F(lam) - ref) < 1e-6 * abs(F(0.0))


@pytest.mark.parametrize("ab", [(1.0, 0.0), (2.0, 0.5)])
def test_heat_round_trip(ab):
    plan = shared_plan(*ab)
    heat = heat_spectrum(plan.params, 0.5)
    f = inverse(heat, plan)
    F = forward(f, plan)
    lam = plan.lambda_grid
    assert np.max(np.abs(F.values - heat(lam))) < 1e-5 * heat(0.0)


def test_heat_kernel_positive(plan_10):
    f = inverse(heat_spectrum(plan_10.params, 0.5), plan_10)
    assert np.all(f.values[plan_10.t_grid <= 6] > 0)


@pytest.mark.parametrize("ab", [(1.0, 0.0), (2.0, 0.5)])
def test_corpus_plancherel_and_round_trip(ab):
    plan = shared_plan(*ab)
    tt = plan.t_grid[plan.t_grid <= 3]
    for name, f in shared_corpus(*ab).items():
        F = forward(f, plan)
        assert plancherel_defect(f, plan, F) < 1e-5, name
        back = inverse(F, plan)
        assert np.max(np.abs(back(tt) - f(tt))) < 1e-5, name


def test_plancherel_norm_identity(plan_2h):
    F = forward(GAUSS, plan_2h)
    assert abs(norm_mu(GAUSS, 2, plan_2h) - norm_kappa(F, 2, plan_2h)) < 1e-5 * norm_mu(GAUSS, 2, plan_2h)


def test_defect_homogeneous(plan_10):
    f = shared_corpus(1.0, 0.0)["bump"]
    d1 = plancherel_defect(f, plan_10)
    d3 = plancherel_defect(f.scaled(3.0), plan_10)
    assert abs(d1 - d3) < 1e-12


@settings(max_examples=15, deadline=None)
@given(c=st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3), p=st.floats(1.0, 6.0))
def test_norm_homogeneity(c, p):
    plan = shared_plan(1.0, 0.0)
    n1 = norm_mu(GAUSS, p, plan)
    assert abs(norm_mu(GAUSS.scaled(c), p, plan) - abs(c) * n1) < 1e-12 * abs(c) * n1
    H = heat_spectrum(plan.params, 0.3)
    k1 = norm_kappa(H, p, plan)
    assert abs(norm_kappa(H.scaled(c), p, plan) - abs(c) * k1) < 1e-12 * abs(c) * k1


def test_norm_exponent_validation(plan_10):
    with pytest.raises(DomainError):
        norm_mu(GAUSS, 0.5, plan_10)
    with pytest.raises(DomainError):
        norm_kappa(ZERO_S, math.inf, plan_10)


def test_translate_identity_and_contraction(plan_10):
    F = forward(GAUSS, plan_10)
    assert translate_spherical(F, 0.0, plan_10.params).values.tolist() == F.values.tolist()
    for t in (0.3, 1.0, 2.5):
        G = translate_spherical(F, t, plan_10.params)
        assert np.all(np.abs(G.values) <= np.abs(F.values) + 1e-12)
        assert norm_kappa(G, 2, plan_10) <= norm_kappa(F, 2, plan_10) * (1 + 1e-12)
    H = translate_spherical(heat_spectrum(plan_10.params, 1.0), 0.7, plan_10.params)
    assert abs(H(2.0) - math.exp(-(4 + 4)) * jacobi_phi(plan_10.params, 2.0, 0.7)) < 1e-15
    with pytest.raises(DomainError):
        translate_spherical(F, -1.0, plan_10.params)


def test_csv_round_trip(tmp_path, plan_10):
    f = inverse(heat_spectrum(plan_10.params, 0.5), plan_10)
    path = tmp_path / "f.csv"
    write_radial_csv(path, f)
    text = path.read_bytes()
    assert text.startswith(b"t,value\n") and b"\r" not in text
    g = read_radial_csv(path)
    assert np.array_equal(g.values, f.values)
    F = SpectralFunction.sampled([0.0, 1.0, 2.0], np.array([1 + 0.5j, 0.25 - 1j, 1e-300 + 0j]))
    path = tmp_path / "F.csv"
    write_spectral_csv(path, F)
    assert path.read_text().splitlines()[0] == "lambda,re,im"
    assert np.array_equal(read_spectral_csv(path).values, F.values)
