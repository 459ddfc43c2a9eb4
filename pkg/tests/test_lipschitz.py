import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobiharm.damek_ricci import DRParams
from jacobiharm.errors import DegenerateFit, DomainError, EnvelopeViolation
from jacobiharm.ineq import (
    SymbolFunction,
    bracket_symbol,
    check_dini,
    check_lipschitz_equivalence,
    check_lipschitz_multiplier_gain,
    dini_spectrum,
    fit_dini_exponents,
    fit_growth_exponent,
    lipschitz_modulus,
    phi_estimate_suite,
    power_tail_spectrum,
    spectral_tail,
)
from jacobiharm.specfun import jacobi_phi_grid
from jacobiharm.transform import SpectralFunction, forward, inverse, norm_mu, RadialFunction

DR21 = DRParams(2, 1)
R_GRID = np.geomspace(10.0, 1e3, 9)


def test_power_tail_is_exact():
    for a in (0.3, 0.5, 0.9):
        F = power_tail_spectrum(a, DR21)
        for r in (1.0, 3.0, 10.0, 100.0, 1e4):
            assert spectral_tail(F, r, DR21) == pytest.approx(r ** (-2 * a), rel=1e-6)
        assert spectral_tail(F, 0.0, DR21) == pytest.approx(1 + 2 * a / 3, rel=1e-6)


def test_synthetic_spectrum_consistent_with_density():
    from jacobiharm.damek_ricci import dr_plancherel_density
    F = power_tail_spectrum(0.5, DR21)
    lam = np.array([0.3, 1.0, 7.0, 50.0])
    assert np.allclose(np.abs(F(lam)) ** 2 * dr_plancherel_density(DR21, lam), F.energy_density(lam), rtol=1e-12)


def test_tail_nonincreasing():
    F = dini_spectrum(0.5, 1.0, DR21)
    tails = [spectral_tail(F, r, DR21) for r in np.geomspace(0.5, 1e4, 15)]
    assert np.all(np.diff(tails) <= 0)


def test_fit_growth_exponent():
    r = np.geomspace(1, 100, 8)
    assert abs(fit_growth_exponent(list(zip(r, r ** -1.2)))[0] + 1.2) < 1e-10
    slope, r2 = fit_growth_exponent(list(zip(r, 7.5 * r ** -1.2)))
    assert abs(slope + 1.2) < 1e-10 and r2 == pytest.approx(1.0)
    with pytest.raises(DegenerateFit):
        fit_growth_exponent(list(zip(r[:4], r[:4] ** -1.0)))
    with pytest.raises(DegenerateFit):
        fit_growth_exponent(list(zip(r, 1 + 0.5 * np.array([1, -1, 1, -1, 1, -1, 1, -1]))))
    with pytest.raises(DomainError):
        fit_growth_exponent(list(zip(r, -r)))
    s, k, _ = fit_dini_exponents(list(zip(r * 10, (r * 10) ** -1.0 * np.log(r * 10) ** -2.0)))
    assert abs(s + 1) < 1e-9 and abs(k + 2) < 1e-9


def test_synthetic_tail_fit():
    F = power_tail_spectrum(0.3, DR21)
    tails = [spectral_tail(F, r, DR21) for r in R_GRID]
    assert abs(fit_growth_exponent(list(zip(R_GRID, tails)))[0] + 0.6) < 0.05


def test_modulus_basic():
    F = power_tail_spectrum(0.5, DR21)
    norm = math.sqrt(spectral_tail(F, 0.0, DR21))
    assert lipschitz_modulus(F, 0.0, DR21) == 0.0
    for t in (1e-3, 0.1, 1.0, 5.0):
        m = lipschitz_modulus(F, t, DR21)
        assert 0 < m <= 2 * norm
    with pytest.raises(DomainError):
        lipschitz_modulus(F, -1.0, DR21)


@settings(max_examples=5, deadline=None)
@given(c=st.floats(1.0, 20.0), t=st.floats(1e-3, 2.0))
def test_modulus_grows_with_norm(c, t):
    F = power_tail_spectrum(0.5, DR21)
    m = lipschitz_modulus(F, t, DR21)
    assert lipschitz_modulus(F.scaled(c), t, DR21) >= m * (1 - 1e-12)


def test_modulus_dual_route(plan_10):
    # spectral side vs ||M_t f - f||_2 computed in space after an inverse transform
    f = RadialFunction.closed_form(lambda t: np.exp(-np.asarray(t) ** 2))
    F = forward(f, plan_10)
    for t in (0.2, 0.5, 1.5):
        phi = jacobi_phi_grid(plan_10.params, F.grid, [t])[:, 0]
        diff = inverse(SpectralFunction.sampled(F.grid, F.values * (phi - 1)), plan_10)
        space = norm_mu(diff, 2, plan_10)
        spectral = lipschitz_modulus(F, t, plan_10.params)
        assert abs(space - spectral) <= 1e-4 * spectral


@pytest.mark.parametrize("a", [0.3, 0.5, 0.9])
def test_lipschitz_equivalence_synthetic(a):
    rep = check_lipschitz_equivalence(power_tail_spectrum(a, DR21), a, DR21)
    assert rep.passed
    assert abs(rep.details["modulus_exponent"] - 2 * a) <= 0.1
    assert abs(rep.details["tail_exponent"] + 2 * a) <= 0.1
    assert min(rep.details["modulus_r2"], rep.details["tail_r2"]) >= 0.9


def test_lipschitz_saturation_and_smooth():
    rep = check_lipschitz_equivalence(power_tail_spectrum(1.0, DR21), 1.0, DR21)
    assert rep.details["modulus_exponent"] <= 2.1
    Q = DR21.Q
    heat = SpectralFunction.closed_form(lambda lam: np.exp(-(np.asarray(lam) ** 2 + Q * Q / 4)))
    smooth = check_lipschitz_equivalence(heat, 0.5, DR21, r_grid=np.geomspace(1.0, 4.0, 7))
    assert smooth.details["tail_exponent"] < -2
    assert smooth.verdict == "inconclusive"


def test_dini_reduces_to_power_fit():
    F = power_tail_spectrum(0.5, DR21)
    eq = check_lipschitz_equivalence(F, 0.5, DR21, r_grid=R_GRID)
    dini = check_dini(F, 0.5, 0.0, DR21, r_grid=R_GRID)
    assert abs(dini.details["slope"] - eq.details["tail_exponent"]) < 1e-10


def test_dini_recovers_parameters():
    F = dini_spectrum(0.5, 1.0, DR21)
    rep = check_dini(F, 0.5, 1.0, DR21)
    assert rep.passed
    assert abs(rep.details["alpha_fit"] - 0.5) <= 0.1 and abs(rep.details["beta_fit"] - 1.0) <= 0.3
    with pytest.raises(DomainError):
        check_dini(F, 0.5, 1.0, DR21, r_grid=np.geomspace(2, 100, 6))


def test_dini_mode_difference():
    F = power_tail_spectrum(0.5, DR21)
    kap = check_dini(F, 0.5, 0.0, DR21, mode="kappa_measure")
    leb = check_dini(F, 0.5, 0.0, DR21, mode="lebesgue_measure")
    assert abs((kap.details["slope"] - leb.details["slope"]) - (DR21.d - 1)) <= 0.2


def test_multiplier_gain():
    F = power_tail_spectrum(0.4, DR21)
    ident = check_lipschitz_multiplier_gain(SymbolFunction(lambda lam: np.ones_like(lam)), 0.0, F, 0.4, DR21)
    assert abs(ident.details["output_exponent"] - ident.details["input_exponent"]) < 1e-10
    rep = check_lipschitz_multiplier_gain(bracket_symbol(DR21.Q, 0.3), 0.3, F, 0.4, DR21)
    assert rep.passed and rep.details["output_exponent"] <= -2 * 0.7 + 0.1
    assert rep.details["envelope_C"] == pytest.approx(1.0)
    preset = check_lipschitz_multiplier_gain(None, 0.3, F, 0.4, DR21)
    assert preset.passed and preset.details["output_exponent"] <= -1.3
    assert preset.details["envelope_C"] == pytest.approx(2 ** 0.15, rel=1e-9)
    with pytest.raises(EnvelopeViolation):
        check_lipschitz_multiplier_gain(SymbolFunction(lambda lam: 1e7 * np.ones_like(lam)), 0.3, F, 0.4, DR21)
    with pytest.raises(DomainError):
        check_lipschitz_multiplier_gain(None, 0.3, F, 0.8, DR21)


@pytest.mark.parametrize("ml", [(2, 1), (4, 1), (2, 3)])
def test_phi_estimates(ml):
    params = DRParams(*ml)
    grid = np.linspace(0.05, 5, 60)
    rep = phi_estimate_suite(params, grid, grid)
    assert rep.passed
    assert rep.details["max_abs_phi"] <= 1 + 1e-10
    assert rep.details["max_excess_over_quadratic"] <= 1e-12
    assert rep.details["inf_gap_lambda_t_ge_1"] > 0.01
    assert 0.01 <= rep.details["tightness_min"] and rep.details["tightness_max"] <= 10


def test_phi_estimates_zero_column():
    rep = phi_estimate_suite(DR21, np.linspace(0.1, 5, 20), np.array([0.0, 0.5]))
    assert rep.passed and rep.samples[0] == (0.0, 0.0)
