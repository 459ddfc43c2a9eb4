import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sp_integrate

from conftest import shared_corpus
from jacobiharm.errors import DomainError, InfiniteBound, InfiniteConstant, NotMonotone
from jacobiharm.ineq import (
    ExponentPair,
    SymbolFunction,
    WeightFunction,
    apply_multiplier,
    bracket_symbol,
    check_hausdorff_young,
    check_hyp,
    check_paley,
    check_spectral,
    clipped_indicator,
    constant_symbol,
    cumulative_density,
    empirical_multiplier_ratio,
    multiplier_bound,
    paley_constant,
    spectral_bound,
    superlevel_measure,
)
from jacobiharm.specfun import JacobiParams, plancherel_density
from jacobiharm.transform import heat_spectrum, inverse

P10 = JacobiParams(1.0, 0.0)
PQ = ExponentPair(1.5, 3.0)

# int_0^Lambda |c|^{-2} by mpmath quadrature of an independently coded c-function
K10_AT_1 = 0.0300901598687384047306165278943
K10_AT_20 = 3927.00390695663150555013115651
K2H_AT_1 = 0.000791390809072369644673548500679


def power_weight(alpha):
    return WeightFunction(lambda lam: np.maximum(lam, 1.0) ** -(2 * alpha + 3), True)


def scipy_K(params, lam):
    val, _ = sp_integrate.quad(lambda x: 2 * math.pi * plancherel_density(params, x), 0, lam,
                               epsabs=0, epsrel=1e-12, limit=200)
    return val


def test_exponent_pair():
    pq = ExponentPair(1.5, 3)
    assert pq.p_dual == pytest.approx(3.0) and pq.r_inv == pytest.approx(1 / 3)
    for p, q in [(1.0, 2.0), (2.5, 3.0), (1.5, 1.8), (1.5, math.inf)]:
        with pytest.raises(DomainError):
            ExponentPair(p, q)


def test_cumulative_density_values():
    assert cumulative_density(P10, 0.0) == 0.0
    assert cumulative_density(P10, 1.0) == pytest.approx(K10_AT_1, rel=1e-11)
    assert cumulative_density(P10, 20.0) == pytest.approx(K10_AT_20, rel=1e-11)
    assert cumulative_density(JacobiParams(2.0, 0.5), 1.0) == pytest.approx(K2H_AT_1, rel=1e-11)
    with pytest.raises(DomainError):
        cumulative_density(P10, -1.0)


def test_cumulative_density_asymptotics():
    small = np.linspace(0.01, 0.1, 10)
    r = cumulative_density(P10, small) / small ** 3
    assert r.max() / r.min() - 1 < 0.1
    large = np.linspace(10, 100, 10)
    r = cumulative_density(P10, large) / large ** 4
    assert r.max() / r.min() - 1 < 0.25
    assert np.all(np.diff(cumulative_density(P10, np.linspace(0, 5, 30))) > 0)


def test_superlevel_sieve_matches_bracketing():
    bump = lambda lam: np.exp(-(np.asarray(lam) - 3.0) ** 2)
    # {bump > 0.5} = 3 -+ sqrt(ln 2)
    w = math.sqrt(math.log(2))
    expected = scipy_K(P10, 3 + w) - scipy_K(P10, 3 - w)
    assert superlevel_measure(bump, 0.5, P10) == pytest.approx(expected, rel=1e-9)
    h = bracket_symbol(2.0, 2.0)
    assert superlevel_measure(h, 0.2, P10, monotone=False) == pytest.approx(
        superlevel_measure(h, 0.2, P10, monotone=True), rel=1e-9)
    assert superlevel_measure(lambda lam: np.ones_like(lam), 0.5, P10) == math.inf


def test_paley_clipped_constant():
    psi = WeightFunction(lambda lam: np.where(lam <= 2.0, 1.0, 0.0), True)
    assert paley_constant(psi, P10) == pytest.approx(cumulative_density(P10, 2.0), rel=1e-9)


def test_paley_power_weight_against_sweep():
    psi = power_weight(P10.alpha)
    M = paley_constant(psi, P10)
    # brute force: {psi > t} = [0, t^{-1/5}) for t < 1
    ts = np.geomspace(1e-6, 1, 4000)[:-1]
    vals = [t * scipy_K(P10, t ** (-1 / 5)) for t in ts[-400:]]
    vals += [t * scipy_K(P10, t ** (-1 / 5)) for t in ts[:-400:37]]
    assert M == pytest.approx(max(vals), rel=1e-2)
    assert M == pytest.approx(K10_AT_1, rel=1e-6)


def test_paley_scaling_and_infinite():
    psi = power_weight(1.0)
    M = paley_constant(psi, P10)
    assert abs(paley_constant(psi.scaled(7.0), P10) - 7 * M) < 1e-10 * 7 * M
    with pytest.raises(InfiniteConstant):
        paley_constant(WeightFunction(lambda lam: 1 + 1 / (1 + lam)), P10)


def test_hausdorff_young_corpus(plan_10):
    for f in shared_corpus(1.0, 0.0).values():
        assert abs(check_hausdorff_young(f, 2.0, plan_10).ratio - 1) < 1e-5
        for p in (1.0, 1.2, 1.5, 1.8):
            rep = check_hausdorff_young(f, p, plan_10)
            assert rep.passed and rep.ratio <= 1 + 1e-6


def test_paley_p2_is_plancherel(plan_10):
    f = shared_corpus(1.0, 0.0)["gaussian"]
    rep = check_paley(f, power_weight(1.0), 2.0, plan_10)
    assert abs(rep.ratio - 1) < 1e-5


def test_paley_heat_and_homogeneity(plan_10):
    f = shared_corpus(1.0, 0.0)["heat_1"]
    psi = power_weight(1.0)
    M = paley_constant(psi, P10)
    rep = check_paley(f, psi, 1.5, plan_10, M=M)
    assert rep.passed and math.isfinite(rep.ratio) and rep.ratio <= 10
    assert abs(check_paley(f.scaled(5.0), psi, 1.5, plan_10, M=M).ratio - rep.ratio) < 1e-10 * rep.ratio
    # psi -> c psi: M scales by c, the weight by c^{(2-p)/p}
    rep_c = check_paley(f, psi.scaled(4.0), 1.5, plan_10)
    assert abs(rep_c.ratio - rep.ratio) < 1e-9 * rep.ratio


def test_hyp_endpoints_collapse(plan_10):
    f = shared_corpus(1.0, 0.0)["gaussian"]
    psi = power_weight(1.0)
    M = paley_constant(psi, P10)
    p = 1.5
    hy = check_hausdorff_young(f, p, plan_10)
    top = check_hyp(f, psi, p, 3.0, plan_10, M=M)
    assert abs(top.empirical - hy.empirical) <= 1e-10 * hy.empirical
    pal = check_paley(f, psi, p, plan_10, M=M)
    low = check_hyp(f, psi, p, p, plan_10, M=M)
    assert abs(low.empirical - pal.empirical) <= 1e-10 * pal.empirical
    mid = check_hyp(f, psi, p, (p + 3.0) / 2, plan_10, M=M)
    lo, hi = sorted((pal.ratio, hy.ratio))
    assert 0.8 * lo <= mid.ratio <= 1.2 * hi
    with pytest.raises(DomainError):
        check_hyp(f, psi, p, 3.5, plan_10)


def test_multiplier_bound_reductions():
    assert multiplier_bound(clipped_indicator(2.0), PQ, P10) == pytest.approx(
        cumulative_density(P10, 2.0) ** (1 / 3), rel=1e-8)
    with pytest.raises(InfiniteBound):
        multiplier_bound(constant_symbol(2.0), PQ, P10)
    with pytest.raises(InfiniteBound):
        multiplier_bound(SymbolFunction(lambda lam: lam, bounded=False), PQ, P10)


def test_multiplier_bound_bracket_against_sweep():
    Q = P10.rho
    bound = multiplier_bound(bracket_symbol(Q, 2.0), PQ, P10)
    top = 1 / (Q * Q / 2)
    ss = top * np.geomspace(1e-6, 1, 4000)[:-1]
    # {h > s} = [0, sqrt(1/s - Q^2/2))
    vals = [s * scipy_K(P10, math.sqrt(1 / s - Q * Q / 2)) ** (1 / 3) for s in ss[::4]]
    assert bound == pytest.approx(max(vals), rel=1e-2)
    assert bound >= max(vals) * (1 - 1e-9)


@settings(max_examples=5, deadline=None)
@given(g1=st.floats(1.5, 4.0), g2=st.floats(1.5, 4.0))
def test_multiplier_bound_monotone(g1, g2):
    big, small = min(g1, g2), max(g1, g2)  # base >= 2 so larger gamma means smaller symbol
    Q = P10.rho
    assert (multiplier_bound(bracket_symbol(Q, small), PQ, P10)
            <= multiplier_bound(bracket_symbol(Q, big), PQ, P10) + 1e-10)


def test_apply_multiplier_identity_and_zero(plan_10):
    f = shared_corpus(1.0, 0.0)["gaussian"]
    tt = plan_10.t_grid[plan_10.t_grid <= 3]
    one = apply_multiplier(lambda lam: np.ones_like(lam), f, plan_10)
    assert np.max(np.abs(one(tt) - f(tt))) < 1e-5
    zero = apply_multiplier(lambda lam: np.zeros_like(lam), f, plan_10)
    assert np.all(zero.values == 0)


def test_apply_multiplier_semigroup(plan_10):
    rho2 = P10.rho ** 2
    f = inverse(heat_spectrum(P10, 0.25), plan_10)
    g = apply_multiplier(lambda lam: np.exp(-0.5 * (lam ** 2 + rho2)), f, plan_10)
    ref = inverse(heat_spectrum(P10, 0.75), plan_10)
    assert np.max(np.abs(g.values - ref.values)) < 1e-4 * np.max(np.abs(ref.values))


def test_empirical_multiplier_ratio(plan_10):
    corpus = shared_corpus(1.0, 0.0)
    h = bracket_symbol(P10.rho, 2.0)
    rep = empirical_multiplier_ratio(h, PQ, corpus, plan_10)
    assert rep.passed and rep.empirical <= 10 * rep.bound
    doubled = {k: f.scaled(2.0) for k, f in corpus.items()}
    rep2 = empirical_multiplier_ratio(h, PQ, doubled, plan_10, bound=rep.bound)
    assert abs(rep2.empirical - rep.empirical) < 1e-10 * rep.empirical
    clip = empirical_multiplier_ratio(clipped_indicator(3.0), ExponentPair(2, 2), corpus, plan_10)
    assert clip.empirical <= 1 + 1e-6
    const = empirical_multiplier_ratio(constant_symbol(1.0), PQ, corpus, plan_10)
    assert const.verdict == "inconclusive" and const.exit_code == 4


@pytest.mark.parametrize("phi", [lambda u: np.exp(-u), lambda u: (u - 4.0 + 1) ** -2.0,
                                 lambda u: np.exp(-(u - 4.0) / 20)])
@pytest.mark.parametrize("pq", [PQ, ExponentPair(2, 2)])
def test_spectral_dual_route(phi, pq):
    closed, exact = spectral_bound(phi, pq, P10)
    assert math.isfinite(closed) and math.isfinite(exact)
    assert 0.2 <= closed / exact <= 5


def test_spectral_regimes():
    small = check_spectral(lambda u: np.exp(-u), PQ, P10)
    large = check_spectral(lambda u: np.exp(-(u - 4.0) / 20), PQ, P10)
    assert small.details["closed_regime"] == "small" and small.details["exact_regime"] == "small"
    assert large.details["closed_regime"] == "large" and large.details["exact_regime"] == "large"
    assert small.passed and large.passed


def test_spectral_exponent_zero_and_errors():
    phi = lambda u: 1 / (u - 4.0 + 1)
    closed, exact = spectral_bound(phi, ExponentPair(2, 2), P10)
    u_first = 4.0 + 1e-6
    assert closed == pytest.approx(phi(u_first), rel=1e-12)
    assert exact == pytest.approx(1.0, rel=1e-6)
    with pytest.raises(NotMonotone):
        spectral_bound(lambda u: np.sin(u) ** 2 / u, PQ, P10)
    # at the regime knot u - rho^2 = 1 both branches reduce to phi(u)
    c1, _ = spectral_bound(lambda u: np.where(u <= 5.0, 1.0, 0.0) + 1e-300, PQ, P10,
                           u_grid=np.array([5.0, 5.0 + 1e-3, 1e6]))
    assert c1 == pytest.approx(1.0)
