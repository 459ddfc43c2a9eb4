"""Extremal constants and norm inequalities on the Jacobi transform side.

Conventions: the constants ``M_psi`` and the multiplier bound measure sets
with ``|c(lambda)|^{-2} dlambda`` (no 1/2pi), while spectral norms on the
left-hand sides use the Plancherel measure ``dkappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..errors import DomainError, InfiniteBound, InfiniteConstant, NotMonotone
from ..quad import QuadratureSpec, integrate
from ..report import DiagnosticReport, INCONCLUSIVE, verdict_from
from ..specfun import JacobiParams
from ..transform import (
    RadialFunction,
    SpectralFunction,
    TransformPlan,
    _integrate_weighted,
    forward,
    inverse,
    norm_mu,
)
from .model import TWO_PI, spectral_model

__all__ = [
    "C_GLOBAL",
    "ExponentPair",
    "SymbolFunction",
    "WeightFunction",
    "bracket_symbol",
    "laplacian_power_symbol",
    "clipped_indicator",
    "constant_symbol",
    "cumulative_density",
    "superlevel_measure",
    "paley_constant",
    "check_paley",
    "check_hausdorff_young",
    "check_hyp",
    "multiplier_bound",
    "apply_multiplier",
    "empirical_multiplier_ratio",
    "spectral_bound",
    "check_spectral",
]

C_GLOBAL = 10.0
SCAN_POINTS = 400
SCAN_DEPTH = 1e-6
LAMBDA_CEILING = 1e12
SIEVE_GRID = np.concatenate(([0.0], np.geomspace(1e-4, 1e4, 1601)))
_K_SPEC = QuadratureSpec(rel_tol=1e-12)


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class ExponentPair:
    """``1 < p <= 2 <= q < inf`` with ``p' = p/(p-1)`` and ``1/r = 1/p - 1/q``."""

    p: float
    q: float

    def __post_init__(self):
        if not (1 < self.p <= 2 <= self.q < math.inf):
            raise DomainError(f"need 1 < p <= 2 <= q < inf, got p={self.p}, q={self.q}")

    @property
    def p_dual(self) -> float:
        return self.p / (self.p - 1)

    @property
    def r_inv(self) -> float:
        return 1 / self.p - 1 / self.q


@dataclass(frozen=True)
class SymbolFunction:
    """Even multiplier symbol evaluated on lambda >= 0.

    ``monotone_decreasing`` switches superlevel sets from grid sieving to
    root bracketing.
    """

    evaluator: Callable
    bounded: bool = True
    monotone_decreasing: bool = False

    def __call__(self, lam):
        return self.evaluator(np.abs(np.asarray(lam, dtype=float)))


@dataclass(frozen=True)
class WeightFunction:
    """Positive weight psi on (0, inf)."""

    evaluator: Callable
    monotone_decreasing: bool = False

    def __call__(self, lam):
        return self.evaluator(np.asarray(lam, dtype=float))

    def scaled(self, c: float) -> "WeightFunction":
        fn = self.evaluator
        return WeightFunction(lambda lam: c * fn(lam), self.monotone_decreasing)


def _as_symbol(h) -> SymbolFunction:
    return h if isinstance(h, SymbolFunction) else SymbolFunction(h)


def bracket_symbol(Q: float, gamma: float) -> SymbolFunction:
    """``<lambda>^{-gamma}`` with ``<lambda> = (lambda^2 + Q^2/2)^{1/2}``."""
    shift = Q * Q / 2
    return SymbolFunction(lambda lam: (np.asarray(lam) ** 2 + shift) ** (-gamma / 2),
                          monotone_decreasing=True)


def laplacian_power_symbol(Q: float, gamma: float) -> SymbolFunction:
    """Radial symbol ``(lambda^2 + Q^2/4)^{-gamma/2}`` of a negative Laplacian power."""
    shift = Q * Q / 4
    return SymbolFunction(lambda lam: (np.asarray(lam) ** 2 + shift) ** (-gamma / 2),
                          monotone_decreasing=True)


def clipped_indicator(cutoff: float) -> SymbolFunction:
    """1 on [0, cutoff], 0 beyond."""
    return SymbolFunction(lambda lam: np.where(np.asarray(lam) <= cutoff, 1.0, 0.0),
                          monotone_decreasing=True)


def constant_symbol(c: float) -> SymbolFunction:
    return SymbolFunction(lambda lam: np.full(np.shape(lam), float(c)), monotone_decreasing=True)


# ---------------------------------------------------------------------------
# density measure of sets

def _interval_measure(model, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    fn = lambda lam: TWO_PI * model.density(lam)
    inner = a + (b - a) * np.array([1e-3, 1e-2, 1e-1, 0.5])
    return integrate(fn, a, b, _K_SPEC, breakpoints=inner)[0]


def cumulative_density(params, lam_max):
    """``K(Lambda) = int_0^Lambda |c(lambda)|^{-2} dlambda`` (scalar or array)."""
    model = spectral_model(params)
    arr = np.asarray(lam_max, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError("cumulative density needs 0 <= Lambda < inf")
    out = np.array([_interval_measure(model, 0.0, float(x)) for x in arr.ravel()]).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


class _Unbounded(Exception):
    pass


def _scalar(g):
    return lambda x: float(np.abs(np.asarray(g(np.array([x]), ), dtype=float))[0])


def _root(g, level, a, b):
    return brentq(lambda x: g(x) - level, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def _superlevel_intervals(g, level, monotone, sieve):
    """Intervals where ``|g| > level`` (raises _Unbounded when they reach the ceiling)."""
    gs = _scalar(g)
    if monotone:
        if not gs(0.0) > level:
            return []
        a, b = 0.0, 1.0
        while gs(b) > level:
            a, b = b, 4 * b
            if b > LAMBDA_CEILING:
                raise _Unbounded
        return [(0.0, _root(gs, level, a, b))]
    x = np.asarray(sieve, dtype=float)
    vals = np.abs(np.asarray(g(x), dtype=float))
    if vals[-1] > level:
        tail = np.geomspace(x[-1], LAMBDA_CEILING, 200)[1:]
        tail_vals = np.abs(np.asarray(g(tail), dtype=float))
        if tail_vals[-1] > level:
            raise _Unbounded
        x, vals = np.concatenate((x, tail)), np.concatenate((vals, tail_vals))
    inside = vals > level
    out, start = [], (x[0] if inside[0] else None)
    for i in np.flatnonzero(inside[1:] != inside[:-1]):
        edge = _root(gs, level, x[i], x[i + 1]) if gs(x[i]) != gs(x[i + 1]) else x[i]
        if inside[i]:
            out.append((start, edge))
        else:
            start = edge
    # merge touching runs
    merged = []
    for a, b in out:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
        else:
            merged.append((a, b))
    return merged


def superlevel_measure(g, level: float, params, monotone: bool = False, sieve=None) -> float:
    """``int_{|g| > level} |c|^{-2} dlambda``; ``inf`` when the set is unbounded.

    Non-monotone functions are sieved on a grid (default 1e-4..1e4,
    log-spaced) and crossings refined by bracketing; features narrower than
    the grid spacing can be missed.
    """
    model = spectral_model(params)
    try:
        ivals = _superlevel_intervals(g, level, monotone, SIEVE_GRID if sieve is None else sieve)
    except _Unbounded:
        return math.inf
    return sum(_interval_measure(model, a, b) for a, b in ivals)


def _level_sup(g, power, params, monotone, sieve, error):
    """``sup_s s * measure({|g| > s})^power`` by scan plus local refinement.

    Returns ``(value, best_level)``.
    """
    sieve = SIEVE_GRID if sieve is None else sieve
    top = _scalar(g)(0.0) if monotone else float(np.max(np.abs(np.asarray(g(sieve), dtype=float))))
    if not top > 0:
        return 0.0, 0.0
    if not math.isfinite(top):
        raise error("function is unbounded on the grid")

    def value(s):
        m = superlevel_measure(g, s, params, monotone, sieve)
        if math.isinf(m):
            raise error(f"superlevel set at level {s:.6g} has infinite measure")
        return s * m ** power if m > 0 else 0.0

    levels = top * np.geomspace(SCAN_DEPTH, 1.0, SCAN_POINTS)
    vals = np.array([value(s) for s in levels])
    i = int(np.argmax(vals))
    best, best_s = float(vals[i]), float(levels[i])
    lo, hi = levels[max(i - 1, 0)], levels[min(i + 1, SCAN_POINTS - 1)]
    if hi > lo:
        # relative variable u = log(s / top) keeps Brent's tolerance scale-free
        res = minimize_scalar(lambda u: -value(top * math.exp(u)),
                              bounds=(math.log(lo / top), math.log(hi / top)),
                              method="bounded", options={"xatol": 1e-13})
        if -res.fun > best:
            best, best_s = float(-res.fun), top * math.exp(res.x)
    return best, best_s


# ---------------------------------------------------------------------------
# Paley, Hausdorff-Young, Hausdorff-Young-Paley

def paley_constant(psi, params, sieve=None) -> float:
    """``M_psi = sup_{t > 0} t int_{psi > t} |c|^{-2} dlambda``.

    Raises :class:`InfiniteConstant` when a scanned superlevel set has
    infinite measure.
    """
    psi = psi if isinstance(psi, WeightFunction) else WeightFunction(psi)
    return _level_sup(psi, 1.0, params, psi.monotone_decreasing, sieve, InfiniteConstant)[0]


def _dual(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1)


def _spectral_lhs(F: SpectralFunction, psi, weight_power: float, b: float, plan: TransformPlan) -> float:
    """``(int (|F| psi^w)^b dkappa)^{1/b}``; psi is skipped entirely when w = 0."""
    density = spectral_model(plan.params).density
    if weight_power == 0:
        fn = lambda lam: np.abs(F(lam)) ** b * density(lam)
    else:
        fn = lambda lam: (np.abs(F(lam)) * psi(lam) ** weight_power) ** b * density(lam)
    return float(_integrate_weighted(fn, F.grid, F.support, plan.quad)) ** (1.0 / b)


def _sup_spectral(F: SpectralFunction, plan: TransformPlan) -> float:
    lam = F.grid if F.is_sampled else plan.lambda_grid
    return float(np.max(np.abs(F(lam))))


def _norm_report(lhs, rhs, ok, notes, **details):
    return DiagnosticReport(bound=rhs, empirical=lhs, verdict=verdict_from(ok), notes=notes,
                            details={"lhs": lhs, "rhs": rhs, **details})


def check_hausdorff_young(f: RadialFunction, p: float, plan: TransformPlan, F=None,
                          tol: float = 1e-6) -> DiagnosticReport:
    """``||F||_{p', kappa} <= ||f||_{p, mu}`` for 1 <= p <= 2 (no hidden constant)."""
    if not 1 <= p <= 2:
        raise DomainError("Hausdorff-Young needs 1 <= p <= 2")
    F = forward(f, plan) if F is None else F
    pd = _dual(p)
    lhs = _sup_spectral(F, plan) if math.isinf(pd) else _spectral_lhs(F, None, 0.0, pd, plan)
    rhs = norm_mu(f, p, plan)
    ratio = lhs / rhs
    return _norm_report(lhs, rhs, ratio <= 1 + tol, "empirical: ||F||_{p',kappa}; bound: ||f||_{p,mu}",
                        p=p, p_dual=pd)


def check_hyp(f: RadialFunction, psi, p: float, b: float, plan: TransformPlan, M=None, F=None,
              C_global: float = C_GLOBAL) -> DiagnosticReport:
    """Weighted norm ``(int (|F| psi^{1/b - 1/p'})^b dkappa)^{1/b}`` against ``M^{1/b-1/p'} ||f||_p``."""
    if not 1 < p <= 2:
        raise DomainError("need 1 < p <= 2")
    pd = p / (p - 1)
    if not p <= b <= pd:
        raise DomainError(f"b must lie in [p, p'] = [{p}, {pd}]")
    psi = psi if isinstance(psi, WeightFunction) else WeightFunction(psi)
    F = forward(f, plan) if F is None else F
    w = 1 / b - 1 / pd
    lhs = _spectral_lhs(F, psi, w, b, plan)
    if w == 0:
        M_factor, M = 1.0, (math.nan if M is None else M)
    else:
        M = paley_constant(psi, plan.params) if M is None else M
        M_factor = M ** w
    rhs = M_factor * norm_mu(f, p, plan)
    return _norm_report(lhs, rhs, lhs / rhs <= C_global,
                        "empirical: weighted spectral norm; bound: M^(1/b-1/p') ||f||_p",
                        p=p, b=b, weight_power=w, M=M, C_global=C_global)


def check_paley(f: RadialFunction, psi, p: float, plan: TransformPlan, M=None, F=None,
                C_global: float = C_GLOBAL) -> DiagnosticReport:
    """``(int |F|^p psi^{2-p} dkappa)^{1/p}`` against ``M_psi^{(2-p)/p} ||f||_p``.

    Computed as the b = p member of the weighted family, so the two agree bitwise.
    """
    return check_hyp(f, psi, p, p, plan, M=M, F=F, C_global=C_global)


# ---------------------------------------------------------------------------
# L^p - L^q multipliers

def multiplier_bound(h, pq: ExponentPair, params, sieve=None) -> float:
    """``sup_s s [int_{|h| > s} |c|^{-2} dlambda]^{1/p - 1/q}``.

    Raises :class:`InfiniteBound` when a scanned superlevel set is unbounded
    (for instance a constant symbol).
    """
    h = _as_symbol(h)
    if not h.bounded:
        raise InfiniteBound("symbol flagged as unbounded")
    return _level_sup(h, pq.r_inv, params, h.monotone_decreasing, sieve, InfiniteBound)[0]


def apply_multiplier(h, f: RadialFunction, plan: TransformPlan, F=None) -> RadialFunction:
    """Inverse transform of ``h * forward(f)``."""
    h = _as_symbol(h)
    F = forward(f, plan) if F is None else F
    if F.is_sampled:
        G = SpectralFunction.sampled(F.grid, np.asarray(h(F.grid)) * F.values)
    else:
        fn = F.evaluator
        G = SpectralFunction.closed_form(lambda lam: h(lam) * fn(lam), F.support)
    return inverse(G, plan)


def empirical_multiplier_ratio(h, pq: ExponentPair, corpus, plan: TransformPlan,
                               C_global: float = C_GLOBAL, bound=None) -> DiagnosticReport:
    """``max_f ||T_h f||_q / ||f||_p`` over the corpus, against ``C_global`` times the bound.

    An infinite bound yields an inconclusive report: the bound is only sufficient.
    """
    items = list(corpus.items()) if isinstance(corpus, Mapping) else list(enumerate(corpus))
    ratios = []
    for _, f in items:
        Tf = apply_multiplier(h, f, plan)
        ratios.append(norm_mu(Tf, pq.q, plan) / norm_mu(f, pq.p, plan))
    empirical = max(ratios)
    samples = [(i, r) for i, r in enumerate(ratios)]
    names = [str(k) for k, _ in items]
    try:
        bound = multiplier_bound(h, pq, plan.params) if bound is None else bound
    except InfiniteBound as exc:
        return DiagnosticReport(bound=math.inf, empirical=empirical, verdict=INCONCLUSIVE, ratio=math.nan,
                                samples=samples, notes=f"multiplier bound infinite: {exc}",
                                details={"corpus": names, "p": pq.p, "q": pq.q})
    ok = empirical <= C_global * bound
    return DiagnosticReport(bound=bound, empirical=empirical, verdict=verdict_from(ok), samples=samples,
                            notes="samples: (corpus index, ||Tf||_q / ||f||_p)",
                            details={"corpus": names, "p": pq.p, "q": pq.q, "C_global": C_global})


# ---------------------------------------------------------------------------
# spectral multipliers phi(L)

def _default_u_offsets():
    return np.unique(np.concatenate((np.geomspace(1e-6, 1e4, 2001), [1.0])))


def _spectral_details(phi_spec, pq: ExponentPair, params: JacobiParams, u_grid=None) -> dict:
    if not isinstance(params, JacobiParams):
        raise DomainError("spectral multipliers are defined for JacobiParams")
    rho2 = params.rho ** 2
    u = rho2 + _default_u_offsets() if u_grid is None else np.asarray(u_grid, dtype=float)
    u = u[u > rho2]
    if u.size < 2:
        raise DomainError("u grid needs points beyond rho^2")
    vals = np.asarray(phi_spec(u), dtype=float)
    if np.any(np.diff(vals) > 1e-10):
        raise NotMonotone("spectral function increases on the sampled grid")
    if not np.all(np.isfinite(vals)) or abs(vals[-1]) > 1e-2 * abs(vals[0]):
        raise DomainError("spectral function must decay to 0 on the sampled grid")
    e = pq.r_inv
    v = u - rho2
    small = np.sqrt(v) <= 1
    # small-regime exponent 3/2 from K(Lambda) ~ Lambda^3 near 0 (see ledger)
    envelope = np.where(small, v ** (1.5 * e), v ** ((params.alpha + 1) * e))
    weighted = vals * envelope
    i = int(np.argmax(weighted))
    h = SymbolFunction(lambda lam: phi_spec(np.asarray(lam) ** 2 + rho2), monotone_decreasing=True)
    exact, level = _level_sup(h, e, params, True, None, InfiniteBound)
    ivals = _superlevel_intervals(h, level, True, None) if level > 0 else []
    edge = ivals[0][1] if ivals else 0.0
    return {
        "closed_form": float(weighted[i]),
        "exact_numeric": exact,
        "closed_regime": "small" if small[i] else "large",
        "exact_regime": "small" if edge <= 1 else "large",
        "closed_argmax_u": float(u[i]),
        "exact_level_edge": edge,
    }


def spectral_bound(phi_spec, pq: ExponentPair, params: JacobiParams, u_grid=None):
    """``(closed_form, exact_numeric)`` bounds for the multiplier ``phi(L)``.

    ``closed_form`` takes the sup over ``u`` of ``phi(u) (u - rho^2)^{k (1/p - 1/q)}``
    with ``k = 3/2`` when ``u - rho^2 <= 1`` and ``k = alpha + 1`` otherwise;
    ``exact_numeric`` is :func:`multiplier_bound` of ``phi(lambda^2 + rho^2)``.
    """
    d = _spectral_details(phi_spec, pq, params, u_grid)
    return d["closed_form"], d["exact_numeric"]


def check_spectral(phi_spec, pq: ExponentPair, params: JacobiParams, u_grid=None,
                   C: float = 5.0) -> DiagnosticReport:
    """Dual-route report: passes when the closed form is within a factor C of the exact bound."""
    d = _spectral_details(phi_spec, pq, params, u_grid)
    closed, exact = d["closed_form"], d["exact_numeric"]
    ok = exact > 0 and 1 / C <= closed / exact <= C
    return DiagnosticReport(bound=exact, empirical=closed, verdict=verdict_from(ok),
                            notes="empirical: closed-form sup; bound: level-set multiplier bound",
                            details=d)
