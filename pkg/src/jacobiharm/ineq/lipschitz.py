"""Lipschitz and Dini-Lipschitz classes through spectral tails.

The smoothness of a radial function is read off two equivalent quantities:
the spherical-mean modulus ``||M_t f - f||_2`` as t -> 0 and the tail
``int_r^inf |F|^2 dkappa`` as r -> inf.  Both are computed on the spectral
side and compared through log-log fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import DegenerateFit, DomainError, EnvelopeViolation
from ..quad import QuadratureSpec, integrate, integrate_log_halfline
from ..report import DiagnosticReport, FAIL, INCONCLUSIVE, PASS
from ..transform import SpectralFunction
from .bounds import SymbolFunction, laplacian_power_symbol
from .model import energy, spectral_model

__all__ = [
    "SyntheticSpectrum",
    "power_tail_spectrum",
    "dini_spectrum",
    "multiply_spectrum",
    "lipschitz_modulus",
    "spectral_tail",
    "fit_growth_exponent",
    "fit_dini_exponents",
    "check_lipschitz_equivalence",
    "check_dini",
    "check_lipschitz_multiplier_gain",
    "phi_estimate_suite",
]

MODULUS_CUTOFF = 200.0  # integrate |1 - phi|^2 exactly up to lambda t = MODULUS_CUTOFF
EXPONENT_TOL = 0.1
MIN_R2 = 0.9
ENVELOPE_CEILING = 1e6
_SPEC = QuadratureSpec(rel_tol=1e-10)


# ---------------------------------------------------------------------------
# synthetic spectra

@dataclass(frozen=True, eq=False)
class SyntheticSpectrum(SpectralFunction):
    """Closed-form spectrum built from a prescribed energy ``|F|^2 * density``.

    ``energy_density`` is used directly by the tail and modulus integrals;
    ``kinks`` lists points where it is not smooth.
    """

    energy_density: Optional[Callable] = None
    kinks: tuple = ()

    @classmethod
    def from_energy(cls, energy_fn, params, kinks=()):
        model = spectral_model(params)

        def evaluator(lam):
            lam = np.asarray(lam, dtype=float)
            g = np.asarray(energy_fn(lam), dtype=float)
            out = np.zeros(lam.shape)
            pos = (g > 0) & (lam > 0)
            if np.any(pos):
                out[pos] = np.exp(0.5 * (np.log(g[pos]) - model.log_density(lam[pos])))
            return out

        return cls(evaluator=evaluator, energy_density=energy_fn, kinks=tuple(kinks))

    def scaled(self, c):
        fn, g = self.evaluator, self.energy_density
        return SyntheticSpectrum(evaluator=lambda lam: c * fn(lam), support=self.support,
                                 energy_density=lambda lam: c * c * g(lam), kinks=self.kinks)


def power_tail_spectrum(a: float, params) -> SyntheticSpectrum:
    """Energy ``2a lambda^{-2a-1}`` for lambda >= 1 and ``2a lambda^2`` below.

    Its tail is ``int_r^inf = r^{-2a}`` exactly for r >= 1.
    """
    if not a > 0:
        raise DomainError("tail exponent parameter must be positive")

    def g(lam):
        lam = np.asarray(lam, dtype=float)
        big = lam >= 1
        return 2 * a * np.where(big, np.where(big, lam, 1.0) ** (-2 * a - 1), lam * lam)

    return SyntheticSpectrum.from_energy(g, params, kinks=(1.0,))


def dini_spectrum(a: float, b: float, params) -> SyntheticSpectrum:
    """Energy ``-d/dr[r^{-2a} (log r)^{-2b}]`` for r >= e^2, quadratic below.

    The tail is ``r^{-2a} (log r)^{-2b}`` exactly for r >= e^2.
    """
    if not (a > 0 and b >= 0):
        raise DomainError("need a > 0 and b >= 0")
    knot = math.e ** 2

    def law(r):
        L = np.log(r)
        return r ** (-2 * a - 1) * L ** (-2 * b - 1) * (2 * a * L + 2 * b)

    g_knot = float(law(np.array(knot)))

    def g(lam):
        lam = np.asarray(lam, dtype=float)
        big = lam >= knot
        return np.where(big, law(np.where(big, lam, knot)), g_knot * (lam / knot) ** 2)

    return SyntheticSpectrum.from_energy(g, params, kinks=(knot,))


def multiply_spectrum(h, F: SpectralFunction) -> SpectralFunction:
    """Spectrum ``h * F``; exact energies are carried along."""
    h = h if isinstance(h, SymbolFunction) else SymbolFunction(h)
    if F.is_sampled:
        return SpectralFunction.sampled(F.grid, np.asarray(h(F.grid)) * F.values)
    fn = F.evaluator
    g = getattr(F, "energy_density", None)
    if g is None:
        return SpectralFunction.closed_form(lambda lam: h(lam) * fn(lam), F.support)
    return SyntheticSpectrum(evaluator=lambda lam: h(lam) * fn(lam), support=F.support,
                             energy_density=lambda lam: np.abs(h(lam)) ** 2 * g(lam),
                             kinks=getattr(F, "kinks", ()))


# ---------------------------------------------------------------------------
# modulus and tails

def _breakpoints(F, a, b):
    pts = list(getattr(F, "kinks", ()))
    if F.is_sampled:
        pts.extend(F.grid)
    if b > 0:
        lo = max(a, b * 1e-8)
        pts.extend(np.geomspace(lo if lo > 0 else b * 1e-8, b, 40))
    pts = np.asarray(pts, dtype=float)
    return pts[(pts > a) & (pts < b)]


def _tail(F, r: float, params, lebesgue: bool = False) -> float:
    model = spectral_model(params)
    if lebesgue:
        def fn(lam):
            e = energy(F, model, lam)
            out = np.zeros(e.shape)
            pos = e > 0
            out[pos] = np.exp(np.log(e[pos]) - model.log_density(lam[pos]))
            return out
    else:
        fn = lambda lam: energy(F, model, lam)
    if r < 0:
        raise DomainError("tail start must be >= 0")
    if math.isfinite(F.support):
        if r >= F.support:
            return 0.0
        return integrate(fn, r, F.support, _SPEC, breakpoints=_breakpoints(F, r, F.support))[0]
    if r == 0:
        head = integrate(fn, 0.0, 1.0, _SPEC, breakpoints=_breakpoints(F, 0.0, 1.0))[0]
        return head + _tail(F, 1.0, params, lebesgue)
    kinks = sorted(k for k in getattr(F, "kinks", ()) if k > r)
    head, start = 0.0, r
    for k in kinks:
        head += integrate(fn, start, k, _SPEC)[0]
        start = k
    return head + integrate_log_halfline(fn, start, _SPEC)[0]


def spectral_tail(F: SpectralFunction, r: float, params) -> float:
    """``int_r^inf |F(lambda)|^2 dkappa(lambda)``."""
    return _tail(F, r, params)


def lipschitz_modulus(F: SpectralFunction, t: float, params) -> float:
    """``(int |1 - phi_lambda(t)|^2 |F|^2 dkappa)^{1/2} = ||M_t f - f||_2``.

    The integrand is exact up to ``lambda t = 200``; beyond, ``|1 - phi|^2``
    is replaced by 1 (the spherical function has decayed below 1e-3 there)
    and the spectral tail is added.  Damek-Ricci parameters select the
    Damek-Ricci normalization of phi and of the density.
    """
    if t < 0:
        raise DomainError("need t >= 0")
    if t == 0:
        return 0.0
    model = spectral_model(params)
    upper = min(MODULUS_CUTOFF / t, F.support)

    def integrand(lam):
        phi = np.real(model.phi_grid(lam, [t])[:, 0])
        return (1 - phi) ** 2 * energy(F, model, lam)

    head = integrate(integrand, 0.0, upper, _SPEC, breakpoints=_breakpoints(F, 0.0, upper))[0]
    tail = _tail(F, upper, params) if upper < F.support else 0.0
    return math.sqrt(head + tail)


# ---------------------------------------------------------------------------
# fits

def _r2(y, fitted):
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 if ss_tot == 0 else 1 - ss_res / ss_tot


def _log_samples(samples):
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 5:
        raise DegenerateFit("need at least 5 (r, T) samples")
    if np.any(arr <= 0):
        raise DomainError("samples must be positive for a log-log fit")
    return np.log(arr[:, 0]), np.log(arr[:, 1])


def fit_growth_exponent(samples):
    """Least-squares slope of log T against log r and the fit's r^2."""
    x, y = _log_samples(samples)
    slope, intercept = np.polyfit(x, y, 1)
    r2 = _r2(y, slope * x + intercept)
    if r2 < 0.5:
        raise DegenerateFit(f"log-log fit too poor (r^2 = {r2:.3f})")
    return float(slope), r2


def fit_dini_exponents(samples):
    """Fit ``log T = c + s log r + k log log r``; returns ``(s, k, r2)``."""
    x, y = _log_samples(samples)
    if np.any(x <= 0):
        raise DomainError("Dini fits need r > 1")
    design = np.column_stack((np.ones_like(x), x, np.log(x)))
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    r2 = _r2(y, design @ coef)
    if r2 < 0.5:
        raise DegenerateFit(f"Dini fit too poor (r^2 = {r2:.3f})")
    return float(coef[1]), float(coef[2]), r2


# ---------------------------------------------------------------------------
# checks

DEFAULT_T_GRID = np.geomspace(1e-3, 1e-1, 9)
DEFAULT_R_GRID = np.geomspace(10.0, 1e3, 9)
DEFAULT_DINI_R_GRID = np.geomspace(10.0, 1e12, 23)


def check_lipschitz_equivalence(F, alpha: float, params, t_grid=None, r_grid=None) -> DiagnosticReport:
    """Fit ``modulus(t)^2 ~ t^{2 alpha}`` and ``tail(r) ~ r^{-2 alpha}``.

    Passes when both exponents are within 0.1 of target with r^2 >= 0.9.  A
    tail steeper than ``r^{-2.1}`` means the function is smoother than any
    class the test can resolve, which is reported as inconclusive.
    """
    if not 0 < alpha <= 1:
        raise DomainError("need 0 < alpha <= 1")
    t_grid = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    r_grid = DEFAULT_R_GRID if r_grid is None else np.asarray(r_grid, dtype=float)
    mod2 = [lipschitz_modulus(F, t, params) ** 2 for t in t_grid]
    tails = [spectral_tail(F, r, params) for r in r_grid]
    e_mod, r2_mod = fit_growth_exponent(list(zip(t_grid, mod2)))
    e_tail, r2_tail = fit_growth_exponent(list(zip(r_grid, tails)))
    ok = (abs(e_mod - 2 * alpha) <= EXPONENT_TOL and abs(e_tail + 2 * alpha) <= EXPONENT_TOL
          and min(r2_mod, r2_tail) >= MIN_R2)
    if ok:
        verdict = PASS
    elif e_tail < -2 - EXPONENT_TOL:
        verdict = INCONCLUSIVE
    else:
        verdict = FAIL
    return DiagnosticReport(
        bound=2 * alpha, empirical=e_mod, verdict=verdict,
        samples=tuple(zip(t_grid, mod2)),
        notes="bound: target modulus exponent 2 alpha; empirical: fitted exponent of modulus^2; "
              "samples: (t, modulus^2)",
        details={"modulus_exponent": e_mod, "modulus_r2": r2_mod, "tail_exponent": e_tail,
                 "tail_r2": r2_tail, "tail_samples": [list(s) for s in zip(r_grid, tails)]},
    )


def check_dini(F, alpha: float, beta_log: float, params, r_grid=None,
               mode: str = "kappa_measure") -> DiagnosticReport:
    """Fit the tail against ``r^{-2 alpha - shift} (log r)^{-2 beta}``.

    ``kappa_measure`` integrates ``|F|^2 dkappa`` (shift 0); ``lebesgue_measure``
    integrates ``|F|^2 dlambda`` (shift d - 1).  Reports the fixed-beta slope
    of ``log T + 2 beta log log r`` and a free three-parameter fit of (a, b).
    """
    if not (alpha > 0 and beta_log >= 0):
        raise DomainError("need alpha > 0 and beta_log >= 0")
    if mode not in ("kappa_measure", "lebesgue_measure"):
        raise DomainError(f"unknown mode {mode!r}")
    r_grid = DEFAULT_DINI_R_GRID if r_grid is None else np.asarray(r_grid, dtype=float)
    if np.any(r_grid < math.e ** 2 * (1 - 1e-12)):
        raise DomainError("Dini tails are fitted on r >= e^2")
    lebesgue = mode == "lebesgue_measure"
    shift = spectral_model(params).large_order if lebesgue else 0.0
    tails = np.array([_tail(F, r, params, lebesgue) for r in r_grid])
    corrected = tails * np.log(r_grid) ** (2 * beta_log)
    slope, r2 = fit_growth_exponent(list(zip(r_grid, corrected)))
    s, k, r2_free = fit_dini_exponents(list(zip(r_grid, tails)))
    a_fit, b_fit = -(s + shift) / 2, -k / 2
    target = -2 * alpha - shift
    ok = (abs(a_fit - alpha) <= EXPONENT_TOL and abs(b_fit - beta_log) <= 3 * EXPONENT_TOL
          and min(r2, r2_free) >= MIN_R2)
    return DiagnosticReport(
        bound=target, empirical=slope, ratio=slope / target, verdict=PASS if ok else FAIL,
        samples=tuple(zip(r_grid, tails)),
        notes=f"{mode}: bound is the target slope -2 alpha - shift, empirical the fitted slope "
              "of T (log r)^{2 beta}",
        details={"mode": mode, "shift": shift, "slope": slope, "r2": r2, "free_slope": s,
                 "free_log_exponent": k, "free_r2": r2_free, "alpha_fit": a_fit, "beta_fit": b_fit},
    )


def check_lipschitz_multiplier_gain(h, gamma: float, F, alpha: float, params, r_grid=None,
                                    lambda_grid=None) -> DiagnosticReport:
    """Tail of ``h F`` should gain ``2 gamma`` over the ``-2 alpha`` tail of F.

    ``h`` defaults to the symbol ``(lambda^2 + Q^2/4)^{-gamma/2}`` when None.
    The envelope ``|h| <= C <lambda>^{-gamma}`` uses ``<lambda> = (lambda^2 + Q^2/2)^{1/2}``;
    the smallest C on the grid is reported.
    """
    if not 0 <= gamma < 1:
        raise DomainError("need 0 <= gamma < 1")
    if not 0 < alpha < 1 - gamma:
        raise DomainError("need 0 < alpha < 1 - gamma")
    model = spectral_model(params)
    Q = model.Q
    h = laplacian_power_symbol(Q, gamma) if h is None else h
    h = h if isinstance(h, SymbolFunction) else SymbolFunction(h)
    lam = np.concatenate(([0.0], np.geomspace(1e-3, 1e4, 701))) if lambda_grid is None else np.asarray(lambda_grid)
    C_env = float(np.max(np.abs(np.asarray(h(lam))) * (lam ** 2 + Q * Q / 2) ** (gamma / 2)))
    if C_env > ENVELOPE_CEILING:
        raise EnvelopeViolation(f"|h| exceeds C <lambda>^-gamma for every C <= {ENVELOPE_CEILING:g}")
    r_grid = DEFAULT_R_GRID if r_grid is None else np.asarray(r_grid, dtype=float)
    G = multiply_spectrum(h, F)
    tail_in = [spectral_tail(F, r, params) for r in r_grid]
    tail_out = [spectral_tail(G, r, params) for r in r_grid]
    e_in, r2_in = fit_growth_exponent(list(zip(r_grid, tail_in)))
    e_out, r2_out = fit_growth_exponent(list(zip(r_grid, tail_out)))
    target = -2 * (alpha + gamma) + EXPONENT_TOL
    if abs(e_in + 2 * alpha) > EXPONENT_TOL:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS if e_out <= target and r2_out >= MIN_R2 else FAIL
    return DiagnosticReport(
        bound=target, empirical=e_out, ratio=e_out / target, verdict=verdict,
        samples=tuple(zip(r_grid, tail_out)),
        notes="bound: largest admissible output tail slope; envelope uses <lambda>^2 = lambda^2 + Q^2/2 "
              "while the Laplacian eigenvalue shift is Q^2/4",
        details={"input_exponent": e_in, "input_r2": r2_in, "output_exponent": e_out,
                 "output_r2": r2_out, "envelope_C": C_env, "gamma": gamma, "alpha": alpha},
    )


def phi_estimate_suite(params, lambda_grid, t_grid) -> DiagnosticReport:
    """Pointwise estimates for the Damek-Ricci spherical function on a grid.

    (i) ``|phi| <= 1 + 1e-10``; (ii) ``|1 - phi| <= (t^2/2)(4 lambda^2 + Q^2/4) + 1e-12``;
    (iii) the smallest ``|1 - phi|`` over ``lambda t >= 1`` is reported and must be positive.
    """
    lam = np.asarray(lambda_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if np.any(lam < 0) or np.any(t < 0):
        raise DomainError("grids must be nonnegative")
    model = spectral_model(params)
    Q = model.Q
    phi = np.real(model.phi_grid(lam, t))
    L, T = np.meshgrid(lam, t, indexing="ij")
    gap = np.abs(1 - phi)
    quad_bound = T ** 2 / 2 * (4 * L ** 2 + Q * Q / 4)
    max_phi = float(np.max(np.abs(phi)))
    excess = float(np.max(gap - quad_bound))
    far = L * T >= 1
    inf_far = float(np.min(gap[far])) if np.any(far) else math.nan
    near = (T > 0) & (T <= 0.1)
    tight = gap[near] / (T[near] ** 2 * (L[near] ** 2 + Q * Q / 16)) if np.any(near) else np.array([math.nan])
    ok = max_phi <= 1 + 1e-10 and excess <= 1e-12 and inf_far > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        usage = np.where(quad_bound > 0, gap / quad_bound, 0.0)
    return DiagnosticReport(
        bound=1.0, empirical=float(np.max(usage)), verdict=PASS if ok else FAIL,
        samples=tuple(zip(t, np.max(gap, axis=0))),
        notes="empirical: max |1-phi| / quadratic bound; samples: (t, max over lambda of |1-phi|)",
        details={"max_abs_phi": max_phi, "max_excess_over_quadratic": excess,
                 "inf_gap_lambda_t_ge_1": inf_far, "tightness_min": float(np.min(tight)),
                 "tightness_max": float(np.max(tight))},
    )
