"""The Jacobi transform pair, L^p norms for the two measures, and the Plancherel check.

Radial functions live on ``t >= 0`` with measure ``A(t) dt``; spectral
functions live on ``lambda >= 0`` with the Plancherel measure
``dkappa = (1/2pi) |c(lambda)|^{-2} dlambda``.  Both come either in closed
form (a vectorized callable) or sampled on an ascending grid starting at 0
and interpolated by an even-clamped cubic spline; sampled functions vanish
beyond their last grid point.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError
from .quad import DEFAULT_SPEC, QuadratureSpec, integrate, integrate_halfline
from .specfun import JacobiParams, jacobi_phi_grid, log_weight_A, plancherel_density

__all__ = [
    "RadialFunction",
    "SpectralFunction",
    "TransformPlan",
    "default_plan",
    "forward",
    "inverse",
    "norm_mu",
    "norm_kappa",
    "plancherel_defect",
    "translate_spherical",
    "default_corpus",
    "heat_spectrum",
    "bump",
    "write_radial_csv",
    "write_spectral_csv",
    "read_radial_csv",
    "read_spectral_csv",
]

KNOT_RULE_ORDER = 6


def _check_grid(grid, name):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError(f"{name} grid needs at least two points")
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise DomainError(f"{name} grid must start at 0 and be strictly ascending")
    return grid


def _even_spline(grid, values):
    # even extension: zero slope at the origin
    return CubicSpline(grid, values, bc_type=((1, 0.0), "not-a-knot"))


class _Sampled:
    """Shared behaviour of sampled radial and spectral functions."""

    def _init_sampled(self, grid, values):
        grid = _check_grid(grid, "sample")
        values = np.asarray(values)
        if values.shape != grid.shape or not np.all(np.isfinite(values)):
            raise DomainError("sample values must be finite and match the grid")
        grid.setflags(write=False)
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if np.iscomplexobj(values):
            splines = (_even_spline(grid, values.real), _even_spline(grid, values.imag))
        else:
            splines = (_even_spline(grid, values),)
        object.__setattr__(self, "_splines", splines)

    def _eval_sampled(self, x):
        x = np.asarray(x, dtype=float)
        inside = x <= self.grid[-1]
        xs = np.where(inside, x, 0.0)
        out = self._splines[0](xs)
        if len(self._splines) == 2:
            out = out + 1j * self._splines[1](xs)
        return np.where(inside, out, 0.0)


@dataclass(frozen=True, eq=False)
class RadialFunction(_Sampled):
    """Even function of t >= 0: closed form or sampled.

    ``decay_hint`` is a claimed exponential decay rate of ``|f|`` (``None``
    for faster-than-exponential decay); ``support`` bounds the region where
    ``f`` can be nonzero.
    """

    evaluator: Optional[Callable] = None
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    decay_hint: Optional[float] = None
    support: float = math.inf

    def __post_init__(self):
        if (self.evaluator is None) == (self.grid is None):
            raise DomainError("give either an evaluator or a sample grid")
        if self.grid is not None:
            self._init_sampled(self.grid, self.values)
            object.__setattr__(self, "support", float(min(self.support, self.grid[-1])))

    @classmethod
    def closed_form(cls, fn, decay_hint=None, support=math.inf):
        return cls(evaluator=fn, decay_hint=decay_hint, support=support)

    @classmethod
    def sampled(cls, t, values, decay_hint=None):
        return cls(grid=t, values=values, decay_hint=decay_hint)

    @property
    def is_sampled(self):
        return self.grid is not None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("radial functions are evaluated at t >= 0")
        if self.is_sampled:
            return self._eval_sampled(t)
        out = np.asarray(self.evaluator(t))
        return np.where(t <= self.support, out, 0.0) if math.isfinite(self.support) else out

    def scaled(self, c):
        if self.is_sampled:
            return RadialFunction.sampled(self.grid, c * self.values, self.decay_hint)
        fn = self.evaluator
        return RadialFunction.closed_form(lambda t: c * fn(t), self.decay_hint, self.support)


@dataclass(frozen=True, eq=False)
class SpectralFunction(_Sampled):
    """Even function of lambda >= 0 (real or complex): closed form or sampled."""

    evaluator: Optional[Callable] = None
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    support: float = math.inf

    def __post_init__(self):
        if (self.evaluator is None) == (self.grid is None):
            raise DomainError("give either an evaluator or a sample grid")
        if self.grid is not None:
            self._init_sampled(self.grid, self.values)
            object.__setattr__(self, "support", float(min(self.support, self.grid[-1])))

    @classmethod
    def closed_form(cls, fn, support=math.inf):
        return cls(evaluator=fn, support=support)

    @classmethod
    def sampled(cls, lam, values):
        return cls(grid=lam, values=values)

    @property
    def is_sampled(self):
        return self.grid is not None

    def __call__(self, lam):
        lam = np.abs(np.asarray(lam, dtype=float))
        if self.is_sampled:
            return self._eval_sampled(lam)
        out = np.asarray(self.evaluator(lam))
        return np.where(lam <= self.support, out, 0.0) if math.isfinite(self.support) else out

    def scaled(self, c):
        if self.is_sampled:
            return SpectralFunction.sampled(self.grid, c * self.values)
        fn = self.evaluator
        return SpectralFunction.closed_form(lambda lam: c * fn(lam), self.support)


# ---------------------------------------------------------------------------
# plans

def default_lambda_grid(n=1024, lam_max=60.0, lam_switch=1.0, lam_min=1e-3, n_geometric=128):
    """0, then geometric spacing up to ``lam_switch``, then linear to ``lam_max``."""
    geo = np.geomspace(lam_min, lam_switch, n_geometric, endpoint=False)
    lin = np.linspace(lam_switch, lam_max, n - n_geometric - 1)
    return np.concatenate(([0.0], geo, lin))


def default_t_grid(t_max=10.0, n=201):
    return np.linspace(0.0, t_max, n)


@dataclass(frozen=True, eq=False)
class TransformPlan:
    """Parameters, quadrature settings and the two sampling grids.

    Jacobi function values at quadrature nodes are memoized per node, so
    repeated transforms on one plan share their most expensive part.  Every
    memoized value depends only on its own (lambda, t), which keeps results
    independent of call order.
    """

    params: JacobiParams
    quad: QuadratureSpec = DEFAULT_SPEC
    lambda_grid: np.ndarray = field(default_factory=default_lambda_grid)
    t_grid: np.ndarray = field(default_factory=default_t_grid)
    _rows: dict = field(default_factory=dict, repr=False)
    _cols: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        for name in ("lambda_grid", "t_grid"):
            g = _check_grid(getattr(self, name), name)
            g.setflags(write=False)
            object.__setattr__(self, name, g)

    def _lookup(self, cache, keys, compute):
        keys = np.asarray(keys, dtype=float)
        with self._lock:
            missing = np.array([k for k in np.unique(keys) if k not in cache])
        if missing.size:
            block = compute(missing)
            with self._lock:
                for k, row in zip(missing.tolist(), block):
                    cache.setdefault(k, row)
        with self._lock:
            return np.stack([cache[k] for k in keys.tolist()])

    def phi_rows(self, t):
        """``phi[i, j] = phi_{lambda_grid[j]}(t[i])``."""
        return self._lookup(self._rows, t, lambda ts: jacobi_phi_grid(self.params, self.lambda_grid, ts).T)

    def phi_cols(self, lam):
        """``phi[i, j] = phi_{lam[i]}(t_grid[j])``."""
        return self._lookup(self._cols, lam, lambda ls: jacobi_phi_grid(self.params, ls, self.t_grid))


def default_plan(params: JacobiParams, quad: QuadratureSpec = DEFAULT_SPEC, **grid_kw) -> TransformPlan:
    t_kw = {k[2:]: v for k, v in grid_kw.items() if k.startswith("t_")}
    lam_kw = {k: v for k, v in grid_kw.items() if not k.startswith("t_")}
    return TransformPlan(params, quad, default_lambda_grid(**lam_kw), default_t_grid(**t_kw))


@lru_cache(maxsize=16)
def _knot_rule_cached(key, order):
    grid = np.frombuffer(key)
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = grid[:-1], grid[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (lo + hi))[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def _knot_rule(grid, order=KNOT_RULE_ORDER):
    """Composite Gauss-Legendre rule with one panel per knot interval."""
    return _knot_rule_cached(np.ascontiguousarray(grid, dtype=float).tobytes(), order)


def _weighted(values, log_weight):
    """``values * exp(log_weight)`` without overflow where ``values`` vanishes."""
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        mag = np.log(np.abs(values))
        out = np.sign(values) * np.exp(mag + log_weight)
    return np.where(values == 0.0, 0.0, out)


# ---------------------------------------------------------------------------
# transforms

def forward(f: RadialFunction, plan: TransformPlan) -> SpectralFunction:
    """Jacobi transform ``F(lambda) = int_0^inf f(t) phi_lambda(t) A(t) dt`` on the plan's lambda grid."""
    rho = plan.params.rho
    if f.decay_hint is not None and f.decay_hint <= 2 * rho:
        raise DomainError(f"decay rate {f.decay_hint} does not beat the weight growth e^(2 rho t), 2 rho = {2 * rho}")
    params = plan.params

    def integrand(t):
        fa = _weighted(f(t), log_weight_A(params, t))
        return fa[:, None] * plan.phi_rows(t)

    if f.is_sampled:
        nodes, weights = _knot_rule(f.grid)
        values = weights @ integrand(nodes)
    else:
        # finite supports go through the same dyadic panels, which share cached nodes
        values, _, _ = integrate_halfline(integrand, plan.quad)
    return SpectralFunction.sampled(plan.lambda_grid, np.asarray(values, dtype=float))


def inverse(F: SpectralFunction, plan: TransformPlan) -> RadialFunction:
    """Inverse transform ``f(t) = int_0^inf F(lambda) phi_lambda(t) dkappa(lambda)`` on the plan's t grid."""
    params = plan.params

    def integrand(lam):
        fd = np.asarray(F(lam)) * plancherel_density(params, lam)
        return fd[:, None] * plan.phi_cols(lam)

    if F.is_sampled:
        nodes, weights = _knot_rule(F.grid)
        values = weights @ integrand(nodes)
    elif math.isfinite(F.support):
        values, _ = integrate(integrand, 0.0, F.support, plan.quad)
    else:
        values, _, _ = integrate_halfline(integrand, plan.quad)
    values = np.asarray(values)
    if np.iscomplexobj(values):
        values = values.real if np.max(np.abs(values.imag)) == 0 else values
    return RadialFunction.sampled(plan.t_grid, values)


def _integrate_weighted(fn, breakpoints, support, spec):
    if math.isfinite(support):
        return integrate(fn, 0.0, support, spec, breakpoints=breakpoints)[0]
    return integrate_halfline(fn, spec)[0]


def norm_mu(f: RadialFunction, p: float, plan: TransformPlan) -> float:
    """``(int_0^inf |f(t)|^p A(t) dt)^{1/p}``."""
    if not 1 <= p < math.inf:
        raise DomainError("norm exponent must satisfy 1 <= p < inf")
    params = plan.params
    fn = lambda t: _weighted(np.abs(f(t)) ** p, log_weight_A(params, t))
    return float(_integrate_weighted(fn, f.grid, f.support, plan.quad)) ** (1.0 / p)


def norm_kappa(F: SpectralFunction, q: float, plan: TransformPlan) -> float:
    """``(int_0^inf |F(lambda)|^q dkappa(lambda))^{1/q}``."""
    if not 1 <= q < math.inf:
        raise DomainError("norm exponent must satisfy 1 <= q < inf")
    params = plan.params
    fn = lambda lam: np.abs(F(lam)) ** q * plancherel_density(params, lam)
    return float(_integrate_weighted(fn, F.grid, F.support, plan.quad)) ** (1.0 / q)


def plancherel_defect(f: RadialFunction, plan: TransformPlan, F: Optional[SpectralFunction] = None) -> float:
    """Relative defect ``| ||f||_mu^2 - ||F||_kappa^2 | / ||f||_mu^2`` with ``F = forward(f)``."""
    space = norm_mu(f, 2.0, plan) ** 2
    if space == 0.0:
        raise ZeroDivisionError("Plancherel defect of the zero function")
    F = forward(f, plan) if F is None else F
    return abs(space - norm_kappa(F, 2.0, plan) ** 2) / space


def translate_spherical(F: SpectralFunction, t: float, params: JacobiParams) -> SpectralFunction:
    """Spectrum of the spherical mean at radius ``t``: ``F(lambda) phi_lambda(t)``."""
    if t < 0:
        raise DomainError("spherical means need t >= 0")
    if F.is_sampled:
        phi = jacobi_phi_grid(params, F.grid, [t])[:, 0]
        return SpectralFunction.sampled(F.grid, F.values * phi)
    fn = F.evaluator

    def evaluator(lam):
        lam = np.asarray(lam, dtype=float)
        return fn(lam) * jacobi_phi_grid(params, lam.ravel(), [t])[:, 0].reshape(lam.shape)

    return SpectralFunction.closed_form(evaluator, F.support)


# ---------------------------------------------------------------------------
# default corpus

BUMP_RADIUS = 3.0
BUMP_STEEPNESS = 6.0


def heat_spectrum(params: JacobiParams, s: float) -> SpectralFunction:
    """``exp(-s (lambda^2 + rho^2))``, the spectrum of the heat kernel at time s."""
    rho2 = params.rho ** 2
    return SpectralFunction.closed_form(lambda lam: np.exp(-s * (np.asarray(lam) ** 2 + rho2)))


def bump(t, radius=BUMP_RADIUS, steepness=BUMP_STEEPNESS):
    """C-infinity bump ``exp(-a t^2 / (R^2 - t^2))`` on ``[0, R)``, zero beyond."""
    t = np.asarray(t, dtype=float)
    inside = t < radius
    ts = np.where(inside, t, 0.0)
    return np.where(inside, np.exp(-steepness * ts ** 2 / (radius ** 2 - ts ** 2)), 0.0)


def default_corpus(plan: TransformPlan) -> dict:
    """The five reference functions: two Gaussian profiles, two heat kernels, one bump."""
    return {
        "gaussian": RadialFunction.closed_form(lambda t: np.exp(-np.asarray(t) ** 2)),
        "gaussian_quadratic": RadialFunction.closed_form(lambda t: (1 + np.asarray(t) ** 2) * np.exp(-2 * np.asarray(t) ** 2)),
        "heat_0.25": inverse(heat_spectrum(plan.params, 0.25), plan),
        "heat_1": inverse(heat_spectrum(plan.params, 1.0), plan),
        "bump": RadialFunction.closed_form(bump, support=BUMP_RADIUS),
    }


# ---------------------------------------------------------------------------
# CSV

def _fmt(x):
    return "{:.17g}".format(float(x))


def write_radial_csv(path, f: RadialFunction, t=None):
    """Write ``t,value`` rows (the sample grid by default)."""
    if t is None:
        t, vals = f.grid, f.values
    else:
        t = np.asarray(t, dtype=float)
        vals = f(t)
    with open(path, "w", newline="") as fh:
        fh.write("t,value\n")
        for ti, vi in zip(t, vals):
            fh.write(f"{_fmt(ti)},{_fmt(np.real(vi))}\n")


def write_spectral_csv(path, F: SpectralFunction, lam=None):
    """Write ``lambda,re,im`` rows (the sample grid by default)."""
    if lam is None:
        lam, vals = F.grid, np.asarray(F.values, dtype=complex)
    else:
        lam = np.asarray(lam, dtype=float)
        vals = np.asarray(F(lam), dtype=complex)
    with open(path, "w", newline="") as fh:
        fh.write("lambda,re,im\n")
        for li, vi in zip(lam, vals):
            fh.write(f"{_fmt(li)},{_fmt(vi.real)},{_fmt(vi.imag)}\n")


def _read_rows(path, header):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != header:
        raise ValueError(f"{path}: expected header {','.join(header)}")
    return np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)


def read_radial_csv(path, decay_hint=None) -> RadialFunction:
    data = _read_rows(path, ["t", "value"])
    return RadialFunction.sampled(data[:, 0], data[:, 1], decay_hint)


def read_spectral_csv(path) -> SpectralFunction:
    data = _read_rows(path, ["lambda", "re", "im"])
    vals = data[:, 1] + 1j * data[:, 2] if np.any(data[:, 2] != 0) else data[:, 1]
    return SpectralFunction.sampled(data[:, 0], vals)
