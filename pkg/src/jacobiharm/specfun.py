"""Special functions of Jacobi analysis.

Log-Gamma on the complex plane, the Gauss hypergeometric function, the
Jacobi functions ``phi_lambda^{(alpha, beta)}``, the weight ``A_{alpha,beta}``
and the Harish-Chandra c-function with its Plancherel density.

All array-valued routines are pure numpy and deterministic: the value at a
point never depends on which other points were evaluated in the same call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "JacobiParams",
    "gamma_ln",
    "hyp2f1",
    "jacobi_phi",
    "jacobi_phi_grid",
    "jacobi_phi_ode",
    "weight_A",
    "log_weight_A",
    "c_function",
    "plancherel_density",
    "log_plancherel_density",
]


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi indices with ``alpha >= beta > -1/2``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.beta > -0.5 and self.alpha >= self.beta):
            raise DomainError(
                f"need alpha >= beta > -1/2, got alpha={self.alpha}, beta={self.beta}"
            )

    @property
    def rho(self) -> float:
        return self.alpha + self.beta + 1.0


# ---------------------------------------------------------------------------
# log-Gamma

# Lanczos approximation, g = 671/128, 14 terms (relative error ~1e-15 for Re z > 0).
_LANCZOS_G = 671.0 / 128.0
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005
_POLE_TOL = 1e-12


def _lngamma_right(z):
    """Lanczos log-Gamma for ``Re z >= 1/2`` (principal branch)."""
    tmp = z + _LANCZOS_G
    tmp = (z + 0.5) * np.log(tmp) - tmp
    ser = np.full(z.shape, _LANCZOS_C0, dtype=complex)
    y = z
    for coef in _LANCZOS_COF:
        y = y + 1.0
        ser = ser + coef / y
    return tmp + np.log(_SQRT_2PI * ser / z)


def gamma_ln(z):
    """Principal-branch ``log Gamma(z)`` for complex scalars or arrays.

    Arguments with ``Re z < 1/2`` are shifted right with the recurrence
    ``Gamma(z) = Gamma(z + n) / (z (z+1) ... (z+n-1))``; the sum of principal
    logarithms keeps the result on the principal branch off the negative axis.
    """
    zarr = np.asarray(z, dtype=complex)
    scalar = zarr.ndim == 0
    zarr = np.atleast_1d(zarr)
    re, im = zarr.real, zarr.imag
    pole = (np.abs(im) <= _POLE_TOL) & (re <= _POLE_TOL) & (np.abs(re - np.round(re)) <= _POLE_TOL)
    if np.any(pole):
        raise PoleError(f"log-Gamma pole at z={zarr[pole][0]}")
    shift = np.where(re < 0.5, np.ceil(0.5 - re), 0.0)
    shift = np.nan_to_num(shift).astype(np.int64)
    out = _lngamma_right(zarr + shift)
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        out[m] -= np.log(zarr[m] + k)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Gauss hypergeometric function

_EPS_SUM = 1e-15  # rounding-error multiplier for the sum of |terms|
_HYP_DELTA = 5e-3  # stencil spacing when b - a is close to an integer


def _series(a, b, c, z, rtol, max_terms):
    """Direct series; returns (sum, sum of |terms|). All inputs broadcast.

    Each element stops on its own criterion and drops out of the active set,
    so the value at a point does not depend on what else is in the batch.
    """
    arrays = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, z)))
    shape = arrays[0].shape
    a, b, c, z = (v.ravel().copy() for v in arrays)
    out = np.ones(a.size, dtype=complex)
    out_abs = np.ones(a.size)
    idx = np.arange(a.size)
    s = out.copy()
    sabs = out_abs.copy()
    term = np.ones(a.size, dtype=complex)
    tail = 1.0 / (1.0 - np.minimum(np.abs(z), 0.999))
    for k in range(max_terms):
        if idx.size == 0:
            break
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        term = term * ratio
        s = s + term
        at = np.abs(term)
        sabs = sabs + at
        fin = (at * tail <= rtol * np.abs(s) + 1e-300) & ((np.abs(ratio) < 1.0) | (at == 0.0))
        if fin.any():
            out[idx[fin]] = s[fin]
            out_abs[idx[fin]] = sabs[fin]
            keep = ~fin
            idx, a, b, c, z, tail = idx[keep], a[keep], b[keep], c[keep], z[keep], tail[keep]
            s, sabs, term = s[keep], sabs[keep], term[keep]
    else:
        if idx.size:
            raise ConvergenceError(f"2F1 series not converged within {max_terms} terms")
    return out.reshape(shape), out_abs.reshape(shape)


def _check_c(c):
    cr = np.asarray(c, dtype=complex)
    if np.any((np.abs(cr.imag) <= _POLE_TOL) & (cr.real <= _POLE_TOL)
              & (np.abs(cr.real - np.round(cr.real)) <= _POLE_TOL)):
        raise PoleError(f"2F1 lower parameter c={c} is a non-positive integer")


def _is_pole(x):
    return abs(x.imag) <= _POLE_TOL and x.real <= _POLE_TOL and abs(x.real - round(x.real)) <= _POLE_TOL


def _gamma_ratio(num, den):
    """prod Gamma(num) / prod Gamma(den) in log space; 1/Gamma(pole) = 0."""
    if any(_is_pole(complex(d)) for d in den):
        return 0.0j
    return complex(np.exp(sum(gamma_ln(x) for x in num) - sum(gamma_ln(x) for x in den)))


def _connection(a, b, c, z, rtol, max_terms):
    """Continuation to |z| > 1 through the 1/z connection formula (b - a not an integer)."""
    lnmz = np.log(-z + 0j)
    out = 0j
    for p, q in ((a, b), (b, a)):
        coef = _gamma_ratio((c, q - p), (q, c - p))
        if coef == 0:
            continue
        s, _ = _series(p, p - c + 1, p - q + 1, 1.0 / z, rtol, max_terms)
        out += coef * np.exp(-p * lnmz) * complex(s)
    return out


def _near_integer(x, tol):
    n = round(x.real)
    return abs(x.imag) < tol and abs(x.real - n) < tol, n


def hyp2f1(a, b, c, z, *, rtol=1e-13, max_terms=10_000):
    """Gauss hypergeometric function ``2F1(a, b; c; z)``.

    The defining series is summed for ``|z| < 1``.  Real ``z < -1/2`` goes
    through the Pfaff transformation ``z -> z/(z-1)``; for ``z < -2`` (and
    complex ``|z| > 1`` off the cut ``[1, inf)``) the 1/z connection formula
    is used, with a small interpolation stencil in ``b`` when ``b - a`` is
    (nearly) an integer and the formula degenerates.
    """
    a, b, c, z = (complex(v) for v in (a, b, c, z))
    _check_c(c)
    if z == 0:
        return 1.0 + 0j
    w = z / (z - 1.0)
    real_neg = abs(z.imag) == 0.0 and z.real < 0
    if real_neg and -2.0 <= z.real < -0.5 or (not real_neg and abs(w) < min(abs(z), 0.75)):
        s, _ = _series(a, c - b, c, w, rtol, max_terms)
        return complex(np.exp(-a * np.log(1.0 - z)) * s)
    if abs(z) < 1.0 and not (real_neg and z.real < -2.0):
        s, _ = _series(a, b, c, z, rtol, max_terms)
        return complex(s)
    if abs(z.imag) == 0.0 and z.real >= 1.0:
        raise DomainError("2F1 is evaluated off the branch cut [1, inf) only")
    near, n = _near_integer(b - a, _HYP_DELTA)
    if not near:
        return _connection(a, b, c, z, rtol, max_terms)
    # b - a = n + eta with |eta| small: interpolate G(s) = F(a, a + n + s) at s = eta
    eta = (b - a) - n
    unit = eta / abs(eta) if eta != 0 else 1.0
    nodes = [k * _HYP_DELTA * unit for k in (-3, -2, -1, 1, 2, 3)]
    vals = [_connection(a, a + n + s, c, z, rtol, max_terms) for s in nodes]
    return complex(_lagrange(nodes, vals, eta))


def _lagrange(nodes, vals, x):
    out = 0j
    for i, (xi, vi) in enumerate(zip(nodes, vals)):
        wgt = 1.0 + 0j
        for j, xj in enumerate(nodes):
            if j != i:
                wgt *= (x - xj) / (xi - xj)
        out += wgt * vi
    return out


# ---------------------------------------------------------------------------
# Jacobi functions

_DEGENERATE_DELTA = 2e-3
_SERIES_ABS_TOL = 1e-12  # larger estimated rounding error -> ODE continuation
_IMAG_TOL = 1e-10
_PHI_RTOL = 1e-15


def _phi_direct(alpha, beta, lam, z):
    rho = alpha + beta + 1.0
    a = (rho - 1j * lam[:, None]) / 2.0
    s, sabs = _series(a, np.conj(a), alpha + 1.0, z[None, :], _PHI_RTOL, 10_000)
    return s, _EPS_SUM * sabs


def _phi_pfaff(alpha, beta, lam, z):
    rho = alpha + beta + 1.0
    a = (rho - 1j * lam[:, None]) / 2.0
    b = np.conj(a)
    zz = z[None, :]
    w = zz / (zz - 1.0)
    s, sabs = _series(a, alpha + 1.0 - b, alpha + 1.0, w, _PHI_RTOL, 10_000)
    pref = np.exp(-a * np.log1p(-zz))
    return pref * s, _EPS_SUM * np.abs(pref) * sabs


def _phi_connection(alpha, beta, lam, z):
    """1/z connection for lam >= _DEGENERATE_DELTA (so b - a = i*lam is no integer)."""
    rho = alpha + beta + 1.0
    c = alpha + 1.0
    a = (rho - 1j * lam[:, None]) / 2.0
    b = np.conj(a)
    lnmz = np.log(-z)[None, :]
    val = np.zeros((lam.size, z.size), dtype=complex)
    err = np.zeros((lam.size, z.size))
    lg_c = gamma_ln(c)
    for p, q in ((a, b), (b, a)):
        lcoef = lg_c + gamma_ln(q - p) - gamma_ln(q) - gamma_ln(c - p)
        coef = np.exp(lcoef - p * lnmz)
        s, sabs = _series(p, p - c + 1.0, p - q + 1.0, 1.0 / z[None, :], _PHI_RTOL, 10_000)
        val += coef * s
        err += np.abs(coef) * sabs
    return val, 4.0 * _EPS_SUM * err


def _phi_connection_small(alpha, beta, lam, z):
    """lam < delta: even polynomial interpolation in lam^2 from lam = delta, 2 delta, 3 delta."""
    d = _DEGENERATE_DELTA
    nodes = np.array([1.0, 4.0, 9.0]) * d * d
    v, e = _phi_connection(alpha, beta, np.array([d, 2 * d, 3 * d]), z)
    x = lam ** 2
    val = np.zeros((lam.size, z.size), dtype=complex)
    err = np.zeros((lam.size, z.size))
    for i in range(3):
        wgt = np.ones_like(x)
        for j in range(3):
            if j != i:
                wgt *= (x - nodes[j]) / (nodes[i] - nodes[j])
        val += wgt[:, None] * v[i][None, :]
        err += np.abs(wgt)[:, None] * e[i][None, :]
    return val, err


@lru_cache(maxsize=256)
def _gauss_jacobi(n, a):
    x, w = roots_jacobi(n, a, 0.0)
    return x, w


def _phi_integral(alpha, beta, lam, t):
    """Jacobi function from its Laplace-type integral over ``s in [0, t]``.

    phi_lam(t) = C (sinh 2t)^{-2 alpha} (cosh t)^{alpha-beta}
                 int_0^t cos(lam s) (cosh 2t - cosh 2s)^{alpha-1/2}
                 2F1(alpha+beta, alpha-beta; alpha+1/2; (cosh t - cosh s)/(2 cosh t)) ds,
    C = 2^{alpha+3/2} Gamma(alpha+1) / (sqrt(pi) Gamma(alpha+1/2)).

    The kernel is free of lam, so there is no cancellation in the
    hypergeometric sum; the endpoint singularity is absorbed into a
    Gauss-Jacobi rule whose size depends on (lam, t) only.  Elementwise in
    the 1-D arrays ``lam`` and ``t``.
    """
    out = np.empty(lam.shape)
    sing = alpha - 0.5
    lnc = ((alpha + 1.5) * _LN2 + gamma_ln(alpha + 1.0).real - 0.5 * math.log(math.pi)
           - gamma_ln(alpha + 0.5).real)
    nodes = np.ceil(0.6 * lam * t).astype(np.int64) + 30
    for n in np.unique(nodes):
        m = nodes == n
        x, w = _gauss_jacobi(int(n), sing)
        tt = t[m][:, None]
        sv = 0.5 * tt * (1.0 + x[None, :])
        d = tt - sv
        g = np.cos(lam[m][:, None] * sv) * (2.0 * np.sinh(tt + sv) * np.sinh(d) / d) ** sing
        ct = np.cosh(tt)
        f, _ = _series(alpha + beta, alpha - beta, alpha + 0.5, (ct - np.cosh(sv)) / (2.0 * ct),
                       1e-16, 10_000)
        integral = np.sum(w[None, :] * g * f.real, axis=-1) * (0.5 * t[m]) ** (alpha + 0.5)
        tm = t[m]
        lpre = lnc - 2 * alpha * np.log(np.sinh(2 * tm)) + (alpha - beta) * np.log(np.cosh(tm))
        out[m] = np.exp(lpre) * integral
    return out


def jacobi_phi_grid(params: JacobiParams, lams, ts) -> np.ndarray:
    """Matrix ``phi[i, j] = phi_{lams[i]}^{(alpha,beta)}(ts[j])`` for real lams, ts >= 0.

    The hypergeometric representation is summed directly for
    ``-sinh^2 t >= -1/2``, after a Pfaff transformation on ``[-2, -1/2)`` and
    through the 1/z connection formula beyond.  Where the estimated rounding
    error of the series exceeds 1e-12 (large ``lam * sinh t``), the value comes
    from a Laplace-type integral representation instead.  Every entry depends
    only on its own (lam, t), never on the rest of the grid.
    """
    alpha, beta = params.alpha, params.beta
    lam = np.abs(np.asarray(lams, dtype=float).ravel())
    t = np.asarray(ts, dtype=float).ravel()
    if np.any(t < 0):
        raise DomainError("Jacobi functions are evaluated for t >= 0 only")
    z = -np.sinh(t) ** 2
    val = np.empty((lam.size, t.size), dtype=complex)
    err = np.zeros((lam.size, t.size))
    if lam.size == 0 or t.size == 0:
        return val.real

    regions = (
        (z >= -0.5, _phi_direct),
        ((z < -0.5) & (z >= -2.0), _phi_pfaff),
    )
    for mask, fn in regions:
        if mask.any():
            v, e = fn(alpha, beta, lam, z[mask])
            val[:, mask], err[:, mask] = v, e
    conn = z < -2.0
    if conn.any():
        small = lam < _DEGENERATE_DELTA
        idx = np.ix_(~small, conn)
        if (~small).any():
            val[idx], err[idx] = _phi_connection(alpha, beta, lam[~small], z[conn])
        if small.any():
            idx = np.ix_(small, conn)
            val[idx], err[idx] = _phi_connection_small(alpha, beta, lam[small], z[conn])

    bad = ~(err <= _SERIES_ABS_TOL)
    good_imag = np.abs(val.imag[~bad])
    if good_imag.size and good_imag.max() > _IMAG_TOL:
        raise ConvergenceError(f"Jacobi function has imaginary residue {good_imag.max():.3g}")
    out = val.real.copy()
    if bad.any():
        r, c = np.nonzero(bad)
        out[r, c] = _phi_integral(alpha, beta, lam[r], t[c])
    return out


def jacobi_phi(params: JacobiParams, lam, t):
    """Jacobi function ``phi_lam^{(alpha,beta)}(t)``; broadcasts over ``lam`` and ``t``."""
    lam_b, t_b = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(t, dtype=float))
    ul, il = np.unique(np.abs(lam_b), return_inverse=True)
    ut, it = np.unique(t_b, return_inverse=True)
    grid = jacobi_phi_grid(params, ul, ut)
    out = grid[il.ravel(), it.ravel()].reshape(lam_b.shape)
    return float(out) if out.ndim == 0 else out


# Gauss-Legendre 3-stage implicit Runge-Kutta (order 6, A-stable).
_S15 = math.sqrt(15.0)
_GL3_C = np.array([0.5 - _S15 / 10, 0.5, 0.5 + _S15 / 10])
_GL3_A = np.array([
    [5 / 36, 2 / 9 - _S15 / 15, 5 / 36 - _S15 / 30],
    [5 / 36 + _S15 / 24, 2 / 9, 5 / 36 - _S15 / 24],
    [5 / 36 + _S15 / 30, 2 / 9 + _S15 / 15, 5 / 36],
])
_GL3_B = np.array([5 / 18, 4 / 9, 5 / 18])


def jacobi_phi_ode(params: JacobiParams, lam: float, t_max: float, n_steps: int = 4000,
                   *, t0: float = 1e-3, t_eval=None):
    """Regular solution of ``L phi + (lam^2 + rho^2) phi = 0`` with ``phi(0) = 1``.

    A fourth-order Taylor expansion covers ``[0, t0]`` (the coefficient
    ``coth t`` is singular at the origin); from ``t0`` on, fixed steps of a
    3-stage Gauss-Legendre collocation scheme are taken.  Points in
    ``t_eval`` are inserted into the step grid.  Returns ``(t, phi)``: the
    whole trajectory, or only the ``t_eval`` points when those are given.
    """
    if not (t_max > 0) or n_steps < 100 or not (0 < t0 < t_max):
        raise DomainError("need t_max > t0 > 0 and n_steps >= 100")
    alpha, beta, rho = params.alpha, params.beta, params.rho
    k2 = lam * lam + rho * rho
    c1, c2 = 2 * alpha + 1.0, 2 * beta + 1.0
    a2 = -k2 / (4.0 * (alpha + 1.0))
    a4 = -a2 * (k2 + 2.0 * c1 / 3.0 + 2.0 * c2) / (8.0 * (alpha + 2.0))

    grid = np.linspace(t0, t_max, n_steps + 1)
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any(t_eval < 0) or np.any(t_eval > t_max):
            raise DomainError("t_eval must lie in [0, t_max]")
        grid = np.union1d(grid, t_eval[t_eval > t0])
    ts = np.concatenate(([0.0], grid))
    ys = np.empty(ts.size)
    ys[0] = 1.0
    y = np.array([1.0 + a2 * t0 ** 2 + a4 * t0 ** 4, 2 * a2 * t0 + 4 * a4 * t0 ** 3])
    ys[1] = y[0]

    def mat(tt):
        th = math.tanh(tt)
        return np.array([[0.0, 1.0], [-k2, -(c1 / th + c2 * th)]])

    eye = np.eye(6)
    for i in range(1, grid.size):
        h = grid[i] - grid[i - 1]
        ms = [mat(grid[i - 1] + cc * h) for cc in _GL3_C]
        big = eye.copy()
        rhs = np.empty(6)
        for r in range(3):
            for s in range(3):
                big[2 * r:2 * r + 2, 2 * s:2 * s + 2] -= h * _GL3_A[r, s] * ms[r]
            rhs[2 * r:2 * r + 2] = ms[r] @ y
        k = np.linalg.solve(big, rhs).reshape(3, 2)
        y = y + h * (_GL3_B @ k)
        ys[i + 1] = y[0]

    if t_eval is None:
        return ts, ys
    small = t_eval <= t0
    vals = np.interp(t_eval, ts, ys)
    vals[small] = 1.0 + a2 * t_eval[small] ** 2 + a4 * t_eval[small] ** 4
    exact = np.searchsorted(ts, t_eval[~small])
    vals[~small] = ys[exact]
    return t_eval, vals


# ---------------------------------------------------------------------------
# Weight, c-function, Plancherel density

_LN2 = math.log(2.0)


def log_weight_A(params: JacobiParams, t):
    """``log A_{alpha,beta}(t)``; t > 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("weight is defined for t >= 0")
    with np.errstate(divide="ignore"):
        big = t >= 1.0
        tt = np.where(big, t, 1.0)
        # log(2 sinh t) = t + log1p(-e^{-2t}),  log(2 cosh t) = t + log1p(e^{-2t})
        e2 = np.exp(-2.0 * tt)
        far = (2 * params.alpha + 1) * (tt + np.log1p(-e2)) + (2 * params.beta + 1) * (tt + np.log1p(e2))
        ts = np.where(big, 1.0, t)
        near = (2 * params.alpha + 1) * np.log(2 * np.sinh(ts)) + (2 * params.beta + 1) * np.log(2 * np.cosh(ts))
        return np.where(big, far, near)


def weight_A(params: JacobiParams, t):
    """``A_{alpha,beta}(t) = (2 sinh t)^{2 alpha+1} (2 cosh t)^{2 beta+1}``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("weight is defined for t >= 0")
    near = t < 1.0
    ts = np.where(near, t, 0.5)
    direct = (2 * np.sinh(ts)) ** (2 * params.alpha + 1) * (2 * np.cosh(ts)) ** (2 * params.beta + 1)
    lw = log_weight_A(params, np.where(near, 1.0, t))
    if np.any(~near & (lw > 709.0)):
        raise OverflowError("A(t) exceeds the floating-point range")
    out = np.where(near, direct, np.exp(np.minimum(lw, 709.0)))
    return float(out) if out.ndim == 0 else out


def _log_c(params: JacobiParams, lam):
    rho, alpha, beta = params.rho, params.alpha, params.beta
    il = 1j * np.asarray(lam, dtype=float)
    half = 0.5 * (rho + il)
    return ((rho - il) * _LN2 + gamma_ln(alpha + 1.0) + gamma_ln(il)
            - gamma_ln(half) - gamma_ln(half - beta))


def c_function(params: JacobiParams, lam):
    """Harish-Chandra c-function ``2^{rho-i lam} G(alpha+1) G(i lam) / (G((rho+i lam)/2) G((rho+i lam)/2 - beta))``."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr == 0):
        raise PoleError("c-function has a pole at lambda = 0")
    out = np.exp(_log_c(params, lam_arr))
    return complex(out) if np.ndim(out) == 0 else out


def log_plancherel_density(params: JacobiParams, lam):
    """``log((1/2pi) |c(lam)|^{-2})`` for lam > 0; finite far beyond the float range of the density."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0):
        raise DomainError("log density is evaluated for lambda > 0")
    mid = np.clip(lam_arr, _SMALL_SWITCH, _STIRLING_SWITCH)
    out = np.where(lam_arr < _STIRLING_SWITCH, -2.0 * _log_c(params, mid).real,
                   _log_density_large(params, np.maximum(lam_arr, _STIRLING_SWITCH)))
    out = np.where(lam_arr < _SMALL_SWITCH, _log_density_small(params, np.minimum(lam_arr, _SMALL_SWITCH)), out)
    out = out - math.log(2.0 * math.pi)
    return float(out) if np.ndim(out) == 0 else out


_STIRLING_SWITCH = 50.0
_SMALL_SWITCH = 1e-7  # below, |c|^{-2} = const * lambda^2 to relative O(lambda^2)


def _log_density_small(params: JacobiParams, lam):
    """``-2 Re log c(lambda)`` from ``Gamma(i lambda) ~ 1/(i lambda)``."""
    rho, alpha, beta = params.rho, params.alpha, params.beta
    return (2 * np.log(lam) + 2 * math.lgamma(rho / 2) + 2 * math.lgamma(rho / 2 - beta)
            - 2 * rho * _LN2 - 2 * math.lgamma(alpha + 1))
_STIRLING_COEF = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188)


def _re_lngamma_plus(x, y):
    """``Re log Gamma(x + iy) + pi y / 2`` for large y, by Stirling with the pi y/2 removed."""
    z = x + 1j * y
    w = 1 / z
    series = 0.0
    for c in reversed(_STIRLING_COEF):
        series = series * w * w + c
    series = series * w
    return ((x - 0.5) * np.log(np.abs(z)) + y * np.arctan(x / y) - x + 0.5 * math.log(2 * math.pi)
            + series.real)


def _log_density_large(params: JacobiParams, lam):
    """``-2 Re log c(lambda)`` without the cancellation of the O(lambda) terms."""
    rho, alpha, beta = params.rho, params.alpha, params.beta
    half = 0.5 * lam
    return (-2 * rho * _LN2 - 2 * math.lgamma(alpha + 1) - math.log(math.pi) - _LN2 + np.log(lam)
            + np.log1p(-np.exp(-2 * math.pi * lam))
            + 2 * _re_lngamma_plus(rho / 2, half) + 2 * _re_lngamma_plus(rho / 2 - beta, half))


def plancherel_density(params: JacobiParams, lam):
    """Plancherel density ``(1/2pi) |c(lam)|^{-2}``, extended by 0 at ``lam = 0``."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < 0):
        raise DomainError("Plancherel density is evaluated for lambda >= 0")
    pos = lam_arr > 0
    safe = np.where(pos, lam_arr, 1.0)
    with np.errstate(over="ignore"):
        dens = np.exp(log_plancherel_density(params, safe))
    out = np.where(pos, dens, 0.0)
    return float(out) if out.ndim == 0 else out
