"""Deterministic adaptive Gauss-Legendre quadrature on intervals and the half-line.

Integrands are vectorized callables: ``f(x)`` receives a 1-D array of nodes
and returns either an array of the same length or an array of shape
``(len(x), k)`` for k integrands sharing the same panels.  All active panels
of a refinement level are evaluated in a single call, and accepted panels
are summed in order of their left endpoints, so results never depend on
scheduling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import DepthExceeded, DomainError, NoDecayDetected

__all__ = [
    "FixedCutoff",
    "DecayExtrapolation",
    "QuadratureSpec",
    "integrate",
    "integrate_halfline",
    "integrate_log_halfline",
]


@dataclass(frozen=True)
class FixedCutoff:
    """Truncate the half-line at a fixed point."""

    cutoff: float

    def __post_init__(self):
        if not self.cutoff > 0:
            raise DomainError("cutoff must be positive")


@dataclass(frozen=True)
class DecayExtrapolation:
    """Double the cutoff (first cutoff 4/rate) until the last panel is negligible."""

    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError("decay rate must be positive")


HalflinePolicy = Union[FixedCutoff, DecayExtrapolation]


@dataclass(frozen=True)
class QuadratureSpec:
    panel_order: int = 16
    rel_tol: float = 1e-10
    abs_tol: float = 1e-30
    max_depth: int = 30
    halfline_policy: HalflinePolicy = field(default_factory=DecayExtrapolation)

    def __post_init__(self):
        if self.panel_order < 4:
            raise DomainError("panel_order must be at least 4")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not 1 <= self.max_depth <= 40:
            raise DomainError("max_depth must lie in [1, 40]")


DEFAULT_SPEC = QuadratureSpec()
MAX_DOUBLINGS = 12
MAX_PANELS = 1 << 16  # active panels per level; beyond this the depth limit applies
_ROUNDOFF = 50 * np.finfo(float).eps


@lru_cache(maxsize=32)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_sums(f, lo, hi, n):
    """Gauss-Legendre estimate on each panel [lo_i, hi_i]; shape (m, k)."""
    x, w = _gauss_legendre(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(nodes), dtype=float)
    if vals.shape[0] != nodes.size:
        raise ValueError("integrand must return one row per node")
    vector = vals.ndim > 1
    vals = vals.reshape(lo.size, n, -1)
    sums = half[:, None] * np.einsum("j,mjk->mk", w, vals)
    mags = half * np.einsum("j,mjk->m", w, np.abs(vals))
    return sums, mags, vector


def _norm(v):
    return np.max(np.abs(v), axis=-1)


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC,
              breakpoints=None):
    """Adaptive bisection with Gauss-Legendre panels.

    ``breakpoints`` (points inside ``(a, b)``) seed the initial panels, which
    is how piecewise-smooth integrands such as splines are handled.

    Returns ``(value, err_est)``; ``value`` is a float for scalar integrands
    and a length-k array for vector integrands.  ``err_est`` sums the
    two-level differences (coarse panel vs its two halves) of accepted panels.
    Emits :class:`DepthExceeded` and returns the best estimate when
    ``max_depth`` bisections do not meet the tolerance.
    """
    if not (b >= a):
        raise DomainError("integrate needs a <= b")
    n = spec.panel_order
    if a == b:
        probe = np.asarray(f(np.array([a])), dtype=float)
        zero = np.zeros(probe.shape[1:]) if probe.ndim > 1 else 0.0
        return zero, 0.0
    edges = np.array([a, b], dtype=float)
    if breakpoints is not None:
        inner = np.asarray(breakpoints, dtype=float)
        edges = np.unique(np.concatenate((edges, inner[(inner > a) & (inner < b)])))
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    coarse, _, vector = _panel_sums(f, lo, hi, n)
    acc_lo, acc_val, acc_err = [], [], []
    accepted, accepted_mag, accepted_err = 0.0, 0.0, 0.0
    total_width = b - a
    for depth in range(spec.max_depth + 1):
        mid = 0.5 * (lo + hi)
        both, mags, _ = _panel_sums(f, np.concatenate((lo, mid)), np.concatenate((mid, hi)), n)
        left, right = both[: lo.size], both[lo.size:]
        fine = left + right
        diff = _norm(fine - coarse)
        running = fine.sum(axis=0) + accepted
        magnitude = float(mags.sum()) + accepted_mag
        # relative target, absolute floor, and a floor at the rounding level of sum |f|
        tol = max(spec.rel_tol * float(np.max(np.abs(running))), spec.abs_tol, _ROUNDOFF * magnitude)
        if accepted_err + float(diff.sum()) <= tol:
            ok = np.ones(lo.size, dtype=bool)
        else:
            ok = diff <= tol * (hi - lo) / total_width
        if depth == spec.max_depth or lo.size > MAX_PANELS:
            if not ok.all():
                warnings.warn(f"quadrature depth limit {spec.max_depth} reached on [{a}, {b}]",
                              DepthExceeded, stacklevel=2)
            ok[:] = True
        acc_lo.append(lo[ok])
        acc_val.append(fine[ok])
        acc_err.append(diff[ok])
        accepted = accepted + fine[ok].sum(axis=0)
        accepted_mag += float(mags[: lo.size][ok].sum() + mags[lo.size:][ok].sum())
        accepted_err += float(diff[ok].sum())
        if ok.all():
            break
        keep = ~ok
        lo = np.concatenate((lo[keep], mid[keep]))
        hi = np.concatenate((mid[keep], hi[keep]))
        coarse = np.concatenate((left[keep], right[keep]))
        acc_val = [np.concatenate(acc_val)]
        acc_lo = [np.concatenate(acc_lo)]
        acc_err = [np.concatenate(acc_err)]
    lefts = np.concatenate(acc_lo)
    vals = np.concatenate(acc_val)
    errs = np.concatenate(acc_err)
    order = np.argsort(lefts, kind="stable")
    value = vals[order].sum(axis=0)
    err = float(errs[order].sum())
    if not vector:
        return float(value[0]), err
    return value, err


def integrate_halfline(f: Callable, spec: QuadratureSpec = DEFAULT_SPEC, start: float = 0.0):
    """Integral of ``f`` over ``[start, inf)``.

    With :class:`FixedCutoff` the interval is truncated at the cutoff.  With
    :class:`DecayExtrapolation` panels ``[T, 2T]`` are appended until two
    consecutive panels contribute less than ``max(rel_tol |acc|, abs_tol)``;
    the magnitude of the last panel is added to the error estimate.  Returns
    ``(value, err_est, cutoff_used)``; raises :class:`NoDecayDetected` after
    12 doublings without meeting the stopping rule.
    """
    policy = spec.halfline_policy
    if isinstance(policy, FixedCutoff):
        if policy.cutoff <= start:
            raise DomainError("cutoff must exceed the start point")
        v, e = integrate(f, start, policy.cutoff, spec)
        return v, e, float(policy.cutoff)
    width = 4.0 / policy.rate
    hi = start + width
    acc, err = integrate(f, start, hi, spec)
    quiet = 0
    for _ in range(MAX_DOUBLINGS):
        lo, hi = hi, start + 2.0 * (hi - start)
        piece, e = integrate(f, lo, hi, spec)
        acc = acc + piece
        err += e
        size = float(np.max(np.abs(piece)))
        if size <= max(spec.rel_tol * float(np.max(np.abs(acc))), spec.abs_tol):
            quiet += 1
            if quiet == 2:
                return acc, err + size, float(hi)
        else:
            quiet = 0
    raise NoDecayDetected(f"no decay detected up to x = {hi:.6g}")


def integrate_log_halfline(f: Callable, start: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """Integral of ``f`` over ``[start, inf)`` for algebraically decaying ``f``.

    Substitutes ``x = start * e^u`` so that a power tail ``x^{-p}`` becomes an
    exponential ``e^{-(p-1) u}``; the decay rate of the policy refers to ``u``.
    """
    if not start > 0:
        raise DomainError("log substitution needs start > 0")

    def g(u):
        x = start * np.exp(u)
        vals = np.asarray(f(x), dtype=float)
        jac = x if vals.ndim == 1 else x[:, None]
        return vals * jac

    return integrate_halfline(g, spec, 0.0)
