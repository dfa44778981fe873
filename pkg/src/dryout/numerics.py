"""Scalar and 2-D root finding, finite differences, convex envelopes.

These utilities double as independent oracles for the physics modules:
the sampled-envelope construction in particular cross-checks the
bitangent solver with a purely geometric computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DryoutError,
    InvalidInput,
    NoBracket,
    NoConvergence,
    SingularJacobian,
    TooFewPoints,
)


@dataclass(frozen=True)
class RootConfig:
    """Stopping rules for the iterative solvers."""

    abs_tol: float = 1e-12
    x_tol: float = 1e-13
    max_iter: int = 100

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.x_tol <= 0.0 or self.max_iter < 1:
            raise InvalidInput("RootConfig needs abs_tol > 0, x_tol > 0, max_iter >= 1")


@dataclass(frozen=True)
class EnvelopeSegment:
    """Interval on which the lower convex envelope leaves the sampled graph."""

    x_lo: float
    x_hi: float
    slope: float


def find_root_bracketed(f, lo, hi, cfg=None):
    """Root of ``f`` in ``[lo, hi]`` by bisection-safeguarded secant steps.

    Requires a sign change over the bracket.  Stops when ``|f| <= abs_tol``
    or the bracket width falls below ``x_tol``; the result never leaves the
    initial bracket.
    """
    cfg = cfg or RootConfig()
    if not lo < hi:
        raise NoBracket(f"need lo < hi, got [{lo}, {hi}]")
    f_lo = f(lo)
    if f_lo == 0.0:
        return lo
    f_hi = f(hi)
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NoBracket(f"same sign at both ends: f({lo})={f_lo}, f({hi})={f_hi}")

    a, fa, b, fb = lo, f_lo, hi, f_hi
    x_prev, f_prev = a, fa
    x_cur, f_cur = b, fb
    force_bisect = False
    for _ in range(cfg.max_iter):
        if abs(f_cur) <= cfg.abs_tol:
            return x_cur
        width = b - a
        if width <= cfg.x_tol:
            return a if abs(fa) <= abs(fb) else b
        trial = None
        if not force_bisect and f_cur != f_prev:
            trial = x_cur - f_cur * (x_cur - x_prev) / (f_cur - f_prev)
        if trial is None or not math.isfinite(trial) or not (a < trial < b):
            trial = a + 0.5 * width
        f_trial = f(trial)
        x_prev, f_prev = x_cur, f_cur
        x_cur, f_cur = trial, f_trial
        if f_trial == 0.0:
            return trial
        if (f_trial > 0.0) == (fa > 0.0):
            a, fa = trial, f_trial
        else:
            b, fb = trial, f_trial
        # force a bisection whenever the bracket failed to halve
        force_bisect = (b - a) > 0.5 * width
    raise NoConvergence(f"no root to tolerance within {cfg.max_iter} iterations")


def newton2d(F, J, x0, cfg=None):
    """Damped Newton iteration for a two-equation system.

    ``F`` maps a length-2 vector to the residual pair and ``J`` returns the
    analytic 2x2 Jacobian.  Full steps are halved (at most 20 times) until
    the max-norm of the residual does not increase; failed evaluations
    during the line search count as rejections.
    """
    cfg = cfg or RootConfig(abs_tol=1e-12, x_tol=1e-13, max_iter=50)
    x = np.array(x0, dtype=float)
    if x.shape != (2,):
        raise InvalidInput("x0 must have exactly two components")
    fx = np.asarray(F(x), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise NoConvergence("residual not finite at the initial guess")
    norm = float(np.max(np.abs(fx)))
    for _ in range(cfg.max_iter):
        if norm <= cfg.abs_tol:
            return x
        jac = np.asarray(J(x), dtype=float)
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        scale = max(abs(jac[0, 0] * jac[1, 1]), abs(jac[0, 1] * jac[1, 0]))
        if scale == 0.0 or abs(det) < 1e-14 * scale:
            raise SingularJacobian(f"|det J|={abs(det)} below 1e-14 of scale {scale}")
        dx0 = (-fx[0] * jac[1, 1] + fx[1] * jac[0, 1]) / det
        dx1 = (fx[0] * jac[1, 0] - fx[1] * jac[0, 0]) / det
        dx = np.array([dx0, dx1])
        lam = 1.0
        accepted = False
        for _ in range(21):  # full step plus up to 20 halvings
            trial = x + lam * dx
            try:
                f_trial = np.asarray(F(trial), dtype=float)
            except (DryoutError, ValueError, OverflowError, ZeroDivisionError):
                f_trial = None
            if f_trial is not None and np.all(np.isfinite(f_trial)):
                trial_norm = float(np.max(np.abs(f_trial)))
                if trial_norm <= norm:
                    x, fx, norm = trial, f_trial, trial_norm
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            raise NoConvergence("Newton step rejected after 20 halvings")
    if norm <= cfg.abs_tol:
        return x
    raise NoConvergence(f"residual {norm} above {cfg.abs_tol} after {cfg.max_iter} iterations")


def fd_gradient(f, x, h=None):
    """Central difference (f(x+h) - f(x-h)) / (2h); default h = 1e-5*max(|x|, 1)."""
    if h is None:
        h = 1e-5 * max(abs(x), 1.0)
    return (f(x + h) - f(x - h)) / (2.0 * h)


def fd_second(f, x, h=None):
    """Central second difference; default h = 1e-4*max(|x|, 1)."""
    if h is None:
        h = 1e-4 * max(abs(x), 1.0)
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def lower_convex_envelope(xs, ys):
    """Segments where the lower convex hull departs from the sampled graph.

    Returns an empty list when the sample is already convex.  Hull edges
    that bridge non-adjacent sample points are reported as
    :class:`EnvelopeSegment` intervals with their shared tangent slope.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or ys.shape != xs.shape:
        raise InvalidInput("xs and ys must be 1-D arrays of equal length")
    if xs.size < 3:
        raise TooFewPoints("need at least three sample points")
    if not np.all(np.diff(xs) > 0.0):
        raise InvalidInput("xs must be strictly increasing")

    hull = []  # indices of lower-hull vertices; collinear middles are dropped
    for i in range(xs.size):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            cross = (xs[k] - xs[j]) * (ys[i] - ys[j]) - (ys[k] - ys[j]) * (xs[i] - xs[j])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)

    segments = []
    for j, k in zip(hull[:-1], hull[1:]):
        if k > j + 1:
            slope = (ys[k] - ys[j]) / (xs[k] - xs[j])
            segments.append(EnvelopeSegment(float(xs[j]), float(xs[k]), float(slope)))
    return segments
