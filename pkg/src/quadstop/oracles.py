"""Independent reference computations for cross-checking the solver.

Nothing in this module goes through the Martin-kernel discretization.
The symmetric-problem boundary radius comes from a scalar transcendental
equation solved by Brent's method, the resolvent kernel can be rebuilt
by quadrature of the heat kernel in time, and a projected implicit
finite-difference iteration solves the radial obstacle problem directly.
Agreement between these routes and the production solver is what the
verification suite certifies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import cho_solve_banded, cholesky_banded

from .specfun import bessel_I


class BracketError(ValueError):
    """Root bracket does not straddle a sign change."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its panel budget before the tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative scheme stopped before reaching its tolerance."""


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError("need finite lo < hi, got [%r, %r]" % (self.lo, self.hi))


def brent_root(f, bracket: Bracket, tol: float = 1e-13, max_iter: int = 200, trace=None):
    """Root of f on a sign-changing bracket by Brent's method.

    Combines bisection with inverse quadratic interpolation; always
    keeps the root bracketed, so it cannot diverge.  `trace`, if given,
    is a list that receives each accepted abscissa.
    """
    a, b = float(bracket.lo), float(bracket.hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise BracketError("f has the same sign at %g and %g" % (a, b))
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if np.sign(fb) == np.sign(fc):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * np.finfo(float).eps * abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                t = fb / fc
                p = s * (2.0 * xm * q * (q - t) - (b - a) * (t - 1.0))
                q = (q - 1.0) * (t - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b = b + (d if abs(d) > tol1 else tol1 * np.sign(xm))
        fb = f(b)
        if trace is not None:
            trace.append(b)
    raise ConvergenceError("brent_root: no convergence in %d iterations" % max_iter)


_GL12 = leggauss(12)
_GL24 = leggauss(24)


def quad_adaptive_1d(f, a: float, b: float, rtol: float = 1e-12, atol: float = 0.0,
                     max_panels: int = 4096) -> float:
    """Adaptive Gauss-Legendre integral of a vectorized f on [a, b].

    Each panel is estimated with 12-point and 24-point rules; the
    difference drives refinement.  A panel is accepted once its error
    estimate fits inside a budget proportional to its length, so the
    accepted total respects max(atol, rtol * |integral|).  f must accept
    an ndarray of abscissae (all pending panels are evaluated in one
    call).
    """
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise ValueError("need finite a < b, got [%r, %r]" % (a, b))
    x12, w12 = _GL12
    x24, w24 = _GL24
    panels = np.array([[a, b]])
    total_len = b - a
    acc_val = 0.0
    acc_err = 0.0
    n_spent = 1
    for _ in range(64):
        mid = 0.5 * (panels[:, 0] + panels[:, 1])
        half = 0.5 * (panels[:, 1] - panels[:, 0])
        p12 = (mid[:, None] + half[:, None] * x12).ravel()
        p24 = (mid[:, None] + half[:, None] * x24).ravel()
        fv = np.asarray(f(np.concatenate([p12, p24])), dtype=float)
        n12 = panels.shape[0] * 12
        i12 = (fv[:n12].reshape(-1, 12) * w12).sum(axis=1) * half
        i24 = (fv[n12:].reshape(-1, 24) * w24).sum(axis=1) * half
        err = np.abs(i24 - i12)
        tol = max(atol, rtol * abs(acc_val + i24.sum()))
        ok = err <= tol * (2.0 * half) / total_len
        acc_val += i24[ok].sum()
        acc_err += err[ok].sum()
        bad = panels[~ok]
        if bad.shape[0] == 0:
            return float(acc_val)
        n_spent += 2 * bad.shape[0]
        if n_spent > max_panels:
            raise QuadratureError(
                "panel budget %d exhausted, pending error %.3e" % (max_panels, err[~ok].sum()))
        m = 0.5 * (bad[:, 0] + bad[:, 1])
        panels = np.concatenate(
            [np.stack([bad[:, 0], m], axis=1), np.stack([m, bad[:, 1]], axis=1)])
    raise QuadratureError("refinement depth exceeded on [%g, %g]" % (a, b))


def symmetric_radius(d: int, r: float) -> float:
    """Boundary radius of the symmetric problem (all weights equal).

    For reward |x|^2 in dimension d with discount r the continuation
    region is a centered ball; its radius is w*/sqrt(2r) where w* solves
    a scalar equation in the rescaled variable.  In d = 2 the condition
    is w I1(w) = 2 I0(w) and in d = 3 it is tanh(w) = w / 3.  A common
    factor on all reward weights rescales the value, not the boundary,
    so this covers every symmetric instance.
    """
    if r <= 0.0:
        raise ValueError("discount r must be > 0")
    if d == 2:
        w = brent_root(lambda t: t * bessel_I(1, t) - 2.0 * bessel_I(0, t),
                       Bracket(1.0, 5.0))
    elif d == 3:
        w = brent_root(lambda t: np.tanh(t) - t / 3.0, Bracket(2.0, 3.0))
    else:
        raise ValueError("symmetric_radius is implemented for d in {2, 3}")
    return w / np.sqrt(2.0 * r)


def resolvent_time_quadrature(x, y, r: float, rtol: float = 1e-12) -> float:
    """Resolvent kernel as the Laplace transform of the heat kernel.

    Integrates e^{-r t} p_t(x, y) dt over t in (0, inf) with the
    substitution t = s / (1 - s), giving a second route to the kernel
    that never touches Bessel functions.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d points of equal dimension")
    d = x.size
    q = float(((x - y) ** 2).sum())
    if q == 0.0:
        raise ValueError("time quadrature needs x != y")

    def integrand(s):
        t = s / (1.0 - s)
        jac = 1.0 / (1.0 - s) ** 2
        with np.errstate(divide="ignore", over="ignore"):
            lg = -r * t - 0.5 * d * np.log(2.0 * np.pi * t) - q / (2.0 * t)
        out = np.exp(lg) * jac
        return np.where(np.isfinite(out), out, 0.0)

    eps = 1e-14
    return quad_adaptive_1d(integrand, eps, 1.0 - eps, rtol=rtol)


def bessel2_value_iteration_radius(r: float, n_grid: int = 4000, dt: float = 1e-4,
                                   t_final: float | None = None) -> float:
    """Symmetric d = 2 boundary radius via a projected implicit scheme.

    Solves the radial obstacle problem for the value function of the
    symmetric two-dimensional instance: artificial-time steps of the
    killed radial heat operator, each followed by projection onto
    {V >= g}.  The fixed point is the discrete variational solution,
    whose contact-set edge is the stopping radius.  Deliberately brute
    force and free of any stopping-theory input beyond the PDE, so it
    can arbitrate the smooth-fit equation.

    The radial generator (V'' + V'/z)/2 is discretized in flux form
    (d/dz(z V')/(2z)), which is self-adjoint under the weight z; scaling
    each row by its cell volume gives a symmetric positive definite
    tridiagonal system that is Cholesky-factored once and reused every
    step.
    """
    if r <= 0.0:
        raise ValueError("discount r must be > 0")
    z_max = 4.0 * symmetric_radius(2, r)
    z = np.linspace(0.0, z_max, n_grid)
    h = z[1] - z[0]
    g = z * z
    if t_final is None:
        t_final = 64.0 / r

    # cell volumes (weight z): interior z_i h, origin cell h^2/8; flux
    # coefficient between nodes i and i+1 is z_{i+1/2}/h
    vol = z * h
    vol[0] = h * h / 8.0
    flux = (z[:-1] + 0.5 * h) / h
    # unknowns 0 .. n-2; the last node carries Dirichlet data V = g deep
    # in the contact set and is folded into the right-hand side
    m = n_grid - 1
    flux_left = np.concatenate([[0.0], flux[: m - 1]])  # zero flux at the origin
    diag = vol[:m] * (1.0 + r * dt) + 0.5 * dt * (flux_left + flux[:m])
    off = -0.5 * dt * flux[: m - 1]
    ab = np.zeros((2, m))
    ab[0, 1:] = off
    ab[1] = diag
    chol = cholesky_banded(ab)

    v = g.copy()
    g_end_flux = 0.5 * dt * flux[m - 1] * g[-1]
    steps = int(np.ceil(t_final / dt))
    scale = float(np.max(g))
    check_every = 200
    v_prev_check = v.copy()
    for step in range(1, steps + 1):
        rhs = vol[:m] * v[:m]
        rhs[-1] += g_end_flux
        v[:m] = np.maximum(cho_solve_banded((chol, False), rhs), g[:m])
        if step % check_every == 0:
            if float(np.max(np.abs(v - v_prev_check))) <= 1e-13 * scale:
                break
            v_prev_check[:] = v
    else:
        raise ConvergenceError("value iteration still moving after t = %g" % t_final)

    contact = (v - g) <= 1e-8 * scale
    # first contacted node past the origin marks the stopping radius
    idx = int(np.argmax(contact[1:])) + 1
    if not contact[idx] or idx <= 1 or idx >= n_grid - 1:
        raise ConvergenceError("contact set not located inside the grid")
    return float(0.5 * (z[idx - 1] + z[idx]))
