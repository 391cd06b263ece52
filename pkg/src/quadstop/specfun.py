"""Modified Bessel functions for the killed-Brownian-motion kernels.

The resolvent kernel of Brownian motion killed at rate r involves the
Macdonald function K_nu with nu = (d-2)/2, so half-integer and integer
orders are the ones that matter.  Everything here is evaluated from
first principles:

* half-integer orders: K_{1/2}(u) = sqrt(pi/(2u)) e^{-u} and the stable
  upward recurrence K_{nu+1} = K_{nu-1} + (2 nu / u) K_nu, which for
  these orders terminates in a polynomial in 1/u;
* integer orders 0 and 1: the exact logarithmic power series for
  u <= 2, a spectrally convergent trapezoid rule on
  int_0^inf e^{-u (cosh t - 1)} cosh(nu t) dt for 2 < u < 16, and the
  divergent asymptotic series with optimal truncation for u >= 16;
* integer orders >= 2 by the same upward recurrence;
* I_0 and I_1 by their ascending series up to u = 30 and the asymptotic
  series beyond.

All branch boundaries were chosen so that measured relative error stays
below ~1e-14 on the contract range.  Functions accept scalars or numpy
arrays and return matching shapes.  Scaled and log variants are provided
because K_nu(u) underflows past u ~ 745 while ratios of the kernel stay
perfectly finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015328606065120900824024

_SQRT_HALF_PI = np.sqrt(np.pi / 2.0)

# trapezoid grid for the integral representation on 2 < u < 16; the
# integrand decays like exp(-u cosh t) so t = 4 is already below 1e-20
# of the peak at u = 2, and h = 0.2 puts the discretization error near
# e^{-pi^2/h} ~ 1e-21
_TRAP_T = 0.2 * np.arange(21)
_TRAP_W = np.full(21, 0.2)
_TRAP_W[0] = 0.1
_TRAP_COSHM1 = np.cosh(_TRAP_T) - 1.0


@dataclass(frozen=True)
class HalfIntOrder:
    """Order nu = twice_order / 2 of a Macdonald function.

    Restricting to twice-integers keeps every order reachable by exact
    closed forms plus recurrences; this is all the kernel formulas need
    for any dimension d >= 1 (nu = |d-2|/2).
    """

    twice_order: int

    def __post_init__(self):
        if not isinstance(self.twice_order, (int, np.integer)):
            raise ValueError("twice_order must be an integer, got %r" % (self.twice_order,))
        if self.twice_order < 0:
            raise ValueError("twice_order must be >= 0, got %d" % self.twice_order)

    @classmethod
    def from_order(cls, nu) -> "HalfIntOrder":
        if isinstance(nu, HalfIntOrder):
            return nu
        t = 2.0 * float(nu)
        if not np.isfinite(t) or abs(t - round(t)) > 1e-12:
            raise ValueError("order must be a non-negative multiple of 1/2, got %r" % (nu,))
        return cls(int(round(t)))

    @property
    def order(self) -> float:
        return self.twice_order / 2.0

    @property
    def is_half_odd(self) -> bool:
        return self.twice_order % 2 == 1


def _as_positive_array(u, name="u"):
    arr = np.asarray(u, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise ValueError("%s must be finite and > 0" % name)
    return arr


def _k01_series(u):
    """Unscaled (K0, K1) from the exact logarithmic series, u <= 2."""
    q = u * u / 4.0
    # I0 and the companion sum for K0
    term = np.ones_like(u)
    i0 = np.ones_like(u)
    s0 = np.zeros_like(u)
    hk = 0.0
    for k in range(1, 40):
        term = term * q / (k * k)
        i0 = i0 + term
        hk += 1.0 / k
        s0 = s0 + term * hk
    lg = np.log(u / 2.0) + EULER_GAMMA
    k0 = -lg * i0 + s0
    # I1 and the companion sum for K1: psi(1) = -g, psi(k+1) = -g + h_k
    term = np.ones_like(u)  # q^k / (k! (k+1)!) at k = 0
    i1s = np.zeros_like(u)
    s1 = np.zeros_like(u)
    hk = 0.0
    hk1 = 1.0
    for k in range(0, 40):
        if k > 0:
            term = term * q / (k * (k + 1))
            hk += 1.0 / k
            hk1 += 1.0 / (k + 1)
        i1s = i1s + term
        s1 = s1 + term * (-2.0 * EULER_GAMMA + hk + hk1)
    i1 = (u / 2.0) * i1s
    k1 = 1.0 / u + np.log(u / 2.0) * i1 - (u / 4.0) * s1
    return k0, k1


def _k01_mid_scaled(u):
    """Scaled (e^u K0, e^u K1) by trapezoid on the cosh representation."""
    e = np.exp(-np.multiply.outer(u, _TRAP_COSHM1))
    k0 = e @ _TRAP_W
    k1 = e @ (np.cosh(_TRAP_T) * _TRAP_W)
    return k0, k1


def _k_asym_scaled(nu, u):
    """Scaled e^u K_nu(u) from the large-u series, optimally truncated."""
    mu = 4.0 * nu * nu
    s = np.ones_like(u)
    term = np.ones_like(u)
    prev = np.full_like(u, np.inf)
    for k in range(1, 40):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k) / u
        grow = np.abs(term) >= prev
        term = np.where(grow, 0.0, term)  # freeze once terms stop shrinking
        s = s + term
        prev = np.where(grow, prev, np.abs(term))
        if np.all(np.abs(term) <= 1e-18 * np.abs(s)):
            break
    return np.sqrt(np.pi / (2.0 * u)) * s


def _k_int_scaled(n, u):
    """Scaled e^u K_n(u) for integer n >= 0, array u > 0."""
    k0 = np.empty_like(u)
    k1 = np.empty_like(u)
    lo = u <= 2.0
    mid = (u > 2.0) & (u < 16.0)
    hi = u >= 16.0
    if lo.any():
        a, b = _k01_series(u[lo])
        e = np.exp(u[lo])
        k0[lo], k1[lo] = a * e, b * e
    if mid.any():
        k0[mid], k1[mid] = _k01_mid_scaled(u[mid])
    if hi.any():
        k0[hi] = _k_asym_scaled(0.0, u[hi])
        k1[hi] = _k_asym_scaled(1.0, u[hi])
    if n == 0:
        return k0
    for m in range(1, n):
        k0, k1 = k1, k0 + (2.0 * m / u) * k1
    return k1


def _k_half_scaled(twice_order, u):
    """Scaled e^u K_{m/2}(u), odd m: sqrt(pi/2u) times a polynomial in 1/u."""
    f_prev = np.ones_like(u)          # nu = 1/2
    if twice_order == 1:
        f = f_prev
    else:
        f = 1.0 + 1.0 / u             # nu = 3/2
        nu = 1.5
        while nu < twice_order / 2.0:
            f_prev, f = f, f_prev + (2.0 * nu / u) * f
            nu += 1.0
    return np.sqrt(np.pi / (2.0 * u)) * f


def _dispatch_scaled(order: HalfIntOrder, u):
    if order.is_half_odd:
        return _k_half_scaled(order.twice_order, u)
    return _k_int_scaled(order.twice_order // 2, u)


def bessel_K(order, u):
    """Macdonald function K_nu(u) for nu a non-negative multiple of 1/2.

    Parameters
    ----------
    order : HalfIntOrder, int or float
        The order nu; must be an exact multiple of 1/2.
    u : float or ndarray
        Argument, u > 0.

    Returns
    -------
    float or ndarray
        K_nu(u).  Underflows to 0.0 for large u (u beyond ~745); use
        `bessel_K_scaled` or `bessel_K_log` when ratios are needed.
    """
    ho = HalfIntOrder.from_order(order)
    arr = _as_positive_array(u)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = _dispatch_scaled(ho, arr) * np.exp(-arr)
    return float(out[0]) if scalar else out


def bessel_K_scaled(order, u):
    """e^u K_nu(u); finite for every u > 0 representable as a double."""
    ho = HalfIntOrder.from_order(order)
    arr = _as_positive_array(u)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = _dispatch_scaled(ho, arr)
    return float(out[0]) if scalar else out


def bessel_K_log(order, u):
    """log K_nu(u), stable for arguments far past the underflow point."""
    ho = HalfIntOrder.from_order(order)
    arr = _as_positive_array(u)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.log(_dispatch_scaled(ho, arr)) - arr
    return float(out[0]) if scalar else out


def bessel_I(order, u):
    """Modified Bessel function I_0 or I_1.

    Parameters
    ----------
    order : int
        0 or 1.
    u : float or ndarray
        Argument with 0 <= u <= 700 (I_nu(u) overflows a double soon
        after; the guard raises OverflowError rather than returning inf).
    """
    if order not in (0, 1):
        raise ValueError("bessel_I supports orders 0 and 1, got %r" % (order,))
    arr = np.asarray(u, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr < 0.0)):
        raise ValueError("u must be finite and >= 0")
    if arr.size and np.any(arr > 700.0):
        raise OverflowError("bessel_I argument exceeds the overflow guard u <= 700")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    lo = arr <= 30.0
    if lo.any():
        out[lo] = _i_series(order, arr[lo])
    if (~lo).any():
        out[~lo] = _i_asym(order, arr[~lo])
    return float(out[0]) if scalar else out


def _i_series(nu, u):
    q = u * u / 4.0
    s = np.ones_like(u) if nu == 0 else u / 2.0
    t = s.copy()
    for k in range(1, 80):
        t = t * q / (k * (k + nu))
        s = s + t
        if np.all(t <= 1e-17 * np.maximum(s, 1e-300)):
            break
    return s


def _i_asym(nu, u):
    mu = 4.0 * nu * nu
    s = np.ones_like(u)
    term = np.ones_like(u)
    for k in range(1, 40):
        term = term * -(mu - (2 * k - 1) ** 2) / (8.0 * k) / u
        s = s + term
        if np.all(np.abs(term) <= 1e-18 * np.abs(s)):
            break
    return np.exp(u) / np.sqrt(2.0 * np.pi * u) * s
