"""Quadratic-reward stopping problem and its geometry.

Defines the problem data (discount r, coefficients lambda_i of the
reward g(x) = sum lambda_i x_i^2), the affine polar coordinates
x_k = rho omega_k / sqrt(lambda_k) in which g = rho^2, the negative set
{g <= beta^2} of the excess generator, the star-shaped boundary
container produced by the solver, and the membership checks for the
class of candidate continuation regions (closed, bounded, containing
the negative set, star-shaped, reflection-symmetric, and excluded from
the far-quadrant box).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grids import SphereGrid
from .oracles import symmetric_radius


@dataclass(frozen=True)
class QuadraticProblem:
    """Reward g(x) = sum_i lambda_i x_i^2 stopped under discount r."""

    r: float
    lambdas: tuple

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r > 0.0):
            raise ValueError("discount rate r must be finite and > 0, got %r" % (self.r,))
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise ValueError("lambdas must be a vector of length >= 2")
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0.0):
            raise ValueError("all reward coefficients must be finite and > 0")
        object.__setattr__(self, "lambdas", tuple(float(v) for v in lam))

    @property
    def d(self) -> int:
        return len(self.lambdas)

    @property
    def lam(self) -> np.ndarray:
        return np.asarray(self.lambdas, dtype=float)

    @property
    def sqrt_lam(self) -> np.ndarray:
        return np.sqrt(self.lam)

    @property
    def beta_sq(self) -> float:
        """Affine polar radius^2 of the negative set, (sum lambda_i)/r."""
        return float(self.lam.sum() / self.r)

    @property
    def beta(self) -> float:
        return float(np.sqrt(self.beta_sq))

    def reward(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise ValueError("x has dimension %d, expected %d" % (x.shape[-1], self.d))
        out = (self.lam * x * x).sum(axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def excess_generator(self, x):
        """(r - L)g at x for L = Laplacian/2: equals r (g(x) - beta^2)."""
        return self.r * (self.reward(x) - self.beta_sq)

    def negative_set_contains(self, x) -> bool:
        out = self.reward(x) <= self.beta_sq
        return bool(out) if np.ndim(out) == 0 else out

    def to_cartesian(self, omega, rho):
        """Point x with x_k = rho omega_k / sqrt(lambda_k); g(x) = rho^2."""
        omega = np.asarray(omega, dtype=float)
        rho = np.asarray(rho, dtype=float)
        if omega.shape[-1] != self.d:
            raise ValueError("omega has dimension %d, expected %d" % (omega.shape[-1], self.d))
        if np.any(rho < 0.0):
            raise ValueError("rho must be >= 0")
        out = rho[..., None] * omega / self.sqrt_lam
        return out

    def to_polar(self, x):
        """Inverse of to_cartesian: (omega, rho) with rho = sqrt(g(x)).

        At x = 0 the angle is undefined; the sentinel omega = e_1 is
        returned together with rho = 0.0 (callers detect the flag by
        rho == 0).
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValueError("to_polar expects a single point of dimension %d" % self.d)
        z = self.sqrt_lam * x
        rho = float(np.sqrt(z @ z))
        if rho == 0.0:
            omega = np.zeros(self.d)
            omega[0] = 1.0
            return omega, 0.0
        return z / rho, rho


def load_problem(source) -> QuadraticProblem:
    """Problem from a JSON file path or an already-parsed mapping.

    Expected keys: `r` (positive number) and `lambdas` (array of >= 2
    positive numbers).  Errors name the offending key.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            try:
                source = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError("problem config is not valid JSON: %s" % exc) from exc
    if not isinstance(source, dict):
        raise ValueError("problem config must be a JSON object")
    if "r" not in source:
        raise ValueError("problem config is missing key 'r'")
    if "lambdas" not in source:
        raise ValueError("problem config is missing key 'lambdas'")
    r = source["r"]
    if not isinstance(r, (int, float)) or isinstance(r, bool) or not np.isfinite(r) or r <= 0:
        raise ValueError("key 'r' must be a positive number, got %r" % (r,))
    lams = source["lambdas"]
    if (not isinstance(lams, (list, tuple)) or len(lams) < 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in lams)):
        raise ValueError("key 'lambdas' must be an array of >= 2 numbers, got %r" % (lams,))
    if any(not np.isfinite(v) or v <= 0 for v in lams):
        raise ValueError("key 'lambdas' must contain only positive finite numbers")
    return QuadraticProblem(float(r), tuple(float(v) for v in lams))


@dataclass(frozen=True)
class StarBoundary:
    """Star-shaped boundary: affine polar radius rho_i per grid node.

    Containment of the negative set (rho_i >= beta) is a property of a
    *solved* boundary, checked by `class_membership_check`, not a
    construction invariant: the checker must be able to represent
    violating boundaries in order to report them.
    """

    grid: SphereGrid
    radii: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        if radii.shape != (self.grid.n,):
            raise ValueError("need exactly one radius per grid node")
        if not np.all(np.isfinite(radii)) or np.any(radii <= 0.0):
            raise ValueError("radii must be finite and > 0")
        object.__setattr__(self, "radii", radii)

    def cartesian_points(self, p: QuadraticProblem) -> np.ndarray:
        """Boundary nodes in state space, one row per grid node."""
        if p.d != self.grid.d:
            raise ValueError("problem dimension %d != grid dimension %d" % (p.d, self.grid.d))
        return p.to_cartesian(self.grid.nodes, self.radii)


@dataclass(frozen=True)
class ClassCheckReport:
    closed_ok: bool
    contains_negative_set: bool
    bounded_ok: bool
    star_shaped_ok: bool
    symmetry_ok: bool
    box_ok: bool
    worst_violation: float

    @property
    def passed(self) -> bool:
        return (self.closed_ok and self.contains_negative_set and self.bounded_ok
                and self.star_shaped_ok and self.symmetry_ok and self.box_ok)


def _sign_flip_permutations(nodes: np.ndarray):
    """Index maps sending each node to its image under coordinate flips.

    Yields one permutation per single-axis reflection, provided the
    grid is invariant under it (every flipped node matches a grid node
    to 1e-9); non-invariant flips are skipped since there is nothing to
    compare.
    """
    d = nodes.shape[1]
    for axis in range(d):
        flipped = nodes.copy()
        flipped[:, axis] = -flipped[:, axis]
        d2 = ((flipped[:, None, :] - nodes[None, :, :]) ** 2).sum(axis=2)
        perm = np.argmin(d2, axis=1)
        if np.max(np.sqrt(d2[np.arange(len(perm)), perm])) <= 1e-9:
            yield perm


def class_membership_check(p: QuadraticProblem, b: StarBoundary,
                           tol: float = 1e-6, radius_cap_factor: float = 50.0
                           ) -> ClassCheckReport:
    """Checks that a boundary describes an admissible continuation set.

    Verifies, up to `tol`: the region is closed and bounded (finite
    radii under a cap), contains the negative set (rho_i >= beta),
    is star-shaped (structural: the rho(omega) parametrization cannot
    express anything else), is symmetric under every coordinate
    reflection the grid supports, and, for d = 2, stays out of the
    far-quadrant box {|x_small| >= alpha^2 R, |x_big| >= R} that is
    provably inside the stopping region (R the symmetric-case radius,
    alpha^2 the ratio of reward coefficients).

    Never raises: violations are reported through the flags and the
    magnitude of the worst one.
    """
    rho = b.radii
    beta = p.beta
    violations = [0.0]

    closed_ok = bool(np.all(np.isfinite(rho)))
    neg_viol = float(np.max(beta - rho))
    contains_negative_set = neg_viol <= tol
    violations.append(neg_viol)
    cap = radius_cap_factor * beta
    cap_viol = float(np.max(rho - cap))
    bounded_ok = closed_ok and cap_viol <= tol
    violations.append(cap_viol)
    star_shaped_ok = True  # structural: single-valued rho(omega) about 0

    sym_viol = 0.0
    for perm in _sign_flip_permutations(b.grid.nodes):
        sym_viol = max(sym_viol, float(np.max(np.abs(rho - rho[perm]))))
    symmetry_ok = sym_viol <= tol
    violations.append(sym_viol)

    box_ok = True
    if p.d == 2:
        lam = p.lam
        alpha_sq = float(lam.max() / lam.min())
        r_sym = symmetric_radius(2, p.r)
        pts = np.abs(b.cartesian_points(p))
        small = int(np.argmin(lam))  # cheap coordinate, elongated axis
        big = 1 - small
        box_viol = float(np.max(np.minimum(pts[:, small] - alpha_sq * r_sym,
                                           pts[:, big] - r_sym)))
        box_ok = box_viol <= tol
        violations.append(box_viol)

    return ClassCheckReport(
        closed_ok=closed_ok,
        contains_negative_set=contains_negative_set,
        bounded_ok=bounded_ok,
        star_shaped_ok=star_shaped_ok,
        symmetry_ok=symmetry_ok,
        box_ok=box_ok,
        worst_violation=float(max(violations)),
    )
