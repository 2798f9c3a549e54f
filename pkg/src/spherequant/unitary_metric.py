"""Geodesic distance of U(N) and of its universal cover for the operator norm.

The distance between unitaries u, v is max_i |arg lambda_i| over the
eigenvalues of u^{-1} v, with arg taken in (-pi, pi].  On the universal
cover, realised as pairs (u, phi) with det u = e^{i phi}, the distance is
the minimum of max_i |theta_i| over the affine lattice of angle vectors
theta with e^{i theta_i} = lambda_i and sum theta_i = psi - phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

TWO_PI = 2.0 * math.pi


class DimensionMismatchError(ValueError):
    pass


class LatticeInvariantError(ValueError):
    pass


@dataclass(frozen=True)
class Unitary:
    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", m)
        n = m.shape[0]
        if m.shape != (n, n):
            raise ValueError("expected a square matrix")
        if np.max(np.abs(m.conj().T @ m - np.eye(n))) > 1e-10:
            raise ValueError("matrix is not unitary to 1e-10")

    @property
    def dim(self):
        return self.mat.shape[0]


@dataclass(frozen=True)
class UnitaryWithPhase:
    """Element of the universal cover: unitary u with det u = e^{i phase}."""

    u: Unitary
    phase: float

    def __post_init__(self):
        det = np.linalg.det(self.u.mat)
        if abs(det - np.exp(1j * self.phase)) > 1e-8:
            raise ValueError("phase is not a lift of arg det u")

    @property
    def dim(self):
        return self.u.dim


@dataclass(frozen=True)
class LatticeProblem:
    """Minimise max_i |theta_i| with theta_i = base_args_i mod 2pi and
    fixed sum target_sum."""

    base_args: np.ndarray
    target_sum: float
    tol: float = 1e-8

    def __post_init__(self):
        b = np.asarray(self.base_args, dtype=float)
        object.__setattr__(self, "base_args", b)
        if np.any(b <= -math.pi - 1e-12) or np.any(b > math.pi + 1e-12):
            raise LatticeInvariantError("base args must lie in (-pi, pi]")
        k = (self.target_sum - b.sum()) / TWO_PI
        if abs(k - round(k)) > self.tol / TWO_PI * 10 + 1e-9:
            raise LatticeInvariantError(
                "target sum minus the arg sum is not a multiple of 2pi"
            )

    @property
    def offset_sum(self):
        """The integer K with sum(theta) = sum(base_args) + 2 pi K."""
        return int(round((self.target_sum - self.base_args.sum()) / TWO_PI))


def principal_args(eigenvalues):
    """Arguments in (-pi, pi]; np.angle already resolves -pi to +pi."""
    args = np.angle(np.asarray(eigenvalues, dtype=complex))
    return np.where(args <= -math.pi, math.pi, args)


def distance(u: Unitary, v: Unitary) -> float:
    """Operator-norm geodesic distance on U(N)."""
    if u.dim != v.dim:
        raise DimensionMismatchError("unitaries of different sizes")
    lam = np.linalg.eigvals(u.mat.conj().T @ v.mat)
    return float(np.max(np.abs(principal_args(lam))))


def _feasible(problem: LatticeProblem, radius: float):
    """Offset bounds per coordinate for |theta_i| <= radius, or None."""
    b = problem.base_args
    lo = np.ceil((-radius - b) / TWO_PI - 1e-12).astype(np.int64)
    hi = np.floor((radius - b) / TWO_PI + 1e-12).astype(np.int64)
    if np.any(lo > hi):
        return None
    k = problem.offset_sum
    if not (lo.sum() <= k <= hi.sum()):
        return None
    return lo, hi


def solve_lattice(problem: LatticeProblem):
    """Exact minimiser of max_i |theta_i| over the constrained lattice.

    The optimum radius equals |base_args_i + 2 pi n| for some coordinate,
    so it is found by scanning the sorted finite candidate set; for each
    radius feasibility amounts to interval conditions on the integer
    offsets and their sum.
    """
    b = problem.base_args
    k = problem.offset_sum
    n_max = abs(k) + b.size + 2
    offsets = TWO_PI * np.arange(-n_max, n_max + 1)
    candidates = np.unique(np.abs(b[:, None] + offsets[None, :]))

    lo_idx, hi_idx = 0, candidates.size - 1
    if _feasible(problem, candidates[hi_idx]) is None:
        raise LatticeInvariantError("lattice problem is infeasible")
    # feasibility is monotone in the radius: bisect for the smallest one
    while lo_idx < hi_idx:
        mid = (lo_idx + hi_idx) // 2
        if _feasible(problem, candidates[mid]) is None:
            lo_idx = mid + 1
        else:
            hi_idx = mid
    radius = float(candidates[lo_idx])
    lo, hi = _feasible(problem, radius)

    offsets = lo.copy()
    deficit = k - lo.sum()
    for i in range(b.size):
        if deficit == 0:
            break
        step = min(deficit, hi[i] - lo[i])
        offsets[i] += step
        deficit -= step
    theta = b + TWO_PI * offsets
    return radius, theta


def _lattice_problem_between(a: UnitaryWithPhase, b: UnitaryWithPhase):
    if a.dim != b.dim:
        raise DimensionMismatchError("elements of different sizes")
    w = b.u.mat @ a.u.mat.conj().T
    # Schur form of a normal matrix: diagonal with orthonormal eigenbasis
    t, vecs = scipy.linalg.schur(w, output="complex")
    args = principal_args(np.diag(t))
    return LatticeProblem(args, b.phase - a.phase), vecs


def cover_distance(a: UnitaryWithPhase, b: UnitaryWithPhase) -> float:
    """Operator-norm geodesic distance on the universal cover of U(N)."""
    problem, _ = _lattice_problem_between(a, b)
    radius, _ = solve_lattice(problem)
    return radius


def minimizing_curve(a: UnitaryWithPhase, b: UnitaryWithPhase) -> np.ndarray:
    """Hermitian H with e^{iH} a.u = b.u, tr H = phase gap, |H| = distance.

    The curve t -> (e^{itH} a.u, a.phase + t tr H) is a minimizing geodesic
    from a to b.
    """
    problem, vecs = _lattice_problem_between(a, b)
    _, theta = solve_lattice(problem)
    h = (vecs * theta) @ vecs.conj().T
    return 0.5 * (h + h.conj().T)


def lift_path(samples, start_phase: float = 0.0) -> UnitaryWithPhase:
    """Endpoint of the lift of a sampled unitary path to the cover.

    The determinant argument is accumulated as the sum of the principal
    eigenvalue arguments of u_i^{-1} u_{i+1}, which is the exact increment
    along the minimizing interpolation; consecutive samples must be closer
    than pi/2 in distance.
    """
    mats = [u.mat if isinstance(u, Unitary) else np.asarray(u) for u in samples]
    phase = float(start_phase)
    for prev, cur in zip(mats[:-1], mats[1:]):
        args = principal_args(np.linalg.eigvals(prev.conj().T @ cur))
        if np.max(np.abs(args)) >= 0.5 * math.pi:
            raise ValueError("path samples too far apart to lift the phase")
        phase += float(args.sum())
    return UnitaryWithPhase(Unitary(mats[-1]), phase)
