"""From a 3D model to a 1D one: minimizer, projection vector, 1D stepset.

The inventory S(x,y,z) is a posynomial, hence convex in log-coordinates,
so Newton's method with an analytic Hessian finds its unique interior
minimizer.  The minimizer determines a half-space containing the first
orthant whose walks share the orthant walks' exponential growth; the
stepset is projected onto the (rationalized) normal of that half-space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateProjectionError,
    NoConvergenceError,
    OrthantNotContainedError,
)
from .stepsets import Step3, WeightedStepSet3, drift

LOG_ONE_EPS = 1e-8  # |log comp| below this counts as "component equals 1"


@dataclass(frozen=True)
class Minimizer:
    x_star: float
    y_star: float
    z_star: float
    s_min: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x_star, self.y_star, self.z_star)


@dataclass(frozen=True)
class ProjectionVector:
    a: float
    b: float
    c: float
    branch: str  # "generic" | "unit-z" | "trivial"

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class IntegerProjection:
    p: int
    q: int
    r: int
    denominator: int
    max_abs_error: float

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.p, self.q, self.r)


@dataclass(frozen=True)
class Atom1D:
    atom_id: int
    value: int
    weight: int
    source: Optional[Step3]


@dataclass(frozen=True)
class StepSet1D:
    atoms: tuple[Atom1D, ...]

    @property
    def max_down(self) -> int:
        return max(-a.value for a in self.atoms if a.value < 0)

    @property
    def max_up(self) -> int:
        return max(a.value for a in self.atoms if a.value > 0)

    @property
    def total_weight(self) -> int:
        return sum(a.weight for a in self.atoms)


def stepset1d_from_values(values) -> StepSet1D:
    """Build a 1D stepset directly from (value, weight) pairs.

    Synthetic sources embed the walk along the x axis; used for tests and
    for studying 1D models on their own.
    """
    atoms = []
    for i, (v, w) in enumerate(values):
        atoms.append(Atom1D(i, int(v), int(w), Step3(int(v), 0, 0)))
    ss = StepSet1D(tuple(atoms))
    _check_both_signs(ss)
    return ss


def _check_both_signs(ss: StepSet1D) -> None:
    has_up = any(a.value > 0 for a in ss.atoms)
    has_down = any(a.value < 0 for a in ss.atoms)
    if not (has_up and has_down):
        raise DegenerateProjectionError(
            "projected values are all nonnegative or all nonpositive"
        )


def minimize_inventory(
    stepset: WeightedStepSet3, tol: float = 1e-12, max_iter: int = 200
) -> Minimizer:
    """Minimize S over the open positive octant.

    Works in theta = (log x, log y, log z), where S is smooth and
    strictly convex (the span condition makes the steps span R^3, so the
    Hessian is positive definite).  Newton with step halving from 0.
    """
    S = np.array([list(s) for s, _ in stepset.entries], dtype=float)
    w = np.array([wt for _, wt in stepset.entries], dtype=float)
    theta = np.zeros(3)

    def value_grad_hess(th):
        e = w * np.exp(S @ th)
        val = e.sum()
        grad = S.T @ e
        hess = (S * e[:, None]).T @ S
        return val, grad, hess

    val, grad, hess = value_grad_hess(theta)
    for _ in range(max_iter):
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= tol * val:
            break
        step = np.linalg.solve(hess, -grad)
        if float(np.linalg.norm(step)) <= 1e-14 * (1.0 + float(np.linalg.norm(theta))):
            break
        lam = 1.0
        for _ in range(60):
            cand = theta + lam * step
            cval, cgrad, chess = value_grad_hess(cand)
            if cval < val:
                theta, val, grad, hess = cand, cval, cgrad, chess
                break
            lam *= 0.5
        else:
            # the value refuses to move in double precision; with the
            # gradient this small the iterate error is already ~1e-10
            if gnorm <= 1e-8 * val:
                break
            raise NoConvergenceError(
                "line search stalled", last_iterate=tuple(np.exp(theta)), residual=gnorm
            )
    else:
        raise NoConvergenceError(
            "Newton budget exhausted",
            last_iterate=tuple(np.exp(theta)),
            residual=float(np.linalg.norm(grad)),
        )
    x, y, z = np.exp(theta)
    return Minimizer(float(x), float(y), float(z), float(val))


def projection_vector(minimizer: Minimizer, eps: float = LOG_ONE_EPS) -> ProjectionVector:
    """Half-space normal derived from the minimizer.

    The reference coordinate is the one with the largest |log| (rather
    than always the third), which avoids dividing by a near-zero
    logarithm; the half-space is unchanged by the positive rescaling.
    """
    logs = [math.log(c) for c in minimizer.as_tuple()]
    if all(abs(l) <= eps for l in logs):
        return ProjectionVector(1.0, 1.0, 1.0, "trivial")
    ref = max(range(3), key=lambda i: abs(logs[i]))
    v = [0.0 if abs(l) <= eps else l / logs[ref] for l in logs]
    if any(c < 0 for c in v):
        raise OrthantNotContainedError(
            "projection vector %r has a negative component; the half-space "
            "would not contain the first orthant" % (tuple(v),)
        )
    if abs(logs[2]) <= eps:
        branch = "unit-z"
    else:
        branch = "generic"
        v = [c / v[2] for c in v]  # report in the z-normalized form
    return ProjectionVector(v[0], v[1], v[2], branch)


def rationalize(v: ProjectionVector, max_den: int = 8) -> IntegerProjection:
    """Integer direction approximating v over a small shared denominator.

    v is scaled so its smallest nonzero component is 1, each component is
    approximated by a fraction over a common denominator d <= max_den
    (exhaustively, minimizing the max absolute error, ties to the smaller
    d), and the result is multiplied out and reduced by the gcd.  An
    imperfect approximation only lowers acceptance efficiency; sampled
    orthant walks stay uniform.
    """
    comps = list(v.as_tuple())
    nonzero = [c for c in comps if c != 0.0]
    scale = min(nonzero)
    scaled = [c / scale for c in comps]
    best = None
    for d in range(1, max(1, int(max_den)) + 1):
        ints = [round(c * d) for c in scaled]
        err = max(abs(c - n / d) for c, n in zip(scaled, ints))
        if best is None or err < best[0] - 1e-15:
            best = (err, d, ints)
    err, d, ints = best
    g = math.gcd(math.gcd(abs(ints[0]), abs(ints[1])), abs(ints[2]))
    if g > 1:
        ints = [n // g for n in ints]
    return IntegerProjection(ints[0], ints[1], ints[2], d, float(err))


def project_stepset(stepset: WeightedStepSet3, ip: IntegerProjection) -> StepSet1D:
    """One atom per stepset entry: value = (p,q,r).step, weight kept.

    Atoms with equal values stay distinct so a sampled word lifts to a
    unique 3D walk.
    """
    atoms = []
    for i, (s, w) in enumerate(stepset.entries):
        value = ip.p * s.dx + ip.q * s.dy + ip.r * s.dz
        atoms.append(Atom1D(i, value, w, s))
    ss = StepSet1D(tuple(atoms))
    _check_both_signs(ss)
    return ss


def inventory_1d(ss: StepSet1D, u: float) -> float:
    return sum(a.weight * u**a.value for a in ss.atoms)


def analyze_1d(ss: StepSet1D, tol: float = 1e-14, max_iter: int = 200):
    """Critical point and dominant singularity of the 1D model.

    A(u) = sum w u^value is strictly convex on u > 0 when both signs are
    present, so A'(u) = 0 has a unique root tau.  The singularity of the
    walks-staying-nonnegative generating function is 1/A(max(tau, 1)):
    the max covers positive-drift projections, where growth is A(1).
    Solved by Newton in t = log u with a bisection safeguard.
    """
    _check_both_signs(ss)
    vals = [(a.value, a.weight) for a in ss.atoms]

    def dA(t):
        return sum(w * v * math.exp(v * t) for v, w in vals)

    def d2A(t):
        return sum(w * v * v * math.exp(v * t) for v, w in vals)

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if dA(lo) < 0:
            break
        lo *= 2.0
    for _ in range(200):
        if dA(hi) > 0:
            break
        hi *= 2.0
    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = dA(t)
        if f < 0:
            lo = t
        else:
            hi = t
        step = f / d2A(t)
        nt = t - step
        if not (lo < nt < hi):
            nt = 0.5 * (lo + hi)
        if abs(nt - t) <= tol * max(1.0, abs(t)):
            t = nt
            break
        t = nt
    else:
        raise NoConvergenceError("critical point iteration exhausted")
    tau = math.exp(t)
    a_tau = inventory_1d(ss, tau)
    rho = 1.0 / inventory_1d(ss, max(tau, 1.0))
    return tau, a_tau, rho
