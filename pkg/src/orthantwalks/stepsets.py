"""Weighted 3D stepsets: validation, drift and the inventory polynomial.

A model is a finite list of integer step vectors with positive integer
weights.  The inventory is the Laurent polynomial
``S(x, y, z) = sum w * x^i y^j z^k``; its behaviour on the open positive
octant drives the choice of half-space later in the pipeline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import NonPositivePointError, SpanViolationError, ZeroStepError


class Step3(NamedTuple):
    dx: int
    dy: int
    dz: int


@dataclass(frozen=True)
class WeightedStepSet3:
    """Validated stepset: distinct steps, positive integer weights."""

    entries: tuple[tuple[Step3, int], ...]

    @property
    def total_weight(self) -> int:
        return sum(w for _, w in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Drift3:
    dx: int
    dy: int
    dz: int
    cls: str  # "zero" | "reluctant" | "non-positive-mixed" | "other"

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.dx, self.dy, self.dz)


def _cross(a: Sequence[int], b: Sequence[int]) -> tuple[int, int, int]:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _span_witness(steps: Sequence[Step3]):
    """Return a direction u with u.s >= 0 for all steps, or None.

    The polar cone {u : u.s >= 0 for all s} is polyhedral, so when it is
    nonzero it contains a candidate direction that is either a coordinate
    axis, a step, or a cross product of two constraint vectors.  Stepsets
    are tiny, so the cubic enumeration beats pulling in an LP solver.
    """
    axes = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    candidates: list[tuple[int, int, int]] = []
    for a in axes:
        candidates.append(a)
        candidates.append(tuple(-c for c in a))
    for s in steps:
        candidates.append(tuple(s))
        candidates.append(tuple(-c for c in s))
    vecs = [tuple(s) for s in steps] + axes
    for i, a in enumerate(vecs):
        for b in vecs[i + 1 :]:
            c = _cross(a, b)
            if c != (0, 0, 0):
                candidates.append(c)
                candidates.append(tuple(-x for x in c))
    for u in candidates:
        if all(u[0] * s.dx + u[1] * s.dy + u[2] * s.dz >= 0 for s in steps):
            g = math.gcd(math.gcd(abs(u[0]), abs(u[1])), abs(u[2]))
            return tuple(c // g for c in u)
    return None


def validate_stepset(raw: Iterable[tuple[Sequence[int], int]]) -> WeightedStepSet3:
    """Validate and normalize a raw (step, weight) list.

    Duplicate steps are merged by adding weights (the source notation for
    repeated steps is a multiset).  Raises ZeroStepError for a (0,0,0)
    step and SpanViolationError (with a witness direction) when the steps
    fit in a closed half-space through the origin.
    """
    merged: dict[Step3, int] = {}
    order: list[Step3] = []
    items = list(raw)
    if not items:
        raise ZeroStepError("empty stepset")
    for step, weight in items:
        s = Step3(*(int(c) for c in step))
        w = int(weight)
        if s == (0, 0, 0):
            raise ZeroStepError("step (0,0,0) is not allowed")
        if w < 1:
            raise ZeroStepError("weights must be positive integers, got %r" % (weight,))
        if s not in merged:
            order.append(s)
            merged[s] = 0
        merged[s] += w
    steps = order
    witness = _span_witness(steps)
    if witness is not None:
        # No step descends in direction u: walks cannot be pulled back
        # across the hyperplane {p : u.p = 0}.
        raise SpanViolationError(witness)
    return WeightedStepSet3(tuple((s, merged[s]) for s in steps))


def drift(stepset: WeightedStepSet3) -> Drift3:
    dx = sum(w * s.dx for s, w in stepset.entries)
    dy = sum(w * s.dy for s, w in stepset.entries)
    dz = sum(w * s.dz for s, w in stepset.entries)
    comps = (dx, dy, dz)
    if all(c == 0 for c in comps):
        cls = "zero"
    elif all(c < 0 for c in comps):
        cls = "reluctant"
    elif all(c <= 0 for c in comps):
        cls = "non-positive-mixed"
    else:
        cls = "other"
    return Drift3(dx, dy, dz, cls)


def _check_point(point: Sequence[float]) -> tuple[float, float, float]:
    x, y, z = (float(c) for c in point)
    if not (x > 0 and y > 0 and z > 0):
        raise NonPositivePointError("inventory requires a point in the open positive octant")
    return x, y, z


def inventory_eval(stepset: WeightedStepSet3, point: Sequence[float]) -> float:
    x, y, z = _check_point(point)
    return sum(w * x**s.dx * y**s.dy * z**s.dz for s, w in stepset.entries)


def inventory_grad(stepset: WeightedStepSet3, point: Sequence[float]):
    """Exact analytic gradient of the inventory at an interior point."""
    x, y, z = _check_point(point)
    gx = gy = gz = 0.0
    for s, w in stepset.entries:
        t = w * x**s.dx * y**s.dy * z**s.dz
        gx += t * s.dx / x
        gy += t * s.dy / y
        gz += t * s.dz / z
    return (gx, gy, gz)


def stepset_digest(stepset: WeightedStepSet3) -> str:
    """Short stable identifier for a validated stepset."""
    import hashlib
    import json

    doc = json.dumps(
        [[list(s), w] for s, w in sorted(stepset.entries)], separators=(",", ":")
    )
    return hashlib.sha256(doc.encode()).hexdigest()[:12]
