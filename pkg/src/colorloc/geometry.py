"""Spatial math for depth-plane localization.

Units are meters and radians throughout; depth (z) increases downward.
A task ring is the closed disk, in the mobile node's depth plane, that
must contain the node given one anchor's depth difference; the sampling
area is the intersection of all task rings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAngle, DepthExceedsRange, EmptyIntersection

# Below this AOA the slant/projected distances are 0/0-degenerate.  Such
# anchors are dropped from distance-based color computation, but their
# ring is still a valid constraint.
EPS_ANGLE = 1e-6

# Rejection-sampling budget: total proposals per call is this many times
# the requested sample count.
PROPOSAL_CAP_FACTOR = 10_000
_PROPOSAL_CHUNK = 1024
_PROPOSAL_CHUNK_MAX = 131_072


@dataclass
class Position3D:
    """A node position in meters; z is depth, positive downward."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y}, {self.z})")


@dataclass
class PlanarPoint:
    """A point in some fixed depth plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")


@dataclass
class TaskRing:
    """Closed disk in the mobile node's depth plane."""

    center: PlanarPoint
    radius: float
    plane_depth: float

    def __post_init__(self):
        if self.radius < 0.0:
            raise ValueError(f"negative ring radius {self.radius}")


def euclidean_distance(a: Position3D, b: Position3D) -> float:
    """3D Euclidean distance between two positions."""
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


def planar_distance(a: PlanarPoint, b: PlanarPoint) -> float:
    """In-plane Euclidean distance."""
    return math.hypot(a.x - b.x, a.y - b.y)


def _check_angle(alpha: float) -> None:
    if alpha < EPS_ANGLE:
        raise DegenerateAngle(f"AOA {alpha} rad below {EPS_ANGLE}; distance undefined")
    if alpha > math.pi / 2:
        raise ValueError(f"AOA {alpha} rad outside [0, pi/2]")


def slant_distance(k: float, alpha: float) -> float:
    """Anchor-to-node distance from depth difference k and elevation AOA alpha.

    Raises DegenerateAngle for alpha below EPS_ANGLE; the caller must
    exclude such anchors from distance-based color computation.
    """
    if k < 0.0:
        raise ValueError(f"negative depth difference {k}")
    _check_angle(alpha)
    return k / math.sin(alpha)


def projected_distance(k: float, alpha: float) -> float:
    """In-plane distance from the node to the anchor's projection.

    Satisfies projected_distance**2 + k**2 == slant_distance**2.
    """
    if k < 0.0:
        raise ValueError(f"negative depth difference {k}")
    _check_angle(alpha)
    return k / math.tan(alpha)


def project_anchor(anchor: Position3D, mobile_depth: float) -> Position3D:
    """Project an anchor vertically into the mobile node's depth plane."""
    return Position3D(anchor.x, anchor.y, mobile_depth)


def make_task_ring(projection: Position3D, comm_range: float, k: float) -> TaskRing:
    """Ring centered at a task projection with radius sqrt(R^2 - k^2).

    Raises DepthExceedsRange when k > comm_range: the depth difference
    alone already exceeds the communication range, so the anchor cannot
    be a task anchor.
    """
    if k < 0.0:
        raise ValueError(f"negative depth difference {k}")
    if k > comm_range:
        raise DepthExceedsRange(f"depth difference {k} exceeds range {comm_range}")
    radius = math.sqrt(max(comm_range * comm_range - k * k, 0.0))
    return TaskRing(PlanarPoint(projection.x, projection.y), radius, projection.z)


def ring_contains(ring: TaskRing, p: PlanarPoint) -> bool:
    """Closed-disk membership test (boundary inclusive)."""
    dx = p.x - ring.center.x
    dy = p.y - ring.center.y
    return dx * dx + dy * dy <= ring.radius * ring.radius


def sample_intersection(
    rings: list[TaskRing], m: int, rng: np.random.Generator
) -> list[PlanarPoint]:
    """Draw m points uniformly over the intersection of the rings.

    Rejection sampling from the axis-aligned bounding square of the
    smallest-radius ring (ties broken by construction order), which must
    contain the intersection.  The proposal budget is
    PROPOSAL_CAP_FACTOR * m; on exhaustion with at least one accepted
    point the accepted points are cycled up to m, with none
    EmptyIntersection is raised.

    Deterministic given the rng state, and invariant under ring
    reordering as long as the smallest ring is unchanged.
    """
    if not rings:
        raise ValueError("rings must be nonempty")
    if m < 1:
        raise ValueError(f"sample count {m} must be >= 1")
    depth = rings[0].plane_depth
    if any(r.plane_depth != depth for r in rings):
        raise ValueError("rings do not share a plane depth")

    smallest = min(rings, key=lambda r: r.radius)
    lo = (smallest.center.x - smallest.radius, smallest.center.y - smallest.radius)
    hi = (smallest.center.x + smallest.radius, smallest.center.y + smallest.radius)

    centers = np.array([(r.center.x, r.center.y) for r in rings])
    radii = np.array([r.radius for r in rings])
    radii_sq = radii * radii
    # Tight bounding box of the intersection: a cheap prefilter that
    # rejects most proposals before the per-ring tests without changing
    # which points are accepted.
    box_lo = np.max(centers - radii[:, None], axis=0)
    box_hi = np.min(centers + radii[:, None], axis=0)

    cap = PROPOSAL_CAP_FACTOR * m
    proposed = 0
    accepted_x: list[np.ndarray] = []
    accepted_y: list[np.ndarray] = []
    n_accepted = 0
    chunk = _PROPOSAL_CHUNK
    while n_accepted < m and proposed < cap:
        n = min(chunk, cap - proposed)
        pts = rng.uniform(low=lo, high=hi, size=(n, 2))
        proposed += n
        near = pts[np.all((pts >= box_lo) & (pts <= box_hi), axis=1)]
        if near.shape[0]:
            dx = near[:, 0:1] - centers[:, 0]
            dy = near[:, 1:2] - centers[:, 1]
            inside = np.all(dx * dx + dy * dy <= radii_sq, axis=1)
            hits = int(inside.sum())
            if hits:
                accepted_x.append(near[inside, 0])
                accepted_y.append(near[inside, 1])
                n_accepted += hits
        # Low acceptance rate: widen the next draw so the numpy overhead
        # amortizes.  The schedule depends only on acceptance counts, so
        # the output is still deterministic and ring-order invariant.
        if n_accepted < m and chunk < _PROPOSAL_CHUNK_MAX:
            remaining = m - n_accepted
            rate = max(n_accepted / proposed, 1.0 / chunk)
            chunk = min(
                _PROPOSAL_CHUNK_MAX, max(chunk, int(1.5 * remaining / rate) + 1)
            )

    if n_accepted == 0:
        raise EmptyIntersection(
            f"no point accepted after {proposed} proposals over {len(rings)} rings"
        )
    xs = np.concatenate(accepted_x)
    ys = np.concatenate(accepted_y)
    if n_accepted < m:
        # Budget exhausted: degrade gracefully by cycling what we have.
        reps = -(-m // n_accepted)
        xs = np.tile(xs, reps)
        ys = np.tile(ys, reps)
    return [PlanarPoint(float(x), float(y)) for x, y in zip(xs[:m], ys[:m])]
