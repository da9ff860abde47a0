import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import colorloc.geometry as geo
from colorloc.errors import DegenerateAngle, DepthExceedsRange, EmptyIntersection
from colorloc.geometry import (
    PlanarPoint,
    Position3D,
    TaskRing,
    euclidean_distance,
    make_task_ring,
    project_anchor,
    projected_distance,
    ring_contains,
    sample_intersection,
    slant_distance,
)


def test_euclidean_distance_pythagorean_quadruple():
    assert euclidean_distance(Position3D(0, 0, 0), Position3D(3, 4, 12)) == 13.0


def test_euclidean_distance_identity():
    assert euclidean_distance(Position3D(5, 5, 5), Position3D(5, 5, 5)) == 0.0


def test_euclidean_distance_in_plane():
    assert euclidean_distance(Position3D(1, 2, 3), Position3D(4, 6, 3)) == 5.0


def test_position_rejects_non_finite():
    with pytest.raises(ValueError):
        Position3D(float("nan"), 0.0, 0.0)
    with pytest.raises(ValueError):
        PlanarPoint(float("inf"), 0.0)


@pytest.mark.parametrize(
    "k,alpha,expected",
    [
        (5.0, math.pi / 6, 10.0),
        (7.0, math.pi / 2, 7.0),
        (4.0, math.asin(0.8), 5.0),
    ],
)
def test_slant_distance_values(k, alpha, expected):
    assert slant_distance(k, alpha) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    "k,alpha,expected",
    [
        (5.0, math.pi / 4, 5.0),
        (7.0, math.pi / 2, 0.0),
        (3.0, math.pi / 6, 3.0 * math.sqrt(3.0)),
    ],
)
def test_projected_distance_values(k, alpha, expected):
    assert projected_distance(k, alpha) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("func", [slant_distance, projected_distance])
def test_degenerate_angle_raises(func):
    with pytest.raises(DegenerateAngle):
        func(5.0, 0.0)
    with pytest.raises(DegenerateAngle):
        func(5.0, 0.5 * geo.EPS_ANGLE)
    with pytest.raises(ValueError):
        func(-1.0, math.pi / 4)
    with pytest.raises(ValueError):
        func(5.0, math.pi / 2 + 1e-6)


@given(
    k=st.floats(min_value=0.0, max_value=100.0),
    alpha=st.floats(min_value=geo.EPS_ANGLE, max_value=math.pi / 2),
)
def test_slant_projected_pythagorean_identity(k, alpha):
    s = slant_distance(k, alpha)
    p = projected_distance(k, alpha)
    assert p * p + k * k == pytest.approx(s * s, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize(
    "anchor,depth,expected",
    [
        ((10, 20, 5), 12.0, (10, 20, 12)),
        ((3, 4, 9), 9.0, (3, 4, 9)),
        ((0, 0, 0), 20.0, (0, 0, 20)),
    ],
)
def test_project_anchor(anchor, depth, expected):
    proj = project_anchor(Position3D(*anchor), depth)
    assert (proj.x, proj.y, proj.z) == expected


def test_make_task_ring_radii():
    ring = make_task_ring(Position3D(1, 2, 10), 100.0, 60.0)
    assert ring.radius == pytest.approx(80.0)
    assert (ring.center.x, ring.center.y, ring.plane_depth) == (1, 2, 10)
    assert make_task_ring(Position3D(0, 0, 0), 100.0, 0.0).radius == 100.0
    assert make_task_ring(Position3D(0, 0, 0), 100.0, 100.0).radius == 0.0


def test_make_task_ring_depth_exceeds_range():
    with pytest.raises(DepthExceedsRange):
        make_task_ring(Position3D(0, 0, 0), 100.0, 100.001)


def test_ring_contains_boundary_inclusive():
    ring = TaskRing(PlanarPoint(0, 0), 10.0, 0.0)
    assert ring_contains(ring, PlanarPoint(6, 8))
    assert not ring_contains(ring, PlanarPoint(8, 8))
    assert ring_contains(TaskRing(PlanarPoint(5, 5), 0.0, 0.0), PlanarPoint(5, 5))


def test_sample_intersection_single_ring():
    ring = TaskRing(PlanarPoint(0, 0), 10.0, 0.0)
    pts = sample_intersection([ring], 100, np.random.default_rng(1))
    assert len(pts) == 100
    assert all(math.hypot(p.x, p.y) <= 10.0 for p in pts)


def test_sample_intersection_disjoint_rings():
    rings = [
        TaskRing(PlanarPoint(0, 0), 10.0, 0.0),
        TaskRing(PlanarPoint(30, 0), 10.0, 0.0),
    ]
    with pytest.raises(EmptyIntersection):
        sample_intersection(rings, 10, np.random.default_rng(1))


def test_sample_intersection_lens_centroid_matches_grid_oracle():
    from oracles import lens_centroid_grid

    rings = [
        TaskRing(PlanarPoint(0, 0), 10.0, 0.0),
        TaskRing(PlanarPoint(5, 0), 10.0, 0.0),
    ]
    cx, cy = lens_centroid_grid([(0.0, 0.0, 10.0), (5.0, 0.0, 10.0)])
    # the lens is symmetric about (2.5, 0); the grid oracle must agree
    assert (cx, cy) == (pytest.approx(2.5, abs=0.02), pytest.approx(0.0, abs=0.02))
    pts = sample_intersection(rings, 200, np.random.default_rng(7))
    assert len(pts) == 200
    assert all(ring_contains(r, p) for r in rings for p in pts)
    ex = sum(p.x for p in pts) / len(pts)
    ey = sum(p.y for p in pts) / len(pts)
    assert math.hypot(ex - cx, ey - cy) <= 1.0


def test_sample_intersection_deterministic_and_order_invariant():
    a = TaskRing(PlanarPoint(0, 0), 8.0, 0.0)
    b = TaskRing(PlanarPoint(5, 0), 11.0, 0.0)
    p1 = sample_intersection([a, b], 50, np.random.default_rng(3))
    p2 = sample_intersection([a, b], 50, np.random.default_rng(3))
    p3 = sample_intersection([b, a], 50, np.random.default_rng(3))
    assert p1 == p2 == p3


def test_sample_intersection_mixed_plane_depth_rejected():
    a = TaskRing(PlanarPoint(0, 0), 8.0, 0.0)
    b = TaskRing(PlanarPoint(5, 0), 11.0, 1.0)
    with pytest.raises(ValueError):
        sample_intersection([a, b], 10, np.random.default_rng(0))


def test_sample_intersection_cycles_on_budget_exhaustion(monkeypatch):
    # cap the budget so fewer points are accepted than requested
    monkeypatch.setattr(geo, "PROPOSAL_CAP_FACTOR", 1)
    ring = TaskRing(PlanarPoint(0, 0), 10.0, 0.0)
    m = 64
    pts = sample_intersection([ring], m, np.random.default_rng(5))
    assert len(pts) == m
    assert all(ring_contains(ring, p) for p in pts)
    distinct = {(p.x, p.y) for p in pts}
    assert len(distinct) < m  # some points were cycled


def test_sample_intersection_all_points_in_every_ring():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = rng.integers(2, 6)
        centers = rng.uniform(-5.0, 5.0, size=(n, 2))
        rings = [
            TaskRing(PlanarPoint(*c), float(rng.uniform(8.0, 15.0)), 0.0)
            for c in centers
        ]
        pts = sample_intersection(rings, 50, rng)
        assert all(ring_contains(r, p) for r in rings for p in pts)
