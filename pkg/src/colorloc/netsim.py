"""Scenario synthesis: deployment, measurement generation, mobility.

A scenario is an immutable snapshot of one deployment: anchors with
known positions and broadcast colors, mobile nodes drifting with the
water.  Measurements (depth difference and elevation AOA) are derived
from true geometry, optionally with Gaussian noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .color import RgbColor
from .errors import IoFailure
from .geometry import Position3D, euclidean_distance
from .localization import AnchorObservation

# Per-step heading perturbation (radians) for drifting mobiles.
HEADING_SIGMA = 0.1


@dataclass
class Region:
    """Axis-aligned deployment volume anchored at the origin."""

    x_extent: float
    y_extent: float
    z_extent: float

    def __post_init__(self):
        if min(self.x_extent, self.y_extent, self.z_extent) <= 0.0:
            raise ValueError(f"extents must be positive: {self}")

    @property
    def volume(self) -> float:
        return self.x_extent * self.y_extent * self.z_extent

    def contains(self, p: Position3D) -> bool:
        return (
            0.0 <= p.x <= self.x_extent
            and 0.0 <= p.y <= self.y_extent
            and 0.0 <= p.z <= self.z_extent
        )


@dataclass
class AnchorNode:
    id: int
    position: Position3D
    color: RgbColor


@dataclass
class MobileNode:
    id: int
    position: Position3D
    heading: float = 0.0  # azimuth, radians


@dataclass
class Scenario:
    region: Region
    anchors: list[AnchorNode]
    mobiles: list[MobileNode]
    comm_range: float
    seed: int

    def __post_init__(self):
        if not self.anchors or not self.mobiles:
            raise ValueError("a scenario needs at least one anchor and one mobile node")
        if self.comm_range <= 0.0:
            raise ValueError(f"communication range {self.comm_range} must be positive")
        for node in (*self.anchors, *self.mobiles):
            if not self.region.contains(node.position):
                raise ValueError(f"node {node.id} at {node.position} is outside the region")

    def mobile(self, mobile_id: int) -> MobileNode:
        for m in self.mobiles:
            if m.id == mobile_id:
                return m
        raise KeyError(f"no mobile node with id {mobile_id}")


@dataclass
class NoiseModel:
    aoa_sigma: float = 0.0  # radians
    depth_sigma: float = 0.0  # meters

    def __post_init__(self):
        if self.aoa_sigma < 0.0 or self.depth_sigma < 0.0:
            raise ValueError(f"noise sigmas must be nonnegative: {self}")


def anchors_from_density(d_anchor: float, comm_range: float, region: Region) -> int:
    """Anchor count for a target density of anchors per communication sphere.

    Inverts density = (4/3 pi R^3) * N / V; never below 1.
    """
    if d_anchor <= 0.0:
        raise ValueError(f"density {d_anchor} must be positive")
    sphere = (4.0 / 3.0) * math.pi * comm_range**3
    return max(int(round(d_anchor * region.volume / sphere)), 1)


def deploy(
    region: Region,
    anchor_count: int,
    mobile_count: int,
    comm_range: float,
    seed: int,
) -> Scenario:
    """Uniform random deployment, deterministic per seed.

    Draw order is fixed: anchor positions, anchor colors, mobile
    positions, mobile headings.
    """
    if anchor_count < 1 or mobile_count < 1:
        raise ValueError("need at least one anchor and one mobile node")
    rng = np.random.default_rng(seed)
    extents = (region.x_extent, region.y_extent, region.z_extent)
    apos = rng.uniform(low=(0.0, 0.0, 0.0), high=extents, size=(anchor_count, 3))
    acol = rng.uniform(0.0, 1.0, size=(anchor_count, 3))
    mpos = rng.uniform(low=(0.0, 0.0, 0.0), high=extents, size=(mobile_count, 3))
    headings = rng.uniform(0.0, 2.0 * math.pi, size=mobile_count)
    anchors = [
        AnchorNode(i, Position3D(*map(float, apos[i])), RgbColor(*map(float, acol[i])))
        for i in range(anchor_count)
    ]
    mobiles = [
        MobileNode(i, Position3D(*map(float, mpos[i])), float(headings[i]))
        for i in range(mobile_count)
    ]
    return Scenario(region, anchors, mobiles, comm_range, seed)


def discover_task_anchors(scenario: Scenario, mobile_id: int) -> list[int]:
    """Ids of anchors within communication range (boundary inclusive)."""
    mobile = scenario.mobile(mobile_id)
    return [
        a.id
        for a in scenario.anchors
        if euclidean_distance(a.position, mobile.position) <= scenario.comm_range
    ]


def synthesize_observation(
    anchor: AnchorNode,
    mobile: MobileNode,
    noise: NoiseModel,
    rng: np.random.Generator,
    comm_range: float,
) -> AnchorObservation:
    """Measurements the mobile node would record for one task anchor.

    The depth difference comes from the pressure sensors, the AOA from
    arcsin(k/d); both get additive Gaussian noise and are clamped to
    their physical domains (k into [0, comm_range], alpha into
    [0, pi/2]).  Anchor position and color are copied verbatim since
    anchors broadcast their coordinates.
    """
    d_true = euclidean_distance(anchor.position, mobile.position)
    k_true = abs(anchor.position.z - mobile.position.z)
    alpha_true = 0.0 if d_true < 1e-12 else math.asin(min(max(k_true / d_true, 0.0), 1.0))
    k = k_true + float(rng.normal(0.0, noise.depth_sigma))
    k = min(max(k, 0.0), comm_range)
    alpha = alpha_true + float(rng.normal(0.0, noise.aoa_sigma))
    alpha = min(max(alpha, 0.0), math.pi / 2)
    return AnchorObservation(anchor.id, anchor.position, k, alpha, anchor.color)


def _reflect(coord: float, extent: float) -> tuple[float, bool]:
    """Fold a coordinate back into [0, extent] by specular reflection.

    Returns the folded coordinate and whether the direction component
    flipped (odd number of wall bounces).
    """
    period = 2.0 * extent
    u = coord % period
    if u <= extent:
        return u, False
    return period - u, True


def step_mobility(
    scenario: Scenario, dt: float, speed: float, rng: np.random.Generator
) -> Scenario:
    """Advance every mobile node by speed*dt along its heading.

    Motion is horizontal (depth is held by buoyancy), with specular
    reflection at the region walls; afterwards each heading gets a
    Gaussian perturbation of HEADING_SIGMA so drift directions wander.
    Anchors stay put.  Returns a new snapshot.
    """
    if dt <= 0.0:
        raise ValueError(f"dt {dt} must be positive")
    if speed < 0.0:
        raise ValueError(f"speed {speed} must be nonnegative")
    step = speed * dt
    moved = []
    for m in scenario.mobiles:
        x = m.position.x + step * math.cos(m.heading)
        y = m.position.y + step * math.sin(m.heading)
        x, flip_x = _reflect(x, scenario.region.x_extent)
        y, flip_y = _reflect(y, scenario.region.y_extent)
        heading = m.heading
        if flip_x:
            heading = math.pi - heading
        if flip_y:
            heading = -heading
        heading = (heading + float(rng.normal(0.0, HEADING_SIGMA))) % (2.0 * math.pi)
        moved.append(MobileNode(m.id, Position3D(x, y, m.position.z), heading))
    return replace(scenario, mobiles=moved)


def three_anchor_fixture(seed: int = 42) -> Scenario:
    """Canonical noise-free scenario used by oracle tests and the CLI.

    Three anchors in the surface plane around one mobile node at depth
    10 m; anchor colors are drawn from the seeded stream.
    """
    rng = np.random.default_rng(seed)
    colors = rng.uniform(0.0, 1.0, size=(3, 3))
    anchors = [
        AnchorNode(i, Position3D(*pos), RgbColor(*map(float, colors[i])))
        for i, pos in enumerate([(0.0, 0.0, 0.0), (80.0, 0.0, 0.0), (0.0, 80.0, 0.0)])
    ]
    mobiles = [MobileNode(0, Position3D(30.0, 30.0, 10.0), 0.0)]
    return Scenario(Region(1000.0, 1000.0, 20.0), anchors, mobiles, 100.0, seed)


def scenario_to_text(scenario: Scenario) -> str:
    """Line-oriented serialization: region/range/seed header, then one
    node per line (kind, id, x, y, z, r, g, b).

    Mobile nodes carry no color; their trailing fields are written as
    zeros.  Headings are transient mobility state and are not stored:
    loaded mobiles face +x.
    """
    def f(x: float) -> str:
        return repr(float(x))  # repr round-trips doubles exactly

    r = scenario.region
    lines = [
        f"region {f(r.x_extent)} {f(r.y_extent)} {f(r.z_extent)}",
        f"range {f(scenario.comm_range)}",
        f"seed {scenario.seed}",
    ]
    for a in scenario.anchors:
        p, c = a.position, a.color
        lines.append(
            f"anchor {a.id} {f(p.x)} {f(p.y)} {f(p.z)} {f(c.r)} {f(c.g)} {f(c.b)}"
        )
    for m in scenario.mobiles:
        p = m.position
        lines.append(f"mobile {m.id} {f(p.x)} {f(p.y)} {f(p.z)} 0 0 0")
    return "\n".join(lines) + "\n"


def scenario_from_text(text: str) -> Scenario:
    """Parse the serialization produced by scenario_to_text."""
    region = None
    comm_range = None
    seed = 0
    anchors: list[AnchorNode] = []
    mobiles: list[MobileNode] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "region":
                region = Region(*map(float, fields[1:4]))
            elif kind == "range":
                comm_range = float(fields[1])
            elif kind == "seed":
                seed = int(fields[1])
            elif kind == "anchor":
                anchors.append(
                    AnchorNode(
                        int(fields[1]),
                        Position3D(*map(float, fields[2:5])),
                        RgbColor(*map(float, fields[5:8])),
                    )
                )
            elif kind == "mobile":
                mobiles.append(
                    MobileNode(int(fields[1]), Position3D(*map(float, fields[2:5])))
                )
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except (IndexError, TypeError, ValueError) as exc:
            raise ValueError(f"bad scenario line {lineno}: {raw!r}") from exc
    if region is None or comm_range is None:
        raise ValueError("scenario text lacks region/range header")
    return Scenario(region, anchors, mobiles, comm_range, seed)


def write_scenario(scenario: Scenario, path: str | Path) -> None:
    try:
        Path(path).write_text(scenario_to_text(scenario))
    except OSError as exc:
        raise IoFailure(f"cannot write scenario to {path}: {exc}") from exc


def read_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read scenario from {path}: {exc}") from exc
    return scenario_from_text(text)
