"""The PCFL and ACFL estimators.

Both run the same three steps on one mobile node's observation set:
(a) sample the intersection of the task rings, (b) compute the RGB
encoding for the node and for every sample, (c) filter samples by
nearness degree and take a normalized weighted mean of the survivors.
They differ only in the distance driving the encoding: PCFL uses the
in-plane distance to each anchor's projection, ACFL the direct
anchor-to-node distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .color import RgbColor, _node_rgb, nearness_degree, node_rgb
from .errors import (
    DepthExceedsRange,
    EmptyFilteredSet,
    InsufficientAnchors,
    NoUsableAnchor,
)
from .geometry import (
    EPS_ANGLE,
    PlanarPoint,
    Position3D,
    make_task_ring,
    project_anchor,
    projected_distance,
    sample_intersection,
    slant_distance,
)

# Depth is known from the pressure sensor, so the planar problem needs
# three usable anchors for a unique fix.
MIN_USABLE_ANCHORS = 3

# Nearness below this counts as an exact match in inverse weighting.
_EPS_NEARNESS = 1e-12


class Variant(str, Enum):
    PCFL = "pcfl"
    ACFL = "acfl"


class WeightingMode(str, Enum):
    """Direction of the normalized nearness weights.

    LITERAL weights a sample by its own nearness degree; INVERSE weights
    by the reciprocal, so closer matches count more.
    """

    LITERAL = "literal"
    INVERSE = "inverse"


class RangeMode(str, Enum):
    """Attenuation range: the shared communication radius, or the
    per-anchor in-plane maximum sqrt(R^2 - k^2)."""

    GLOBAL_R = "global_r"
    PER_ANCHOR = "per_anchor"


class ProjectionColors(str, Enum):
    """Where PCFL projection colors come from.

    BROADCAST reuses each anchor's broadcast color, so PCFL and ACFL
    differ only in the distance driving the encoding.  INDEPENDENT
    draws fresh random projection colors from the localization stream
    each call.
    """

    BROADCAST = "broadcast"
    INDEPENDENT = "independent"


@dataclass
class AnchorObservation:
    """One task anchor's broadcast plus the mobile node's measurements of it."""

    anchor_id: int
    anchor_position: Position3D
    depth_difference: float
    aoa_alpha: float
    anchor_color: RgbColor

    def __post_init__(self):
        if not 0.0 <= self.aoa_alpha <= math.pi / 2:
            raise ValueError(f"AOA {self.aoa_alpha} outside [0, pi/2]")
        if self.depth_difference < 0.0:
            raise ValueError(f"negative depth difference {self.depth_difference}")


@dataclass
class LocalizationInput:
    mobile_depth: float
    observations: list[AnchorObservation]
    comm_range: float

    def __post_init__(self):
        if not self.observations:
            raise ValueError("no observations")
        if self.comm_range <= 0.0:
            raise ValueError(f"communication range {self.comm_range} must be positive")
        for obs in self.observations:
            if obs.depth_difference > self.comm_range:
                raise DepthExceedsRange(
                    f"anchor {obs.anchor_id}: depth difference "
                    f"{obs.depth_difference} exceeds range {self.comm_range}"
                )


@dataclass
class LocalizationConfig:
    variant: Variant = Variant.PCFL
    sample_count: int = 400
    threshold: float = 0.01
    weighting_mode: WeightingMode = WeightingMode.LITERAL
    range_mode: RangeMode = RangeMode.GLOBAL_R
    projection_colors: ProjectionColors = ProjectionColors.BROADCAST

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError(f"sample count {self.sample_count} must be >= 1")
        if self.threshold < 0.0:
            raise ValueError(f"threshold {self.threshold} must be >= 0")


@dataclass
class WeightedSample:
    point: PlanarPoint
    rgb: RgbColor
    nearness: float
    normalized_weight: float = 0.0


@dataclass
class Estimate:
    position: Position3D
    filtered_count: int = 0
    fallback_used: bool = False
    degenerate_anchor_count: int = 0


def usable_observations(input: LocalizationInput) -> list[AnchorObservation]:
    """Observations whose AOA is large enough for a defined distance."""
    return [o for o in input.observations if o.aoa_alpha >= EPS_ANGLE]


def anchor_distances(input: LocalizationInput, variant: Variant) -> list[float]:
    """Node-to-anchor distances driving the color encoding.

    PCFL uses the in-plane distance to each projection, ACFL the direct
    slant distance; degenerate-AOA observations are excluded.
    """
    usable = usable_observations(input)
    if not usable:
        raise NoUsableAnchor("every observation has a degenerate AOA")
    if variant is Variant.PCFL:
        return [projected_distance(o.depth_difference, o.aoa_alpha) for o in usable]
    return [slant_distance(o.depth_difference, o.aoa_alpha) for o in usable]


def _attenuation_ranges(
    usable: list[AnchorObservation], comm_range: float, mode: RangeMode
) -> float | list[float]:
    if mode is RangeMode.GLOBAL_R:
        return comm_range
    # Per-anchor in-plane maximum; floor keeps a k ~ R anchor finite.
    return [
        max(math.sqrt(max(comm_range**2 - o.depth_difference**2, 0.0)), 1e-12)
        for o in usable
    ]


def mobile_rgb(input: LocalizationInput, config: LocalizationConfig) -> RgbColor:
    """RGB encoding of the mobile node itself."""
    usable = usable_observations(input)
    if not usable:
        raise NoUsableAnchor("every observation has a degenerate AOA")
    distances = anchor_distances(input, config.variant)
    ranges = _attenuation_ranges(usable, input.comm_range, config.range_mode)
    return node_rgb([o.anchor_color for o in usable], distances, ranges)


def sample_rgbs(
    samples: list[PlanarPoint], input: LocalizationInput, config: LocalizationConfig
) -> list[RgbColor]:
    """RGB encodings for candidate sample points in the node's depth plane.

    Per-anchor distances are taken from the sample: planar distance to
    the task projection for PCFL, 3D distance to the anchor for ACFL.
    """
    usable = usable_observations(input)
    if not usable:
        raise NoUsableAnchor("every observation has a degenerate AOA")
    channels = [o.anchor_color.channels() for o in usable]
    ranges = _attenuation_ranges(usable, input.comm_range, config.range_mode)
    if isinstance(ranges, float):
        ranges = [ranges] * len(usable)

    if config.variant is Variant.PCFL:
        refs = [(o.anchor_position.x, o.anchor_position.y) for o in usable]
        out = []
        for s in samples:
            dists = [math.hypot(s.x - rx, s.y - ry) for rx, ry in refs]
            out.append(RgbColor(*_node_rgb(channels, dists, ranges)))
        return out

    depth = input.mobile_depth
    refs3 = [
        (o.anchor_position.x, o.anchor_position.y, o.anchor_position.z) for o in usable
    ]
    out = []
    for s in samples:
        dists = [
            math.sqrt((s.x - rx) ** 2 + (s.y - ry) ** 2 + (depth - rz) ** 2)
            for rx, ry, rz in refs3
        ]
        out.append(RgbColor(*_node_rgb(channels, dists, ranges)))
    return out


def filter_samples(
    weighted: list[WeightedSample], threshold: float
) -> tuple[list[WeightedSample], bool]:
    """Keep samples with nearness <= threshold (boundary inclusive).

    When nothing passes, fall back to the single minimum-nearness sample
    and report it through the returned flag.
    """
    kept = [w for w in weighted if w.nearness <= threshold]
    if kept:
        return kept, False
    if not weighted:
        return [], False
    return [min(weighted, key=lambda w: w.nearness)], True


def weighted_estimate(
    filtered: list[WeightedSample],
    mobile_depth: float,
    mode: WeightingMode = WeightingMode.LITERAL,
) -> Estimate:
    """Normalized nearness-weighted mean of the filtered samples.

    LITERAL uses weight_k = mu_k / sum(mu); INVERSE uses the reciprocal
    weights, collapsing to the plain mean of near-exact matches when any
    nearness is below 1e-12.  The z coordinate is the pressure-sensor
    depth, copied exactly.
    """
    if not filtered:
        raise EmptyFilteredSet("no samples to weight")
    mus = [w.nearness for w in filtered]
    n = len(filtered)
    if mode is WeightingMode.LITERAL:
        total = sum(mus)
        if total < _EPS_NEARNESS:
            # All matches essentially exact; the literal formula is 0/0.
            weights = [1.0 / n] * n
        else:
            weights = [mu / total for mu in mus]
    else:
        exact = [i for i, mu in enumerate(mus) if mu < _EPS_NEARNESS]
        if exact:
            share = 1.0 / len(exact)
            weights = [share if i in exact else 0.0 for i in range(n)]
        else:
            inverses = [1.0 / mu for mu in mus]
            total = sum(inverses)
            weights = [inv / total for inv in inverses]

    x = y = 0.0
    for w, sample in zip(weights, filtered):
        sample.normalized_weight = w
        x += w * sample.point.x
        y += w * sample.point.y
    return Estimate(Position3D(x, y, mobile_depth), filtered_count=n)


def localize(
    input: LocalizationInput, config: LocalizationConfig, rng: np.random.Generator
) -> Estimate:
    """Run the full pipeline: sample, encode, filter, weight.

    Deterministic given the rng state.  Raises InsufficientAnchors with
    fewer than MIN_USABLE_ANCHORS non-degenerate observations and
    propagates EmptyIntersection from the sampler.
    """
    usable = usable_observations(input)
    degenerate = len(input.observations) - len(usable)
    if len(usable) < MIN_USABLE_ANCHORS:
        raise InsufficientAnchors(
            f"{len(usable)} usable anchors, need {MIN_USABLE_ANCHORS}"
        )

    if (
        config.variant is Variant.PCFL
        and config.projection_colors is ProjectionColors.INDEPENDENT
    ):
        # fresh projection colors for this instant; geometry is untouched
        fresh = rng.uniform(0.0, 1.0, size=(len(input.observations), 3))
        input = replace(
            input,
            observations=[
                replace(o, anchor_color=RgbColor(*map(float, c)))
                for o, c in zip(input.observations, fresh)
            ],
        )

    # Degenerate-AOA anchors still constrain the sampling area: their
    # ring radius comes from k alone.
    rings = [
        make_task_ring(
            project_anchor(o.anchor_position, input.mobile_depth),
            input.comm_range,
            o.depth_difference,
        )
        for o in input.observations
    ]
    points = sample_intersection(rings, config.sample_count, rng)

    own_rgb = mobile_rgb(input, config)
    rgbs = sample_rgbs(points, input, config)
    weighted = [
        WeightedSample(p, rgb, nearness_degree(rgb, own_rgb))
        for p, rgb in zip(points, rgbs)
    ]
    kept, fallback = filter_samples(weighted, config.threshold)
    estimate = weighted_estimate(kept, input.mobile_depth, config.weighting_mode)
    return replace(
        estimate, fallback_used=fallback, degenerate_anchor_count=degenerate
    )
