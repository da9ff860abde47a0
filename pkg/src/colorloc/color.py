"""RGB/HSV distance encoding.

Each anchor broadcasts an RGB color; a node's color is synthesized by
attenuating every anchor color's HSV value with distance and mixing the
results with inverse-distance weights.  Similarity of two colors (the
nearness degree) is plain Euclidean distance in RGB space.

Conversions use the standard hexcone formulas with hue in degrees
[0, 360) and the achromatic convention H = 0 when S = 0.  Only V is ever
modified, so any hue convention yields the same pipeline output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

# Distances below this are treated as exactly zero when weighting.
EPS_DIST = 1e-9


@dataclass
class RgbColor:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for v in (self.r, self.g, self.b):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"RGB channel {v} outside [0, 1]")

    def channels(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)


@dataclass
class HsvColor:
    h: float  # degrees in [0, 360)
    s: float
    v: float

    def __post_init__(self):
        if not 0.0 <= self.h < 360.0:
            raise ValueError(f"hue {self.h} outside [0, 360)")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"saturation {self.s} outside [0, 1]")
        if not 0.0 <= self.v <= 1.0:
            raise ValueError(f"value {self.v} outside [0, 1]")


@dataclass
class ProportionFactors:
    """Normalized inverse-distance weights, one per contributing anchor."""

    weights: list[float]

    def __post_init__(self):
        if not self.weights:
            raise ValueError("no weights")
        if any(w < 0.0 for w in self.weights):
            raise ValueError(f"negative weight in {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {sum(self.weights)}, not 1")


# Plain-float kernels shared by the dataclass API and the hot sampling
# loops; they are the single implementation of the conversions.

def _rgb_to_hsv(r: float, g: float, b: float) -> tuple[float, float, float]:
    mx = max(r, g, b)
    mn = min(r, g, b)
    chroma = mx - mn
    s = 0.0 if mx == 0.0 else chroma / mx
    if chroma == 0.0:
        h = 0.0
    elif mx == r:
        h = 60.0 * (((g - b) / chroma) % 6.0)
    elif mx == g:
        h = 60.0 * ((b - r) / chroma + 2.0)
    else:
        h = 60.0 * ((r - g) / chroma + 4.0)
    if h >= 360.0:  # float modulo can round up to the period itself
        h = 0.0
    return h, s, mx


def _hsv_to_rgb(h: float, s: float, v: float) -> tuple[float, float, float]:
    chroma = v * s
    hp = h / 60.0
    x = chroma * (1.0 - abs(hp % 2.0 - 1.0))
    if hp < 1.0:
        r1, g1, b1 = chroma, x, 0.0
    elif hp < 2.0:
        r1, g1, b1 = x, chroma, 0.0
    elif hp < 3.0:
        r1, g1, b1 = 0.0, chroma, x
    elif hp < 4.0:
        r1, g1, b1 = 0.0, x, chroma
    elif hp < 5.0:
        r1, g1, b1 = x, 0.0, chroma
    else:
        r1, g1, b1 = chroma, 0.0, x
    m = v - chroma
    return r1 + m, g1 + m, b1 + m


def _weights(distances: Sequence[float]) -> list[float]:
    near_zero = [i for i, d in enumerate(distances) if d < EPS_DIST]
    if near_zero:
        share = 1.0 / len(near_zero)
        zero_set = set(near_zero)
        return [share if i in zero_set else 0.0 for i in range(len(distances))]
    inverses = [1.0 / d for d in distances]
    total = sum(inverses)
    return [inv / total for inv in inverses]


def _node_rgb(
    channels: Sequence[tuple[float, float, float]],
    distances: Sequence[float],
    ranges: Sequence[float],
) -> tuple[float, float, float]:
    weights = _weights(distances)
    r = g = b = 0.0
    for (cr, cg, cb), d, range_j, w in zip(channels, distances, ranges, weights):
        if w == 0.0:
            continue
        h, s, v = _rgb_to_hsv(cr, cg, cb)
        factor = 1.0 - d / range_j
        if factor < 0.0:
            factor = 0.0
        elif factor > 1.0:
            factor = 1.0
        ar, ag, ab = _hsv_to_rgb(h, s, v * factor)
        r += w * ar
        g += w * ag
        b += w * ab
    # Convex combination; clamp away float dust at the interval ends.
    return (
        min(max(r, 0.0), 1.0),
        min(max(g, 0.0), 1.0),
        min(max(b, 0.0), 1.0),
    )


def rgb_to_hsv(c: RgbColor) -> HsvColor:
    """Standard hexcone RGB -> HSV conversion."""
    return HsvColor(*_rgb_to_hsv(c.r, c.g, c.b))


def hsv_to_rgb(c: HsvColor) -> RgbColor:
    """Standard inverse hexcone HSV -> RGB conversion."""
    return RgbColor(*_hsv_to_rgb(c.h, c.s, c.v))


def attenuate_value(c: HsvColor, d: float, range_m: float) -> HsvColor:
    """Scale V by the distance factor 1 - d/range_m; H and S unchanged.

    The factor is clamped to [0, 1] so noisy measurements with
    d > range_m cannot produce negative colors.
    """
    if range_m <= 0.0:
        raise ValueError(f"range {range_m} must be positive")
    if d < 0.0:
        raise ValueError(f"negative distance {d}")
    factor = min(max(1.0 - d / range_m, 0.0), 1.0)
    return HsvColor(c.h, c.s, c.v * factor)


def distance_weights(distances: Sequence[float]) -> ProportionFactors:
    """Inverse-distance proportion factors, normalized to sum to 1.

    Any distance below EPS_DIST takes the zero-distance limit: the
    near-zero entries share all the weight equally and the rest get 0.
    """
    if len(distances) == 0:
        raise ValueError("no distances")
    if any(d < 0.0 for d in distances):
        raise ValueError(f"negative distance in {list(distances)}")
    return ProportionFactors(_weights(distances))


def node_rgb(
    anchor_colors: Sequence[RgbColor],
    distances: Sequence[float],
    range_m: float | Sequence[float],
) -> RgbColor:
    """Synthesize a node color from anchor colors and distances.

    Per anchor: convert to HSV, attenuate V by its distance, convert
    back; then mix with the inverse-distance proportion factors.
    range_m may be a single range or one range per anchor.
    """
    n = len(anchor_colors)
    if n != len(distances) or n == 0:
        raise ValueError(f"{n} colors vs {len(distances)} distances")
    if any(d < 0.0 for d in distances):
        raise ValueError(f"negative distance in {list(distances)}")
    if isinstance(range_m, (int, float)):
        if range_m <= 0.0:
            raise ValueError(f"range {range_m} must be positive")
        ranges: Sequence[float] = [float(range_m)] * n
    else:
        ranges = [float(r) for r in range_m]
        if len(ranges) != n:
            raise ValueError(f"{len(ranges)} ranges vs {n} distances")
        if any(r <= 0.0 for r in ranges):
            raise ValueError("all ranges must be positive")
    channels = [c.channels() for c in anchor_colors]
    return RgbColor(*_node_rgb(channels, distances, ranges))


def nearness_degree(a: RgbColor, b: RgbColor) -> float:
    """Euclidean distance between two colors in RGB space."""
    return math.sqrt((a.r - b.r) ** 2 + (a.g - b.g) ** 2 + (a.b - b.b) ** 2)
