"""Exception types shared across the package."""


class ColorlocError(Exception):
    """Base class for all colorloc errors."""


class DegenerateAngle(ColorlocError):
    """AOA too close to zero for slant/projected distance to be defined."""


class DepthExceedsRange(ColorlocError):
    """Depth difference larger than the communication range; inconsistent measurement."""


class EmptyIntersection(ColorlocError):
    """Rejection sampling found no point inside every task ring."""


class NoUsableAnchor(ColorlocError):
    """Every observation has a degenerate AOA; no distance can be computed."""


class InsufficientAnchors(ColorlocError):
    """Fewer than the minimum number of usable task anchors."""


class EmptyFilteredSet(ColorlocError):
    """Weighted evaluation called with no samples."""


class SingularGeometry(ColorlocError):
    """Anchor projections are collinear; least-squares system is rank deficient."""


class ConfigInvalid(ColorlocError):
    """Experiment or CLI configuration is out of range or malformed."""


class IoFailure(ColorlocError):
    """Reading or writing an output file failed."""
