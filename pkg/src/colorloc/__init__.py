"""Color-filtering localization (PCFL/ACFL) for 3D underwater acoustic
sensor networks: library, simulator, and Monte-Carlo experiment harness."""

from .color import (
    HsvColor,
    ProportionFactors,
    RgbColor,
    attenuate_value,
    distance_weights,
    hsv_to_rgb,
    nearness_degree,
    node_rgb,
    rgb_to_hsv,
)
from .errors import (
    ColorlocError,
    ConfigInvalid,
    DegenerateAngle,
    DepthExceedsRange,
    EmptyFilteredSet,
    EmptyIntersection,
    InsufficientAnchors,
    IoFailure,
    NoUsableAnchor,
    SingularGeometry,
)
from .experiments import (
    ErrorStats,
    ExperimentConfig,
    NodeResult,
    SweepRow,
    baseline_trilateration,
    emit_csv,
    format_summary,
    localization_error,
    localize_scenario,
    run_sweep,
    run_trial_rows,
    run_trials,
)
from .geometry import (
    EPS_ANGLE,
    PlanarPoint,
    Position3D,
    TaskRing,
    euclidean_distance,
    make_task_ring,
    planar_distance,
    project_anchor,
    projected_distance,
    ring_contains,
    sample_intersection,
    slant_distance,
)
from .localization import (
    AnchorObservation,
    Estimate,
    LocalizationConfig,
    LocalizationInput,
    ProjectionColors,
    RangeMode,
    Variant,
    WeightedSample,
    WeightingMode,
    anchor_distances,
    filter_samples,
    localize,
    mobile_rgb,
    sample_rgbs,
    weighted_estimate,
)
from .netsim import (
    AnchorNode,
    MobileNode,
    NoiseModel,
    Region,
    Scenario,
    anchors_from_density,
    deploy,
    discover_task_anchors,
    read_scenario,
    scenario_from_text,
    scenario_to_text,
    step_mobility,
    synthesize_observation,
    three_anchor_fixture,
    write_scenario,
)

__version__ = "0.1.0"
