"""Monte-Carlo harness: trials, parameter sweeps, statistics, CSV output.

Each trial deploys a fresh scenario from a seed derived from the master
seed and trial index, localizes every mobile node, then advances the
scenario by the staleness delay so estimates are scored against where
the node has drifted to.  Trials are independent; sub-streams are
derived per (seed, trial, purpose, node), so runs are reproducible
bit for bit.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    ConfigInvalid,
    EmptyIntersection,
    InsufficientAnchors,
    IoFailure,
    NoUsableAnchor,
    SingularGeometry,
)
from .geometry import Position3D, euclidean_distance, projected_distance
from .localization import (
    MIN_USABLE_ANCHORS,
    Estimate,
    LocalizationConfig,
    LocalizationInput,
    RangeMode,
    Variant,
    WeightingMode,
    localize,
    usable_observations,
)
from .netsim import (
    MobileNode,
    NoiseModel,
    Region,
    Scenario,
    anchors_from_density,
    deploy,
    discover_task_anchors,
    step_mobility,
    synthesize_observation,
)

ALGORITHMS = ("pcfl", "acfl", "trilateration")

SWEEP_PARAMS = (
    "threshold",
    "sample_count",
    "d_anchor",
    "anchor_count",
    "speed",
    "mobile_count",
)

# Sub-stream purposes for seed derivation.
_STREAM_DEPLOY = 0
_STREAM_OBSERVE = 1
_STREAM_LOCALIZE = 2
_STREAM_MOVE = 3

CSV_HEADER = (
    "sweep_name,sweep_value,algorithm,weighting_mode,"
    "mean_m,max_m,min_m,stddev_m,failures,trials,seed"
)


@dataclass
class ExperimentConfig:
    region: Region = field(default_factory=lambda: Region(1000.0, 1000.0, 20.0))
    comm_range: float = 100.0
    d_anchor: float | None = 4.0
    anchor_count: int | None = None
    mobile_count: int = 20
    algorithm: str = "pcfl"
    sample_count: int = 400
    threshold: float = 0.01
    weighting_mode: WeightingMode = WeightingMode.LITERAL
    range_mode: RangeMode = RangeMode.GLOBAL_R
    trials: int = 50
    speed: float = 0.1
    staleness_delay: float = 1.0
    aoa_sigma: float = 0.0
    depth_sigma: float = 0.0
    seed: int = 42
    sweep_param: str | None = None
    sweep_values: list[float] | None = None

    def validate(self) -> None:
        if self.comm_range <= 0.0:
            raise ConfigInvalid(f"comm_range {self.comm_range} must be positive")
        if self.anchor_count is None and self.d_anchor is None:
            raise ConfigInvalid("one of d_anchor or anchor_count is required")
        if self.anchor_count is not None and self.anchor_count < 1:
            raise ConfigInvalid(f"anchor_count {self.anchor_count} must be >= 1")
        if self.d_anchor is not None and self.d_anchor <= 0.0:
            raise ConfigInvalid(f"d_anchor {self.d_anchor} must be positive")
        if self.mobile_count < 1:
            raise ConfigInvalid(f"mobile_count {self.mobile_count} must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise ConfigInvalid(
                f"algorithm '{self.algorithm}' not one of {', '.join(ALGORITHMS)}"
            )
        if self.sample_count < 1:
            raise ConfigInvalid(f"sample_count {self.sample_count} must be >= 1")
        if self.threshold < 0.0:
            raise ConfigInvalid(f"threshold {self.threshold} must be >= 0")
        if self.trials < 1:
            raise ConfigInvalid(f"trials {self.trials} must be >= 1")
        if self.speed < 0.0:
            raise ConfigInvalid(f"speed {self.speed} must be >= 0")
        if self.staleness_delay <= 0.0:
            raise ConfigInvalid(
                f"staleness_delay {self.staleness_delay} must be positive"
            )
        if self.aoa_sigma < 0.0 or self.depth_sigma < 0.0:
            raise ConfigInvalid("noise sigmas must be >= 0")
        if self.seed < 0:
            raise ConfigInvalid(f"seed {self.seed} must be >= 0")
        if self.sweep_param is not None and self.sweep_param not in SWEEP_PARAMS:
            raise ConfigInvalid(
                f"sweep_param '{self.sweep_param}' not one of {', '.join(SWEEP_PARAMS)}"
            )
        if self.sweep_param is not None and not self.sweep_values:
            raise ConfigInvalid("sweep_values must be nonempty when sweep_param is set")

    def resolved_anchor_count(self) -> int:
        if self.anchor_count is not None:
            return self.anchor_count
        return anchors_from_density(self.d_anchor, self.comm_range, self.region)

    def localization_config(self) -> LocalizationConfig:
        return LocalizationConfig(
            variant=Variant(self.algorithm),
            sample_count=self.sample_count,
            threshold=self.threshold,
            weighting_mode=self.weighting_mode,
            range_mode=self.range_mode,
        )


@dataclass
class ErrorStats:
    mean: float
    max: float
    min: float
    stddev: float
    per_trial: list[float]
    failure_count: int

    @classmethod
    def from_per_trial(cls, per_trial: list[float], failure_count: int) -> "ErrorStats":
        if not per_trial:
            nan = float("nan")
            return cls(nan, nan, nan, nan, [], failure_count)
        return cls(
            mean=statistics.fmean(per_trial),
            max=max(per_trial),
            min=min(per_trial),
            stddev=statistics.pstdev(per_trial),
            per_trial=list(per_trial),
            failure_count=failure_count,
        )


@dataclass
class SweepRow:
    sweep_name: str
    sweep_value: float | None
    algorithm: str
    weighting_mode: str
    stats: ErrorStats
    trials: int
    seed: int


@dataclass
class NodeResult:
    """One mobile node's outcome within a single scenario."""

    mobile_id: int
    true_position: Position3D
    estimate: Estimate
    error: float


def localization_error(true_pos: Position3D, est: Position3D) -> float:
    """Euclidean distance between true and estimated positions."""
    return euclidean_distance(true_pos, est)


def _rng(*parts: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(parts)))


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


def baseline_trilateration(input: LocalizationInput) -> Estimate:
    """Least-squares trilateration from the in-plane circle equations.

    A sanity baseline, not a color-filtering method: linearizes
    (x - x_j)^2 + (y - y_j)^2 = p_j^2 against the first anchor and
    solves for (x, y); depth comes from the pressure sensor.
    """
    usable = usable_observations(input)
    if len(usable) < MIN_USABLE_ANCHORS:
        raise InsufficientAnchors(
            f"{len(usable)} usable anchors, need {MIN_USABLE_ANCHORS}"
        )
    centers = [(o.anchor_position.x, o.anchor_position.y) for o in usable]
    dists = [projected_distance(o.depth_difference, o.aoa_alpha) for o in usable]
    x0, y0 = centers[0]
    p0 = dists[0]
    a = np.array([[2.0 * (x - x0), 2.0 * (y - y0)] for x, y in centers[1:]])
    b = np.array(
        [
            p0 * p0 - p * p + (x * x - x0 * x0) + (y * y - y0 * y0)
            for (x, y), p in zip(centers[1:], dists[1:])
        ]
    )
    singular_values = np.linalg.svd(a, compute_uv=False)
    if singular_values[-1] <= 1e-8 * max(singular_values[0], 1.0):
        raise SingularGeometry("anchor projections are collinear")
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    degenerate = len(input.observations) - len(usable)
    return Estimate(
        Position3D(float(solution[0]), float(solution[1]), input.mobile_depth),
        degenerate_anchor_count=degenerate,
    )


def _estimate_node(
    scenario: Scenario,
    mobile: MobileNode,
    config: ExperimentConfig,
    noise: NoiseModel,
    trial: int,
) -> Estimate | None:
    """Localize one node, or None when it cannot be localized."""
    ids = discover_task_anchors(scenario, mobile.id)
    if not ids:
        return None
    by_id = {a.id: a for a in scenario.anchors}
    obs_rng = _rng(config.seed, trial, _STREAM_OBSERVE, mobile.id)
    observations = [
        synthesize_observation(by_id[i], mobile, noise, obs_rng, scenario.comm_range)
        for i in ids
    ]
    input = LocalizationInput(mobile.position.z, observations, scenario.comm_range)
    try:
        if config.algorithm == "trilateration":
            return baseline_trilateration(input)
        loc_rng = _rng(config.seed, trial, _STREAM_LOCALIZE, mobile.id)
        return localize(input, config.localization_config(), loc_rng)
    except (InsufficientAnchors, EmptyIntersection, NoUsableAnchor, SingularGeometry):
        return None


def run_trials(config: ExperimentConfig) -> ErrorStats:
    """Run config.trials independent trials and aggregate the errors.

    Each trial contributes the mean error over its localizable mobile
    nodes; nodes that cannot be localized are counted as failures and
    excluded.  Estimates are scored against the node position after the
    staleness delay of drift.
    """
    config.validate()
    n_anchors = config.resolved_anchor_count()
    noise = NoiseModel(config.aoa_sigma, config.depth_sigma)
    per_trial: list[float] = []
    failures = 0
    for trial in range(config.trials):
        scenario = deploy(
            config.region,
            n_anchors,
            config.mobile_count,
            config.comm_range,
            _derived_seed(config.seed, trial, _STREAM_DEPLOY),
        )
        estimates: dict[int, Estimate] = {}
        for mobile in scenario.mobiles:
            est = _estimate_node(scenario, mobile, config, noise, trial)
            if est is None:
                failures += 1
            else:
                estimates[mobile.id] = est
        moved = step_mobility(
            scenario,
            config.staleness_delay,
            config.speed,
            _rng(config.seed, trial, _STREAM_MOVE),
        )
        errors = [
            localization_error(moved.mobile(mid).position, est.position)
            for mid, est in estimates.items()
        ]
        if errors:
            per_trial.append(statistics.fmean(errors))
    return ErrorStats.from_per_trial(per_trial, failures)


def _row_mode(algorithm: str, config: ExperimentConfig) -> str:
    return "none" if algorithm == "trilateration" else config.weighting_mode.value


def run_trial_rows(
    config: ExperimentConfig, algorithms: list[str] | None = None
) -> list[SweepRow]:
    """run_trials over one or more algorithms, as summary rows."""
    rows = []
    for algorithm in algorithms or [config.algorithm]:
        cfg = replace(config, algorithm=algorithm)
        stats = run_trials(cfg)
        rows.append(
            SweepRow(
                sweep_name="none",
                sweep_value=None,
                algorithm=algorithm,
                weighting_mode=_row_mode(algorithm, config),
                stats=stats,
                trials=config.trials,
                seed=config.seed,
            )
        )
    return rows


def apply_sweep_value(config: ExperimentConfig, param: str, value: float) -> ExperimentConfig:
    if param == "threshold":
        return replace(config, threshold=float(value))
    if param == "sample_count":
        return replace(config, sample_count=int(round(value)))
    if param == "d_anchor":
        return replace(config, d_anchor=float(value), anchor_count=None)
    if param == "anchor_count":
        return replace(config, anchor_count=int(round(value)), d_anchor=None)
    if param == "speed":
        return replace(config, speed=float(value))
    if param == "mobile_count":
        return replace(config, mobile_count=int(round(value)))
    raise ConfigInvalid(f"sweep_param '{param}' not one of {', '.join(SWEEP_PARAMS)}")


def run_sweep(
    config: ExperimentConfig, algorithms: list[str] | None = None
) -> list[SweepRow]:
    """run_trials once per (sweep value, algorithm), all else fixed."""
    config.validate()
    if config.sweep_param is None or not config.sweep_values:
        raise ConfigInvalid("sweep requires sweep_param and sweep_values")
    rows = []
    for value in config.sweep_values:
        swept = apply_sweep_value(config, config.sweep_param, value)
        for algorithm in algorithms or [config.algorithm]:
            cfg = replace(swept, algorithm=algorithm)
            stats = run_trials(cfg)
            rows.append(
                SweepRow(
                    sweep_name=config.sweep_param,
                    sweep_value=float(value),
                    algorithm=algorithm,
                    weighting_mode=_row_mode(algorithm, config),
                    stats=stats,
                    trials=config.trials,
                    seed=config.seed,
                )
            )
    return rows


def localize_scenario(
    scenario: Scenario, config: ExperimentConfig
) -> tuple[list[NodeResult], int]:
    """Localize every mobile node of one fixed scenario once.

    Returns the per-node results and the count of nodes that could not
    be localized.  Estimates are scored against the observed positions
    (no staleness step).
    """
    config.validate()
    noise = NoiseModel(config.aoa_sigma, config.depth_sigma)
    results = []
    failures = 0
    for mobile in scenario.mobiles:
        est = _estimate_node(scenario, mobile, config, noise, trial=0)
        if est is None:
            failures += 1
            continue
        results.append(
            NodeResult(
                mobile_id=mobile.id,
                true_position=mobile.position,
                estimate=est,
                error=localization_error(mobile.position, est.position),
            )
        )
    return results, failures


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    return format(float(value), ".6g")


def rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        s = r.stats
        lines.append(
            ",".join(
                [
                    r.sweep_name,
                    _fmt(r.sweep_value),
                    r.algorithm,
                    r.weighting_mode,
                    _fmt(s.mean),
                    _fmt(s.max),
                    _fmt(s.min),
                    _fmt(s.stddev),
                    str(s.failure_count),
                    str(r.trials),
                    str(r.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def emit_csv(rows: list[SweepRow], path: str | Path) -> None:
    """Write sweep/trial rows as CSV (6 significant digits)."""
    try:
        with open(path, "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    except OSError as exc:
        raise IoFailure(f"cannot write CSV to {path}: {exc}") from exc


def format_summary(rows: list[SweepRow]) -> str:
    """Human-readable table of the same rows emitted to CSV."""
    header = CSV_HEADER.split(",")
    table = [header]
    for r in rows:
        s = r.stats
        table.append(
            [
                r.sweep_name,
                _fmt(r.sweep_value) or "-",
                r.algorithm,
                r.weighting_mode,
                _fmt(s.mean),
                _fmt(s.max),
                _fmt(s.min),
                _fmt(s.stddev),
                str(s.failure_count),
                str(r.trials),
                str(r.seed),
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in table
    ]
    return "\n".join(lines)
