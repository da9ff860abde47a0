"""Command-line front end.

Subcommands: localize-once, trials, sweep, fixtures.  Configuration
comes from an optional `key = value` file plus repeatable --set
overrides; overrides always win.  Every run writes a CSV next to a
rendered figure and prints a plain-text summary.

Exit codes: 0 success, 1 invalid configuration, 2 I/O failure,
3 when every node failed to localize.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ColorlocError, ConfigInvalid, IoFailure
from .experiments import (
    ALGORITHMS,
    ExperimentConfig,
    NodeResult,
    SweepRow,
    emit_csv,
    format_summary,
    localize_scenario,
    run_sweep,
    run_trial_rows,
)
from .localization import RangeMode, WeightingMode
from .netsim import Region, deploy, read_scenario, three_anchor_fixture, write_scenario
from .report import (
    render_error_histogram,
    render_positions_figure,
    render_sweep_figure,
)

DEFAULT_SEED = 42


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigInvalid(f"key '{key}': '{value}' is not a number") from None


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigInvalid(f"key '{key}': '{value}' is not an integer") from None


def _parse_values(key: str, value: str) -> list[float]:
    items = [v.strip() for v in value.split(",") if v.strip()]
    if not items:
        raise ConfigInvalid(f"key '{key}': empty value list")
    return [_parse_float(key, v) for v in items]


CONFIG_KEYS = (
    "region_x",
    "region_y",
    "region_z",
    "comm_range",
    "d_anchor",
    "anchor_count",
    "mobile_count",
    "algorithm",
    "sample_count",
    "threshold",
    "weighting_mode",
    "range_mode",
    "trials",
    "speed",
    "staleness_delay",
    "aoa_sigma",
    "depth_sigma",
    "sweep_param",
    "sweep_values",
)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse the line-oriented `key = value` format.

    Blank lines and lines starting with '#' are ignored.  Unknown keys
    are rejected by name.
    """
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigInvalid(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigInvalid(f"{source}:{lineno}: unknown config key '{key}'")
        pairs[key] = value
    return pairs


def read_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=path)


def parse_overrides(items: list[str]) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for item in items:
        if "=" not in item:
            raise ConfigInvalid(f"--set expects key=value, got '{item}'")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigInvalid(f"unknown config key '{key}'")
        pairs[key] = value.strip()
    return pairs


def _parse_algorithms(value: str) -> list[str]:
    if value.strip().lower() == "all":
        return list(ALGORITHMS)
    names = [v.strip().lower() for v in value.split(",") if v.strip()]
    if not names:
        raise ConfigInvalid("key 'algorithm': empty value")
    for name in names:
        if name not in ALGORITHMS:
            raise ConfigInvalid(
                f"key 'algorithm': '{name}' not one of {', '.join(ALGORITHMS)} or 'all'"
            )
    return names


def build_config(pairs: dict[str, str], seed: int) -> tuple[ExperimentConfig, list[str]]:
    """Turn merged key/value pairs into an ExperimentConfig plus the
    list of algorithms to run."""
    region = Region(
        _parse_float("region_x", pairs.get("region_x", "1000")),
        _parse_float("region_y", pairs.get("region_y", "1000")),
        _parse_float("region_z", pairs.get("region_z", "20")),
    )
    algorithms = _parse_algorithms(pairs.get("algorithm", "pcfl"))
    try:
        weighting = WeightingMode(pairs.get("weighting_mode", "literal").lower())
    except ValueError:
        raise ConfigInvalid(
            f"key 'weighting_mode': '{pairs['weighting_mode']}' not literal|inverse"
        ) from None
    try:
        range_mode = RangeMode(pairs.get("range_mode", "global_r").lower())
    except ValueError:
        raise ConfigInvalid(
            f"key 'range_mode': '{pairs['range_mode']}' not global_r|per_anchor"
        ) from None

    anchor_count = (
        _parse_int("anchor_count", pairs["anchor_count"])
        if "anchor_count" in pairs
        else None
    )
    d_anchor = (
        _parse_float("d_anchor", pairs["d_anchor"])
        if "d_anchor" in pairs
        else (None if anchor_count is not None else 4.0)
    )

    config = ExperimentConfig(
        region=region,
        comm_range=_parse_float("comm_range", pairs.get("comm_range", "100")),
        d_anchor=d_anchor,
        anchor_count=anchor_count,
        mobile_count=_parse_int("mobile_count", pairs.get("mobile_count", "20")),
        algorithm=algorithms[0],
        sample_count=_parse_int("sample_count", pairs.get("sample_count", "400")),
        threshold=_parse_float("threshold", pairs.get("threshold", "0.01")),
        weighting_mode=weighting,
        range_mode=range_mode,
        trials=_parse_int("trials", pairs.get("trials", "50")),
        speed=_parse_float("speed", pairs.get("speed", "0.1")),
        staleness_delay=_parse_float("staleness_delay", pairs.get("staleness_delay", "1")),
        aoa_sigma=_parse_float("aoa_sigma", pairs.get("aoa_sigma", "0")),
        depth_sigma=_parse_float("depth_sigma", pairs.get("depth_sigma", "0")),
        seed=seed,
        sweep_param=pairs.get("sweep_param"),
        sweep_values=(
            _parse_values("sweep_values", pairs["sweep_values"])
            if "sweep_values" in pairs
            else None
        ),
    )
    config.validate()
    return config, algorithms


def _load_config(args: argparse.Namespace) -> tuple[ExperimentConfig, list[str]]:
    pairs = read_config_file(args.config) if args.config else {}
    pairs.update(parse_overrides(args.set or []))
    return build_config(pairs, args.seed)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output directory {out}: {exc}") from exc
    return out


def _all_failed(rows: list[SweepRow]) -> bool:
    return all(not r.stats.per_trial for r in rows)


def cmd_trials(args: argparse.Namespace) -> int:
    config, algorithms = _load_config(args)
    out = _out_dir(args)
    rows = run_trial_rows(config, algorithms)
    emit_csv(rows, out / "trials.csv")
    render_error_histogram(rows, out / "trials_errors.png")
    print(format_summary(rows))
    print(f"wrote {out / 'trials.csv'} and {out / 'trials_errors.png'}")
    return 3 if _all_failed(rows) else 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config, algorithms = _load_config(args)
    if config.sweep_param is None or not config.sweep_values:
        raise ConfigInvalid("sweep requires sweep_param and sweep_values")
    out = _out_dir(args)
    rows = run_sweep(config, algorithms)
    emit_csv(rows, out / "sweep.csv")
    render_sweep_figure(rows, out / "sweep_mean_error.png")
    print(format_summary(rows))
    print(f"wrote {out / 'sweep.csv'} and {out / 'sweep_mean_error.png'}")
    return 3 if _all_failed(rows) else 0


_ONCE_HEADER = (
    "mobile_id,algorithm,weighting_mode,true_x,true_y,true_z,"
    "est_x,est_y,est_z,error_m,filtered_count,fallback_used"
)


def _once_csv(records: list[tuple[str, str, NodeResult]]) -> str:
    lines = [_ONCE_HEADER]
    for algorithm, mode, res in records:
        t, e = res.true_position, res.estimate.position
        lines.append(
            ",".join(
                [
                    str(res.mobile_id),
                    algorithm,
                    mode,
                    *(format(v, ".6g") for v in (t.x, t.y, t.z, e.x, e.y, e.z, res.error)),
                    str(res.estimate.filtered_count),
                    str(res.estimate.fallback_used).lower(),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def cmd_localize_once(args: argparse.Namespace) -> int:
    config, algorithms = _load_config(args)
    out = _out_dir(args)
    if args.scenario:
        scenario = read_scenario(args.scenario)
    else:
        scenario = deploy(
            config.region,
            config.resolved_anchor_count(),
            config.mobile_count,
            config.comm_range,
            config.seed,
        )
    records: list[tuple[str, str, NodeResult]] = []
    failures = 0
    first_results: list[NodeResult] = []
    for algorithm in algorithms:
        results, failed = localize_scenario(scenario, replace(config, algorithm=algorithm))
        failures += failed
        mode = "none" if algorithm == "trilateration" else config.weighting_mode.value
        records.extend((algorithm, mode, r) for r in results)
        if not first_results:
            first_results = results
    try:
        (out / "localize_once.csv").write_text(_once_csv(records))
    except OSError as exc:
        raise IoFailure(f"cannot write {out / 'localize_once.csv'}: {exc}") from exc
    if first_results:
        render_positions_figure(first_results, out / "localize_once_positions.png")
    for algorithm, mode, res in records:
        print(
            f"{algorithm}/{mode} node {res.mobile_id}: "
            f"error {res.error:.3f} m (filtered {res.estimate.filtered_count}, "
            f"fallback {res.estimate.fallback_used})"
        )
    if failures:
        print(f"{failures} node localization(s) failed", file=sys.stderr)
    print(f"wrote {out / 'localize_once.csv'}")
    return 3 if not records else 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    path = out / "fixture_three_anchor.txt"
    write_scenario(three_anchor_fixture(args.seed), path)
    print(f"wrote {path}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colorloc",
        description="Color-filtering localization simulator for underwater sensor networks",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    handlers = {
        "localize-once": ("localize every node of one scenario once", cmd_localize_once),
        "trials": ("run repeated trials and aggregate error statistics", cmd_trials),
        "sweep": ("run trials over a swept parameter", cmd_sweep),
        "fixtures": ("write the canonical test scenarios", cmd_fixtures),
    }
    for name, (help_text, handler) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override a config key (repeatable; wins over the file)",
        )
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
        p.add_argument("--out", default=".", help="output directory")
        if name == "localize-once":
            p.add_argument("--scenario", help="serialized scenario file to load instead of deploying")
        p.set_defaults(handler=handler)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except IoFailure as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except ColorlocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
