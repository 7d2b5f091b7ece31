"""Command-line front end.

    dipolenet sweep {air-percentage,height,air-tx} [options]
    dipolenet pattern CONFIG [--step-deg 1] [--out FILE]
    dipolenet single [options]
    dipolenet replay OUT_DIR/manifest.json [--out DIR]

Exit status 2 signals an invalid configuration, 1 a runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from dipolenet import __version__
from dipolenet.antenna import AntennaConfig, DipoleParams, power_gain
from dipolenet.channel import dbm_to_watts
from dipolenet.scenario import (
    AIR_PERCENTAGES,
    DEFAULT_SCHEMES,
    HEIGHTS,
    ConfigError,
    ScenarioConfig,
    Scheme,
    default_workers,
    describe_network,
    single_realization,
    sweep_air_percentage,
    sweep_air_tx,
    sweep_height,
)

log = logging.getLogger("dipolenet")

CSV_COLUMNS = (
    "sweep_variable",
    "mean_sum_rate_bps_hz",
    "stderr",
    "mean_desired_dbm",
    "mean_interference_dbm",
    "mean_sir_db",
    "trials",
    "seed",
)
MANIFEST_NAME = "manifest.json"
SWEEP_KINDS = ("air-percentage", "height", "air-tx")
DEFAULT_STRATEGY = {1: "fixed", 2: "max_power", 3: "max_power"}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".12g")


# -- configuration ---------------------------------------------------------------


def _scenario_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--config", type=Path, help="YAML file mirroring ScenarioConfig fields")
    g.add_argument("--k", dest="K", type=int)
    g.add_argument("--area-half-width", type=float)
    g.add_argument("--air-height", type=float)
    g.add_argument("--air-rx-percentage", type=float)
    g.add_argument("--air-tx-percentage", type=float)
    g.add_argument("--dipoles", type=int)
    g.add_argument("--strategy")
    g.add_argument("--trials", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--tx-power-dbm", type=float)
    g.add_argument("--carrier-frequency", type=float)
    g.add_argument("--bandwidth", type=float)
    g.add_argument("--dipole-length", type=float)
    g.add_argument("--no-fading", dest="fading_enabled", action="store_const", const=False)
    g.add_argument("--fixed-topology", action="store_const", const=True)


_TOP_LEVEL = ("K", "area_half_width", "air_height", "air_rx_percentage", "air_tx_percentage",
              "dipoles", "strategy", "trials", "seed", "fading_enabled", "fixed_topology")


def load_config_file(path: Path) -> dict:
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a mapping")
    return data


def resolve_config(args, overrides: dict | None = None) -> tuple[ScenarioConfig, bool]:
    """Merge defaults < config file < flags.

    Returns the config and whether the antenna scheme was chosen explicitly.
    """
    merged: dict = {"radio": {}, "dipole_params": {}}
    if getattr(args, "config", None):
        data = load_config_file(args.config)
        for section in ("radio", "dipole_params"):
            sub = data.pop(section, None) or {}
            if not isinstance(sub, dict):
                raise ConfigError(section, "must be a mapping")
            merged[section].update(sub)
        merged.update(data)
    for key in _TOP_LEVEL:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    if getattr(args, "tx_power_dbm", None) is not None:
        merged["radio"]["tx_power"] = float(dbm_to_watts(args.tx_power_dbm))
    if getattr(args, "carrier_frequency", None) is not None:
        merged["radio"]["carrier_frequency"] = args.carrier_frequency
        merged["dipole_params"]["carrier_frequency"] = args.carrier_frequency
    if getattr(args, "bandwidth", None) is not None:
        merged["radio"]["bandwidth"] = args.bandwidth
        merged["radio"].pop("noise_power", None)
    if getattr(args, "dipole_length", None) is not None:
        merged["dipole_params"]["dipole_length"] = args.dipole_length
    for key, v in (overrides or {}).items():
        merged.setdefault(key, v)

    explicit = "dipoles" in merged or "strategy" in merged
    if "dipoles" in merged and "strategy" not in merged:
        merged["strategy"] = DEFAULT_STRATEGY.get(merged["dipoles"], "max_power")
    elif "strategy" in merged and "dipoles" not in merged:
        merged["dipoles"] = 1 if merged["strategy"] == "fixed" else 3
    return ScenarioConfig.from_dict(merged), explicit


def config_to_dict(config: ScenarioConfig) -> dict:
    return dataclasses.asdict(config)


# -- sweep -----------------------------------------------------------------------


def _parse_values(text: str | None, default):
    if text is None:
        return list(default)
    try:
        return [float(v) if "." in v or "e" in v.lower() else int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("values", f"expected a comma-separated list of numbers (got {text!r})") from None


def write_table(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([fmt(getattr(row, c)) for c in CSV_COLUMNS])


def execute_sweep(kind: str, config: ScenarioConfig, values, schemes, out_dir: Path, workers: int) -> dict:
    """Run a sweep, write one CSV per scheme plus the manifest."""
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    out_dir.mkdir(parents=True, exist_ok=True)
    if kind == "air-percentage":
        result = sweep_air_percentage(config, values, schemes, workers)
    elif kind == "height":
        result = sweep_height(config, values, schemes, workers)
    elif kind == "air-tx":
        result = sweep_air_tx(config, config.air_tx_percentage, values, schemes, workers)
    else:
        raise ConfigError("sweep", f"unknown sweep {kind!r}")

    outputs = {}
    for scheme in schemes:
        name = f"{kind}_{scheme.label}.csv"
        write_table(out_dir / name, result.table(scheme))
        outputs[scheme.label] = name
    manifest = {
        "tool": "dipolenet",
        "version": __version__,
        "command": "sweep",
        "sweep": kind,
        "values": list(values),
        "schemes": [[s.dipoles, s.strategy] for s in schemes],
        "seed": config.seed,
        "config": config_to_dict(config),
        "started": started,
        "outputs": outputs,
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def cmd_sweep(args) -> int:
    overrides = {"air_tx_percentage": 100.0} if args.kind == "air-tx" else None
    config, explicit = resolve_config(args, overrides)
    if explicit:
        schemes = (Scheme(config.dipoles, config.strategy),)
    else:
        schemes = DEFAULT_SCHEMES
    default_values = HEIGHTS if args.kind == "height" else AIR_PERCENTAGES
    values = _parse_values(args.values, default_values)
    if args.kind != "height":
        for v in values:
            if not 0 <= v <= 100:
                raise ConfigError("values", f"aerial percentages must lie in [0, 100] (got {v})")
    manifest = execute_sweep(args.kind, config, values, schemes, args.out, args.workers)
    for label, name in manifest["outputs"].items():
        print(f"{label}: {args.out / name}")
    return 0


def cmd_replay(args) -> int:
    try:
        manifest = json.loads(args.manifest.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("manifest", f"cannot read {args.manifest}: {exc}") from None
    config = ScenarioConfig.from_dict(manifest["config"])
    schemes = tuple(Scheme(int(d), s) for d, s in manifest["schemes"])
    out = args.out or args.manifest.parent
    execute_sweep(manifest["sweep"], config, manifest["values"], schemes, out, args.workers)
    print(out)
    return 0


# -- pattern / single ------------------------------------------------------------


def pattern_rows(config: AntennaConfig, step_deg: float, dipole: DipoleParams):
    n_az = int(round(360.0 / step_deg))
    n_pol = int(round(180.0 / step_deg)) + 1
    az_deg = -180.0 + step_deg * np.arange(n_az)
    pol_deg = step_deg * np.arange(n_pol)
    gain = power_gain(config, np.deg2rad(az_deg)[None, :], np.deg2rad(pol_deg)[:, None], dipole)
    for i, p in enumerate(pol_deg):
        for j, a in enumerate(az_deg):
            yield a, p, gain[i, j]


def cmd_pattern(args) -> int:
    try:
        config = AntennaConfig.parse(args.antenna)
    except ValueError as exc:
        raise ConfigError("config", str(exc)) from None
    if not 0 < args.step_deg <= 90:
        raise ConfigError("step_deg", "must lie in (0, 90]")
    try:
        dipole = DipoleParams(args.carrier_frequency, args.dipole_length)
    except ValueError as exc:
        raise ConfigError("dipole_params", str(exc)) from None
    out = args.out or Path("out") / f"pattern_{config.value}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("azimuth_deg", "polar_deg", "power_gain_linear"))
        for row in pattern_rows(config, args.step_deg, dipole):
            w.writerow([fmt(v) for v in row])
    print(out)
    return 0


def cmd_single(args) -> int:
    config, _ = resolve_config(args)
    network, selection, metrics = single_realization(config, args.trial)
    report = {
        "seed": config.seed,
        "trial": args.trial,
        "config": config_to_dict(config),
        **describe_network(network, selection, metrics),
    }
    print(json.dumps(report, indent=2))
    return 0


# -- entry point -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dipolenet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="Monte Carlo sweep, one CSV per antenna scheme")
    p.add_argument("kind", choices=SWEEP_KINDS)
    _scenario_args(p)
    p.add_argument("--values", help="comma-separated sweep values")
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--out", type=Path, default=Path("out"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="re-run a sweep from its manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--workers", type=int, default=default_workers())
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("pattern", help="power-gain grid of one antenna configuration")
    p.add_argument("antenna", metavar="CONFIG", help="X, Y, Z, XY, YZ or XZ")
    p.add_argument("--step-deg", type=float, default=1.0)
    p.add_argument("--carrier-frequency", type=float, default=800e6)
    p.add_argument("--dipole-length", type=float)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("single", help="report one network realization")
    _scenario_args(p)
    p.add_argument("--trial", type=int, default=0)
    p.set_defaults(func=cmd_single)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"dipolenet: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"dipolenet: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"dipolenet: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
