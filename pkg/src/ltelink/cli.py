"""Command-line entry point: `ltelink simulate`.

Reads an optional flat key=value config file, applies flag overrides, runs the
Monte Carlo sweep and writes the CSV.  Flags always win over file values.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .grid import Constellation, SystemConfig
from .harness import (
    Estimator,
    SweepConfig,
    emit_csv,
    format_summary,
    run_sweep,
)

__all__ = ["main", "build_parser", "parse_config_file", "sweep_config_from_sources"]

_SYSTEM_KEYS = {
    "bandwidth_mhz",
    "n_fft",
    "n_used",
    "cp_len",
    "n_symbols_per_slot",
    "n_tx",
    "n_rx",
    "constellation",
}
_SWEEP_KEYS = {
    "channel_lengths",
    "snr_grid_db",
    "n_frames",
    "seed",
    "estimators",
    "threshold_db",
}


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    text = Path(path).read_text()
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in _SYSTEM_KEYS | _SWEEP_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _parse_snr_range(text: str) -> tuple[float, ...]:
    """a:b:step inclusive grid, e.g. 0:30:5."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise argparse.ArgumentTypeError("step must be positive")
    grid = np.arange(start, stop + step / 2.0, step)
    return tuple(float(v) for v in grid)


def _parse_estimators(text: str) -> tuple[Estimator, ...]:
    return tuple(Estimator.parse(name) for name in text.split(",") if name.strip())


def sweep_config_from_sources(
    file_values: dict[str, str], args: argparse.Namespace
) -> SweepConfig:
    """Merge config-file values and CLI flags (flags win) into a SweepConfig."""
    sys_kwargs = {}
    if "bandwidth_mhz" in file_values:
        sys_kwargs["bandwidth_mhz"] = float(file_values["bandwidth_mhz"])
    for key in ("n_fft", "n_used", "cp_len", "n_symbols_per_slot", "n_tx", "n_rx"):
        if key in file_values:
            sys_kwargs[key] = int(file_values[key])
    if "constellation" in file_values:
        sys_kwargs["constellation"] = Constellation(file_values["constellation"].lower())
    if "bandwidth_mhz" in sys_kwargs and "n_fft" not in sys_kwargs:
        system = SystemConfig.from_profile(sys_kwargs.pop("bandwidth_mhz"), **sys_kwargs)
    else:
        system = SystemConfig(**sys_kwargs)

    sweep_kwargs: dict = {"system": system}
    if "channel_lengths" in file_values:
        sweep_kwargs["channel_lengths"] = _parse_int_list(file_values["channel_lengths"])
    if "snr_grid_db" in file_values:
        snrs = tuple(sorted(_parse_float_list(file_values["snr_grid_db"])))
        sweep_kwargs["snr_grid_db"] = snrs
    if "n_frames" in file_values:
        sweep_kwargs["n_frames"] = int(file_values["n_frames"])
    if "seed" in file_values:
        sweep_kwargs["seed"] = int(file_values["seed"])
    if "estimators" in file_values:
        sweep_kwargs["estimators"] = _parse_estimators(file_values["estimators"])
    if "threshold_db" in file_values:
        sweep_kwargs["threshold_override_db"] = float(file_values["threshold_db"])

    if args.snr is not None:
        sweep_kwargs["snr_grid_db"] = args.snr
    if args.channel_lengths is not None:
        sweep_kwargs["channel_lengths"] = args.channel_lengths
    if args.frames is not None:
        sweep_kwargs["n_frames"] = args.frames
    if args.seed is not None:
        sweep_kwargs["seed"] = args.seed
    if args.estimators is not None:
        sweep_kwargs["estimators"] = args.estimators
    if args.threshold_db is not None:
        sweep_kwargs["threshold_override_db"] = args.threshold_db
    if args.calibrate_threshold:
        sweep_kwargs["threshold_override_db"] = None
    return SweepConfig(**sweep_kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltelink",
        description="Link-level downlink simulator: MSE/BER versus SNR sweeps "
        "with LS, LMMSE and hybrid channel estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run a Monte Carlo sweep and write CSV")
    sim.add_argument("--config", type=Path, default=None, help="flat key=value config file")
    sim.add_argument(
        "--snr",
        type=_parse_snr_range,
        default=None,
        metavar="A:B:STEP",
        help="SNR grid in dB, inclusive (default 0:30:5)",
    )
    sim.add_argument(
        "--channel-lengths",
        type=_parse_int_list,
        default=None,
        metavar="CSV",
        help="channel tap counts, e.g. 6,10,20,40",
    )
    sim.add_argument("--frames", type=int, default=None, help="trials per grid cell")
    sim.add_argument("--seed", type=int, default=None, help="master seed")
    sim.add_argument(
        "--estimators",
        type=_parse_estimators,
        default=None,
        metavar="CSV",
        help="subset of ls,lmmse,hybrid,perfect",
    )
    group = sim.add_mutually_exclusive_group()
    group.add_argument(
        "--threshold-db",
        type=float,
        default=None,
        help="fixed hybrid switching SNR (skips calibration)",
    )
    group.add_argument(
        "--calibrate-threshold",
        action="store_true",
        help="force threshold calibration, ignoring any configured value",
    )
    sim.add_argument(
        "--out", type=Path, default=Path("results.csv"), help="output CSV path"
    )
    sim.add_argument(
        "--summary", action="store_true", help="print per-cell means to stdout"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        config = sweep_config_from_sources(file_values, args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    records = run_sweep(config)
    emit_csv(records, args.out)
    if args.summary:
        print(format_summary(records))
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
