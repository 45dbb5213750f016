"""Command-line front end.

Subcommands:
    match          match one image fragment against a filter bank
    sweep-locking  two-oscillator locking sweep over a detuning grid
    featuremap     analog feature map vs exact correlation map
    hw             closed-form hardware estimates

Configuration comes from built-in defaults, overridden by a JSON config
file (--config), overridden by flags. All CSV output has a header row
and locale-independent number formatting; runs are deterministic given
the config and seeds. Exit codes: 0 success, 1 usage or config error,
2 runtime numeric error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .dynamics import (
    OscillatorArrayConfig,
    integrate,
    random_initial_state,
    sweep_locking,
)
from .encoding import Fragment, GaborFilter, default_bank, fsk_encode, gabor_filter
from .errors import ConfigurationError, InputError, NumericError, OscconvError
from .hardware import (
    HardwareParams,
    inference_cost_estimate,
    locking_range_fraction,
    power_per_oscillator,
)
from .inference import DomPolicy, MatchReport, feature_map_onn, match_filters, winner_take_all
from .oracle import FeatureMap, Image, convolve_valid
from .pgm import read_pgm


class _UsageError(Exception):
    """Command-line usage problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1 here
        raise _UsageError(message)


def _fmt(value) -> str:
    """Locale-independent CSV cell: shortest round-trip float, empty for None."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


_ENG_PREFIXES = ((1e-15, "f"), (1e-12, "p"), (1e-9, "n"), (1e-6, "u"), (1e-3, "m"), (1.0, ""))


def _eng(value: float, unit: str) -> str:
    """Engineering rendering of a small SI quantity, e.g. 2.08e-4 W -> 0.208 mW."""
    mag = abs(value)
    if mag == 0:
        return f"0 {unit}"
    for scale, prefix in _ENG_PREFIXES:
        if mag < scale * 1000.0:
            return f"{value / scale:.4g} {prefix}{unit}"
    return f"{value:.4g} {unit}"


def load_image(path: str) -> Image:
    """Read a PGM file and normalize pixel values onto [-1, +1]."""
    raw, maxval = read_pgm(path)
    values = 2.0 * raw.ravel() / maxval - 1.0
    return Image(width=raw.shape[1], height=raw.shape[0], values=values)


# -- configuration ----------------------------------------------------------

_POLICY_KEYS = {"method", "sample_time", "trailing_fraction"}
_BANK_ENTRY_KEYS = {"theta_deg", "k", "phase", "binarized"}


@dataclass
class RunConfig:
    """Merged run configuration shared by the simulation commands."""

    rho: float = 1.0
    omega0: float = 1.0
    delta_omega: float = 0.05
    epsilon: float | None = None
    include_self_in_sum: bool = True
    dt: float | None = None
    t_end: float = 400.0
    stride: int = 1
    seed: int = 0
    side: int = 5
    seeds: tuple = tuple(range(8))
    jobs: int | None = None
    dom_policy: DomPolicy = DomPolicy()
    spread_tol: float | None = None
    dom_threshold_fraction: float = 0.8
    reference_oscillator: bool = False
    bank: object = None  # None (default bank), path string, or inline list

    def array_config(self, n: int) -> OscillatorArrayConfig:
        return OscillatorArrayConfig(
            n=n,
            rho=self.rho,
            omega0=self.omega0,
            delta_omega=self.delta_omega,
            epsilon=self.epsilon,
            include_self_in_sum=self.include_self_in_sum,
            dt=self.dt,
            t_end=self.t_end,
            stride=self.stride,
            seed=self.seed,
        )

    def resolve_bank(self) -> tuple[GaborFilter, ...]:
        if self.bank is None:
            return default_bank(self.side)
        entries = self.bank
        if isinstance(entries, str):
            try:
                entries = json.loads(Path(entries).read_text())
            except OSError as exc:
                raise InputError(f"cannot read bank file {self.bank}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise InputError(f"bank file {self.bank}: invalid JSON: {exc}") from exc
        if not isinstance(entries, list) or not entries:
            raise ConfigurationError("bank: must be a nonempty list of filter entries")
        filters = []
        for i, entry in enumerate(entries):
            if not isinstance(entry, dict):
                raise ConfigurationError(f"bank[{i}]: entry must be an object")
            unknown = set(entry) - _BANK_ENTRY_KEYS
            if unknown:
                raise ConfigurationError(f"bank[{i}]: unknown field {sorted(unknown)[0]!r}")
            for required in ("theta_deg", "k"):
                if required not in entry:
                    raise ConfigurationError(f"bank[{i}]: missing field {required!r}")
            filters.append(
                gabor_filter(
                    self.side,
                    float(entry["theta_deg"]),
                    float(entry["k"]),
                    float(entry.get("phase", 0.0)),
                    bool(entry.get("binarized", True)),
                )
            )
        return tuple(filters)


def _config_from(path: str | None, args: argparse.Namespace) -> RunConfig:
    """Defaults, then JSON file values, then flag overrides."""
    merged: dict = {}
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except OSError as exc:
            raise InputError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config file {path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError("config: top level must be a JSON object")
        known = {f.name for f in fields(RunConfig)}
        for key, value in loaded.items():
            if key not in known:
                raise ConfigurationError(f"config: unknown field {key!r}")
            merged[key] = value
    if "dom_policy" in merged:
        raw = merged["dom_policy"]
        if not isinstance(raw, dict):
            raise ConfigurationError("config: dom_policy must be an object")
        unknown = set(raw) - _POLICY_KEYS
        if unknown:
            raise ConfigurationError(f"config: dom_policy: unknown field {sorted(unknown)[0]!r}")
        merged["dom_policy"] = DomPolicy(**raw)
    if "seeds" in merged:
        if not isinstance(merged["seeds"], list) or not merged["seeds"]:
            raise ConfigurationError("config: seeds must be a nonempty list of integers")
        merged["seeds"] = tuple(int(s) for s in merged["seeds"])

    # flags win over file values
    flag_map = {
        "rho": "rho",
        "omega0": "omega0",
        "delta_omega": "delta_omega",
        "epsilon": "epsilon",
        "dt": "dt",
        "t_end": "t_end",
        "stride": "stride",
        "side": "side",
        "jobs": "jobs",
        "spread_tol": "spread_tol",
        "dom_threshold_fraction": "dom_threshold_fraction",
        "bank": "bank",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = value
    if getattr(args, "seeds", None) is not None:
        merged["seeds"] = _parse_seeds(args.seeds)
    if getattr(args, "reference_oscillator", False):
        merged["reference_oscillator"] = True
    policy_flags = {
        k: getattr(args, a)
        for k, a in (("method", "dom_method"), ("sample_time", "sample_time"),
                     ("trailing_fraction", "trailing_fraction"))
        if getattr(args, a, None) is not None
    }
    if policy_flags:
        base = merged.get("dom_policy", DomPolicy())
        merged["dom_policy"] = DomPolicy(
            method=policy_flags.get("method", base.method),
            sample_time=policy_flags.get("sample_time", base.sample_time),
            trailing_fraction=policy_flags.get("trailing_fraction", base.trailing_fraction),
        )
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigurationError(f"config: {exc}") from exc


def _parse_seeds(text: str) -> tuple:
    """Seed list: '0,3,5' or a half-open range 'start:stop'."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop = (int(p) for p in text.split(":"))
            if stop <= start:
                raise ValueError
            return tuple(range(start, stop))
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise _UsageError(f"--seeds expects 'a,b,c' or 'start:stop', got {text!r}") from None


def _parse_origin(text: str) -> tuple[int, int]:
    try:
        row, col = (int(p) for p in text.split(","))
        return row, col
    except ValueError:
        raise _UsageError(f"--origin expects 'row,col', got {text!r}") from None


def _parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(p) for p in text.split(":"))
        if step <= 0 or stop < start:
            raise ValueError
    except ValueError:
        raise _UsageError(f"--grid expects 'start:stop:step', got {text!r}") from None
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return start + step * np.arange(count)


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out_dir", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([[_fmt(v) for v in row] for row in rows])


def _write_map_csv(path: Path, fmap: FeatureMap) -> None:
    grid = fmap.grid()
    header = [f"c{j}" for j in range(fmap.width)]
    _write_csv(path, header, [list(row) for row in grid])


# -- subcommands -------------------------------------------------------------

def cmd_match(args) -> int:
    cfg = _config_from(args.config, args)
    bank = cfg.resolve_bank()
    img = load_image(args.image)
    row, col = _parse_origin(args.origin)
    fragment = img.window(row, col, cfg.side)
    n = cfg.side ** 2 + (1 if cfg.reference_oscillator else 0)
    array_cfg = cfg.array_config(n)
    report = match_filters(
        fragment,
        bank,
        array_cfg,
        cfg.dom_policy,
        cfg.seeds,
        reference_oscillator=cfg.reference_oscillator,
        jobs=cfg.jobs,
        spread_tol=cfg.spread_tol,
        dom_threshold_fraction=cfg.dom_threshold_fraction,
    )
    out = _out_dir(args)
    _write_csv(
        out / "report.csv",
        ["filter_index", "theta_deg", "k", "dot", "dom_mean", "dom_std", "locked", "lock_time"],
        [
            [r.filter_index, r.theta_deg, r.k, r.dot, r.dom_mean, r.dom_std, r.locked, r.lock_time]
            for r in report.results
        ],
    )
    if report.errors:
        _write_csv(
            out / "report_errors.csv",
            ["filter_index", "message"],
            [[e.filter_index, e.message] for e in report.errors],
        )
    if not report.results:
        raise NumericError(
            f"all {len(report.errors)} filters failed; see report_errors.csv"
        )
    if args.dump_traces:
        _dump_traces(out, fragment, bank, cfg, array_cfg)
    _print_match_summary(report, bank)
    return 0


def _print_match_summary(report: MatchReport, bank) -> None:
    if report.ranking:
        top = winner_take_all(report, min(4, len(report.ranking)))
        best = next(r for r in report.results if r.filter_index == top[0])
        print(
            f"winner: filter {best.filter_index} "
            f"(theta={best.theta_deg:g} k={best.k:g}) "
            f"dom={best.dom_mean:.4f} dot={best.dot:g}"
        )
        print(f"top-{len(top)} by dom: {', '.join(str(i) for i in top)}")
        print(f"dynamic range: {report.dynamic_range:.4f}")
    print(f"filters: {len(report.results)} ok, {len(report.errors)} failed")


def _dump_traces(out: Path, fragment: Fragment, bank, cfg: RunConfig, array_cfg) -> None:
    """One trace CSV per filter, integrated at the first seed."""
    seed = cfg.seeds[0]
    for index, filt in enumerate(bank):
        omega = fsk_encode(fragment, filt, array_cfg.omega0, array_cfg.delta_omega)
        if cfg.reference_oscillator:
            omega = np.append(omega, array_cfg.omega0)
        trace = integrate(omega, array_cfg, random_initial_state(array_cfg.n, seed))
        _write_csv(
            out / f"trace_filter_{index:02d}.csv",
            ["time", "averager_re", "averager_im", "envelope", "peak_detector"],
            [
                [t, s.real, s.imag, e, p]
                for t, s, e, p in zip(
                    trace.times, trace.averager, trace.envelope, trace.peak_detector_output
                )
            ],
        )


def cmd_sweep_locking(args) -> int:
    cfg = _config_from(args.config, args)
    grid = _parse_grid(args.grid)
    epsilon = args.epsilon if args.epsilon is not None else 0.05
    points = sweep_locking(
        epsilon,
        grid,
        omega0=cfg.omega0,
        rho=cfg.rho,
        t_end=args.t_end if args.t_end is not None else 1200.0,
        dt=cfg.dt,
        seed=cfg.seed,
        gap_tol=cfg.spread_tol,
    )
    out = _out_dir(args)
    _write_csv(
        out / "sweep.csv",
        ["detuning", "locked", "final_freq_gap", "beat_amplitude"],
        [[p.detuning, p.locked, p.final_freq_gap, p.beat_amplitude] for p in points],
    )
    locked = [p.detuning for p in points if p.locked]
    if locked:
        print(f"locking boundary: {max(locked):g} (largest locked detuning, epsilon={epsilon:g})")
    else:
        print(f"no locked point on the grid (epsilon={epsilon:g})")
    return 0


def cmd_featuremap(args) -> int:
    cfg = _config_from(args.config, args)
    img = load_image(args.image)
    if args.theta_deg is not None or args.k is not None:
        if args.theta_deg is None or args.k is None:
            raise _UsageError("--theta-deg and --k must be given together")
        filt = gabor_filter(
            cfg.side, args.theta_deg, args.k, args.phase or 0.0, not args.raw_filter
        )
    else:
        bank = cfg.resolve_bank()
        index = args.filter_index if args.filter_index is not None else 0
        if not 0 <= index < len(bank):
            raise ConfigurationError(
                f"--filter-index {index} outside bank of {len(bank)} filters"
            )
        filt = bank[index]
    array_cfg = cfg.array_config(cfg.side ** 2)
    onn = feature_map_onn(img, filt, array_cfg, cfg.dom_policy, cfg.seeds, jobs=cfg.jobs)
    oracle_map = convolve_valid(img, filt, mode="correlation")
    out = _out_dir(args)
    _write_map_csv(out / "onn_map.csv", onn)
    _write_map_csv(out / "oracle_map.csv", oracle_map)
    if onn.errors:
        _write_csv(
            out / "featuremap_errors.csv",
            ["row", "col", "message"],
            [list(e) for e in onn.errors],
        )
    if not np.isfinite(onn.values).any():
        raise NumericError(
            f"all {len(onn.errors)} windows failed; see featuremap_errors.csv"
        )
    valid = np.isfinite(onn.values)
    if valid.sum() >= 2 and np.std(onn.values[valid]) > 0 and np.std(oracle_map.values[valid]) > 0:
        r = float(np.corrcoef(onn.values[valid], oracle_map.values[valid])[0, 1])
        pearson = repr(r)
    else:
        pearson = "nan"
    print(
        f"pearson={pearson} rows={onn.height} cols={onn.width} "
        f"windows={onn.height * onn.width} errors={len(onn.errors)}"
    )
    return 0


def cmd_hw(args) -> int:
    hw = HardwareParams(
        i_drv=args.i_drv, vcc=args.vcc, f=args.freq, c_coup=args.c_coup, n=args.n
    )
    fraction = locking_range_fraction(hw)
    power = power_per_oscillator(hw)
    cost = inference_cost_estimate(hw, args.delay_per_conv, args.n_filters)
    print(f"locking_range_fraction = {fraction:.6g}")
    print(f"power_per_oscillator = {power:.6g} W ({_eng(power, 'W')})")
    print(
        f"inference: delay = {cost.delay:.6g} s ({_eng(cost.delay, 's')}), "
        f"energy = {cost.energy:.6g} J ({_eng(cost.energy, 'J')})"
    )
    return 0


# -- parser ------------------------------------------------------------------

def _add_common_flags(p: _Parser, with_sim: bool = True) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out-dir", help="output directory (default: current)")
    if with_sim:
        p.add_argument("--seeds", help="seed list 'a,b,c' or range 'start:stop'")
        p.add_argument("--jobs", type=int, help="worker threads for independent runs")
        p.add_argument("--rho", type=float)
        p.add_argument("--omega0", type=float)
        p.add_argument("--delta-omega", dest="delta_omega", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--dt", type=float)
        p.add_argument("--t-end", dest="t_end", type=float)
        p.add_argument("--stride", type=int)
        p.add_argument("--side", type=int, help="fragment/filter side in pixels")
        p.add_argument("--spread-tol", dest="spread_tol", type=float)
        p.add_argument(
            "--dom-threshold", dest="dom_threshold_fraction", type=float,
            help="lock-time envelope threshold as a fraction of the plateau",
        )
        p.add_argument("--dom-method", dest="dom_method",
                       choices=("trailing_mean_envelope", "sample_peak_detector"))
        p.add_argument("--sample-time", dest="sample_time", type=float)
        p.add_argument("--trailing-fraction", dest="trailing_fraction", type=float)
        p.add_argument("--bank", help="JSON bank file: list of {theta_deg, k, phase, binarized}")


def build_parser() -> _Parser:
    parser = _Parser(prog="oscconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="match a fragment against the filter bank")
    p.add_argument("image", help="PGM image (P2 or P5)")
    p.add_argument("--origin", default="0,0", help="fragment top-left 'row,col'")
    p.add_argument("--dump-traces", action="store_true", help="write per-filter trace CSVs")
    p.add_argument(
        "--reference-oscillator", action="store_true",
        help="add one extra oscillator at omega0 that encodes no pixel",
    )
    _add_common_flags(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("sweep-locking", help="two-oscillator locking sweep")
    p.add_argument("--epsilon", type=float, help="coupling coefficient (default 0.05)")
    p.add_argument("--grid", default="0:0.2:0.01", help="detuning grid 'start:stop:step'")
    p.add_argument("--t-end", dest="t_end", type=float, help="span per run (default 1200)")
    p.add_argument("--rho", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--spread-tol", dest="spread_tol", type=float,
                   help="locked threshold on the final frequency gap (default 0.1*epsilon)")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out-dir", help="output directory (default: current)")
    p.set_defaults(func=cmd_sweep_locking)

    p = sub.add_parser("featuremap", help="analog feature map plus oracle map")
    p.add_argument("image", help="PGM image (P2 or P5)")
    p.add_argument("--filter-index", type=int, help="index into the bank (default 0)")
    p.add_argument("--theta-deg", type=float, help="build a single filter instead: direction")
    p.add_argument("--k", type=float, help="build a single filter instead: inverse period")
    p.add_argument("--phase", type=float, help="filter phase offset (default 0)")
    p.add_argument("--raw-filter", action="store_true", help="skip binarization")
    _add_common_flags(p)
    p.set_defaults(func=cmd_featuremap)

    p = sub.add_parser("hw", help="hardware locking range, power, and cost")
    p.add_argument("--i-drv", dest="i_drv", type=float, required=True, help="drive current, A")
    p.add_argument("--vcc", type=float, required=True, help="supply voltage, V")
    p.add_argument("--freq", type=float, required=True, help="oscillation frequency, Hz")
    p.add_argument("--c-coup", dest="c_coup", type=float, required=True, help="coupling capacitance, F")
    p.add_argument("--n", type=int, default=26, help="oscillator count")
    p.add_argument("--delay-per-conv", dest="delay_per_conv", type=float, default=6e-9,
                   help="delay per convolution, s")
    p.add_argument("--n-filters", dest="n_filters", type=int, default=1)
    p.set_defaults(func=cmd_hw)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2
    except OscconvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
