"""Experiment configuration, suite orchestration, and persisted reports.

Each suite is a deterministic function of its configuration: random
material comes from seeded generators, reductions run in fixed order, and
the canonical report body carries no wall-clock data, so identical
configurations produce byte-identical bodies.  A numerical failure inside
one suite is recorded as a failed check and the run continues.

Check records compare a measured value to an expected value.  Most checks
pass when |measured - expected| <= tolerance; bound and ordering checks
say so in their detail string.  Every expected value is tagged with its
origin: "theory" for the mathematical statement under test, "derived" for
independently computed oracles and asymptotics, "contract" for exact
structural or format identities.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .forms import chern_pairing, curvature_from_connection, sphere_cycle
from .gallery import (
    LoopSection,
    loop_metric,
    loop_space_leading_chern,
    loop_times,
    monopole_field,
    random_negative_order_connection,
    random_symbol,
    single_mode_inverse_symbol,
    symbol_ensemble,
)
from .quantize import operator_norm, quantize, restricted_norm
from .symbols import adjoint, commutator, compose, linear_combine, seminorm_scale
from .traces import TraceKind, leading_order_trace, wodzicki_residue

REPORT_FORMAT_NAME = "psido-report"
REPORT_FORMAT_VERSION = 1

SUITES = (
    "traces",
    "quantize-decay",
    "norm-continuity",
    "chern",
    "wodzicki-vanish",
    "loop-metric",
)

DEFAULT_TOLERANCES = {
    "trace-commutator": 1e-10,
    "trace-adjoint": 1e-12,
    "trace-linearity": 1e-12,
    "residue-multiplication": 0.0,
    "residue-connection": 1e-4,
    "residue-truncation-equality": 0.0,
    "residue-refinement-order": 2.0,
    "chern-normalized": 1e-5,
    "chern-identity": 1e-10,
    "decay-slope": 0.5,
    "norm-ratio-spread": 1e3,
    "norm-dyadic-scaling": 0.0,
    "loop-metric-closed-form": 1e-10,
    "loop-metric-quadrature": 1e-10,
    "loop-metric-monotone": 0.0,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: which suite, at which sizes, from which seed.

    The connection band default (4) is deliberately narrower than the
    symbol band: curvature composition stacks every grid point, and the
    narrow band keeps the refined 256x512 run inside ordinary memory while
    the parameter waves still carry the x-dependence being tested.
    """

    suite: str = "all"
    seed: int = 42
    truncation_order: int = 4
    band: int = 32
    window: int = 256
    rank: int = 2
    grid: tuple = (256, 512)
    sobolev_orders: tuple = (0, 1, 2, 3)
    bundle_degrees: tuple = (-2, -1, 0, 1, 2, 3)
    ensemble_count: int = 100
    ensemble_scale: float = 0.3
    connection_count: int = 10
    connection_band: int = 4
    connection_amplitude: float = 0.5
    parameter_modes: int = 4
    decay_windows: tuple = (32, 64, 128, 256)
    decay_depths: tuple = (2, 3, 4)
    loop_samples: int = 128
    tolerances: dict = field(default_factory=dict)
    out_dir: str | None = None
    emit_figures: bool = True

    def __post_init__(self) -> None:
        if self.suite not in SUITES + ("all",):
            raise ConfigError(
                "unknown suite %r; choose one of %s" % (self.suite, ", ".join(SUITES + ("all",)))
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer, got %r" % (self.seed,))
        _require_range("truncation_order", self.truncation_order, 1, 8)
        _require_range("band", self.band, 1, 512)
        _require_range("window", self.window, self.band, 4096)
        _require_range("rank", self.rank, 1, 8)
        grid = _int_tuple("grid", self.grid)
        if len(grid) != 2 or any(n < 16 or n % 2 for n in grid):
            raise ConfigError("grid must be two even sizes >= 16, got %r" % (self.grid,))
        object.__setattr__(self, "grid", grid)
        orders = _int_tuple("sobolev_orders", self.sobolev_orders)
        if not orders or any(s < 0 or s > 16 for s in orders):
            raise ConfigError("sobolev_orders must be integers in [0, 16], got %r" % (orders,))
        object.__setattr__(self, "sobolev_orders", orders)
        degrees = _int_tuple("bundle_degrees", self.bundle_degrees)
        if not degrees or any(abs(m) > 64 for m in degrees):
            raise ConfigError("bundle_degrees must be integers with |m| <= 64, got %r" % (degrees,))
        object.__setattr__(self, "bundle_degrees", degrees)
        _require_range("ensemble_count", self.ensemble_count, 1, 10000)
        if not 0.0 < float(self.ensemble_scale) <= 10.0:
            raise ConfigError("ensemble_scale must lie in (0, 10], got %r" % (self.ensemble_scale,))
        _require_range("connection_count", self.connection_count, 1, 100)
        _require_range("connection_band", self.connection_band, 1, 32)
        if not 0.0 < float(self.connection_amplitude) <= 10.0:
            raise ConfigError(
                "connection_amplitude must lie in (0, 10], got %r" % (self.connection_amplitude,)
            )
        _require_range("parameter_modes", self.parameter_modes, 1, 8)
        windows = _int_tuple("decay_windows", self.decay_windows)
        if len(windows) < 2 or any(w < 16 for w in windows) or list(windows) != sorted(set(windows)):
            raise ConfigError(
                "decay_windows must be at least two increasing sizes >= 16, got %r" % (windows,)
            )
        object.__setattr__(self, "decay_windows", windows)
        depths = _int_tuple("decay_depths", self.decay_depths)
        if not depths or any(k < 1 or k > 8 for k in depths):
            raise ConfigError("decay_depths must be integers in [1, 8], got %r" % (depths,))
        object.__setattr__(self, "decay_depths", depths)
        n = int(self.loop_samples)
        if n < 64 or n & (n - 1):
            raise ConfigError("loop_samples must be a power of two >= 64, got %r" % (n,))
        object.__setattr__(self, "loop_samples", n)
        merged = dict(DEFAULT_TOLERANCES)
        for key, value in dict(self.tolerances).items():
            if key not in DEFAULT_TOLERANCES:
                raise ConfigError("unknown tolerance key %r" % (key,))
            value = float(value)
            if not value >= 0.0:
                raise ConfigError("tolerance %r must be >= 0, got %r" % (key, value))
            merged[key] = value
        object.__setattr__(self, "tolerances", merged)

    @classmethod
    def from_mapping(cls, mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigError("unknown configuration keys: %s" % ", ".join(unknown))
        return cls(**dict(mapping))

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                loaded = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("cannot read config %r: %s" % (path, exc))
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object, got %s" % type(loaded).__name__)
        return cls.from_mapping(loaded)


def _require_range(name: str, value, low: int, high: int) -> None:
    if int(value) != value or not low <= int(value) <= high:
        raise ConfigError("%s must be an integer in [%d, %d], got %r" % (name, low, high, value))


def _int_tuple(name: str, values) -> tuple:
    try:
        out = tuple(int(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError("%s must be a sequence of integers, got %r" % (name, values))
    if any(v != w for v, w in zip(out, values)):
        raise ConfigError("%s entries must be whole numbers, got %r" % (name, values))
    return out


@dataclass(frozen=True)
class CheckRecord:
    name: str
    measured: object
    expected: object
    tolerance: float
    provenance: str
    passed: bool
    detail: str = ""


@dataclass
class ExperimentReport:
    suite: str
    seed: int
    parameters: dict
    checks: list
    tables: dict
    artifacts: list
    duration_seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def body(self) -> dict:
        return {
            "format": REPORT_FORMAT_NAME,
            "version": REPORT_FORMAT_VERSION,
            "suite": self.suite,
            "seed": self.seed,
            "parameters": _jsonable(self.parameters),
            "checks": [
                {
                    "name": c.name,
                    "measured": _jsonable(c.measured),
                    "expected": _jsonable(c.expected),
                    "tolerance": c.tolerance,
                    "provenance": c.provenance,
                    "passed": c.passed,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
            "tables": {
                name: {"header": list(header), "rows": [_jsonable(list(r)) for r in rows]}
                for name, (header, rows) in sorted(self.tables.items())
            },
            "artifacts": sorted(self.artifacts),
            "passed": self.passed,
        }

    def body_bytes(self) -> bytes:
        return (json.dumps(self.body(), sort_keys=True, indent=2) + "\n").encode("utf-8")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"real": float(value.real), "imag": float(value.imag)}
    return value


def _difference_check(name, measured, expected, tolerance, provenance, detail=""):
    gap = abs(measured - expected)
    return CheckRecord(name, measured, expected, tolerance, provenance, bool(gap <= tolerance), detail)


def _bound_check(name, measured, bound, provenance, detail=""):
    note = "passes when measured <= tolerance"
    if detail:
        note = detail + "; " + note
    return CheckRecord(name, measured, 0.0, bound, provenance, bool(measured <= bound), note)


# ---------------------------------------------------------------------------
# suites


def _suite_traces(config: ExperimentConfig):
    tol = config.tolerances
    rng = np.random.default_rng(config.seed)
    residue_ratios = []
    leading_ratios = []
    adjoint_gaps = []
    linear_gaps = []
    rows = []
    for index in range(config.ensemble_count):
        a = random_symbol(rng, config.rank, config.truncation_order, config.band, config.ensemble_scale)
        b = random_symbol(rng, config.rank, config.truncation_order, config.band, config.ensemble_scale)
        scale = seminorm_scale(a) * seminorm_scale(b)
        bracket = commutator(a, b)
        residue_ratios.append(abs(wodzicki_residue(bracket)) / scale)
        leading_ratios.append(abs(leading_order_trace(bracket)) / scale)
        rows.append((index, residue_ratios[-1], leading_ratios[-1]))
        if index < 5:
            adjoint_gaps.append(
                abs(wodzicki_residue(adjoint(a)) - np.conj(wodzicki_residue(a)))
                / seminorm_scale(a)
            )
            mix = linear_combine([0.375, -1.25], [a, b])
            linear_gaps.append(
                abs(
                    wodzicki_residue(mix)
                    - (0.375 * wodzicki_residue(a) - 1.25 * wodzicki_residue(b))
                )
                / max(seminorm_scale(a), seminorm_scale(b))
            )
    checks = [
        _bound_check(
            "trace-commutator-residue",
            float(np.max(residue_ratios)),
            tol["trace-commutator"],
            "theory",
            "max |res[A,B]| over seminorm-scale product, %d pairs" % config.ensemble_count,
        ),
        _bound_check(
            "trace-commutator-leading",
            float(np.max(leading_ratios)),
            tol["trace-commutator"],
            "theory",
            "max |leading trace of [A,B]| over seminorm-scale product",
        ),
        _bound_check(
            "trace-adjoint-conjugation",
            float(np.max(adjoint_gaps)),
            tol["trace-adjoint"],
            "derived",
            "res(a*) vs conj(res(a)), first 5 symbols",
        ),
        _bound_check(
            "trace-linearity",
            float(np.max(linear_gaps)),
            tol["trace-linearity"],
            "contract",
            "residue of 0.375 a - 1.25 b vs combined residues, first 5 pairs",
        ),
    ]
    tables = {
        "trace-commutator": (
            ("pair", "residue_over_scale", "leading_over_scale"),
            rows,
        )
    }
    return checks, tables


def _suite_quantize_decay(config: ExperimentConfig):
    tol = config.tolerances
    probe = single_mode_inverse_symbol(cutoff=8, truncation_order=max(config.decay_depths))
    squares = {}
    for window in config.decay_windows:
        q = quantize(probe, window)
        squares[window] = q @ q
    norms_by_depth = {}
    checks = []
    for depth in config.decay_depths:
        product = compose(probe, probe, depth)
        norms = []
        for window in config.decay_windows:
            defect = squares[window] - quantize(product, window)
            norms.append(restricted_norm(defect, window // 4, window // 2))
        norms_by_depth[depth] = norms
        slope = float(
            np.polyfit(np.log(np.asarray(config.decay_windows, dtype=float)), np.log(norms), 1)[0]
        )
        checks.append(
            _difference_check(
                "decay-slope-depth-%d" % depth,
                slope,
                float(-(depth + 1)),
                tol["decay-slope"],
                "derived",
                "log-log slope of mid-band defect norm over windows %s"
                % (list(config.decay_windows),),
            )
        )
    header = ("window",) + tuple("defect_norm_depth_%d" % d for d in config.decay_depths)
    rows = [
        (window,) + tuple(norms_by_depth[d][i] for d in config.decay_depths)
        for i, window in enumerate(config.decay_windows)
    ]
    return checks, {"defect-decay": (header, rows)}


def _suite_norm_continuity(config: ExperimentConfig):
    tol = config.tolerances
    ensemble = symbol_ensemble(
        config.seed,
        config.ensemble_count,
        config.rank,
        config.truncation_order,
        config.band,
        config.ensemble_scale,
    )
    rows = []
    ratios = []
    for index, a in enumerate(ensemble):
        norm = operator_norm(quantize(a, config.window))
        scale = seminorm_scale(a)
        ratios.append(norm / scale)
        rows.append((index, norm, scale, ratios[-1]))
    low, high = float(np.min(ratios)), float(np.max(ratios))
    checks = [
        _bound_check(
            "norm-seminorm-ratio-spread",
            high / low,
            tol["norm-ratio-spread"],
            "derived",
            "c=%r, C=%r over %d symbols" % (low, high, config.ensemble_count),
        )
    ]
    base = operator_norm(quantize(ensemble[0], config.window))
    worst = 0.0
    for divisor in (2, 4, 8, 16):
        scaled = operator_norm(quantize(linear_combine([1.0 / divisor], [ensemble[0]]), config.window))
        worst = max(worst, abs(scaled - base / divisor))
    checks.append(
        _bound_check(
            "norm-dyadic-scaling",
            worst,
            tol["norm-dyadic-scaling"],
            "contract",
            "operator norm of a/i vs norm(a)/i for i in {2,4,8,16}; exact for dyadic i",
        )
    )
    return checks, {
        "norm-continuity": (("symbol", "operator_norm", "seminorm_scale", "ratio"), rows)
    }


def _suite_chern(config: ExperimentConfig):
    tol = config.tolerances
    checks = []
    rows = []
    for m in config.bundle_degrees:
        record = loop_space_leading_chern(m, config.grid, tol["chern-normalized"])
        normalized = record["normalized_leading"]
        checks.append(
            _difference_check(
                "chern-normalized-degree-%d" % m,
                normalized,
                float(m),
                tol["chern-normalized"],
                "derived",
                "(i/2pi) pairing / cosphere volume at grid %s" % (list(config.grid),),
            )
        )
        checks.append(
            _bound_check(
                "chern-identity-degree-%d" % m,
                record["identity_relative_gap"],
                tol["chern-identity"],
                "theory",
                "raw pairing vs cosphere volume times finite-rank pairing",
            )
        )
        raw = record["raw_leading"]
        scaled = record["scaled_leading"]
        finite = record["finite_rank"]
        rows.append(
            (
                m,
                raw.real,
                raw.imag,
                normalized.real,
                normalized.imag,
                scaled.real,
                scaled.imag,
                finite.real,
                finite.imag,
            )
        )
    header = (
        "degree",
        "raw_real",
        "raw_imag",
        "normalized_real",
        "normalized_imag",
        "scaled_real",
        "scaled_imag",
        "finite_rank_real",
        "finite_rank_imag",
    )
    return checks, {"chern-pairings": (header, rows)}


def _suite_wodzicki_vanish(config: ExperimentConfig):
    tol = config.tolerances
    fine_grid = config.grid
    base_grid = (fine_grid[0] // 2, fine_grid[1] // 2)
    checks = []

    mult_rows = []
    worst_mult = 0.0
    fine_cycle = sphere_cycle(*fine_grid)
    for m in config.bundle_degrees:
        value = abs(chern_pairing(monopole_field(m, fine_cycle), 1, TraceKind.WODZICKI))
        worst_mult = max(worst_mult, value)
        mult_rows.append((m, value))
    checks.append(
        _bound_check(
            "residue-multiplication",
            worst_mult,
            tol["residue-multiplication"],
            "theory",
            "residue pairing of multiplication curvature; exact zero expected",
        )
    )

    base_cycle = sphere_cycle(*base_grid)
    connection_rows = []
    values = []
    first_theta = None
    for index in range(config.connection_count):
        theta = random_negative_order_connection(
            config.seed + index,
            base_cycle,
            config.truncation_order,
            config.connection_band,
            config.rank,
            config.connection_amplitude,
            config.parameter_modes,
        )
        if index == 0:
            first_theta = theta
        omega = curvature_from_connection(theta, truncation_order=1)
        value = abs(chern_pairing(omega, 1, TraceKind.WODZICKI))
        values.append(value)
        connection_rows.append((config.seed + index, base_grid[0], base_grid[1], value))
    checks.append(
        _bound_check(
            "residue-connection-max",
            float(np.max(values)),
            tol["residue-connection"],
            "theory",
            "max residue pairing over %d seeded connections at grid %s"
            % (config.connection_count, list(base_grid)),
        )
    )

    # the depth-1 curvature shortcut: orders <= -1 compose to orders <= -2,
    # so the degree -1 slot of the curvature is finite differences only
    shallow = abs(chern_pairing(curvature_from_connection(first_theta, truncation_order=1), 1, TraceKind.WODZICKI))
    full = abs(chern_pairing(curvature_from_connection(first_theta), 1, TraceKind.WODZICKI))
    checks.append(
        _bound_check(
            "residue-truncation-equality",
            abs(full - shallow),
            tol["residue-truncation-equality"],
            "derived",
            "residue pairing at full truncation depth vs depth 1, first connection",
        )
    )

    fine_theta = random_negative_order_connection(
        config.seed,
        fine_cycle,
        config.truncation_order,
        config.connection_band,
        config.rank,
        config.connection_amplitude,
        config.parameter_modes,
    )
    fine_value = abs(
        chern_pairing(curvature_from_connection(fine_theta, truncation_order=1), 1, TraceKind.WODZICKI)
    )
    connection_rows.append((config.seed, fine_grid[0], fine_grid[1], fine_value))
    order = math.log2(values[0] / max(fine_value, 1e-300))
    checks.append(
        CheckRecord(
            "residue-refinement-order",
            order,
            tol["residue-refinement-order"],
            tol["residue-refinement-order"],
            "derived",
            bool(order >= tol["residue-refinement-order"]),
            "log2 decay of the residue pairing under one grid doubling;"
            " passes when measured >= expected",
        )
    )

    tables = {
        "residue-multiplication": (("degree", "pairing_abs"), mult_rows),
        "residue-connections": (("seed", "grid_theta", "grid_phi", "pairing_abs"), connection_rows),
    }
    return checks, tables


def _suite_loop_metric(config: ExperimentConfig):
    tol = config.tolerances
    n = config.loop_samples
    unit = LoopSection.from_function(lambda t: np.exp(1j * t), n)
    checks = []
    rows = []
    for s in config.sobolev_orders:
        value = loop_metric(unit, unit, s)
        expected = 2.0 * math.pi * 2.0**s
        gap = abs(value - expected) / expected
        rows.append((s, value.real, expected))
        checks.append(
            _bound_check(
                "loop-metric-order-%d" % s,
                gap,
                tol["loop-metric-closed-form"],
                "derived",
                "relative gap of <e^it, e^it>_s against 2 pi 2^s",
            )
        )

    rng = np.random.default_rng(config.seed)
    t = loop_times(n)
    def band_limited():
        coeffs = rng.standard_normal((11, 2)) + 1j * rng.standard_normal((11, 2))
        modes = np.arange(-5, 6)
        return LoopSection(2, np.einsum("jk,tj->tk", coeffs, np.exp(1j * np.outer(t, modes))))

    x = band_limited()
    y = band_limited()
    trapezoid = (2.0 * math.pi / n) * np.sum(np.conj(x.samples) * y.samples)
    checks.append(
        _bound_check(
            "loop-metric-quadrature",
            abs(loop_metric(x, y, 0) - trapezoid),
            tol["loop-metric-quadrature"],
            "derived",
            "s=0 metric against the trapezoid rule on band-limited loops",
        )
    )

    ascending = [loop_metric(x, x, s).real for s in range(4)]
    monotone_gap = min(b - a for a, b in zip(ascending, ascending[1:]))
    checks.append(
        CheckRecord(
            "loop-metric-monotone",
            monotone_gap,
            tol["loop-metric-monotone"],
            tol["loop-metric-monotone"],
            "contract",
            bool(ascending[0] > 0.0 and monotone_gap > tol["loop-metric-monotone"]),
            "positive metric, strictly increasing in s for a nonconstant loop;"
            " passes when measured > expected",
        )
    )
    return checks, {"loop-metric": (("sobolev_order", "value_real", "expected"), rows)}


_SUITE_FUNCTIONS = {
    "traces": _suite_traces,
    "quantize-decay": _suite_quantize_decay,
    "norm-continuity": _suite_norm_continuity,
    "chern": _suite_chern,
    "wodzicki-vanish": _suite_wodzicki_vanish,
    "loop-metric": _suite_loop_metric,
}


def _parameter_echo(config: ExperimentConfig) -> dict:
    echo = {}
    for f in fields(config):
        if f.name in ("suite", "out_dir", "emit_figures"):
            continue
        echo[f.name] = getattr(config, f.name)
    return echo


def run_suite(config: ExperimentConfig) -> ExperimentReport:
    """Execute one suite (or all of them) and optionally persist outputs.

    With out_dir set, writes report.json, one CSV per table, and (unless
    figures are disabled) one PNG per table rendered from the same rows.
    """
    started = time.perf_counter()
    names = SUITES if config.suite == "all" else (config.suite,)
    checks: list = []
    tables: dict = {}
    for name in names:
        try:
            suite_checks, suite_tables = _SUITE_FUNCTIONS[name](config)
        except Exception as exc:  # recorded, not raised: the run continues
            checks.append(
                CheckRecord(
                    name + "-execution",
                    "error",
                    "completed run",
                    0.0,
                    "contract",
                    False,
                    repr(exc),
                )
            )
            continue
        checks.extend(suite_checks)
        tables.update(suite_tables)
    report = ExperimentReport(
        suite=config.suite,
        seed=config.seed,
        parameters=_parameter_echo(config),
        checks=checks,
        tables=tables,
        artifacts=[],
        duration_seconds=0.0,
    )
    if config.out_dir is not None:
        _write_outputs(report, config)
    report.duration_seconds = time.perf_counter() - started
    if config.out_dir is not None:
        _write_report_file(report, config.out_dir)
    return report


def emit_plot_data(report: ExperimentReport, path: str) -> list:
    """Write the report's tables as CSV for external plotting.

    One table goes exactly to `path`; several tables go to files with the
    table name suffixed to the stem; a report with no tables leaves a
    header-only file.  Format: comma separated, header row, UTF-8, LF.
    """
    tables = sorted(report.tables.items())
    if not tables:
        _write_csv(path, ("parameter", "value"), [])
        return [path]
    if len(tables) == 1:
        _write_csv(path, tables[0][1][0], tables[0][1][1])
        return [path]
    stem, ext = os.path.splitext(path)
    written = []
    for name, (header, rows) in tables:
        target = "%s-%s%s" % (stem, name, ext or ".csv")
        _write_csv(target, header, rows)
        written.append(target)
    return written


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _write_outputs(report: ExperimentReport, config: ExperimentConfig) -> None:
    os.makedirs(config.out_dir, exist_ok=True)
    for name, (header, rows) in sorted(report.tables.items()):
        filename = name + ".csv"
        _write_csv(os.path.join(config.out_dir, filename), header, rows)
        report.artifacts.append(filename)
    if config.emit_figures and report.tables:
        from . import figures

        for filename in figures.render_tables(report, config.out_dir):
            report.artifacts.append(filename)


def _write_report_file(report: ExperimentReport, out_dir: str) -> None:
    payload = {
        "body": report.body(),
        "duration_seconds": report.duration_seconds,
    }
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")
