"""Symbol-valued differential forms over discretized closed cycles.

A cycle is a single-chart parameter grid for a closed surface (sphere) or a
flat even torus, carrying quadrature weights that already include the area
element.  A form field stores, for every grid point and every strictly
increasing coordinate index tuple, the Fourier data of a classical symbol,
stacked into arrays with the grid axes leading:

    data[index_tuple][degree] has shape grid_shape + (2, 2F+1, l, l)

so the whole-grid symbol algebra runs through the same array kernels as
single symbols.  Antisymmetry in the indices is implied, never stored.

Sphere weights use exact cell areas: the cell around theta_i contributes
(cos(theta_i - h/2) - cos(theta_i + h/2)) * dphi = 2 sin(h/2) sin(theta_i) dphi,
which telescopes to the exact sphere area and agrees with the midpoint rule
sin(theta) * dtheta * dphi to second order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from .errors import ConfigError, DegreeError, ShapeMismatchError
from .symbols import (
    ClassicalSymbol,
    _decode_array,
    _encode_array,
    compose_component_data,
    convolve_truncated,
    dx_data,
    xi_data,
)
from .traces import TRACE_DEGREE, TraceKind, trace_density

FIELD_FORMAT_NAME = "psido-field"
FIELD_FORMAT_VERSION = 1

# The six ordered complementary index pairings of a 4-cycle already carry
# their shuffle signs, so the antisymmetrized k=2 sum needs no division.
CHERN_COMBINATORIAL_NORMALIZATION = {1: 1.0, 2: 1.0}


@dataclass(frozen=True, eq=False)
class Cycle:
    """Closed single-chart parameter grid with quadrature weights.

    kind          "sphere" or "torus"
    coordinates   per-axis 1-d parameter values
    cell_weights  coordinate cell measure per grid point (no area density);
                  this is what coordinate components of forms integrate
                  against
    density       area element density per grid point (sin(theta) on the
                  sphere, 1 on the torus)
    steps         per-axis grid spacing used for finite differencing
    periodic      per-axis periodicity flags

    The full quadrature weight w(p) = cell_weights * density integrates
    functions against the volume and sums to the cycle volume.  Form
    components carry any metric factors themselves, so pairings use the
    bare cell measure: integrating the sphere curvature component
    (-i m/2) sin(theta) against cell_weights is what reproduces the closed
    form integral of sin(theta) d theta d phi.
    """

    kind: str
    coordinates: tuple
    cell_weights: np.ndarray
    density: np.ndarray
    steps: tuple
    periodic: tuple

    def __post_init__(self) -> None:
        coords = tuple(np.asarray(c, dtype=float) for c in self.coordinates)
        shape = tuple(len(c) for c in coords)
        for name in ("cell_weights", "density"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ShapeMismatchError(
                    "%s shaped %r does not match grid %r" % (name, arr.shape, shape)
                )
            if np.any(arr < 0):
                raise ConfigError("%s must be nonnegative" % name)
            arr = np.array(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if len(self.steps) != len(coords) or len(self.periodic) != len(coords):
            raise ShapeMismatchError("per-axis metadata does not match the grid")
        for c in coords:
            c.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(self, "steps", tuple(float(h) for h in self.steps))
        object.__setattr__(self, "periodic", tuple(bool(p) for p in self.periodic))

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    @property
    def shape(self) -> tuple:
        return tuple(len(c) for c in self.coordinates)

    @property
    def weights(self) -> np.ndarray:
        """Full quadrature weight, area element included."""
        return self.cell_weights * self.density

    def volume(self) -> float:
        return float(np.sum(self.weights))


def sphere_cycle(n_theta: int, n_phi: int) -> Cycle:
    """Half-step colatitude grid on the round sphere.

    theta_i = (i + 1/2) * pi / n_theta keeps every point away from the
    poles; phi is the usual periodic grid.
    """
    if n_theta < 8 or n_phi < 8:
        raise ConfigError("sphere grid %dx%d too coarse; need at least 8x8" % (n_theta, n_phi))
    h_theta = math.pi / n_theta
    h_phi = 2.0 * math.pi / n_phi
    thetas = (np.arange(n_theta) + 0.5) * h_theta
    phis = np.arange(n_phi) * h_phi
    # 2 sin(h/2) is the exact-cell replacement for h: the weighted density
    # telescopes to the exact sphere area
    cell = np.full((n_theta, n_phi), 2.0 * math.sin(h_theta / 2.0) * h_phi)
    density = np.outer(np.sin(thetas), np.ones(n_phi))
    return Cycle("sphere", (thetas, phis), cell, density, (h_theta, h_phi), (False, True))


def torus_cycle(sizes) -> Cycle:
    """Flat torus with 2*pi periods, one periodic axis per entry of sizes."""
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) == 0 or len(sizes) % 2 != 0:
        raise ConfigError("torus parameter count must be positive and even, got %r" % (sizes,))
    if any(n < 8 for n in sizes):
        raise ConfigError("torus grid %r too coarse; need at least 8 points per axis" % (sizes,))
    steps = tuple(2.0 * math.pi / n for n in sizes)
    coords = tuple(np.arange(n) * h for n, h in zip(sizes, steps))
    cell = np.full(sizes, float(np.prod(steps)))
    return Cycle("torus", coords, cell, np.ones(sizes), steps, (True,) * len(sizes))


def _rebuild_cycle(kind: str, shape) -> Cycle:
    if kind == "sphere":
        if len(shape) != 2:
            raise ConfigError("sphere cycles are two dimensional, got %r" % (shape,))
        return sphere_cycle(shape[0], shape[1])
    if kind == "torus":
        return torus_cycle(shape)
    raise ConfigError("unknown cycle kind %r" % (kind,))


@dataclass(frozen=True, eq=False)
class SymbolFormField:
    """Antisymmetric symbol-valued form sampled over a cycle grid.

    data maps each strictly increasing index tuple (length form_degree) to
    a {degree: stacked array} dictionary; absent degrees mean zero.
    """

    cycle: Cycle
    form_degree: int
    rank: int
    cutoff: int
    truncation_order: int
    data: dict

    def __post_init__(self) -> None:
        if self.form_degree not in (1, 2):
            raise ConfigError("form degree must be 1 or 2, got %r" % (self.form_degree,))
        if self.truncation_order < 0:
            raise DegreeError("truncation order must be nonnegative")
        dim = self.cycle.dimension
        expected_keys = set(combinations(range(dim), self.form_degree))
        cleaned = {}
        for raw_key, degrees in self.data.items():
            key = tuple(int(i) for i in raw_key)
            if key not in expected_keys:
                raise ShapeMismatchError(
                    "index %r is not a strictly increasing tuple inside dimension %d"
                    % (key, dim)
                )
            shape = self.cycle.shape + (2, 2 * self.cutoff + 1, self.rank, self.rank)
            locked = {}
            for degree, arr in degrees.items():
                degree = int(degree)
                if degree > 0 or degree < -self.truncation_order:
                    raise DegreeError(
                        "component degree %d outside [%d, 0]" % (degree, -self.truncation_order)
                    )
                arr = np.asarray(arr, dtype=np.complex128)
                if arr.shape != shape:
                    raise ShapeMismatchError(
                        "field data shaped %r, expected %r" % (arr.shape, shape)
                    )
                arr = np.array(arr)
                arr.setflags(write=False)
                locked[degree] = arr
            cleaned[key] = locked
        if set(cleaned) != expected_keys:
            missing = sorted(expected_keys - set(cleaned))
            raise ShapeMismatchError("field is missing index entries %r" % (missing,))
        object.__setattr__(self, "data", cleaned)

    @classmethod
    def zero(
        cls, cycle: Cycle, form_degree: int, rank: int, cutoff: int, truncation_order: int
    ) -> "SymbolFormField":
        keys = combinations(range(cycle.dimension), form_degree)
        return cls(cycle, form_degree, rank, cutoff, truncation_order, {k: {} for k in keys})

    def indices(self):
        return sorted(self.data)

    def symbol_at(self, point, index) -> ClassicalSymbol:
        """The symbol at one grid point, with antisymmetry resolved.

        index may be any permutation of an index tuple; a repeated index or
        an absent component yields the zero symbol.
        """
        point = tuple(int(i) for i in point)
        if len(point) != self.cycle.dimension:
            raise ShapeMismatchError("grid point %r does not match the cycle" % (point,))
        idx = tuple(int(i) for i in index)
        if len(idx) != self.form_degree:
            raise ShapeMismatchError("index %r does not match form degree %d" % (idx, self.form_degree))
        sign = 1.0
        if len(set(idx)) < len(idx):
            return ClassicalSymbol.zero(self.rank, self.truncation_order, self.cutoff)
        if list(idx) != sorted(idx):
            sign = -1.0
            idx = tuple(sorted(idx))
        degrees = self.data[idx]
        if not degrees:
            return ClassicalSymbol.zero(self.rank, self.truncation_order, self.cutoff)
        comps = {d: sign * arr[point] for d, arr in degrees.items()}
        return _symbol_from_parts(comps, self.rank, self.cutoff, self.truncation_order)


def _symbol_from_parts(parts: Mapping[int, np.ndarray], rank, cutoff, truncation_order):
    from .symbols import HomogeneousComponent

    comps = [
        HomogeneousComponent(d, parts[d]) for d in sorted(parts, reverse=True)
    ]
    return ClassicalSymbol(rank, cutoff, truncation_order, tuple(comps))


def grid_derivative(
    values: np.ndarray, axis: int, step: float, periodic: bool, refined: bool = False
) -> np.ndarray:
    """Partial derivative along one grid axis, second-order accurate.

    Periodic axes use the central stencil throughout.  Non-periodic axes
    use the central stencil in the interior and one-sided three-point
    stencils on the two boundary slices, which keeps the formal order but
    grows the error constant there.  With refined=True a step-doubled
    central combination (4 D_h - D_2h)/3 raises interior accuracy to
    fourth order; boundary slices keep the second-order stencils.
    """
    v = np.asarray(values)
    if v.shape[axis] < 4:
        raise ConfigError("need at least 4 points along axis %d to differentiate" % axis)

    def central(double_step: bool) -> np.ndarray:
        shift = 2 if double_step else 1
        width = 2.0 * step * shift
        return (np.roll(v, -shift, axis) - np.roll(v, shift, axis)) / width

    if periodic:
        if refined:
            return (4.0 * central(False) - central(True)) / 3.0
        return central(False)

    moved = np.moveaxis(v, axis, 0)
    out = np.empty_like(moved)
    out[1:-1] = (moved[2:] - moved[:-2]) / (2.0 * step)
    if refined and moved.shape[0] >= 6:
        inner = (moved[3:-1] - moved[1:-3]) / (2.0 * step)
        doubled = (moved[4:] - moved[:-4]) / (4.0 * step)
        out[2:-2] = (4.0 * inner - doubled) / 3.0
    out[0] = (-3.0 * moved[0] + 4.0 * moved[1] - moved[2]) / (2.0 * step)
    out[-1] = (3.0 * moved[-1] - 4.0 * moved[-2] + moved[-3]) / (2.0 * step)
    return np.moveaxis(out, 0, axis)


def _accumulate(target: dict, source: Mapping[int, np.ndarray], sign: float) -> None:
    for degree, arr in source.items():
        if degree in target:
            target[degree] = target[degree] + sign * arr
        else:
            target[degree] = sign * arr


def curvature_from_connection(
    theta: SymbolFormField, truncation_order: int | None = None, refined: bool = False
) -> SymbolFormField:
    """Curvature two-form of a globally defined connection one-form.

    Omega_{mu nu} = d_mu theta_nu - d_nu theta_mu
                  + theta_mu # theta_nu - theta_nu # theta_mu
    with grid finite differences for d and the stacked symbol composition
    for #.  refined switches the interior stencil to the step-doubled
    fourth-order combination.
    """
    if theta.form_degree != 1:
        raise ShapeMismatchError("curvature needs a one-form, got form degree %d" % theta.form_degree)
    depth = theta.truncation_order if truncation_order is None else truncation_order
    cycle = theta.cycle
    pairs = {}
    for mu in range(cycle.dimension):
        for nu in range(mu + 1, cycle.dimension):
            t_mu = theta.data[(mu,)]
            t_nu = theta.data[(nu,)]
            entry: dict = {}
            _accumulate(
                entry,
                {
                    d: grid_derivative(arr, mu, cycle.steps[mu], cycle.periodic[mu], refined)
                    for d, arr in t_nu.items()
                    if d >= -depth
                },
                1.0,
            )
            _accumulate(
                entry,
                {
                    d: grid_derivative(arr, nu, cycle.steps[nu], cycle.periodic[nu], refined)
                    for d, arr in t_mu.items()
                    if d >= -depth
                },
                -1.0,
            )
            _accumulate(entry, compose_component_data(t_mu, t_nu, depth, theta.cutoff), 1.0)
            _accumulate(entry, compose_component_data(t_nu, t_mu, depth, theta.cutoff), -1.0)
            pairs[(mu, nu)] = entry
    return SymbolFormField(cycle, 2, theta.rank, theta.cutoff, depth, pairs)


def composed_component(
    comps_a: Mapping[int, np.ndarray],
    comps_b: Mapping[int, np.ndarray],
    degree: int,
    cutoff: int,
):
    """Single output degree of the stacked composition, or None if empty."""
    out = None
    for ma, da in comps_a.items():
        for mb, db in comps_b.items():
            k = ma + mb - degree
            if k < 0:
                continue
            term = convolve_truncated(xi_data(da, ma, k), dx_data(db, k), cutoff) / math.factorial(k)
            out = term if out is None else out + term
    return out


def _fixed_sum(values: np.ndarray, compensated: bool) -> complex:
    if not compensated:
        return complex(np.sum(values))
    total = 0j
    carry = 0j
    for v in values.ravel():
        y = complex(v) - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total


# Ordered complementary pairings of (0,1,2,3) with their shuffle signs.
_PAIRINGS_K2 = (
    ((0, 1), (2, 3), 1.0),
    ((0, 2), (1, 3), -1.0),
    ((0, 3), (1, 2), 1.0),
)


def chern_pairing(
    field: SymbolFormField, k: int, kind: TraceKind, compensated: bool = False
) -> complex:
    """Integrate the trace of the k-th curvature power against the cycle.

    k=1 takes the trace of the single pair component pointwise; k=2 runs
    the six ordered complementary pairings with shuffle signs (both orders
    of each partition, so no combinatorial division is needed).
    """
    if field.form_degree != 2:
        raise ShapeMismatchError("pairing needs a two-form field")
    if field.cycle.dimension != 2 * k:
        raise ShapeMismatchError(
            "cycle dimension %d does not match 2k = %d" % (field.cycle.dimension, 2 * k)
        )
    if k not in CHERN_COMBINATORIAL_NORMALIZATION:
        raise ConfigError("pairings are coded for k <= 2, got k = %d" % k)
    wanted = TRACE_DEGREE[kind]
    grid = field.cycle.shape
    value = np.zeros(grid, dtype=np.complex128)
    if k == 1:
        comp = field.data[(0, 1)].get(wanted)
        if comp is not None:
            value = value + trace_density(comp, kind)
    else:
        for left, right, sign in _PAIRINGS_K2:
            for first, second in ((left, right), (right, left)):
                comp = composed_component(
                    field.data[first], field.data[second], wanted, field.cutoff
                )
                if comp is not None:
                    value = value + sign * trace_density(comp, kind)
        value = value / CHERN_COMBINATORIAL_NORMALIZATION[k]
    return _fixed_sum(field.cycle.cell_weights * value, compensated)


def finite_rank_pairing(field: SymbolFormField, k: int, compensated: bool = False) -> complex:
    """Plain matrix Chern pairing of a multiplication-operator field.

    Reads the x-mean of the degree-0 component (the constant matrix value
    of a multiplication symbol) and integrates the matrix trace of its k-th
    antisymmetrized power.  Fields with any other nonzero component are
    rejected: the identity this pairing certifies only concerns curvatures
    of finite-rank connections.
    """
    if field.form_degree != 2:
        raise ShapeMismatchError("pairing needs a two-form field")
    if field.cycle.dimension != 2 * k:
        raise ShapeMismatchError(
            "cycle dimension %d does not match 2k = %d" % (field.cycle.dimension, 2 * k)
        )
    if k not in CHERN_COMBINATORIAL_NORMALIZATION:
        raise ConfigError("pairings are coded for k <= 2, got k = %d" % k)
    grid = field.cycle.shape
    mats = {}
    for key, degrees in field.data.items():
        for degree, arr in degrees.items():
            if degree != 0 and np.any(arr):
                raise DegreeError(
                    "field has a nonzero degree-%d part; finite-rank pairing needs pure degree 0"
                    % degree
                )
        comp = degrees.get(0)
        if comp is None:
            mats[key] = np.zeros(grid + (field.rank, field.rank), dtype=np.complex128)
        else:
            mats[key] = comp[..., 0, field.cutoff, :, :]
    if k == 1:
        value = np.einsum("...ii->...", mats[(0, 1)])
    else:
        value = np.zeros(grid, dtype=np.complex128)
        for left, right, sign in _PAIRINGS_K2:
            for first, second in ((left, right), (right, left)):
                value = value + sign * np.einsum(
                    "...ij,...ji->...", mats[first], mats[second]
                )
        value = value / CHERN_COMBINATORIAL_NORMALIZATION[k]
    return _fixed_sum(field.cycle.cell_weights * value, compensated)


def save_field(field: SymbolFormField, path) -> None:
    """JSON dump: grid metadata header plus per-index encoded symbol data."""
    entries = []
    for key in field.indices():
        for degree in sorted(field.data[key], reverse=True):
            entries.append(
                {
                    "index": list(key),
                    "degree": degree,
                    "data": _encode_array(field.data[key][degree]),
                }
            )
    doc = {
        "format": FIELD_FORMAT_NAME,
        "version": FIELD_FORMAT_VERSION,
        "cycle": {"kind": field.cycle.kind, "shape": list(field.cycle.shape)},
        "form_degree": field.form_degree,
        "rank": field.rank,
        "cutoff": field.cutoff,
        "truncation_order": field.truncation_order,
        "entries": entries,
    }
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=1)
        handle.write("\n")


def load_field(path) -> SymbolFormField:
    with open(path) as handle:
        doc = json.load(handle)
    if doc.get("format") != FIELD_FORMAT_NAME:
        raise ConfigError("not a field dump: %r" % (path,))
    if doc.get("version") != FIELD_FORMAT_VERSION:
        raise ConfigError("unsupported field dump version %r" % (doc.get("version"),))
    cycle = _rebuild_cycle(doc["cycle"]["kind"], tuple(doc["cycle"]["shape"]))
    data: dict = {
        key: {} for key in combinations(range(cycle.dimension), doc["form_degree"])
    }
    for entry in doc["entries"]:
        key = tuple(entry["index"])
        data[key][int(entry["degree"])] = _decode_array(entry["data"])
    return SymbolFormField(
        cycle,
        doc["form_degree"],
        doc["rank"],
        doc["cutoff"],
        doc["truncation_order"],
        data,
    )
