"""Truncated classical symbols on the circle.

A symbol of order 0 is stored as a finite list of homogeneous components of
integer degree 0, -1, ..., -K.  The cosphere bundle of the circle has two
points over each base point, so a component keeps one matrix-valued function
of x per half-line of xi ("sheets"): sheet 0 is xi > 0, sheet 1 is xi < 0.
Each sheet function is held as a band-limited Fourier series with modes
|k| <= F.

Component data layout: complex array of shape (..., 2, 2F+1, ell, ell) with
the mode axis indexed by k + F.  Leading batch axes are allowed everywhere in
the array kernels; the forms module reuses them for whole-grid stacks of
symbols.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegreeError, ShapeMismatchError

__all__ = [
    "HomogeneousComponent",
    "ClassicalSymbol",
    "linear_combine",
    "xi_derivative",
    "x_derivative",
    "compose",
    "adjoint",
    "commutator",
    "seminorm",
    "seminorm_scale",
    "minimal_decay_constant",
    "save_symbol",
    "load_symbol",
    "symbol_to_dict",
    "symbol_from_dict",
]

SHEET_PLUS = 0
SHEET_MINUS = 1


# ---------------------------------------------------------------------------
# array kernels


def modes(cutoff: int) -> np.ndarray:
    """Fourier mode indices -F..F in storage order."""
    return np.arange(-cutoff, cutoff + 1)


def falling_factorial(degree: int, k: int) -> float:
    """degree * (degree-1) * ... * (degree-k+1), with the empty product = 1."""
    out = 1.0
    for i in range(k):
        out *= degree - i
    return out


def sheet_factors(degree: int, k: int) -> np.ndarray:
    """Per-sheet scalar factors of the k-th xi-derivative at degree `degree`.

    One xi-derivative maps the plus sheet by m and the minus sheet by -m
    while lowering the degree, so k of them accumulate a falling factorial
    with an extra (-1)^k on the minus sheet.
    """
    ff = falling_factorial(degree, k)
    return np.array([ff, (-1) ** k * ff])


def dx_data(data: np.ndarray, power: int = 1) -> np.ndarray:
    """Apply D_x = -i d/dx `power` times: mode k picks up k**power."""
    cutoff = (data.shape[-3] - 1) // 2
    mult = modes(cutoff).astype(float) ** power
    return data * mult[:, None, None]

def xi_data(data: np.ndarray, degree: int, power: int = 1) -> np.ndarray:
    fac = sheet_factors(degree, power)
    return data * fac[:, None, None, None]


def dagger_data(data: np.ndarray) -> np.ndarray:
    """Pointwise conjugate transpose of each sheet function.

    In Fourier storage the conjugate reflects the mode axis:
    h(x)^dagger has coefficient conj(h_hat(-k))^T at mode k.
    """
    flipped = data[..., ::-1, :, :]
    return np.conj(np.swapaxes(flipped, -1, -2))


def convolve_truncated(a: np.ndarray, b: np.ndarray, cutoff: int) -> np.ndarray:
    """Matrix-valued Fourier convolution, re-truncated to |k| <= cutoff.

    Computes out[o] = sum_t a[t] @ b[o - t] over the stored band, dropping
    output modes beyond the cutoff.  Runs through zero-padded FFTs along the
    mode axis with a per-frequency matrix product, which vectorizes over any
    leading batch axes.
    """
    n = 2 * cutoff + 1
    if a.shape[-3] != n or b.shape[-3] != n:
        raise ShapeMismatchError("convolution operands disagree in cutoff")
    if cutoff == 0:
        return a @ b
    full = 2 * n - 1
    size = 1 << (full - 1).bit_length()
    fa = np.fft.fft(a, n=size, axis=-3)
    fb = np.fft.fft(b, n=size, axis=-3)
    prod = np.fft.ifft(fa @ fb, axis=-3)
    # Linear-convolution index o + t runs 0..2(2F); the central band
    # cutoff..3*cutoff of it is the retained -F..F output.
    return np.ascontiguousarray(prod[..., cutoff : cutoff + n, :, :])


def grid_values(data: np.ndarray, grid_size: int) -> np.ndarray:
    """Evaluate sheet functions at x_g = 2 pi g / grid_size for all sheets.

    Returns an array shaped like `data` with the mode axis replaced by the
    grid axis.  Requires grid_size >= 2F+1 so no modes alias.
    """
    cutoff = (data.shape[-3] - 1) // 2
    if grid_size < 2 * cutoff + 1:
        raise ShapeMismatchError("evaluation grid too small for the mode band")
    shape = list(data.shape)
    shape[-3] = grid_size
    spectrum = np.zeros(shape, dtype=complex)
    idx = modes(cutoff) % grid_size
    spectrum[..., idx, :, :] = data
    return np.fft.ifft(spectrum, axis=-3) * grid_size


def spectral_norms(mats: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a stack (..., l, l)."""
    ell = mats.shape[-1]
    if ell == 1:
        return np.abs(mats[..., 0, 0])
    if ell == 2:
        # Closed form via the eigenvalues of A^* A: much faster than a
        # LAPACK round trip on large stacks of tiny matrices.
        frob2 = np.sum(np.abs(mats) ** 2, axis=(-2, -1))
        det = (
            mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]
        )
        disc = np.sqrt(np.maximum(frob2**2 - 4.0 * np.abs(det) ** 2, 0.0))
        return np.sqrt(0.5 * (frob2 + disc))
    if ell <= 4:
        return np.linalg.svd(mats, compute_uv=False)[..., 0]
    # Larger fibers: batched power iteration on the normal matrices.
    h = np.swapaxes(np.conj(mats), -1, -2) @ mats
    v = np.full(mats.shape[:-1], 1.0 / math.sqrt(ell), dtype=complex)
    est = np.zeros(mats.shape[:-2])
    for _ in range(200):
        w = np.einsum("...ij,...j->...i", h, v)
        nrm = np.linalg.norm(w, axis=-1)
        new = np.sqrt(np.maximum(nrm, 0.0))
        safe = np.where(nrm == 0.0, 1.0, nrm)
        v = w / safe[..., None]
        if np.all(np.abs(new - est) <= 1e-13 * np.maximum(new, 1e-300)):
            est = new
            break
        est = new
    return est


def compose_component_data(
    comps_a: Mapping[int, np.ndarray],
    comps_b: Mapping[int, np.ndarray],
    truncation_order: int,
    cutoff: int,
) -> dict[int, np.ndarray]:
    """Asymptotic product on raw component arrays.

    (a # b)_m collects (1/k!) d_xi^k a_{ma} * D_x^k b_{mb} over all
    ma + mb - k = m with k >= 0, for output degrees 0 .. -truncation_order.
    Shared by symbol-level composition and the grid-stacked field product.
    """
    out: dict[int, np.ndarray] = {}
    for ma, da in comps_a.items():
        for mb, db in comps_b.items():
            for k in range(0, ma + mb + truncation_order + 1):
                m = ma + mb - k
                if m < -truncation_order or m > 0:
                    continue
                term = convolve_truncated(
                    xi_data(da, ma, k), dx_data(db, k), cutoff
                ) / math.factorial(k)
                if m in out:
                    out[m] = out[m] + term
                else:
                    out[m] = term
    return out


def adjoint_component_data(
    comps: Mapping[int, np.ndarray], truncation_order: int
) -> dict[int, np.ndarray]:
    """Formal adjoint on raw component arrays.

    (a*)_m = sum_{ma - k = m} (1/k!) d_xi^k D_x^k (a_{ma})^dagger.
    """
    out: dict[int, np.ndarray] = {}
    for ma, da in comps.items():
        dag = dagger_data(da)
        for k in range(0, ma + truncation_order + 1):
            m = ma - k
            if m < -truncation_order:
                continue
            term = xi_data(dx_data(dag, k), ma, k) / math.factorial(k)
            if m in out:
                out[m] = out[m] + term
            else:
                out[m] = term
    return out


def _locked(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True, eq=False)
class HomogeneousComponent:
    """One homogeneous term sigma_m(x, xi) = sheet_{sgn xi}(x) |xi|^m.

    `data` has shape (2, 2F+1, ell, ell): sheet, Fourier mode k+F, fiber.
    Instances are immutable values; the backing array is locked.
    """

    degree: int
    data: np.ndarray

    def __post_init__(self):
        if self.degree > 0:
            raise DegreeError("classical symbols here have degree <= 0")
        d = np.asarray(self.data, dtype=complex)
        if d.ndim != 4 or d.shape[0] != 2 or d.shape[2] != d.shape[3]:
            raise ShapeMismatchError(
                f"component data must be (2, 2F+1, ell, ell), got {d.shape}"
            )
        if d.shape[1] % 2 != 1:
            raise ShapeMismatchError("mode axis must have odd length 2F+1")
        object.__setattr__(self, "data", _locked(d))

    @property
    def rank(self) -> int:
        return self.data.shape[-1]

    @property
    def cutoff(self) -> int:
        return (self.data.shape[1] - 1) // 2

    @classmethod
    def from_sheets(cls, degree: int, plus, minus) -> "HomogeneousComponent":
        plus = np.asarray(plus, dtype=complex)
        minus = np.asarray(minus, dtype=complex)
        if plus.shape != minus.shape:
            raise ShapeMismatchError("sheet arrays disagree in shape")
        if plus.ndim == 1:  # scalar symbol: modes only
            plus = plus[:, None, None]
            minus = minus[:, None, None]
        return cls(degree, np.stack([plus, minus]))

    @classmethod
    def zeros(cls, degree: int, rank: int, cutoff: int) -> "HomogeneousComponent":
        return cls(degree, np.zeros((2, 2 * cutoff + 1, rank, rank), dtype=complex))

    def sheet(self, which: int) -> np.ndarray:
        return self.data[which]

    def evaluate(self, x, xi) -> np.ndarray:
        """Value sigma_m(x, xi) for scalar or broadcastable array arguments."""
        x, xi = np.broadcast_arrays(
            np.asarray(x, dtype=float), np.asarray(xi, dtype=float)
        )
        if np.any(xi == 0):
            raise DegreeError("homogeneous components are defined for xi != 0")
        phase = np.exp(1j * np.multiply.outer(x, modes(self.cutoff)))
        plus = np.einsum("...k,kab->...ab", phase, self.data[SHEET_PLUS])
        minus = np.einsum("...k,kab->...ab", phase, self.data[SHEET_MINUS])
        picked = np.where((xi > 0)[..., None, None], plus, minus)
        return picked * (np.abs(xi) ** self.degree)[..., None, None]


@dataclass(frozen=True, eq=False)
class ClassicalSymbol:
    """A truncated classical symbol: components of degree 0 .. -K.

    Missing degrees are implicitly zero.  `truncation_order` is K; `cutoff`
    is the shared Fourier band limit F.  Immutable value semantics.
    """

    rank: int
    cutoff: int
    truncation_order: int
    components: tuple[HomogeneousComponent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.truncation_order < 0:
            raise DegreeError("truncation order must be >= 0")
        seen = set()
        for c in self.components:
            if c.rank != self.rank or c.cutoff != self.cutoff:
                raise ShapeMismatchError("component rank/cutoff mismatch")
            if c.degree in seen:
                raise DegreeError(f"duplicate component degree {c.degree}")
            if c.degree < -self.truncation_order:
                raise DegreeError(
                    f"component degree {c.degree} below -{self.truncation_order}"
                )
            seen.add(c.degree)
        ordered = tuple(sorted(self.components, key=lambda c: -c.degree))
        object.__setattr__(self, "components", ordered)

    @classmethod
    def from_components(
        cls,
        components: Iterable[HomogeneousComponent],
        truncation_order: int | None = None,
    ) -> "ClassicalSymbol":
        comps = tuple(components)
        if not comps:
            raise ShapeMismatchError("need at least one component (or use zero())")
        rank = comps[0].rank
        cutoff = comps[0].cutoff
        if truncation_order is None:
            truncation_order = max(-c.degree for c in comps)
        return cls(rank, cutoff, truncation_order, comps)

    @classmethod
    def zero(cls, rank: int, truncation_order: int, cutoff: int) -> "ClassicalSymbol":
        return cls(rank, cutoff, truncation_order, ())

    @classmethod
    def constant(
        cls, matrix, truncation_order: int = 0, cutoff: int = 0
    ) -> "ClassicalSymbol":
        """Multiplication symbol by a constant matrix (degree 0, x-free)."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        rank = matrix.shape[0]
        data = np.zeros((2, 2 * cutoff + 1, rank, rank), dtype=complex)
        data[:, cutoff] = matrix
        return cls(rank, cutoff, truncation_order, (HomogeneousComponent(0, data),))

    def component(self, degree: int) -> HomogeneousComponent | None:
        for c in self.components:
            if c.degree == degree:
                return c
        return None

    def component_data(self) -> dict[int, np.ndarray]:
        return {c.degree: c.data for c in self.components}

    def evaluate(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        shape = np.broadcast_shapes(x.shape, xi.shape) + (self.rank, self.rank)
        total = np.zeros(shape, dtype=complex)
        for c in self.components:
            total = total + c.evaluate(x, xi)
        return total


# ---------------------------------------------------------------------------
# algebra operations


def _check_compatible(symbols: Sequence[ClassicalSymbol]) -> tuple[int, int]:
    ranks = {s.rank for s in symbols}
    cutoffs = {s.cutoff for s in symbols}
    if len(ranks) != 1 or len(cutoffs) != 1:
        raise ShapeMismatchError("symbols disagree in rank or cutoff")
    return ranks.pop(), cutoffs.pop()


def linear_combine(
    coefficients: Sequence[complex], symbols: Sequence[ClassicalSymbol]
) -> ClassicalSymbol:
    """sum_i coefficients[i] * symbols[i], degree by degree."""
    if len(coefficients) != len(symbols) or not symbols:
        raise ShapeMismatchError("need matching, nonempty coefficient/symbol lists")
    rank, cutoff = _check_compatible(symbols)
    truncation = max(s.truncation_order for s in symbols)
    acc: dict[int, np.ndarray] = {}
    for coef, sym in zip(coefficients, symbols):
        for c in sym.components:
            if c.degree in acc:
                acc[c.degree] = acc[c.degree] + coef * c.data
            else:
                acc[c.degree] = coef * c.data
    comps = tuple(HomogeneousComponent(m, d) for m, d in acc.items())
    return ClassicalSymbol(rank, cutoff, truncation, comps)


def xi_derivative(component: HomogeneousComponent) -> HomogeneousComponent:
    """d/dxi of a homogeneous component; degree drops by one."""
    return HomogeneousComponent(
        component.degree - 1, xi_data(component.data, component.degree, 1)
    )


def x_derivative(component: HomogeneousComponent) -> HomogeneousComponent:
    """D_x = -i d/dx; multiplies mode k by k, degree unchanged."""
    return HomogeneousComponent(component.degree, dx_data(component.data, 1))


def compose(
    a: ClassicalSymbol, b: ClassicalSymbol, truncation_order: int | None = None
) -> ClassicalSymbol:
    """Asymptotic composition a # b, truncated at the requested order."""
    rank, cutoff = _check_compatible([a, b])
    if truncation_order is None:
        truncation_order = max(a.truncation_order, b.truncation_order)
    data = compose_component_data(
        a.component_data(), b.component_data(), truncation_order, cutoff
    )
    comps = tuple(HomogeneousComponent(m, d) for m, d in data.items())
    return ClassicalSymbol(rank, cutoff, truncation_order, comps)


def adjoint(
    a: ClassicalSymbol, truncation_order: int | None = None
) -> ClassicalSymbol:
    """Formal adjoint symbol, truncated at the requested order."""
    if truncation_order is None:
        truncation_order = a.truncation_order
    data = adjoint_component_data(a.component_data(), truncation_order)
    comps = tuple(HomogeneousComponent(m, d) for m, d in data.items())
    return ClassicalSymbol(a.rank, a.cutoff, truncation_order, comps)


def commutator(
    a: ClassicalSymbol, b: ClassicalSymbol, truncation_order: int | None = None
) -> ClassicalSymbol:
    """a # b - b # a at a common truncation order."""
    ab = compose(a, b, truncation_order)
    ba = compose(b, a, truncation_order)
    return linear_combine([1.0, -1.0], [ab, ba])


# ---------------------------------------------------------------------------
# seminorms and decay


def _component_grid(symbol_cutoff: int) -> int:
    return max(8 * symbol_cutoff, 8)


def _polished_sup(sheet_data: np.ndarray, grid_size: int) -> float:
    """Sup over x of the spectral norm of one band-limited sheet function.

    Grid scan at `grid_size` points, then two levels of vectorized zoom
    around the winning cell.  The scan alone under-resolves the sup of a
    trig polynomial at O((F/grid)^2); the zoom makes the result
    grid-converged.
    """
    mode_idx = modes((sheet_data.shape[0] - 1) // 2)
    norms = spectral_norms(grid_values(sheet_data, grid_size))
    best = float(np.max(norms))
    step = 2 * np.pi / grid_size
    # Polish every competitive local maximum of the scan; a single-basin
    # zoom can lose a near-tied peak that the coarse samples under-report.
    is_peak = (norms >= np.roll(norms, 1)) & (norms >= np.roll(norms, -1))
    cand = np.flatnonzero(is_peak & (norms >= 0.85 * best))
    if cand.size == 0:
        cand = np.array([int(np.argmax(norms))])
    if cand.size > 16:
        cand = cand[np.argsort(norms[cand])[-16:]]
    lo = (cand - 1.0) * step
    hi = (cand + 1.0) * step
    for _ in range(2):
        xs = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, 65)
        phases = np.exp(1j * xs[..., None] * mode_idx)
        mats = np.tensordot(phases, sheet_data, axes=(2, 0))
        ns = spectral_norms(mats)
        j = np.argmax(ns, axis=1)
        best = max(best, float(np.max(ns)))
        centers = np.take_along_axis(xs, j[:, None], axis=1)[:, 0]
        width = (hi - lo) / 64
        lo, hi = centers - width, centers + width
    return best


def seminorm(
    a: ClassicalSymbol,
    alpha: int,
    beta: int,
    m: int,
    grid_points: int | None = None,
    polish: bool = True,
) -> float:
    """Sup over sheets and x of |d_x^beta d_xi^alpha sigma_{-m}| at |xi| = 1.

    The sup is located on an equispaced grid (8F points by default) and then
    polished by a local search, so the value is stable under grid
    refinement.  `polish=False` returns the raw grid sup (cheaper, accurate
    to O((F/grid)^2)).  Absent components give 0.
    """
    if alpha < 0 or beta < 0:
        raise DegreeError("derivative orders must be >= 0")
    if m < 0 or m > a.truncation_order:
        raise DegreeError(f"seminorm index m={m} outside 0..{a.truncation_order}")
    comp = a.component(-m)
    if comp is None:
        return 0.0
    if grid_points is None:
        grid_points = _component_grid(a.cutoff)
    elif grid_points < 2 * a.cutoff + 1:
        raise ShapeMismatchError("seminorm grid under-resolves the mode band")
    data = xi_data(dx_data(comp.data, beta), -m, alpha)
    if not polish:
        return float(np.max(spectral_norms(grid_values(data, grid_points))))
    return max(
        _polished_sup(data[SHEET_PLUS], grid_points),
        _polished_sup(data[SHEET_MINUS], grid_points),
    )


def seminorm_scale(a: ClassicalSymbol, derivative_order: int = 2) -> float:
    """Max seminorm over alpha, beta <= derivative_order and all degrees.

    A convenient single number for sizing tolerances against an input
    symbol; uses the raw grid sup, which is plenty for that purpose.
    """
    best = 0.0
    for m in range(0, a.truncation_order + 1):
        if a.component(-m) is None:
            continue
        for alpha in range(derivative_order + 1):
            for beta in range(derivative_order + 1):
                best = max(best, seminorm(a, alpha, beta, m, polish=False))
    return best


def minimal_decay_constant(
    a: ClassicalSymbol, xi_max: float = 1.0e3, n_xi: int = 61
) -> float:
    """Least constant bounding the order-zero split on 1 <= |xi| <= xi_max.

    Measures sup over both sheets, an x-grid, and a logarithmic xi-grid of
    |d_xi^alpha (sigma - sigma_0)| (1 + |xi|) and |d_xi^alpha sigma_0| for
    alpha <= 1.  The grid starts exactly at |xi| = 1 where the sup is
    typically attained.
    """
    grid = _component_grid(a.cutoff)
    xi = np.geomspace(1.0, xi_max, n_xi)
    best = 0.0

    comp0 = a.component(0)
    if comp0 is not None:
        vals0 = grid_values(comp0.data, grid)
        best = float(np.max(spectral_norms(vals0)))
        # d_xi sigma_0 vanishes: degree-0 sheets are xi-constant.

    tail = [c for c in a.components if c.degree <= -1]
    if tail:
        for alpha in (0, 1):
            acc = None
            for c in tail:
                data = xi_data(c.data, c.degree, alpha)
                vals = grid_values(data, grid)  # (2, G, l, l)
                powers = np.abs(xi) ** (c.degree - alpha)
                term = vals[None] * powers[:, None, None, None, None]
                acc = term if acc is None else acc + term
            norms = spectral_norms(acc)  # (n_xi, 2, G)
            weighted = norms * (1.0 + xi)[:, None, None]
            best = max(best, float(np.max(weighted)))
    return best


# ---------------------------------------------------------------------------
# serialization (bit-exact text format)

FORMAT_NAME = "psido-symbol"
FORMAT_VERSION = 1


def _encode_array(arr: np.ndarray) -> list:
    """Nested lists of [re, im] pairs; repr-based floats round-trip exactly."""
    re = np.real(arr)
    im = np.imag(arr)
    paired = np.stack([re, im], axis=-1)
    return paired.tolist()


def _decode_array(nested: list) -> np.ndarray:
    paired = np.asarray(nested, dtype=float)
    return paired[..., 0] + 1j * paired[..., 1]


def symbol_to_dict(a: ClassicalSymbol) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "rank": a.rank,
        "truncation_order": a.truncation_order,
        "cutoff": a.cutoff,
        "components": [
            {
                "degree": c.degree,
                "sheet_plus": _encode_array(c.data[SHEET_PLUS]),
                "sheet_minus": _encode_array(c.data[SHEET_MINUS]),
            }
            for c in a.components
        ],
    }


def symbol_from_dict(doc: dict) -> ClassicalSymbol:
    if doc.get("format") != FORMAT_NAME:
        raise ShapeMismatchError("not a symbol document")
    comps = []
    for entry in doc["components"]:
        plus = _decode_array(entry["sheet_plus"])
        minus = _decode_array(entry["sheet_minus"])
        comps.append(HomogeneousComponent(entry["degree"], np.stack([plus, minus])))
    return ClassicalSymbol(
        doc["rank"], doc["cutoff"], doc["truncation_order"], tuple(comps)
    )


def save_symbol(a: ClassicalSymbol, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(symbol_to_dict(a), fh, indent=1)
        fh.write("\n")


def load_symbol(path) -> ClassicalSymbol:
    with open(path, "r", encoding="utf-8") as fh:
        return symbol_from_dict(json.load(fh))
