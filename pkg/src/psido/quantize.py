"""Fourier-mode quantization of circle symbols.

A symbol acts on the finite window of Fourier modes |j| <= J.  Column j of
the operator carries the function x -> a(x, j), where a(x, j) sums the
homogeneous components on the sheet picked by sgn j, scaled by |j|^degree.
Entry block (k, j) is therefore the x-Fourier coefficient of that column at
frequency k - j, and vanishes for |k - j| beyond the symbol band width.
The mode j = 0 lies on neither sheet; its column is zeroed (excision).

Storage is one dense complex matrix of shape (l*(2J+1), l*(2J+1)) with the
flat index (j + J)*l + c for mode j and fiber component c.  Dense blocks
are simplest at this scale; the banded structure is deliberately not
exploited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PowerIterationError, ShapeMismatchError
from .symbols import ClassicalSymbol, modes

# Fixed start vector seed for the singular value iteration; a documented
# constant so repeated runs produce identical iterates.
POWER_ITERATION_SEED = 20480

MATRIX_MAGIC = "psido-operator"
MATRIX_VERSION = 1


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix acting on Fourier-mode coefficient vectors.

    rank    fiber dimension l
    cutoff  mode window half-width J
    data    complex matrix, shape (l*(2J+1), l*(2J+1))
    """

    rank: int
    cutoff: int
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ShapeMismatchError("rank must be at least 1, got %r" % (self.rank,))
        if self.cutoff < 0:
            raise ShapeMismatchError("mode cutoff must be nonnegative, got %r" % (self.cutoff,))
        size = self.rank * (2 * self.cutoff + 1)
        data = np.asarray(self.data, dtype=np.complex128)
        if data.shape != (size, size):
            raise ShapeMismatchError(
                "operator data must have shape %r, got %r" % ((size, size), data.shape)
            )
        data = np.array(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def size(self) -> int:
        return self.rank * (2 * self.cutoff + 1)

    def block(self, row_mode: int, column_mode: int) -> np.ndarray:
        """The l-by-l block mapping mode column_mode to mode row_mode."""
        if abs(row_mode) > self.cutoff or abs(column_mode) > self.cutoff:
            raise ShapeMismatchError(
                "modes (%d, %d) outside window |j| <= %d" % (row_mode, column_mode, self.cutoff)
            )
        r = (row_mode + self.cutoff) * self.rank
        c = (column_mode + self.cutoff) * self.rank
        return self.data[r : r + self.rank, c : c + self.rank]

    def _matching(self, other: "OperatorMatrix") -> None:
        if self.rank != other.rank or self.cutoff != other.cutoff:
            raise ShapeMismatchError(
                "operator layouts differ: rank %d cutoff %d vs rank %d cutoff %d"
                % (self.rank, self.cutoff, other.rank, other.cutoff)
            )

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._matching(other)
        return OperatorMatrix(self.rank, self.cutoff, self.data @ other.data)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._matching(other)
        return OperatorMatrix(self.rank, self.cutoff, self.data + other.data)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._matching(other)
        return OperatorMatrix(self.rank, self.cutoff, self.data - other.data)

    def __mul__(self, factor: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.rank, self.cutoff, self.data * factor)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SectionVector:
    """Fourier coefficients of a section over the mode window |j| <= J.

    coefficients has shape (2J+1, rank); row j + cutoff holds the C^rank
    coefficient at mode j.
    """

    rank: int
    cutoff: int
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ShapeMismatchError("rank must be at least 1, got %r" % (self.rank,))
        if self.cutoff < 0:
            raise ShapeMismatchError("mode cutoff must be nonnegative, got %r" % (self.cutoff,))
        coeff = np.asarray(self.coefficients, dtype=np.complex128)
        if coeff.shape != (2 * self.cutoff + 1, self.rank):
            raise ShapeMismatchError(
                "coefficients must have shape %r, got %r"
                % ((2 * self.cutoff + 1, self.rank), coeff.shape)
            )
        coeff = np.array(coeff)
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    @classmethod
    def zero(cls, rank: int, cutoff: int) -> "SectionVector":
        return cls(rank, cutoff, np.zeros((2 * cutoff + 1, rank), dtype=np.complex128))

    @classmethod
    def single_mode(cls, rank: int, cutoff: int, mode: int, values) -> "SectionVector":
        """Section supported on one Fourier mode."""
        if abs(mode) > cutoff:
            raise ShapeMismatchError("mode %d outside window |j| <= %d" % (mode, cutoff))
        coeff = np.zeros((2 * cutoff + 1, rank), dtype=np.complex128)
        coeff[mode + cutoff] = np.asarray(values, dtype=np.complex128)
        return cls(rank, cutoff, coeff)

    def mode(self, j: int) -> np.ndarray:
        if abs(j) > self.cutoff:
            raise ShapeMismatchError("mode %d outside window |j| <= %d" % (j, self.cutoff))
        return self.coefficients[j + self.cutoff]


def quantize(a: ClassicalSymbol, cutoff: int) -> OperatorMatrix:
    """Assemble the dense mode-window matrix of a symbol.

    cutoff is the mode window half-width J and must cover the symbol band
    width F, else column assembly would drop convolution entries.
    """
    if cutoff < a.cutoff:
        raise ConfigError(
            "mode cutoff %d is smaller than the symbol band width %d" % (cutoff, a.cutoff)
        )
    ell = a.rank
    band = a.cutoff
    n = 2 * cutoff + 1
    js = modes(cutoff)
    sheet = (js < 0).astype(np.intp)
    absj = np.abs(js).astype(np.float64)
    absj[cutoff] = 1.0  # placeholder; the j = 0 column is zeroed by excision
    psi = np.ones(n, dtype=np.float64)
    psi[cutoff] = 0.0

    # Per-column Fourier data of x -> a(x, j), shape (n, 2F+1, l, l).
    column = np.zeros((n, 2 * band + 1, ell, ell), dtype=np.complex128)
    for comp in a.components:
        scale = psi * absj**comp.degree
        column += comp.data[sheet] * scale[:, None, None, None]

    out = np.zeros((n, ell, n, ell), dtype=np.complex128)
    for off in range(-band, band + 1):
        lo = max(-cutoff, -cutoff - off)
        hi = min(cutoff, cutoff - off)
        idx = np.arange(lo, hi + 1)
        out[idx + off + cutoff, :, idx + cutoff, :] = column[idx + cutoff, off + band]
    return OperatorMatrix(ell, cutoff, out.reshape(n * ell, n * ell))


def apply(op: OperatorMatrix, section: SectionVector) -> SectionVector:
    if section.rank != op.rank or section.cutoff != op.cutoff:
        raise ShapeMismatchError(
            "section layout (rank %d, cutoff %d) does not match operator (rank %d, cutoff %d)"
            % (section.rank, section.cutoff, op.rank, op.cutoff)
        )
    out = op.data @ section.coefficients.reshape(-1)
    return SectionVector(op.rank, op.cutoff, out.reshape(-1, op.rank))


def _mode_weights(cutoff: int, s: float) -> np.ndarray:
    """Per-mode multiplier (1 + j^2)^(s/2)."""
    js = modes(cutoff).astype(np.float64)
    return (1.0 + js * js) ** (s / 2.0)


def sobolev_norm(section: SectionVector, s: float) -> float:
    """Sobolev s-norm with the 2*pi circle volume folded in.

    norm^2 = 2*pi * sum_j (1 + j^2)^s |f_hat(j)|^2, so the constant mode
    with unit coefficient has norm sqrt(2*pi) for every s.
    """
    w = _mode_weights(section.cutoff, 2.0 * s)
    total = np.sum(w * np.sum(np.abs(section.coefficients) ** 2, axis=1))
    return float(np.sqrt(2.0 * np.pi * total))


def operator_norm(
    op: OperatorMatrix,
    s_from: float = 0.0,
    s_to: float = 0.0,
    tolerance: float = 1e-9,
    max_iterations: int = 10000,
) -> float:
    """Largest singular value of the operator between Sobolev mode weights.

    The matrix is conjugated by the diagonal (1 + j^2)^(s/2) weightings and
    the top singular value is found by power iteration on the normal
    operator, started from a fixed seeded vector.  Successive estimates must
    agree to the relative tolerance within the iteration cap; otherwise a
    PowerIterationError carrying the last estimate and iterate is raised.
    """
    d_to = np.repeat(_mode_weights(op.cutoff, s_to), op.rank)
    d_from = np.repeat(_mode_weights(op.cutoff, s_from), op.rank)
    weighted = op.data * d_to[:, None] / d_from[None, :]
    adjoint = weighted.conj().T

    rng = np.random.default_rng(POWER_ITERATION_SEED)
    v = rng.standard_normal(weighted.shape[0]) + 1j * rng.standard_normal(weighted.shape[0])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iterations):
        y = adjoint @ (weighted @ v)
        lam = np.linalg.norm(y)
        if lam == 0.0:
            return 0.0
        previous, sigma = sigma, float(np.sqrt(lam))
        v = y / lam
        if abs(sigma - previous) <= tolerance * sigma:
            return sigma
    raise PowerIterationError(
        "singular value estimate did not settle within %d iterations" % max_iterations,
        sigma,
        v,
    )


def composition_defect(
    a: ClassicalSymbol, b: ClassicalSymbol, truncation_order: int, cutoff: int
) -> OperatorMatrix:
    """Matrix of Op(a)Op(b) - Op(a#b) at truncation depth truncation_order."""
    from .symbols import compose

    product = compose(a, b, truncation_order)
    return quantize(a, cutoff) @ quantize(b, cutoff) - quantize(product, cutoff)


def restricted_norm(op: OperatorMatrix, mode_min: int, mode_max: int) -> float:
    """Spectral norm of the operator restricted to input modes in a band.

    Keeps the columns with mode_min <= |j| <= mode_max (all rows) and
    returns the largest singular value of the resulting rectangle.  Used to
    measure composition defects away from the excised mode and from the
    window edge, where truncation contaminates columns.
    """
    if not 0 <= mode_min <= mode_max <= op.cutoff:
        raise ConfigError(
            "band [%d, %d] is not inside [0, %d]" % (mode_min, mode_max, op.cutoff)
        )
    js = modes(op.cutoff)
    keep = (np.abs(js) >= mode_min) & (np.abs(js) <= mode_max)
    columns = np.repeat(keep, op.rank)
    return float(np.linalg.norm(op.data[:, columns], ord=2))


def save_operator(op: OperatorMatrix, path: str) -> None:
    """Write a matrix dump, bit-exact.

    Layout: one ASCII header line "psido-operator 1 <rank> <cutoff>\\n",
    then the dense matrix row-major as little-endian float64 pairs
    (real, imaginary) per entry.
    """
    header = "%s %d %d %d\n" % (MATRIX_MAGIC, MATRIX_VERSION, op.rank, op.cutoff)
    pairs = np.empty(op.data.shape + (2,), dtype=np.float64)
    pairs[..., 0] = op.data.real
    pairs[..., 1] = op.data.imag
    with open(path, "wb") as handle:
        handle.write(header.encode("ascii"))
        handle.write(pairs.astype("<f8").tobytes())


def load_operator(path: str) -> OperatorMatrix:
    with open(path, "rb") as handle:
        header = handle.readline().decode("ascii").split()
        if len(header) != 4 or header[0] != MATRIX_MAGIC:
            raise ConfigError("not an operator dump: %r" % (path,))
        if int(header[1]) != MATRIX_VERSION:
            raise ConfigError("unsupported dump version %s" % (header[1],))
        rank, cutoff = int(header[2]), int(header[3])
        size = rank * (2 * cutoff + 1)
        payload = handle.read()
    expected = size * size * 2 * 8
    if len(payload) != expected:
        raise ConfigError(
            "dump payload has %d bytes, expected %d" % (len(payload), expected)
        )
    pairs = np.frombuffer(payload, dtype="<f8").reshape(size, size, 2)
    data = pairs[..., 0] + 1j * pairs[..., 1]
    return OperatorMatrix(rank, cutoff, data)
