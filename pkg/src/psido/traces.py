"""The two trace functionals on order <= 0 circle symbols.

Both traces integrate a single homogeneous component over the cosphere, and
the cosphere of the circle is two disjoint circles (one per sheet).  With
the circle given length 2*pi and the two cosphere points counted with unit
weight, every integral collapses to zeroth Fourier coefficients:

    residue trace   = tr a_{-1}^+(0) + tr a_{-1}^-(0)
    leading trace   = 2*pi * (tr a_0^+(0) + tr a_0^-(0))

The residue picks up a 1/(2*pi) normalization that exactly cancels the
circle length, which is why its prefactor is 1.  The volume conventions
live in the module constants below; every pairing result in the package is
stated relative to them.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .symbols import ClassicalSymbol

# dvol gives the circle length 2*pi; dxi is counting measure on the two
# cosphere points; together vol(S*S^1) = 4*pi.
CIRCLE_LENGTH = 2.0 * np.pi
COSPHERE_POINTS = 2
COSPHERE_VOLUME = COSPHERE_POINTS * CIRCLE_LENGTH


class TraceKind(Enum):
    WODZICKI = "wodzicki"
    LEADING_ORDER = "leading-order"


# Which homogeneous component each trace reads, and the constant in front
# of the summed sheet means.
TRACE_DEGREE = {TraceKind.WODZICKI: -1, TraceKind.LEADING_ORDER: 0}
TRACE_PREFACTOR = {TraceKind.WODZICKI: 1.0, TraceKind.LEADING_ORDER: CIRCLE_LENGTH}


def mode_zero_trace(data: np.ndarray) -> np.ndarray:
    """Sum over both sheets of the matrix trace of the x-mean.

    data has shape (..., 2, 2F+1, l, l); the result drops the last four
    axes.  Works on single components and on stacked grids of them alike.
    """
    cutoff = (data.shape[-3] - 1) // 2
    mean = data[..., :, cutoff, :, :]
    return np.einsum("...sii->...", mean)


def trace_density(data: np.ndarray, kind: TraceKind) -> np.ndarray:
    """Pointwise trace value of one component's Fourier data, batched."""
    return TRACE_PREFACTOR[kind] * mode_zero_trace(data)


def evaluate_trace(a: ClassicalSymbol, kind: TraceKind) -> complex:
    component = a.component(TRACE_DEGREE[kind])
    if component is None:
        return 0j
    return complex(trace_density(component.data, kind))


def wodzicki_residue(a: ClassicalSymbol) -> complex:
    """Residue trace; exactly zero when the degree -1 component is absent."""
    return evaluate_trace(a, TraceKind.WODZICKI)


def leading_order_trace(a: ClassicalSymbol) -> complex:
    """Integral of the degree-0 component over the cosphere."""
    return evaluate_trace(a, TraceKind.LEADING_ORDER)
