"""Truncated classical symbol calculus on the circle.

Symbols are finite collections of homogeneous components with band-limited
coefficients; on top of them sit Fourier-mode quantization with Sobolev
operator norms, the two trace functionals, curvature two-forms paired over
cycles, a gallery of worked examples, and seeded verification suites.
"""

from .errors import ConfigError, DegreeError, PowerIterationError, ShapeMismatchError
from .forms import (
    Cycle,
    SymbolFormField,
    chern_pairing,
    curvature_from_connection,
    finite_rank_pairing,
    grid_derivative,
    load_field,
    save_field,
    sphere_cycle,
    torus_cycle,
)
from .gallery import (
    LoopSection,
    leading_chern_normalization,
    loop_metric,
    loop_space_leading_chern,
    loop_times,
    monopole_field,
    pullback_gauge_field,
    random_negative_order_connection,
    random_symbol,
    single_mode_inverse_symbol,
    symbol_ensemble,
)
from .harness import (
    SUITES,
    CheckRecord,
    ExperimentConfig,
    ExperimentReport,
    emit_plot_data,
    run_suite,
)
from .quantize import (
    OperatorMatrix,
    SectionVector,
    apply,
    composition_defect,
    load_operator,
    operator_norm,
    quantize,
    restricted_norm,
    save_operator,
    sobolev_norm,
)
from .symbols import (
    ClassicalSymbol,
    HomogeneousComponent,
    adjoint,
    commutator,
    compose,
    linear_combine,
    load_symbol,
    minimal_decay_constant,
    save_symbol,
    seminorm,
    seminorm_scale,
    x_derivative,
    xi_derivative,
)
from .traces import (
    CIRCLE_LENGTH,
    COSPHERE_VOLUME,
    TraceKind,
    evaluate_trace,
    leading_order_trace,
    trace_density,
    wodzicki_residue,
)

__all__ = [
    "CIRCLE_LENGTH",
    "COSPHERE_VOLUME",
    "CheckRecord",
    "ClassicalSymbol",
    "ConfigError",
    "Cycle",
    "DegreeError",
    "ExperimentConfig",
    "ExperimentReport",
    "HomogeneousComponent",
    "LoopSection",
    "OperatorMatrix",
    "PowerIterationError",
    "SUITES",
    "SectionVector",
    "ShapeMismatchError",
    "SymbolFormField",
    "TraceKind",
    "adjoint",
    "apply",
    "chern_pairing",
    "commutator",
    "compose",
    "composition_defect",
    "curvature_from_connection",
    "emit_plot_data",
    "evaluate_trace",
    "finite_rank_pairing",
    "grid_derivative",
    "leading_chern_normalization",
    "leading_order_trace",
    "linear_combine",
    "load_field",
    "load_operator",
    "load_symbol",
    "loop_metric",
    "loop_space_leading_chern",
    "loop_times",
    "minimal_decay_constant",
    "monopole_field",
    "operator_norm",
    "pullback_gauge_field",
    "quantize",
    "random_negative_order_connection",
    "random_symbol",
    "restricted_norm",
    "run_suite",
    "save_field",
    "save_operator",
    "save_symbol",
    "seminorm",
    "seminorm_scale",
    "single_mode_inverse_symbol",
    "sobolev_norm",
    "sphere_cycle",
    "symbol_ensemble",
    "torus_cycle",
    "trace_density",
    "wodzicki_residue",
    "x_derivative",
    "xi_derivative",
]
