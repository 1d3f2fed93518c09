"""Exact exterior-calculus toolkit for invariant deformed G2-instantons."""

from .scalars import (
    Poly,
    Scalar,
    SYMBOLS,
    ExtensionMismatchError,
    UnboundSymbolError,
    UnknownSymbolError,
    poly_arith,
)
from .cdga import (
    CheckResult,
    Form,
    Generator,
    Presentation,
    Report,
    RewriteBudgetError,
    normalize,
    top_coefficient,
    validate_presentation,
    wedge,
    differential,
)
from .models import (
    CY3Preset,
    HypersymplecticPreset,
    NearlyParallelSolution,
    SasakianPreset,
    build_phi,
    build_psi,
    check_cy3_lemma,
    check_pullback_asd,
    cy3_preset,
    hypersymplectic_preset,
    sasakian_preset,
    solve_nearly_parallel,
)
from .instanton import (
    Branch,
    ConnectionAnsatz,
    Residual,
    SolutionSet,
    classify_deformed,
    classify_g2,
    curvature,
    deformed_residual,
    g2_residual,
    verify_solution_set,
)
from .functional import (
    ClosedForm,
    CriticalPoint,
    GridSpec,
    closed_form,
    critical_points_numeric,
    functional_direct,
    functional_transgression,
    gradient,
    grid_export,
    hessian_at,
    moduli_scan,
)

__version__ = "0.1.0"
