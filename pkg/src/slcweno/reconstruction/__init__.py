"""CWENO/CWENOZ reconstruction in one and two space dimensions."""

from .core import (
    CellReconstruction,
    EvalCounter,
    Polynomial1D,
    Polynomial2D,
    ReconConfig,
    ReconMode,
    ReconPolynomial,
    baseline_pointwise,
    blend,
    evaluate,
    fit_candidates,
    fit_poly_1d,
    oscillation,
    oscillation_1d,
    oscillation_data,
    reconstruct_cell,
    tau_1d,
    tau_2d,
)
from .forms import BASIS_2D, IndicatorForms, coefficient_matrix, derive_indicator_forms

__all__ = [
    "BASIS_2D",
    "CellReconstruction",
    "EvalCounter",
    "IndicatorForms",
    "Polynomial1D",
    "Polynomial2D",
    "ReconConfig",
    "ReconMode",
    "ReconPolynomial",
    "baseline_pointwise",
    "blend",
    "coefficient_matrix",
    "derive_indicator_forms",
    "evaluate",
    "fit_candidates",
    "fit_poly_1d",
    "oscillation",
    "oscillation_1d",
    "oscillation_data",
    "reconstruct_cell",
    "tau_1d",
    "tau_2d",
]
