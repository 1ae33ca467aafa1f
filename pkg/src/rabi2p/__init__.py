"""Spectral-determinant solver for the two-photon quantum Rabi model (omega > 2).

Three spectral-function backends (Bogoliubov-frame series with analytic
poles, minimal-solution continued fraction, and the double-precision
instability exhibit), an independent truncated-diagonalization oracle, and
pole-aware root finding with collapse-approach scans.
"""

from .model import (
    ALL_SECTORS,
    EVEN_MINUS,
    EVEN_PLUS,
    ODD_MINUS,
    ODD_PLUS,
    BogoliubovFrame,
    DegenerateExponentError,
    GEvaluation,
    ModelParams,
    NonConvergenceError,
    Parity,
    Phase,
    PoleGrid,
    PoleProximityError,
    Regime,
    RegimeError,
    SymmetrySector,
    bogoliubov_frame,
    characteristic_exponents,
    critical_beta,
    critical_rho,
    exponent_rho,
    pole_energies,
    recurrence_roots,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_SECTORS",
    "EVEN_MINUS",
    "EVEN_PLUS",
    "ODD_MINUS",
    "ODD_PLUS",
    "BogoliubovFrame",
    "DegenerateExponentError",
    "GEvaluation",
    "ModelParams",
    "NonConvergenceError",
    "Parity",
    "Phase",
    "PoleGrid",
    "PoleProximityError",
    "Regime",
    "RegimeError",
    "SymmetrySector",
    "bogoliubov_frame",
    "characteristic_exponents",
    "critical_beta",
    "critical_rho",
    "exponent_rho",
    "pole_energies",
    "recurrence_roots",
    "__version__",
]
