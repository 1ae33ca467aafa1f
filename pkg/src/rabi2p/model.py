"""Model parameters, symmetry sectors, and closed-form spectral constants.

Everything here is shared by the spectral-function backends: the physical
parameters (omega, Delta in units of the two-photon coupling), the four
Z4 symmetry sectors, the characteristic growth exponents of the eigenvalue
ODE, the squeezed (Bogoliubov) frame valid for omega > 2, and the analytic
pole grid of the Bogoliubov-frame spectral function.
"""

from __future__ import annotations

import cmath
import enum
import math
from bisect import bisect_left
from dataclasses import dataclass


class RegimeError(ValueError):
    """Operation requested outside the frequency regime where it is defined."""


class DegenerateExponentError(ValueError):
    """Exponent formula evaluated where its denominator degenerates (omega = 2)."""


class PoleProximityError(ValueError):
    """Evaluation point too close to an analytic pole to be meaningful."""


class NonConvergenceError(RuntimeError):
    """Iterative evaluation failed to reach the requested tolerance."""


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"  # omega < 2: no discrete spectrum to solve for
    CRITICAL = "critical"        # omega = 2: continuum above E = -1
    PURE_POINT = "pure_point"    # omega > 2: discrete spectrum, this package's domain


def classify_regime(omega: float) -> Regime:
    # exact comparison on purpose: the analysis changes discontinuously at 2
    if omega > 2.0:
        return Regime.PURE_POINT
    if omega == 2.0:
        return Regime.CRITICAL
    return Regime.SUBCRITICAL


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs omega (boson frequency) and delta (qubit splitting).

    Both are measured in units of the two-photon coupling, which is fixed
    to 1.  delta = 0 is allowed (needed for the exactly solvable limit) but
    the Bogoliubov-frame spectral function degenerates there; use the
    diagonalization oracle or the continued-fraction backend instead.
    """

    omega: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ValueError(f"omega must be positive and finite, got {self.omega!r}")
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta!r}")

    @property
    def regime(self) -> Regime:
        return classify_regime(self.omega)

    def require_pure_point(self, what: str) -> None:
        if self.regime is not Regime.PURE_POINT:
            raise RegimeError(f"{what} requires omega > 2, got omega = {self.omega}")


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


class Phase(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class SymmetrySector:
    """One of the four invariant subspaces of the Z4 symmetry.

    parity is the eigenvalue of the square of the generator (even/odd photon
    number), phase the relative sign between the two spinor components under
    the quarter rotation z -> iz.
    """

    parity: Parity
    phase: Phase

    @property
    def p(self) -> int:
        """Parity offset entering the series recurrences (0 even, 1 odd)."""
        return 0 if self.parity is Parity.EVEN else 1

    @property
    def s(self) -> int:
        """Sign of the Delta coupling term (+1 for phase plus, -1 for minus)."""
        return 1 if self.phase is Phase.PLUS else -1

    @property
    def z4_eigenvalue(self) -> complex:
        """Eigenvalue of exp(i pi/2 n) sigma_x on this sector: +-1 even, +-i odd."""
        if self.parity is Parity.EVEN:
            return complex(self.s)
        return complex(0, self.s)

    @property
    def label(self) -> str:
        return f"{self.parity.value}{'+' if self.phase is Phase.PLUS else '-'}"

    @classmethod
    def from_label(cls, label: str) -> "SymmetrySector":
        aliases = {
            "even+": (Parity.EVEN, Phase.PLUS), "pp": (Parity.EVEN, Phase.PLUS),
            "even-": (Parity.EVEN, Phase.MINUS), "pm": (Parity.EVEN, Phase.MINUS),
            "odd+": (Parity.ODD, Phase.PLUS), "mp": (Parity.ODD, Phase.PLUS),
            "odd-": (Parity.ODD, Phase.MINUS), "mm": (Parity.ODD, Phase.MINUS),
        }
        key = label.strip().lower()
        if key not in aliases:
            raise ValueError(f"unknown sector label {label!r}; use even+/even-/odd+/odd-")
        return cls(*aliases[key])


ALL_SECTORS = (
    SymmetrySector(Parity.EVEN, Phase.PLUS),
    SymmetrySector(Parity.EVEN, Phase.MINUS),
    SymmetrySector(Parity.ODD, Phase.PLUS),
    SymmetrySector(Parity.ODD, Phase.MINUS),
)

EVEN_PLUS = ALL_SECTORS[0]
EVEN_MINUS = ALL_SECTORS[1]
ODD_PLUS = ALL_SECTORS[2]
ODD_MINUS = ALL_SECTORS[3]


# flag bits shared by every backend evaluation (documented in docs/formats.md)
FLAG_NEAR_POLE = 1
FLAG_HUGE = 2
FLAG_NOT_CONVERGED = 4


@dataclass(frozen=True)
class GEvaluation:
    """One sample of a spectral function: energy, value, and status flags."""

    energy: float
    value: complex
    near_pole: bool = False
    huge: bool = False
    not_converged: bool = False

    @property
    def flags(self) -> int:
        return (
            (FLAG_NEAR_POLE if self.near_pole else 0)
            | (FLAG_HUGE if self.huge else 0)
            | (FLAG_NOT_CONVERGED if self.not_converged else 0)
        )

    @property
    def real(self) -> float:
        return self.value.real if isinstance(self.value, complex) else float(self.value)


def _sqrt_om2m4(omega: float) -> float:
    # (omega-2)(omega+2) keeps full relative accuracy as omega -> 2+
    return math.sqrt((omega - 2.0) * (omega + 2.0))


def characteristic_exponents(omega: float) -> tuple[complex, complex, complex, complex]:
    """Growth exponents gamma of exp(gamma z^2 / 2) eigenfunction asymptotics.

    Returns (gamma1, gamma2, gamma3, gamma4) solving
    gamma^4 + (2 - omega^2) gamma^2 + 1 = 0, ordered so that for omega > 2
    |gamma1|, |gamma2| < 1 < |gamma3|, |gamma4|.  For omega < 2 all four lie
    on the unit circle (complex arithmetic throughout).
    """
    if not (math.isfinite(omega) and omega > 0.0):
        raise ValueError(f"omega must be positive and finite, got {omega!r}")
    s = cmath.sqrt(complex((omega - 2.0) * (omega + 2.0)))
    g1 = (-omega + s) / 2.0
    g2 = (omega - s) / 2.0
    g3 = (omega + s) / 2.0
    g4 = (-omega - s) / 2.0
    return (g1, g2, g3, g4)


def recurrence_roots(omega: float) -> tuple[float, float]:
    """Roots x_+ (minimal) and x_- (dominant) of x^2 + (omega/2) x + 1/4 = 0.

    These govern the large-n behaviour a_n ~ x^n / n! of the power-series
    recurrence; a minimal solution exists only for omega > 2 where the two
    moduli differ.
    """
    if not omega > 2.0:
        raise RegimeError(
            f"recurrence roots separate in modulus only for omega > 2, got {omega}"
        )
    s = _sqrt_om2m4(omega)
    x_plus = (s - omega) / 4.0
    x_minus = -(s + omega) / 4.0
    return x_plus, x_minus


def exponent_rho(gamma: complex, omega: float, energy: float) -> complex:
    """Power-law prefactor exponent of the z^rho factor in the asymptotics.

    For the unit-circle exponents of the subcritical regime this has
    Re(rho) = -3/2 for every real energy, which is the quantity entering the
    norm-convergence analysis there.
    """
    gamma = complex(gamma)
    den = 4.0 * gamma**3 + 2.0 * (2.0 - omega**2) * gamma
    scale = 4.0 * abs(gamma) ** 3 + 2.0 * abs(2.0 - omega**2) * abs(gamma) + 1.0
    if abs(den) <= 1e-12 * scale:
        raise DegenerateExponentError(
            f"exponent denominator degenerates at gamma={gamma}, omega={omega}; "
            "the critical branch (critical_beta / critical_rho) applies at omega = 2"
        )
    # constant term +2*omega: with -2*omega the Re(rho) = -3/2 identity on the
    # unit circle fails (the two quadratic branches split into -1/2 and -5/2)
    num = (
        6.0 * gamma**3
        + 2.0 * omega * gamma**2
        + (2.0 - omega**2) * gamma
        + (4.0 + 2.0 * omega * energy - omega**2) * gamma
        + 2.0 * omega
    )
    return -num / den


def critical_beta(gamma: int, energy: float) -> tuple[complex, complex]:
    """Both signs of the linear exponent beta at the critical point omega = 2.

    gamma must be +1 or -1 (the doubly degenerate growth exponents there):
    beta^2 = -(E+1) for gamma = +1 and beta^2 = E+1 for gamma = -1.  The
    threshold E = -1 gives beta = 0.
    """
    if gamma not in (+1, -1):
        raise ValueError(f"critical exponents exist for gamma = +1 or -1, got {gamma}")
    beta_sq = -(energy + 1.0) if gamma == +1 else (energy + 1.0)
    b = cmath.sqrt(complex(beta_sq))
    return (b, -b)


def critical_rho(gamma: int) -> float:
    """Published power-law exponents at omega = 2: rho(+1) = -8/5, rho(-1) = 0."""
    if gamma == +1:
        return -8.0 / 5.0
    if gamma == -1:
        return 0.0
    raise ValueError(f"critical exponents exist for gamma = +1 or -1, got {gamma}")


@dataclass(frozen=True)
class BogoliubovFrame:
    """Energy-independent constants of the squeezed frame (omega > 2).

    The squeeze angle theta solves tanh(2 theta) = -2/omega.  All other
    fields are precomputed from omega in closed form; sqrt(omega^2 - 4) is
    the single conditioning-critical quantity, so nothing here is derived
    from theta numerically (theta is retained for audit checks only).
    """

    omega: float
    theta: float
    Gamma: float
    omega1: float
    omega2: float
    e1_offset: float
    e2_offset: float
    tanh_abs_theta: float

    def e1(self, energy: float) -> float:
        return energy + self.e1_offset

    def e2(self, energy: float) -> float:
        return energy + self.e2_offset


def bogoliubov_frame(omega: float) -> BogoliubovFrame:
    """Build the squeezed-frame constants for omega > 2."""
    if not omega > 2.0:
        raise RegimeError(f"the squeezed frame requires omega > 2, got {omega}")
    s = _sqrt_om2m4(omega)
    return BogoliubovFrame(
        omega=omega,
        theta=0.5 * math.atanh(-2.0 / omega),
        Gamma=2.0 * omega / s,
        omega1=s,
        omega2=-(omega * omega + 4.0) / s,
        e1_offset=(omega - s) / 2.0,
        e2_offset=omega / 2.0 - (omega * omega + 4.0) / (2.0 * s),
        tanh_abs_theta=(omega - s) / 2.0,
    )


def level_energy_delta0(omega: float, k: int) -> float:
    """Closed-form level k of the decoupled (Delta = 0) model for omega > 2.

    E_k = (k + 1/2) sqrt(omega^2 - 4) - omega/2.  The even-k levels coincide
    exactly with the pole grid of the Bogoliubov-frame spectral function.
    """
    if not omega > 2.0:
        raise RegimeError(f"the closed-form levels require omega > 2, got {omega}")
    if k < 0:
        raise ValueError(f"level index must be >= 0, got {k}")
    return (k + 0.5) * _sqrt_om2m4(omega) - 0.5 * omega


@dataclass(frozen=True)
class PoleGrid:
    """Ascending pole energies E^(m) = (2m + 1/2) sqrt(omega^2-4) - omega/2."""

    omega: float
    energies: tuple[float, ...]

    @property
    def gap(self) -> float:
        return 2.0 * _sqrt_om2m4(self.omega)

    def interval_index(self, energy: float) -> int:
        """Number of poles at or below `energy` (0 = below the first pole)."""
        return bisect_left(self.energies, energy)

    def nearest_distance(self, energy: float) -> float:
        if not self.energies:
            return math.inf
        i = self.interval_index(energy)
        candidates = []
        if i > 0:
            candidates.append(abs(energy - self.energies[i - 1]))
        if i < len(self.energies):
            candidates.append(abs(self.energies[i] - energy))
        return min(candidates)


def pole_energies(omega: float, m_max: int) -> PoleGrid:
    """Pole grid of the Bogoliubov-frame spectral function, m = 0..m_max."""
    if not omega > 2.0:
        raise RegimeError(f"the pole grid requires omega > 2, got {omega}")
    if m_max < 0:
        raise ValueError(f"m_max must be >= 0, got {m_max}")
    return PoleGrid(
        omega=omega,
        energies=tuple(level_energy_delta0(omega, 2 * m) for m in range(m_max + 1)),
    )
