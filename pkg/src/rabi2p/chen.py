"""Chen's Bogoliubov-frame spectral function with its analytic pole grid.

In the squeezed frame the eigenvalue system turns into a power-series
recurrence whose denominators vanish at the known energies
E^(m) = (2m + 1/2) sqrt(omega^2 - 4) - omega/2.  The spectral function is an
absolutely convergent series evaluated at the squeeze-invariant point and
has simple poles exactly on that grid; a pole is lifted (finite value) when
the expansion coefficients develop a zero there, which marks a doubly
degenerate, quasi-exactly-solvable level.

The factorially growing weight (2m)!/(2^m m!) is never materialized: every
sum runs on incrementally scaled terms via the ratio
c_m / c_{m-1} = tanh|theta| (2m - 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    BogoliubovFrame,
    GEvaluation,
    ModelParams,
    Phase,
    PoleGrid,
    PoleProximityError,
    bogoliubov_frame,
    pole_energies,
)

DEFAULT_TOL = 1e-12
DEFAULT_M_MAX = 3000
DEFAULT_POLE_EPS = 1e-10
# fraction of the inter-pole gap within which evaluations carry a near-pole flag
POLE_FLAG_FRACTION = 1e-6
# consecutive negligible terms required before the series is declared summed
_TAIL_RUN = 8


def _check_pole_distance(e1: float, omega1: float, n_even_max: int, pole_eps: float) -> None:
    """Reject energies whose frame shift sits on an even multiple of omega1."""
    r = e1 / omega1
    n_near = 2 * round(r / 2.0)
    if 0 <= n_near <= n_even_max and abs(e1 - n_near * omega1) < pole_eps * omega1:
        raise PoleProximityError(
            f"E1/omega1 = {r!r} is within {pole_eps} of the even integer {n_near}; "
            "the series coefficients degenerate there"
        )


def chen_coefficients(
    energy: float,
    params: ModelParams,
    m_max: int,
    pole_eps: float = DEFAULT_POLE_EPS,
) -> np.ndarray:
    """Even-index series coefficients a_0, a_2, ..., a_{2 m_max} (index = m).

    Forward recursion of the squeezed-frame three-term relation with
    a_{-2} = 0, a_0 = 1.  Raises PoleProximityError when E sits within
    pole_eps * omega1 of a pole of the coefficient recursion.
    """
    params.require_pure_point("the squeezed-frame recurrence")
    frame = bogoliubov_frame(params.omega)
    e1, e2 = frame.e1(energy), frame.e2(energy)
    _check_pole_distance(e1, frame.omega1, 2 * m_max, pole_eps)
    d2 = params.delta * params.delta
    a = np.zeros(m_max + 1)
    a[0] = 1.0
    prev = 0.0  # a_{-2}
    for m in range(m_max):
        n = 2 * m
        alpha = d2 / (e1 - n * frame.omega1) - (n * frame.omega2 + e2)
        nxt = (alpha * a[m] - frame.Gamma * prev) / ((n + 2) * (n + 1) * frame.Gamma)
        prev = a[m]
        a[m + 1] = nxt
    return a


def phi1_coefficients(a: np.ndarray, energy: float, params: ModelParams,
                      pole_eps: float = DEFAULT_POLE_EPS) -> np.ndarray:
    """Companion-component coefficients: abar_n = Delta a_n / (E1 - n omega1).

    `a` holds even-index coefficients (index m <-> n = 2m), as returned by
    chen_coefficients.
    """
    frame = bogoliubov_frame(params.omega)
    e1 = frame.e1(energy)
    _check_pole_distance(e1, frame.omega1, 2 * (len(a) - 1), pole_eps)
    n = 2 * np.arange(len(a))
    return params.delta * a / (e1 - n * frame.omega1)


class PoleClass(enum.Enum):
    POLE = "pole"
    LIFTED = "lifted"
    INCONCLUSIVE = "inconclusive"


@dataclass
class ScaledSeries:
    """Term-by-term record of one spectral-function series evaluation."""

    m_terms: list[float] = field(default_factory=list)
    partial_sums: list[float] = field(default_factory=list)
    truncation_m: int = 0
    converged: bool = False

    @property
    def value(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0


def scaled_series(
    energy: float,
    params: ModelParams,
    phase: Phase = Phase.PLUS,
    tol: float = DEFAULT_TOL,
    m_max: int = DEFAULT_M_MAX,
    pole_eps: float = DEFAULT_POLE_EPS,
    internal_scale: float = 1.0,
) -> ScaledSeries:
    """Sum the spectral-function series on incrementally scaled terms.

    Terms are (1 - Delta_s/(E1 - 2m omega1)) a_{2m} tanh|theta|^m (2m)!/(2^m m!)
    with Delta_s = +Delta (phase plus) or -Delta (phase minus).  The sum stops
    once _TAIL_RUN consecutive terms fall below tol times the running scale.
    `internal_scale` multiplies the working variables and is divided back out
    of the reported values; the result must not depend on it.
    """
    params.require_pure_point("the squeezed-frame series")
    frame = bogoliubov_frame(params.omega)
    e1, e2 = frame.e1(energy), frame.e2(energy)
    _check_pole_distance(e1, frame.omega1, 2 * m_max, pole_eps)
    t = frame.tanh_abs_theta
    d2 = params.delta * params.delta
    delta_s = params.delta if phase is Phase.PLUS else -params.delta

    series = ScaledSeries()
    u_prev = 0.0
    u = 1.0 * internal_scale
    total = 0.0
    scale = 0.0
    small_run = 0
    m = 0
    while m <= m_max:
        term = (1.0 - delta_s / (e1 - 2 * m * frame.omega1)) * u
        total += term
        series.m_terms.append(term / internal_scale)
        series.partial_sums.append(total / internal_scale)
        scale = max(scale, abs(total), abs(term))
        if abs(term) <= tol * scale:
            small_run += 1
            if small_run >= _TAIL_RUN:
                series.truncation_m = m
                series.converged = True
                return series
        else:
            small_run = 0
        n = 2 * m
        alpha = d2 / (e1 - n * frame.omega1) - (n * frame.omega2 + e2)
        u_next = (t * alpha * u) / ((n + 2) * frame.Gamma) - (
            t * t * (n - 1) / (n + 2)
        ) * u_prev
        u_prev, u = u, u_next
        m += 1
    series.truncation_m = m_max
    series.converged = False
    return series


def g_chen(
    energy: float,
    params: ModelParams,
    phase: Phase = Phase.PLUS,
    tol: float = DEFAULT_TOL,
    m_max: int = DEFAULT_M_MAX,
    pole_eps: float = DEFAULT_POLE_EPS,
    poles: PoleGrid | None = None,
) -> GEvaluation:
    """Bogoliubov-frame spectral function for the even-parity sectors.

    Requires omega > 2 and Delta != 0 (at Delta = 0 every pole is lifted and
    the function degenerates; use the diagonalization oracle there).  Odd
    parity is out of scope for this backend; the continued-fraction backend
    covers it.
    """
    params.require_pure_point("the squeezed-frame spectral function")
    if params.delta == 0.0:
        raise ValueError(
            "the squeezed-frame spectral function degenerates at delta = 0; "
            "use the diagonalization oracle instead"
        )
    series = scaled_series(
        energy, params, phase=phase, tol=tol, m_max=m_max, pole_eps=pole_eps
    )
    if poles is None:
        frame = bogoliubov_frame(params.omega)
        m_hint = max(0, int(math.ceil((frame.e1(energy)) / (2.0 * frame.omega1))) + 1)
        poles = pole_energies(params.omega, m_hint)
    near = poles.nearest_distance(energy) < POLE_FLAG_FRACTION * poles.gap
    return GEvaluation(
        energy=energy,
        value=series.value,
        near_pole=near,
        huge=abs(series.value) > 1e8,
        not_converged=not series.converged,
    )


@dataclass(frozen=True)
class ResidueProbe:
    """Result of the numerical residue estimate at pole index m."""

    m: int
    pole_energy: float
    residue: float
    classification: PoleClass
    estimates: tuple[float, ...]
    neighbor_scale: float


def residue_estimate(
    m: int,
    params: ModelParams,
    phase: Phase = Phase.PLUS,
    stencil_fractions: tuple[float, ...] = (1e-4, 1e-5),
    tol: float = DEFAULT_TOL,
) -> tuple[float, ...]:
    """Two-sided stencil estimates of lim (E - E^(m)) G(E), widest first."""
    params.require_pure_point("the residue probe")
    grid = pole_energies(params.omega, m + 1)
    e_m = grid.energies[m]
    out = []
    for frac in stencil_fractions:
        eps = frac * grid.gap
        gp = scaled_series(e_m + eps, params, phase=phase, tol=tol).value
        gm = scaled_series(e_m - eps, params, phase=phase, tol=tol).value
        out.append(0.5 * (eps * gp - eps * gm))
    return tuple(out)


def residue_probe(
    m: int,
    params: ModelParams,
    phase: Phase = Phase.PLUS,
    lift_tol: float = 1e-6,
    stencil_fractions: tuple[float, ...] = (1e-4, 1e-5),
    tol: float = DEFAULT_TOL,
) -> ResidueProbe:
    """Classify pole m as a genuine simple pole or a lifted (exceptional) one.

    Lifted poles mark candidates for doubly degenerate levels sitting exactly
    on the pole grid.  The estimate magnitude is compared against the scale
    of the function a quarter-gap away; stencils disagreeing by more than a
    factor 10 yield an inconclusive verdict.
    """
    grid = pole_energies(params.omega, m + 1)
    e_m = grid.energies[m]
    estimates = residue_estimate(
        m, params, phase=phase, stencil_fractions=stencil_fractions, tol=tol
    )
    quarter = 0.25 * grid.gap
    side = max(
        abs(scaled_series(e_m + quarter, params, phase=phase, tol=tol).value),
        abs(scaled_series(e_m - quarter, params, phase=phase, tol=tol).value),
    )
    neighbor_scale = max(quarter * side, 1e-300)
    r_wide, r_fine = estimates[0], estimates[-1]
    if abs(r_wide) < lift_tol * neighbor_scale and abs(r_fine) < lift_tol * neighbor_scale:
        cls = PoleClass.LIFTED
    else:
        hi = max(abs(r_wide), abs(r_fine))
        lo = max(min(abs(r_wide), abs(r_fine)), 1e-300)
        cls = PoleClass.INCONCLUSIVE if hi / lo > 10.0 else PoleClass.POLE
    return ResidueProbe(
        m=m,
        pole_energy=e_m,
        residue=r_fine,
        classification=cls,
        estimates=estimates,
        neighbor_scale=neighbor_scale,
    )


def frame_abbrevs(energy: float, params: ModelParams) -> tuple[float, float, float, float]:
    """Energy-dependent shorthand constants (b1..b4) of the squeezed-frame ODE."""
    frame = bogoliubov_frame(params.omega)
    e1, e2 = frame.e1(energy), frame.e2(energy)
    b1 = frame.omega2 / frame.Gamma
    b2 = 2.0 - e1 / frame.omega1
    b3 = (e2 * frame.omega1 - e1 * frame.omega2 + frame.omega1 * frame.omega2) / (
        frame.Gamma * frame.omega1
    )
    b4 = (params.delta * params.delta - e1 * e2) / (frame.Gamma * frame.omega1)
    return b1, b2, b3, b4


def infinity_series_coefficients(
    energy: float, params: ModelParams, n_max: int
) -> np.ndarray:
    """Even coefficients of the formal expansion about z = infinity.

    Diagnostic only: the recursion coefficients diverge with n, so the
    expansion has zero convergence radius (ratio |c_n / c_{n-2}| grows
    linearly with n) unless it terminates, which is the exceptional case.
    """
    frame = bogoliubov_frame(params.omega)
    r = frame.e1(energy) / frame.omega1
    b1, _, b3, b4 = frame_abbrevs(energy, params)
    cs = np.zeros(n_max // 2 + 1)
    cs[0] = 1.0
    for n in range(2, n_max + 1, 2):
        i = n // 2
        val = (b1 * (r - n + 1) * (r - n + 2) + b3 * (r - n + 2) + b4) * cs[i - 1]
        if n >= 6:
            val += (4 - n) * (r - n + 3) * (r - n + 4) * cs[i - 2]
        cs[i] = val / n
    return cs


def w_series_terms(energy: float, params: ModelParams, m_max: int) -> np.ndarray:
    """Terms of the frame-invariant series evaluated before unsqueezing.

    Diagnostic only: this series has convergence radius exactly 1 and is not
    summable at the point needed (term ratio tends to 1), which is why the
    evaluation must happen after returning to the original frame.  The
    coefficient and the factorial weight are tracked as one product (either
    factor alone under/overflows long before the terms do).
    """
    params.require_pure_point("the frame-invariant series")
    frame = bogoliubov_frame(params.omega)
    e1, e2 = frame.e1(energy), frame.e2(energy)
    _check_pole_distance(e1, frame.omega1, 2 * m_max, DEFAULT_POLE_EPS)
    om = params.omega
    d2 = params.delta * params.delta
    terms = np.zeros(m_max + 1)
    u_prev, u = 0.0, 1.0  # u_m = a_{2m} (2m)!/(omega^m m!)
    for m in range(m_max + 1):
        terms[m] = u / (e1 - 2 * m * frame.omega1)
        n = 2 * m
        alpha = d2 / (e1 - n * frame.omega1) - (n * frame.omega2 + e2)
        u_next = 2.0 * alpha * u / (om * (n + 2) * frame.Gamma) - (
            4.0 * (n - 1) / (om * om * (n + 2))
        ) * u_prev
        u_prev, u = u, u_next
    return terms


class ChenBackend:
    """Callable E -> GEvaluation for the Bogoliubov-frame spectral function."""

    name = "chen"

    def __init__(
        self,
        params: ModelParams,
        phase: Phase = Phase.PLUS,
        tol: float = DEFAULT_TOL,
        m_max: int = DEFAULT_M_MAX,
        pole_eps: float = DEFAULT_POLE_EPS,
        m_poles: int = 64,
    ):
        params.require_pure_point("the squeezed-frame backend")
        if params.delta == 0.0:
            raise ValueError(
                "the squeezed-frame backend degenerates at delta = 0; "
                "use the diagonalization oracle instead"
            )
        self.params = params
        self.phase = phase
        self.tol = tol
        self.m_max = m_max
        self.pole_eps = pole_eps
        self.poles = pole_energies(params.omega, m_poles)

    def __call__(self, energy: float) -> GEvaluation:
        return g_chen(
            energy,
            self.params,
            phase=self.phase,
            tol=self.tol,
            m_max=self.m_max,
            pole_eps=self.pole_eps,
            poles=self.poles,
        )
