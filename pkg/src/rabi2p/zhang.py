"""Zhang's continued-fraction spectral function, generalized to all four sectors.

The power-series coefficients of an eigenfunction candidate satisfy a
three-term recurrence whose minimal solution exists only for omega > 2.
The continued fraction built by backward recursion evaluates the minimal
solution's ratio a_1/a_0; the spectral function is the mismatch between
that ratio and the one forced by analyticity at the origin.  Zeros are
eigenvalues, but the poles of the continued fraction sit at unknown
positions, so root finding has to discriminate them by magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    GEvaluation,
    ModelParams,
    NonConvergenceError,
    SymmetrySector,
    recurrence_roots,
)

# relative underflow threshold for a continued-fraction denominator;
# hitting it means the truncated fraction sits on top of one of its poles
_DENOM_EPS = 1e-14

DEFAULT_TOL = 1e-12
DEFAULT_START_DEPTH = 64
MAX_DEPTH = 2**20


@dataclass(frozen=True)
class SectorRecurrence:
    """Three-term recurrence A(n) a_{n+1} + B(n,E) a_n + a_{n-1} = 0.

    p = 0/1 selects even/odd photon parity, s = +-1 the sign of the Delta
    term fixed by the sector's phase label.
    """

    omega: float
    delta: float
    p: int
    s: int

    @classmethod
    def from_params(cls, params: ModelParams, sector: SymmetrySector) -> "SectorRecurrence":
        return cls(omega=params.omega, delta=params.delta, p=sector.p, s=sector.s)

    def a_coeff(self, n: int) -> float:
        return float((2 * n + 2 + self.p) * (2 * n + 1 + self.p))

    def b_coeff(self, n: int, energy: float) -> float:
        sign = 1.0 if n % 2 == 0 else -1.0
        return (2 * n + self.p) * self.omega - energy + self.s * sign * self.delta

    def initial_ratio(self, energy: float) -> float:
        """a_1/a_0 imposed by the n = 0 row (a_{-1} = 0)."""
        return -self.b_coeff(0, energy) / self.a_coeff(0)


def cf_tail(
    energy: float,
    params: ModelParams,
    sector: SymmetrySector,
    depth: int,
    tail: float | None = None,
) -> tuple[float, bool]:
    """Backward-recursed continued fraction V_1(E) at a fixed depth.

    The tail is seeded with the minimal-solution ratio estimate
    x_+ / depth unless an explicit value is given.  Returns (V_1, near_pole)
    where near_pole reports a denominator underflow at some level.
    """
    params.require_pure_point("the continued fraction")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    rec = SectorRecurrence.from_params(params, sector)
    if tail is None:
        x_plus, _ = recurrence_roots(params.omega)
        tail = x_plus / depth
    v = tail
    near_pole = False
    for n in range(depth - 1, 0, -1):
        b = rec.b_coeff(n, energy)
        den = b + rec.a_coeff(n) * v
        if abs(den) < _DENOM_EPS * (1.0 + abs(b) + abs(rec.a_coeff(n) * v)):
            near_pole = True
            den = _DENOM_EPS if den >= 0.0 else -_DENOM_EPS
        v = -1.0 / den
    return v, near_pole


def cf_value(
    energy: float,
    params: ModelParams,
    sector: SymmetrySector,
    tol: float = DEFAULT_TOL,
    start_depth: int = DEFAULT_START_DEPTH,
    max_depth: int = MAX_DEPTH,
) -> tuple[float, bool, int]:
    """V_1(E) with the depth-doubling policy: double until |dV_1| < tol*max(1,|V_1|)."""
    depth = start_depth
    v_prev, near_prev = cf_tail(energy, params, sector, depth)
    while depth <= max_depth:
        depth *= 2
        v, near = cf_tail(energy, params, sector, depth)
        if abs(v - v_prev) < tol * max(1.0, abs(v)):
            return v, near or near_prev, depth
        v_prev, near_prev = v, near
    raise NonConvergenceError(
        f"continued fraction did not stabilize to {tol} by depth {max_depth} "
        f"at E = {energy} (sector {sector.label})"
    )


def g_zhang(
    energy: float,
    params: ModelParams,
    sector: SymmetrySector,
    tol: float = DEFAULT_TOL,
) -> GEvaluation:
    """Continued-fraction spectral function: initial ratio minus V_1(E)."""
    rec = SectorRecurrence.from_params(params, sector)
    v1, near_pole, _ = cf_value(energy, params, sector, tol=tol)
    return GEvaluation(
        energy=energy,
        value=rec.initial_ratio(energy) - v1,
        near_pole=near_pole,
    )


def minimal_coefficients(
    energy: float,
    params: ModelParams,
    sector: SymmetrySector,
    n_terms: int,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """First coefficients a_0..a_N of the minimal solution, normalized a_0 = 1.

    Reconstructed top-down: start far above N with the asymptotic tail ratio,
    recur down, normalize.  The start level is doubled until the requested
    coefficients are stable to `tol`.
    """
    params.require_pure_point("the minimal solution")
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    rec = SectorRecurrence.from_params(params, sector)
    x_plus, _ = recurrence_roots(params.omega)

    def backward(start: int) -> np.ndarray:
        a = np.zeros(start + 2)
        a[start + 1] = x_plus / (start + 1)
        a[start] = 1.0
        for n in range(start, 0, -1):
            a[n - 1] = -(rec.a_coeff(n) * a[n + 1] + rec.b_coeff(n, energy) * a[n])
            if abs(a[n - 1]) > 1e250:  # rescale the filled tail; only ratios matter
                a[n - 1 :] /= a[n - 1]
        return a[: n_terms + 1] / a[0]

    start = max(2 * n_terms, 64)
    prev = backward(start)
    while start <= MAX_DEPTH:
        start *= 2
        cur = backward(start)
        scale = np.maximum(np.abs(cur), 1e-300)
        if np.max(np.abs(cur - prev) / scale) < tol:
            return cur
        prev = cur
    raise NonConvergenceError(
        f"minimal-solution coefficients did not stabilize at E = {energy}"
    )


def forward_coefficients(
    energy: float,
    params: ModelParams,
    sector: SymmetrySector,
    n_terms: int,
) -> np.ndarray:
    """Forward recursion from a_0 = 1 and the analytic initial ratio.

    Off the spectrum this is contaminated by the dominant solution and
    diverges; at an eigenvalue it tracks the minimal solution for a while.
    Provided as a diagnostic, not an evaluator.
    """
    rec = SectorRecurrence.from_params(params, sector)
    a = np.zeros(n_terms + 1)
    a[0] = 1.0
    if n_terms >= 1:
        a[1] = rec.initial_ratio(energy)
    for n in range(1, n_terms):
        a[n + 1] = -(rec.b_coeff(n, energy) * a[n] + a[n - 1]) / rec.a_coeff(n)
    return a


class ZhangBackend:
    """Callable E -> GEvaluation for the continued-fraction spectral function."""

    name = "zhang"
    # increasing between its own poles, which slide ever closer below the
    # zeros at higher energies; the solver uses this for hidden-pole refinement
    monotone_between_poles = True

    def __init__(self, params: ModelParams, sector: SymmetrySector, tol: float = DEFAULT_TOL):
        params.require_pure_point("the continued-fraction backend")
        self.params = params
        self.sector = sector
        self.tol = tol

    def __call__(self, energy: float) -> GEvaluation:
        return g_zhang(energy, self.params, self.sector, tol=self.tol)
