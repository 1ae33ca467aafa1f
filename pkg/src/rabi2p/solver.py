"""Pole-aware bracketing and root polishing over any spectral-function backend.

The Bogoliubov-frame backend comes with an analytic pole grid, so each open
inter-pole interval (plus a synthetic one below the first pole, where ground
states can live) is scanned independently.  Backends without known poles get
a uniform grid; sign changes flanked by large magnitudes are discarded as
pole crossings, and every accepted root must pass a smallness certificate,
which also rejects brackets that Brent's method slid onto a discontinuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .chen import ChenBackend, PoleClass, residue_estimate, residue_probe
from .model import (
    GEvaluation,
    ModelParams,
    Parity,
    Phase,
    PoleGrid,
    SymmetrySector,
    pole_energies,
)
from .oracle import SpectrumReport, eigenvalues
from .zhang import ZhangBackend

# |G| above this on both flanks of a sign change marks a pole crossing
POLE_FLANK_MAGNITUDE = 1e3
# certificate: |G(z)| < CERT_TOL * local scale, sign change across +-h
CERT_TOL = 1e-9


@dataclass(frozen=True)
class RootFindConfig:
    e_min: float
    e_max: float
    grid_points_per_interval: int = 64
    brent_tol: float = 1e-11
    pole_exclusion: float = 1e-6  # fraction of the local inter-pole gap

    def __post_init__(self) -> None:
        if not (self.e_min < self.e_max):
            raise ValueError(f"need e_min < e_max, got [{self.e_min}, {self.e_max}]")
        if self.grid_points_per_interval < 8:
            raise ValueError("grid_points_per_interval must be at least 8")
        if not (self.brent_tol > 0.0 and self.pole_exclusion > 0.0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Zero:
    energy: float
    interval_index: int
    value: float


@dataclass
class ZeroScan:
    zeros: list[Zero] = field(default_factory=list)
    unresolved: list[tuple[float, float]] = field(default_factory=list)
    rejected_pole_crossings: int = 0


def _segments(
    config: RootFindConfig, poles: PoleGrid | None
) -> list[tuple[float, float]]:
    """Scan segments: inter-pole gaps shrunk by the exclusion window."""
    if poles is None or not poles.energies:
        return [(config.e_min, config.e_max)]
    pad = config.pole_exclusion * poles.gap
    bounds = [config.e_min]
    for p in poles.energies:
        if config.e_min < p < config.e_max:
            bounds.extend([p - pad, p + pad])
    bounds.append(config.e_max)
    segs = []
    for lo, hi in zip(bounds[0::2], bounds[1::2]):
        if hi - lo > 4.0 * pad:
            segs.append((lo, hi))
    return segs


def _polish(
    g: Callable[[float], GEvaluation], z: float, lo: float, hi: float
) -> tuple[float, float]:
    """Secant-polish a bracketed root down to the floating-point noise floor.

    Brent stops at its xtol, which leaves |G| ~ slope * xtol; steep roots
    (continued-fraction zeros hugging a pole) need the extra digits to pass
    the smallness certificate.
    """
    x0, x1 = z - 1e-9 * max(1.0, abs(z)), z
    try:
        f0, f1 = g(x0).real, g(x1).real
    except (ValueError, RuntimeError):
        return z, math.nan
    for _ in range(8):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (lo <= x2 <= hi) or not math.isfinite(x2):
            break
        try:
            f2 = g(x2).real
        except (ValueError, RuntimeError):
            break
        x0, f0, x1, f1 = x1, f1, x2, f2
        if f2 == 0.0:
            break
    return x1, f1


def _certified(
    g: Callable[[float], GEvaluation], z: float, val: float, h: float, bracket_scale: float
) -> bool:
    """Smallness + sign-change certificate for a polished root."""
    if not math.isfinite(val):
        return False
    try:
        lo, hi = g(z - h).real, g(z + h).real
    except (ValueError, RuntimeError):
        return False
    local_scale = max(abs(lo), abs(hi), bracket_scale, 1.0)
    return abs(val) < CERT_TOL * local_scale and (lo < 0.0 < hi or hi < 0.0 < lo)


def find_zeros(
    g: Callable[[float], GEvaluation],
    config: RootFindConfig,
    poles: PoleGrid | None = None,
    index_grid: PoleGrid | None = None,
    max_refine_depth: int = 3,
) -> ZeroScan:
    """All certified zeros of `g` on [e_min, e_max].

    `poles` carves the scan into inter-pole segments (backends with a known
    grid); `index_grid` is the grid used to label each zero with its
    inter-pole interval index (defaults to `poles`).

    Backends exposing `monotone_between_poles = True` (the continued
    fraction: increasing between its own, analytically unknown, poles) get
    hidden-pole refinement: a cell where the value decreases must contain a
    pole, and such cells are subdivided so a pole-zero pair tighter than the
    grid step cannot mask a root.
    """
    index_grid = index_grid if index_grid is not None else poles
    monotone = bool(getattr(g, "monotone_between_poles", False))
    scan = ZeroScan()
    h = 10.0 * config.brent_tol

    def eval_real(x: float) -> float:
        try:
            return g(float(x)).real
        except (ValueError, RuntimeError):
            return math.nan

    def scan_segment(lo: float, hi: float, points: int, depth: int) -> None:
        xs = np.linspace(lo, hi, points + 1)
        vals = np.array([eval_real(x) for x in xs])
        for i in range(len(xs) - 1):
            f0, f1 = vals[i], vals[i + 1]
            if not (np.isfinite(f0) and np.isfinite(f1)):
                continue
            if f0 == 0.0:
                f0 = -f1  # grid point exactly on a root: treat as bracket
            if f0 * f1 < 0.0:
                if abs(f0) > POLE_FLANK_MAGNITUDE and abs(f1) > POLE_FLANK_MAGNITUDE:
                    # pole crossing; in monotone mode the paired zero may hide here
                    scan.rejected_pole_crossings += 1
                    if monotone and depth > 0:
                        scan_segment(float(xs[i]), float(xs[i + 1]), 32, depth - 1)
                    continue
                try:
                    z = brentq(
                        lambda e: g(float(e)).real,
                        float(xs[i]),
                        float(xs[i + 1]),
                        xtol=config.brent_tol,
                    )
                except (ValueError, RuntimeError):
                    scan.unresolved.append((float(xs[i]), float(xs[i + 1])))
                    continue
                z, val = _polish(g, float(z), float(xs[i]), float(xs[i + 1]))
                bracket_scale = max(abs(f0), abs(f1))
                if not _certified(g, z, val, h, bracket_scale):
                    scan.rejected_pole_crossings += 1
                    if monotone and depth > 0:
                        scan_segment(float(xs[i]), float(xs[i + 1]), 32, depth - 1)
                    continue
                idx = index_grid.interval_index(z) if index_grid is not None else 0
                scan.zeros.append(Zero(energy=float(z), interval_index=idx, value=val))
            elif monotone and f1 < f0:
                # same-sign decrease: at least one hidden pole inside the cell
                if depth > 0:
                    scan_segment(float(xs[i]), float(xs[i + 1]), 32, depth - 1)
                else:
                    scan.unresolved.append((float(xs[i]), float(xs[i + 1])))

    for lo, hi in _segments(config, poles):
        points = config.grid_points_per_interval
        if poles is None and index_grid is not None:
            # no analytic segmentation: keep the same per-gap grid density
            span_gaps = (hi - lo) / index_grid.gap
            points = max(points, int(math.ceil(points * span_gaps)))
        scan_segment(lo, hi, points, max_refine_depth)

    scan.zeros.sort(key=lambda r: r.energy)
    deduped: list[Zero] = []
    for r in scan.zeros:
        if deduped and abs(r.energy - deduped[-1].energy) <= 100.0 * config.brent_tol:
            continue
        deduped.append(r)
    scan.zeros = deduped
    return scan


def default_backend(params: ModelParams, sector: SymmetrySector, tol: float = 1e-12):
    """Production backend per sector: Bogoliubov-frame for even parity with
    nonzero Delta, continued fraction otherwise.  The symmetry-matching
    backend is deliberately not in this list."""
    if sector.parity is Parity.EVEN and params.delta != 0.0:
        return ChenBackend(params, phase=sector.phase, tol=tol)
    return ZhangBackend(params, sector, tol=tol)


def scan_config_for(
    params: ModelParams,
    e_min: float | None = None,
    e_max: float | None = None,
    intervals: int = 8,
    **kwargs,
) -> RootFindConfig:
    """Config covering `intervals` inter-pole gaps unless explicit bounds given."""
    grid = pole_energies(params.omega, max(intervals, 1))
    first = grid.energies[0]
    lo = e_min if e_min is not None else first - 0.8 * grid.gap
    hi = e_max if e_max is not None else first + intervals * grid.gap - 0.25 * grid.gap
    return RootFindConfig(e_min=lo, e_max=hi, **kwargs)


@dataclass(frozen=True)
class ExceptionalCandidate:
    m: int
    energy: float
    residue: float
    classification: str


@dataclass
class AssembledSpectrum:
    """Regular zeros joined with exceptional candidates and oracle deltas."""

    params: ModelParams
    sector: SymmetrySector
    regular: list[Zero]
    exceptional: list[ExceptionalCandidate]
    oracle: SpectrumReport
    oracle_deltas: list[float]
    suspects: list[int]  # indices into `regular` unmatched beyond 1e-5
    interval_counts: dict[int, int]


def assemble_spectrum(
    params: ModelParams,
    sector: SymmetrySector,
    e_max: float,
    config: RootFindConfig | None = None,
    probe_lifted: bool = True,
    suspect_tol: float = 1e-5,
) -> AssembledSpectrum:
    """Spectrum report for one sector: zeros, lifted-pole candidates, oracle check."""
    params.require_pure_point("spectrum assembly")
    backend = default_backend(params, sector)
    poles = getattr(backend, "poles", None)
    grid = pole_energies(params.omega, 64)
    if config is None:
        first = grid.energies[0]
        config = RootFindConfig(e_min=first - 0.8 * grid.gap, e_max=e_max)
    scan = find_zeros(backend, config, poles=poles, index_grid=grid)

    exceptional: list[ExceptionalCandidate] = []
    if probe_lifted and isinstance(backend, ChenBackend):
        m = 0
        while grid.energies[m] < config.e_max and m < len(grid.energies) - 1:
            if grid.energies[m] >= config.e_min:
                probe = residue_probe(m, params, phase=sector.phase)
                if probe.classification is PoleClass.LIFTED:
                    exceptional.append(
                        ExceptionalCandidate(
                            m=m,
                            energy=probe.pole_energy,
                            residue=probe.residue,
                            classification=probe.classification.value,
                        )
                    )
            m += 1

    oracle_report = eigenvalues(params, sector, e_cut=config.e_max)
    oracle_vals = [e for e in oracle_report.energies if e >= config.e_min]
    deltas = []
    suspects = []
    for i, z in enumerate(scan.zeros):
        if oracle_vals:
            d = min(abs(z.energy - e) for e in oracle_vals)
        else:
            d = math.inf
        deltas.append(d)
        if d > suspect_tol:
            suspects.append(i)

    counts: dict[int, int] = {}
    for z in scan.zeros:
        counts[z.interval_index] = counts.get(z.interval_index, 0) + 1
    oracle_report.interval_counts = counts

    return AssembledSpectrum(
        params=params,
        sector=sector,
        regular=scan.zeros,
        exceptional=exceptional,
        oracle=oracle_report,
        oracle_deltas=deltas,
        suspects=suspects,
        interval_counts=counts,
    )


@dataclass(frozen=True)
class CollapseRow:
    omega: float
    spacings: tuple[float, ...]
    mean_spacing: float
    pole_gap: float
    ratio: float
    lowest_level: float
    failed: bool = False
    note: str = ""


def collapse_scan(
    delta: float,
    omega_list: Sequence[float],
    levels: int,
    grid_points_per_interval: int = 64,
) -> list[CollapseRow]:
    """Mean adjacent level spacing vs the analytic pole gap, per omega.

    Tracks the approach to the critical point: the spacing of the first
    `levels` regular zeros converges to 2 sqrt(omega^2 - 4) and the lowest
    level descends toward the critical threshold -1.
    """
    rows: list[CollapseRow] = []
    for omega in omega_list:
        try:
            params = ModelParams(omega=omega, delta=delta)
            params.require_pure_point("the collapse scan")
            grid = pole_energies(omega, levels + 4)
            config = RootFindConfig(
                e_min=grid.energies[0] - 0.8 * grid.gap,
                e_max=grid.energies[0] + (levels + 2.5) * grid.gap,
                grid_points_per_interval=grid_points_per_interval,
            )
            backend = default_backend(params, SymmetrySector(Parity.EVEN, Phase.PLUS))
            poles = getattr(backend, "poles", None)
            scan = find_zeros(backend, config, poles=poles, index_grid=grid)
            zs = [z.energy for z in scan.zeros[:levels]]
            if len(zs) < max(2, levels):
                rows.append(
                    CollapseRow(
                        omega=omega, spacings=(), mean_spacing=math.nan,
                        pole_gap=grid.gap, ratio=math.nan,
                        lowest_level=zs[0] if zs else math.nan,
                        failed=True, note=f"only {len(zs)} zeros found",
                    )
                )
                continue
            spacings = tuple(b - a for a, b in zip(zs, zs[1:]))
            mean = sum(spacings) / len(spacings)
            rows.append(
                CollapseRow(
                    omega=omega,
                    spacings=spacings,
                    mean_spacing=mean,
                    pole_gap=grid.gap,
                    ratio=mean / grid.gap,
                    lowest_level=zs[0],
                )
            )
        except (ValueError, RuntimeError) as exc:
            rows.append(
                CollapseRow(
                    omega=omega, spacings=(), mean_spacing=math.nan,
                    pole_gap=math.nan, ratio=math.nan, lowest_level=math.nan,
                    failed=True, note=str(exc),
                )
            )
    return rows


def juddian_delta_scan(
    params_omega: float,
    m: int,
    delta_grid: Sequence[float],
    phase: Phase = Phase.PLUS,
    bisect_tol: float = 1e-9,
) -> list[float]:
    """Delta values where the residue at pole m changes sign (lifted poles).

    A sign change of the residue as a function of Delta brackets a coupling
    where the pole is lifted; each bracket is bisected to `bisect_tol`.
    """

    def res(delta: float) -> float:
        return residue_estimate(m, ModelParams(omega=params_omega, delta=delta), phase=phase)[-1]

    values = [res(d) for d in delta_grid]
    found = []
    for (d0, r0), (d1, r1) in zip(zip(delta_grid, values), zip(delta_grid[1:], values[1:])):
        if not (math.isfinite(r0) and math.isfinite(r1)) or r0 * r1 >= 0.0:
            continue
        lo, hi, flo = d0, d1, r0
        while hi - lo > bisect_tol:
            mid = 0.5 * (lo + hi)
            fm = res(mid)
            if flo * fm <= 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        found.append(0.5 * (lo + hi))
    return found
