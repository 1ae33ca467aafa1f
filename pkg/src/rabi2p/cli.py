"""Command-line surface: scans, spectra, collapse studies, validation, oracle.

Output contract (details in docs/formats.md): CSV with a header row and
fixed column order, floats at 17 significant digits; JSON with a
schema_version field and flags as named booleans.  Identical configurations
reproduce byte-identical files.  Report commands also render a PNG next to
the delimited output unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__, acceptance, plots
from .chen import ChenBackend
from .model import (
    GEvaluation,
    ModelParams,
    Parity,
    RegimeError,
    SymmetrySector,
    pole_energies,
)
from .oracle import eigenvalues as oracle_eigenvalues
from .solver import (
    RootFindConfig,
    assemble_spectrum,
    collapse_scan,
    scan_config_for,
)
from .travenec import TravenecBackend
from .zhang import ZhangBackend

THREADS_ENV = "RABI2P_THREADS"
G_BACKENDS = ("chen", "zhang", "travenec")


class ConfigError(ValueError):
    """Invalid run configuration; message is meant for the terminal."""


@dataclass
class RunConfig:
    command: str
    omega: float = 2.5
    delta: float = 0.7
    sector: SymmetrySector = SymmetrySector.from_label("even+")
    backend: str = "chen"
    e_min: float | None = None
    e_max: float | None = None
    grid: int = 800
    tol: float = 1e-12
    brent_tol: float = 1e-11
    z0: complex = 5 + 5j
    n_levels: int = 8
    omegas: tuple[float, ...] = (2.5, 2.2, 2.1, 2.05)
    e_cut: float | None = None
    only: tuple[int, ...] | None = None
    output: Path | None = None
    fmt: str = "csv"
    plot: bool = True


def _fmt17(x: float) -> str:
    if isinstance(x, complex):
        raise TypeError("complex values are written as two columns")
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("1" if cell else "0")
            elif isinstance(cell, int):
                cells.append(str(cell))
            elif isinstance(cell, float):
                cells.append(_fmt17(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8"
    )


def validate_config(cfg: RunConfig) -> None:
    params = ModelParams(omega=cfg.omega, delta=cfg.delta)  # raises on nonsense
    if cfg.command in ("scan", "spectrum", "collapse", "oracle") and cfg.omega <= 2.0:
        raise ConfigError(
            f"omega = {cfg.omega} is outside the pure-point regime: every "
            "spectral backend requires omega > 2"
        )
    if cfg.command == "scan":
        if cfg.backend not in G_BACKENDS:
            raise ConfigError(
                f"backend {cfg.backend!r} is not scannable; choose one of {G_BACKENDS}"
            )
        if cfg.backend == "chen":
            if params.delta == 0.0:
                raise ConfigError(
                    "the chen backend degenerates at delta = 0 (every pole is "
                    "lifted); use the oracle or the zhang backend"
                )
            if cfg.sector.parity is not Parity.EVEN:
                raise ConfigError(
                    "the chen backend covers even-parity sectors only; use the "
                    "zhang backend for odd parity"
                )
    if cfg.command == "spectrum" and cfg.backend == "travenec":
        raise ConfigError(
            "the travenec backend is a numerical-instability exhibit, not a "
            "production backend; use chen or zhang for spectra"
        )
    if cfg.command == "collapse" and any(om <= 2.0 for om in cfg.omegas):
        raise ConfigError("collapse scans require every omega > 2")
    if cfg.grid < 16:
        raise ConfigError(f"grid = {cfg.grid} is too coarse; need at least 16")


def _make_backend(cfg: RunConfig, params: ModelParams):
    if cfg.backend == "chen":
        return ChenBackend(params, phase=cfg.sector.phase, tol=cfg.tol)
    if cfg.backend == "zhang":
        return ZhangBackend(params, cfg.sector, tol=cfg.tol)
    if cfg.backend == "travenec":
        return TravenecBackend(params, z0=cfg.z0)
    raise ConfigError(f"unknown backend {cfg.backend!r}")


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, min(n, os.cpu_count() or 1))


def _eval_point(backend, energy: float) -> GEvaluation:
    try:
        return backend(energy)
    except (ValueError, RuntimeError):
        return GEvaluation(energy=energy, value=math.nan, near_pole=True)


def _scan_chunk(args) -> list[GEvaluation]:
    backend, energies = args
    return [_eval_point(backend, e) for e in energies]


def run_scan(cfg: RunConfig) -> int:
    params = ModelParams(omega=cfg.omega, delta=cfg.delta)
    backend = _make_backend(cfg, params)
    grid = pole_energies(params.omega, 8)
    e_min = cfg.e_min if cfg.e_min is not None else grid.energies[0] - 0.8 * grid.gap
    e_max = cfg.e_max if cfg.e_max is not None else grid.energies[0] + 5.75 * grid.gap
    if not e_min < e_max:
        raise ConfigError(f"need e_min < e_max, got [{e_min}, {e_max}]")
    step = (e_max - e_min) / cfg.grid
    energies = [e_min + i * step for i in range(cfg.grid + 1)]

    workers = _worker_count()
    if workers > 1:
        chunks = [
            (backend, energies[i::workers]) for i in range(workers)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_chunk, chunks))
        evals: list[GEvaluation] = [None] * len(energies)  # type: ignore[list-item]
        for w, part in enumerate(parts):
            evals[w::workers] = part
    else:
        evals = [_eval_point(backend, e) for e in energies]

    out = cfg.output or Path(f"scan_{cfg.backend}.{cfg.fmt}")
    complex_valued = cfg.backend == "travenec"
    if cfg.fmt == "csv":
        if complex_valued:
            header = ["E", "value", "value_imag", "flags"]
            rows = [
                [g.energy, complex(g.value).real, complex(g.value).imag, g.flags]
                for g in evals
            ]
        else:
            header = ["E", "value", "flags"]
            rows = [[g.energy, g.real, g.flags] for g in evals]
        write_csv(out, header, rows)
    else:
        payload = {
            "schema_version": "1",
            "command": "scan",
            "backend": cfg.backend,
            "omega": cfg.omega,
            "delta": cfg.delta,
            "sector": cfg.sector.label,
            "rows": [
                {
                    "E": g.energy,
                    "value": g.real,
                    **(
                        {"value_imag": complex(g.value).imag}
                        if complex_valued
                        else {}
                    ),
                    "near_pole": g.near_pole,
                    "huge": g.huge,
                    "not_converged": g.not_converged,
                }
                for g in evals
            ],
        }
        write_json(out, payload)
    print(f"wrote {out}")
    if cfg.plot:
        png = out.with_suffix(".png")
        plots.render_scan(
            png,
            [g.energy for g in evals],
            [g.value for g in evals],
            cfg.backend,
            params,
            poles=grid.energies if cfg.backend == "chen" else None,
        )
        print(f"wrote {png}")
    return 0


def run_spectrum(cfg: RunConfig) -> int:
    params = ModelParams(omega=cfg.omega, delta=cfg.delta)
    grid = pole_energies(params.omega, max(cfg.n_levels + 2, 8))
    e_max = cfg.e_max if cfg.e_max is not None else grid.energies[0] + (
        cfg.n_levels + 1.5
    ) * grid.gap
    spec = assemble_spectrum(params, cfg.sector, e_max=e_max)
    out = cfg.output or Path(f"spectrum_{cfg.sector.label.replace('+', 'p').replace('-', 'm')}.{cfg.fmt}")
    if cfg.fmt == "csv":
        header = ["level", "E", "interval_index", "kind", "oracle_delta", "suspect"]
        rows: list[list] = []
        for i, z in enumerate(spec.regular):
            rows.append(
                [i, z.energy, z.interval_index, "regular", spec.oracle_deltas[i], i in spec.suspects]
            )
        for exc in spec.exceptional:
            rows.append([-1, exc.energy, exc.m, "exceptional", 0.0, False])
        write_csv(out, header, rows)
    else:
        payload = {
            "schema_version": "1",
            "command": "spectrum",
            "omega": cfg.omega,
            "delta": cfg.delta,
            "sector": cfg.sector.label,
            "regular": [
                {
                    "E": z.energy,
                    "interval_index": z.interval_index,
                    "oracle_delta": spec.oracle_deltas[i],
                    "suspect": i in spec.suspects,
                }
                for i, z in enumerate(spec.regular)
            ],
            "exceptional": [
                {"m": e.m, "E": e.energy, "residue": e.residue}
                for e in spec.exceptional
            ],
            "interval_counts": {str(k): v for k, v in sorted(spec.interval_counts.items())},
            "oracle": {
                "energies": list(spec.oracle.energies),
                "n_max": spec.oracle.n_max_used,
                "converged": spec.oracle.converged,
                "truncation_warning": spec.oracle.truncation_warning,
            },
        }
        write_json(out, payload)
    print(f"wrote {out}")
    if cfg.plot:
        png = out.with_suffix(".png")
        plots.render_spectrum(
            png,
            [z.energy for z in spec.regular],
            [e.energy for e in spec.exceptional],
            list(spec.oracle.energies),
            params,
            poles=grid.energies,
        )
        print(f"wrote {png}")
    if spec.suspects:
        print(f"warning: {len(spec.suspects)} zero(s) unmatched by the oracle")
    return 0


def run_collapse(cfg: RunConfig) -> int:
    rows = collapse_scan(cfg.delta, cfg.omegas, levels=cfg.n_levels)
    out = cfg.output or Path(f"collapse.{cfg.fmt}")
    if cfg.fmt == "csv":
        header = ["omega", "mean_spacing", "pole_gap", "ratio", "lowest_level", "failed"]
        write_csv(
            out,
            header,
            [[r.omega, r.mean_spacing, r.pole_gap, r.ratio, r.lowest_level, r.failed] for r in rows],
        )
    else:
        payload = {
            "schema_version": "1",
            "command": "collapse",
            "delta": cfg.delta,
            "rows": [
                {
                    "omega": r.omega,
                    "spacings": list(r.spacings),
                    "mean_spacing": r.mean_spacing,
                    "pole_gap": r.pole_gap,
                    "ratio": r.ratio,
                    "lowest_level": r.lowest_level,
                    "failed": r.failed,
                    "note": r.note,
                }
                for r in rows
            ],
        }
        write_json(out, payload)
    print(f"wrote {out}")
    if cfg.plot:
        png = out.with_suffix(".png")
        plots.render_collapse(png, rows)
        print(f"wrote {png}")
    return 0 if not any(r.failed for r in rows) else 1


def run_oracle(cfg: RunConfig) -> int:
    params = ModelParams(omega=cfg.omega, delta=cfg.delta)
    grid = pole_energies(params.omega, max(cfg.n_levels + 2, 8))
    e_cut = cfg.e_cut if cfg.e_cut is not None else grid.energies[0] + (
        cfg.n_levels + 1.5
    ) * grid.gap
    reports = [
        oracle_eigenvalues(params, sec, e_cut=e_cut)
        for sec in (
            SymmetrySector.from_label("even+"),
            SymmetrySector.from_label("even-"),
            SymmetrySector.from_label("odd+"),
            SymmetrySector.from_label("odd-"),
        )
    ]
    out = cfg.output or Path(f"oracle.{cfg.fmt}")
    if cfg.fmt == "csv":
        header = ["sector", "level", "E", "n_max", "converged", "truncation_warning"]
        rows: list[list] = []
        for rep in reports:
            for i, e in enumerate(rep.energies):
                rows.append(
                    [rep.sector.label, i, e, rep.n_max_used, rep.converged, rep.truncation_warning]
                )
        write_csv(out, header, rows)
    else:
        payload = {
            "schema_version": "1",
            "command": "oracle",
            "omega": cfg.omega,
            "delta": cfg.delta,
            "e_cut": e_cut,
            "sectors": [
                {
                    "sector": rep.sector.label,
                    "energies": list(rep.energies),
                    "n_max": rep.n_max_used,
                    "converged": rep.converged,
                    "truncation_warning": rep.truncation_warning,
                }
                for rep in reports
            ],
        }
        write_json(out, payload)
    print(f"wrote {out}")
    if cfg.plot:
        png = out.with_suffix(".png")
        plots.render_oracle(png, reports, params)
        print(f"wrote {png}")
    if any(rep.truncation_warning for rep in reports):
        print(
            "warning: omega is close to the critical value 2; truncated "
            "diagonalization fakes a one-point collapse there"
        )
    return 0


def run_validate(cfg: RunConfig) -> int:
    if (cfg.omega, cfg.delta) != (2.5, 0.7):
        print(
            "note: the acceptance criteria pin omega = 2.5, delta = 0.7; "
            f"requested ({cfg.omega}, {cfg.delta}) is ignored by the suite"
        )
    results, payload = acceptance.run_suite(only=cfg.only, echo=print)
    out = cfg.output or Path("validate_report.json")
    out.write_bytes(payload)
    print(f"wrote {out}")
    ok = all(r.passed for r in results)
    findings = [f for r in results for f in r.findings]
    for f in findings:
        print(f"finding: {f}")
    return 0 if ok else 1


def run(cfg: RunConfig) -> int:
    validate_config(cfg)
    return {
        "scan": run_scan,
        "spectrum": run_spectrum,
        "collapse": run_collapse,
        "oracle": run_oracle,
        "validate": run_validate,
    }[cfg.command](cfg)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rabi2p",
        description=(
            "Spectral-determinant toolkit for the two-photon quantum Rabi "
            "model in the pure-point regime (omega > 2, couplings in units "
            "of the two-photon coupling strength)"
        ),
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, backend=True):
        sp.add_argument("--omega", type=float, default=2.5, help="boson frequency (> 2)")
        sp.add_argument("--delta", type=float, default=0.7, help="qubit splitting")
        sp.add_argument(
            "--sector",
            type=str,
            default="even+",
            help="symmetry sector: even+, even-, odd+, odd- (aliases pp/pm/mp/mm)",
        )
        if backend:
            sp.add_argument(
                "--backend",
                choices=("chen", "zhang", "travenec", "oracle"),
                default="chen",
            )
        sp.add_argument("--output", type=Path, default=None, help="output file path")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        sp.add_argument("--no-plot", dest="plot", action="store_false",
                        help="skip the PNG rendered next to the output file")

    sp = sub.add_parser("scan", help="tabulate G(E) over an energy range")
    common(sp)
    sp.add_argument("--e-min", type=float, default=None)
    sp.add_argument("--e-max", type=float, default=None)
    sp.add_argument("--grid", type=int, default=800, help="number of grid steps")
    sp.add_argument("--z0", type=complex, default=5 + 5j,
                    help="evaluation point for the travenec backend")

    sp = sub.add_parser("spectrum", help="assemble a sector spectrum with oracle cross-check")
    common(sp)
    sp.add_argument("--levels", dest="n_levels", type=int, default=8)
    sp.add_argument("--e-max", type=float, default=None)

    sp = sub.add_parser("collapse", help="level-spacing scan toward the critical point")
    common(sp, backend=False)
    sp.add_argument("--omegas", type=str, default="2.5,2.2,2.1,2.05",
                    help="comma-separated omega list (all > 2)")
    sp.add_argument("--levels", dest="n_levels", type=int, default=12)

    sp = sub.add_parser("validate", help="run the acceptance suite")
    common(sp, backend=False)
    sp.add_argument("--only", type=str, default=None,
                    help="comma-separated criterion ids to run (default: all)")

    sp = sub.add_parser("oracle", help="diagonalization spectra for all four sectors")
    common(sp, backend=False)
    sp.add_argument("--levels", dest="n_levels", type=int, default=8)
    sp.add_argument("--e-cut", type=float, default=None)
    return p


def parse_args(argv: list[str] | None = None) -> RunConfig:
    ns = _build_parser().parse_args(argv)
    kwargs: dict = {"command": ns.command}
    for name in (
        "omega", "delta", "backend", "e_min", "e_max", "grid", "z0",
        "n_levels", "e_cut", "output", "fmt", "plot",
    ):
        if hasattr(ns, name):
            kwargs[name] = getattr(ns, name)
    if hasattr(ns, "sector"):
        kwargs["sector"] = SymmetrySector.from_label(ns.sector)
    if getattr(ns, "omegas", None):
        kwargs["omegas"] = tuple(float(x) for x in ns.omegas.split(","))
    if getattr(ns, "only", None):
        kwargs["only"] = tuple(int(x) for x in ns.only.split(","))
    return RunConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
        return run(cfg)
    except (ConfigError, RegimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
