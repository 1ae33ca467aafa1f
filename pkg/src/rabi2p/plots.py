"""Figure rendering for the report paths.

Every report command writes its delimited output and, unless asked not to,
a PNG next to it.  Rendering is headless (Agg) and deliberately plain:
these are working plots for eyeballing scans, spectra, and collapse trends,
not publication figures.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (7.0, 4.33)


def _clip_for_plot(values, lo_q=2.0, hi_q=98.0):
    v = np.array(values, dtype=float)
    finite = v[np.isfinite(v)]
    if finite.size == 0:
        return v, (-1.0, 1.0)
    lo, hi = np.percentile(finite, [lo_q, hi_q])
    pad = 0.1 * (hi - lo) if hi > lo else 1.0
    return v, (lo - pad, hi + pad)


def render_scan(path, energies, values, backend, params, poles=None):
    """G(E) curve; complex-valued backends get |Re|, |Im| on a log scale."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    e = np.asarray(energies, dtype=float)
    if backend == "travenec":
        v = np.asarray(values, dtype=complex)
        ax.semilogy(e, np.abs(v.real), lw=0.8, label="|Re G|")
        ax.semilogy(e, np.abs(v.imag), lw=0.8, label="|Im G|")
        ax.legend(frameon=False)
    else:
        v, ylim = _clip_for_plot([x.real if isinstance(x, complex) else x for x in values])
        ax.plot(e, v.astype(float), lw=0.9)
        ax.set_ylim(*ylim)
        ax.axhline(0.0, color="0.6", lw=0.6)
    if poles is not None:
        for p in poles:
            if e[0] <= p <= e[-1]:
                ax.axvline(p, color="0.75", lw=0.6, ls="--")
    ax.set_xlabel("E")
    ax.set_ylabel("G(E)")
    ax.set_title(
        f"{backend} scan, omega={params.omega:g}, delta={params.delta:g}"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_spectrum(path, regular, exceptional, oracle_energies, params, poles=None):
    """Level diagram: solver zeros vs oracle, poles as guides."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    if poles is not None:
        for p in poles:
            ax.axhline(p, color="0.85", lw=0.6, ls="--")
    xs = np.arange(len(regular))
    ax.plot(xs, regular, "o", ms=5, label="solver zeros")
    if oracle_energies:
        ax.plot(
            np.arange(len(oracle_energies)),
            oracle_energies,
            "x",
            ms=7,
            label="oracle",
        )
    for e in exceptional:
        ax.axhline(e, color="tab:red", lw=1.0, ls=":")
    ax.set_xlabel("level index")
    ax.set_ylabel("E")
    ax.set_title(f"spectrum, omega={params.omega:g}, delta={params.delta:g}")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_collapse(path, rows):
    """Spacing-to-gap ratios per level and the threshold approach."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    for r in rows:
        if r.failed or not r.spacings:
            continue
        ratios = [s / r.pole_gap for s in r.spacings]
        ax1.plot(range(1, len(ratios) + 1), ratios, "o-", ms=3, lw=0.8,
                 label=f"omega={r.omega:g}")
    ax1.axhline(1.0, color="0.5", lw=0.8)
    ax1.set_xlabel("spacing index")
    ax1.set_ylabel("spacing / pole gap")
    ax1.legend(frameon=False, fontsize=8)

    oms = [r.omega for r in rows if not r.failed]
    lows = [r.lowest_level for r in rows if not r.failed]
    ax2.plot(oms, lows, "s-", ms=4)
    ax2.axhline(-1.0, color="tab:red", lw=0.8, ls="--")
    ax2.set_xlabel("omega")
    ax2.set_ylabel("lowest level")
    ax2.invert_xaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_oracle(path, reports, params):
    """Sector spectra side by side."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i, rep in enumerate(reports):
        for e in rep.energies:
            ax.hlines(e, i - 0.3, i + 0.3, lw=1.2)
    ax.set_xticks(range(len(reports)))
    ax.set_xticklabels([rep.sector.label for rep in reports])
    ax.set_ylabel("E")
    ax.set_title(f"oracle spectra, omega={params.omega:g}, delta={params.delta:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
