import math

import numpy as np
import pytest

from rabi2p.chen import ChenBackend
from rabi2p.model import (
    EVEN_MINUS,
    EVEN_PLUS,
    ModelParams,
    Phase,
    pole_energies,
)
from rabi2p.solver import (
    RootFindConfig,
    assemble_spectrum,
    collapse_scan,
    find_zeros,
    juddian_delta_scan,
    scan_config_for,
)
from rabi2p.zhang import ZhangBackend

pytestmark = pytest.mark.slow


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            RootFindConfig(e_min=1.0, e_max=0.0)
        with pytest.raises(ValueError):
            RootFindConfig(e_min=0.0, e_max=1.0, grid_points_per_interval=4)
        with pytest.raises(ValueError):
            RootFindConfig(e_min=0.0, e_max=1.0, brent_tol=-1.0)

    def test_default_range_covers_requested_intervals(self, fig_params):
        cfg = scan_config_for(fig_params, intervals=6)
        grid = pole_energies(fig_params.omega, 6)
        assert cfg.e_min < grid.energies[0]
        assert cfg.e_max > grid.energies[5]


class TestFindZeros:
    def test_chen_zeros_certified(self, fig_params, oracle_even_plus):
        backend = ChenBackend(fig_params)
        cfg = scan_config_for(fig_params, intervals=9)
        scan = find_zeros(backend, cfg, poles=backend.poles)
        assert len(scan.zeros) >= 8
        h = 10.0 * cfg.brent_tol
        for z in scan.zeros:
            lo = backend(z.energy - h).real
            hi = backend(z.energy + h).real
            assert lo * hi < 0.0
            assert abs(z.value) < 1e-9 * max(abs(lo), abs(hi), 1.0)

    def test_zero_counts_within_conjecture(self, fig_params):
        backend = ChenBackend(fig_params)
        cfg = scan_config_for(fig_params, intervals=9)
        grid = pole_energies(fig_params.omega, 10)
        scan = find_zeros(backend, cfg, poles=backend.poles, index_grid=grid)
        counts = {}
        for z in scan.zeros:
            counts[z.interval_index] = counts.get(z.interval_index, 0) + 1
        assert set(counts.values()) <= {1, 2}

    def test_zeros_outside_pole_windows(self, fig_params):
        backend = ChenBackend(fig_params)
        cfg = scan_config_for(fig_params, intervals=9)
        scan = find_zeros(backend, cfg, poles=backend.poles)
        pad = cfg.pole_exclusion * backend.poles.gap
        for z in scan.zeros:
            assert backend.poles.nearest_distance(z.energy) > pad

    def test_deterministic_bit_identical(self, fig_params):
        backend = ChenBackend(fig_params)
        cfg = scan_config_for(fig_params, intervals=6)
        first = [z.energy for z in find_zeros(backend, cfg, poles=backend.poles).zeros]
        second = [z.energy for z in find_zeros(backend, cfg, poles=backend.poles).zeros]
        assert first == second  # exact float equality

    def test_chen_matches_zhang_to_1e8(self, fig_params):
        cfg = scan_config_for(fig_params, intervals=9)
        chb = ChenBackend(fig_params)
        cz = [z.energy for z in find_zeros(chb, cfg, poles=chb.poles).zeros[:8]]
        zz = [
            z.energy
            for z in find_zeros(
                ZhangBackend(fig_params, EVEN_PLUS), cfg, index_grid=chb.poles
            ).zeros[:8]
        ]
        assert len(cz) == len(zz) == 8
        assert max(abs(a - b) for a, b in zip(cz, zz)) < 1e-8

    def test_ground_state_below_first_pole(self, fig_params):
        # the even- ground state sits below the first pole: the synthetic
        # leading interval must pick it up with index 0
        backend = ChenBackend(fig_params, phase=Phase.MINUS)
        cfg = scan_config_for(fig_params, intervals=4)
        grid = pole_energies(fig_params.omega, 4)
        scan = find_zeros(backend, cfg, poles=backend.poles, index_grid=grid)
        assert scan.zeros[0].interval_index == 0
        assert scan.zeros[0].energy == pytest.approx(-1.077347, abs=1e-5)


class TestAssembleSpectrum:
    def test_generic_point_all_matched(self, fig_params, oracle_even_plus):
        spec = assemble_spectrum(fig_params, EVEN_PLUS, e_max=15.0)
        assert spec.suspects == []
        assert spec.exceptional == []
        assert max(spec.oracle_deltas) < 1e-8
        assert set(spec.interval_counts.values()) <= {0, 1, 2}

    def test_lifted_pole_reported_at_tuned_coupling(self):
        # the m = 1 residue changes sign at delta very close to 1 for omega = 2.5
        params = ModelParams(omega=2.5, delta=1.0)
        spec = assemble_spectrum(params, EVEN_PLUS, e_max=7.0)
        assert any(
            e.m == 1 and abs(e.energy - 2.5) < 1e-9 for e in spec.exceptional
        )

    def test_small_delta_zeros_migrate_to_pole_grid(self):
        grid = pole_energies(2.5, 5)
        prev_dist = None
        for delta in (0.2, 0.05):
            params = ModelParams(omega=2.5, delta=delta)
            spec = assemble_spectrum(params, EVEN_PLUS, e_max=9.0)
            dist = max(
                grid.nearest_distance(z.energy) for z in spec.regular[1:4]
            )
            if prev_dist is not None:
                assert dist < prev_dist
            prev_dist = dist
        assert prev_dist < 0.05 * grid.gap


class TestCollapseScan:
    def test_reference_gap_and_ratio(self):
        rows = collapse_scan(0.7, [2.5], levels=8)
        assert rows[0].pole_gap == pytest.approx(3.0)
        assert not rows[0].failed
        assert rows[0].ratio == pytest.approx(1.0, abs=0.1)

    def test_per_omega_failures_flagged_not_fatal(self):
        rows = collapse_scan(0.7, [2.5, 1.5], levels=6)
        assert not rows[0].failed
        assert rows[1].failed
        assert rows[1].note


class TestJuddianScan:
    def test_first_crossing_near_unit_coupling(self):
        deltas = juddian_delta_scan(2.5, 1, [0.8, 0.9, 1.0, 1.1, 1.2])
        assert len(deltas) == 1
        assert abs(deltas[0] - 1.0) < 1e-6
