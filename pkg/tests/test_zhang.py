import numpy as np
import pytest

from rabi2p.model import (
    EVEN_PLUS,
    ODD_MINUS,
    ODD_PLUS,
    ModelParams,
    RegimeError,
    pole_energies,
)
from rabi2p.solver import find_zeros, scan_config_for
from rabi2p.zhang import (
    SectorRecurrence,
    ZhangBackend,
    cf_tail,
    cf_value,
    forward_coefficients,
    g_zhang,
    minimal_coefficients,
)


class TestSectorRecurrence:
    def test_even_plus_reproduces_reference_recurrence(self, fig_params):
        rec = SectorRecurrence.from_params(fig_params, EVEN_PLUS)
        om, d, energy = fig_params.omega, fig_params.delta, 1.3
        for n in range(6):
            assert rec.a_coeff(n) == (2 * n + 2) * (2 * n + 1)
            assert rec.b_coeff(n, energy) == pytest.approx(
                2 * n * om - energy + (-1) ** n * d
            )

    def test_initial_ratio_even_plus(self, fig_params):
        rec = SectorRecurrence.from_params(fig_params, EVEN_PLUS)
        assert rec.initial_ratio(1.3) == pytest.approx((1.3 - fig_params.delta) / 2.0)

    def test_odd_sector_coefficients(self, fig_params):
        rec = SectorRecurrence.from_params(fig_params, ODD_PLUS)
        om, d = fig_params.omega, fig_params.delta
        assert rec.a_coeff(0) == 3 * 2
        assert rec.b_coeff(0, 0.4) == pytest.approx(om - 0.4 + d)
        rec_m = SectorRecurrence.from_params(fig_params, ODD_MINUS)
        assert rec_m.b_coeff(1, 0.4) == pytest.approx(3 * om - 0.4 + d)


class TestContinuedFraction:
    def test_depth_doubling_self_consistency(self, fig_params):
        v256, _ = cf_tail(1.2, fig_params, EVEN_PLUS, 256)
        v512, _ = cf_tail(1.2, fig_params, EVEN_PLUS, 512)
        assert v256 == pytest.approx(v512, abs=1e-12)

    def test_tail_seed_insensitivity(self, fig_params):
        v_seeded, _ = cf_tail(1.2, fig_params, EVEN_PLUS, 512)
        v_zero, _ = cf_tail(1.2, fig_params, EVEN_PLUS, 512, tail=0.0)
        assert v_seeded == pytest.approx(v_zero, abs=1e-12)

    def test_rejects_outside_regime(self):
        params = ModelParams(omega=1.8, delta=0.7)
        with pytest.raises(RegimeError):
            cf_tail(1.2, params, EVEN_PLUS, 64)
        with pytest.raises(RegimeError):
            g_zhang(1.2, params, EVEN_PLUS)

    def test_cf_value_reports_depth(self, fig_params):
        v, near, depth = cf_value(1.2, fig_params, EVEN_PLUS)
        assert not near
        assert depth >= 128
        assert np.isfinite(v)


class TestGZhang:
    def test_small_at_oracle_eigenvalues(self, fig_params, oracle_even_plus):
        for e in oracle_even_plus[:4]:
            assert abs(g_zhang(float(e), fig_params, EVEN_PLUS).value) < 1e-8

    def test_delta0_zeros_on_pole_grid(self):
        params = ModelParams(omega=2.5, delta=0.0)
        grid = pole_energies(params.omega, 4)
        cfg = scan_config_for(params, intervals=5)
        scan = find_zeros(ZhangBackend(params, EVEN_PLUS), cfg, index_grid=grid)
        zeros = np.array([z.energy for z in scan.zeros[:5]])
        assert np.max(np.abs(zeros - np.array(grid.energies[:5]))) < 1e-8

    def test_sign_changes_split_into_zeros_and_poles(self, fig_params):
        from scipy.optimize import brentq

        from rabi2p.solver import _polish

        backend = ZhangBackend(fig_params, EVEN_PLUS)
        xs = np.linspace(-0.4, 5.2, 141)
        vals = np.array([backend(float(x)).value for x in xs])
        zeros, poles = [], 0
        for i in np.where(vals[:-1] * vals[1:] < 0.0)[0]:
            z = brentq(
                lambda e: backend(float(e)).value, xs[i], xs[i + 1], xtol=1e-11
            )
            z, val = _polish(backend, float(z), float(xs[i]), float(xs[i + 1]))
            scale = max(abs(vals[i]), abs(vals[i + 1]), 1.0)
            if abs(val) < 1e-8 * scale:
                zeros.append(z)
            else:
                poles += 1  # Brent stalled on a jump: a simple pole, sign flips too
        assert len(zeros) == 2  # the two eigenvalues inside the window
        assert poles >= 1  # at least one pole sits between them


class TestMinimalSolution:
    def test_tail_ratio_approaches_minimal_root(self, fig_params):
        a = minimal_coefficients(1.2, fig_params, EVEN_PLUS, 60)
        ratios = a[1:] * np.arange(1, 61) / a[:-1]
        assert np.mean(ratios[-10:]) == pytest.approx(-0.25, rel=1.5e-2)

    def test_initial_ratio_matches_at_zero(self, fig_params, oracle_even_plus):
        e_star = float(oracle_even_plus[0])
        a = minimal_coefficients(e_star, fig_params, EVEN_PLUS, 8)
        expected = (e_star - fig_params.delta) / 2.0
        assert a[1] / a[0] == pytest.approx(expected, rel=1e-9)

    def test_forward_matches_backward_at_zero(self, fig_params, oracle_even_plus):
        # polish the eigenvalue on the spectral function itself: the forward
        # recursion's dominant contamination is seeded by rounding and grows
        # ~4x per index, so the comparison needs the best available zero
        e_star = float(oracle_even_plus[0])
        x0, x1 = e_star - 1e-9, e_star
        f0 = g_zhang(x0, fig_params, EVEN_PLUS).value
        f1 = g_zhang(x1, fig_params, EVEN_PLUS).value
        for _ in range(6):
            if f1 == f0 or f1 == 0.0:
                break
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            x0, f0, x1 = x1, f1, x2
            f1 = g_zhang(x2, fig_params, EVEN_PLUS).value
        back = minimal_coefficients(x1, fig_params, EVEN_PLUS, 20)
        fwd = forward_coefficients(x1, fig_params, EVEN_PLUS, 20)
        rel = np.abs(fwd - back) / np.maximum(np.abs(back), 1e-300)
        assert np.max(rel[:18]) < 1e-6
        assert np.max(rel) < 1e-5  # double-precision floor at n = 20 is ~2e-6

    def test_forward_diverges_off_spectrum(self, fig_params):
        energy = 1.2  # mid-gap, far from any eigenvalue
        back = minimal_coefficients(energy, fig_params, EVEN_PLUS, 40)
        fwd = forward_coefficients(energy, fig_params, EVEN_PLUS, 40)
        assert abs(fwd[40]) > 1e4 * abs(back[40])


class TestSectorUnion:
    def test_union_of_sector_zeros_is_full_spectrum(self, fig_params):
        from rabi2p.model import ALL_SECTORS
        from rabi2p.oracle import full_spectrum

        e_cut = 10.0
        grid = pole_energies(fig_params.omega, 8)
        zeros = []
        for sector in ALL_SECTORS:
            cfg = scan_config_for(fig_params, e_max=e_cut, intervals=8)
            scan = find_zeros(
                ZhangBackend(fig_params, sector), cfg, index_grid=grid
            )
            zeros.extend(z.energy for z in scan.zeros)
        zeros = np.sort(zeros)
        full = full_spectrum(fig_params, 512)
        full = full[full < e_cut]
        assert len(zeros) == len(full)
        assert np.max(np.abs(zeros - full)) < 1e-6
