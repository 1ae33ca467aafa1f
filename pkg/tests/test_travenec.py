import numpy as np
import pytest

from rabi2p.model import ModelParams, RegimeError, characteristic_exponents
from rabi2p.travenec import (
    find_dips,
    g_travenec,
    refine_dip,
    travenec_coefficients,
)


class TestRecursion:
    def test_first_coefficients_by_hand(self, fig_params):
        energy = 1.1
        g1 = characteristic_exponents(fig_params.omega)[0].real
        a1, a2 = travenec_coefficients(energy, fig_params, 3)
        assert a1[0] == a2[0] == 1.0
        assert a1[1] == pytest.approx(((energy - g1) - fig_params.delta) / 2.0)
        assert a2[1] == pytest.approx(((-energy - g1) + fig_params.delta) / 2.0)

    def test_delta_zero_decouples(self):
        params = ModelParams(omega=2.5, delta=0.0)
        a1, _ = travenec_coefficients(0.3, params, 12)
        g1 = characteristic_exponents(params.omega)[0].real
        ref = [1.0]
        for n in range(12):
            ref.append(
                (0.3 - g1 - 2 * n * (2 * g1 + params.omega))
                * ref[-1]
                / ((2 * n + 2) * (2 * n + 1))
            )
        assert np.allclose(a1, ref, rtol=1e-13)


class TestEvaluation:
    def test_preconditions(self, fig_params):
        with pytest.raises(ValueError):
            g_travenec(0.3, fig_params, z0=0.0)
        with pytest.raises(RegimeError):
            g_travenec(0.3, ModelParams(omega=1.9, delta=0.7))

    def test_huge_off_spectrum(self, fig_params, oracle_even_plus):
        xs = np.linspace(oracle_even_plus[0] - 1.0, oracle_even_plus[2], 151)
        mags = [abs(g_travenec(float(x), fig_params).value) for x in xs]
        assert max(mags) > 1e8
        assert any(g_travenec(float(x), fig_params).huge for x in xs)

    def test_relative_dip_at_ground_state(self, fig_params, oracle_even_plus):
        e0 = float(oracle_even_plus[0])
        neighborhood = np.linspace(e0 - 0.75, e0 + 0.75, 41)
        mx = max(abs(g_travenec(float(x), fig_params).value) for x in neighborhood)
        assert abs(g_travenec(e0, fig_params).value) / mx < 1e-6

    def test_term_count_insensitive(self, fig_params, oracle_even_plus):
        e0 = float(oracle_even_plus[0])
        v200 = abs(g_travenec(e0, fig_params, n_terms=200).value)
        v400 = abs(g_travenec(e0, fig_params, n_terms=400).value)
        assert v200 == pytest.approx(v400, rel=1e-9)


class TestDips:
    def test_blind_dips_match_oracle(self, fig_params, oracle_even_plus):
        dips = find_dips(
            fig_params,
            z0=5 + 5j,
            e_min=float(oracle_even_plus[0]) - 1.0,
            e_max=float(oracle_even_plus[3]) + 1.0,
            n_grid=300,
        )
        assert len(dips) >= 4
        pos = np.array([d.energy for d in dips[:4]])
        assert np.max(np.abs(pos - oracle_even_plus[:4])) < 1e-4

    def test_positions_independent_of_z0(self, fig_params, oracle_even_plus):
        seeds = [float(e) for e in oracle_even_plus[:2]]
        located = {
            z0: [refine_dip(fig_params, s, z0=z0).energy for s in seeds]
            for z0 in (5 + 5j, 6 + 4j, 4 + 6j)
        }
        arr = np.array(list(located.values()))
        assert np.max(arr.max(axis=0) - arr.min(axis=0)) < 1e-4

    def test_weak_amplification_has_no_needles(self, fig_params, oracle_even_plus):
        # |z0^2| = 13 amplifies the identically-zero function by too little:
        # the region sits at the rounding floor and the eigenvalue needle
        # that every strong z0 shows at level 1 simply does not exist
        lo = float(oracle_even_plus[0]) - 1.0
        hi = float(oracle_even_plus[1]) + 0.5
        xs = np.linspace(lo, hi, 120)
        mags = [abs(g_travenec(float(x), fig_params, z0=3 + 2j).value) for x in xs]
        assert max(mags) < 1e-6
        e1 = float(oracle_even_plus[1])
        dips = find_dips(fig_params, z0=3 + 2j, e_min=e1 - 1.0, e_max=e1 + 0.5, n_grid=120)
        assert all(abs(d.energy - e1) > 1e-4 for d in dips)
