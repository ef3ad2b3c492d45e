import numpy as np
import pytest

from errors import InsufficientSamples, UsageError
from lattice import LatticeSpec
from models import ModelKind, ModelSpec
from scaling import (EntropyCurve, FitForm, crossover_report, default_window_cap, fit, linear_trend,
                     sweep)

L_SYNTH = np.arange(1, 41)


def synthetic(S, lattice=None, alpha=0.0):
    lattice = lattice or LatticeSpec.chain(160)
    return EntropyCurve(ModelSpec(ModelKind.COMPACT_COS, alpha=alpha), lattice, L_SYNTH, S)


class TestFitForms:
    def test_parse(self):
        assert FitForm.parse("Log1d") is FitForm.LOG1D
        with pytest.raises(UsageError):
            FitForm.parse("power")

    def test_exact_linear(self):
        result = fit(synthetic(0.7 * L_SYNTH), "linear", (1, 40))
        assert result.d == pytest.approx(0.7, abs=1e-12)
        assert result.residual < 1e-9

    def test_exact_log(self):
        result = fit(synthetic(0.4 + 0.5 * np.log(L_SYNTH)), FitForm.LOG1D, (2, 40))
        assert result.c_eff == pytest.approx(1.5, abs=1e-10)
        assert result.params["c0"] == pytest.approx(0.4, abs=1e-10)
        assert result.residual < 1e-9
        assert result.n_samples == 39

    def test_exact_area_log(self):
        lattice = LatticeSpec.square(81)
        S = L_SYNTH * (0.3 + 2.0 / 3.0 * 2.0 * np.log(L_SYNTH))
        result = fit(synthetic(S, lattice), FitForm.AREALOG2D, (1, 40))
        assert result.c_eff == pytest.approx(2.0, abs=1e-10)
        assert result.residual < 1e-9
        np.testing.assert_allclose(result.predict(L_SYNTH), S, atol=1e-9)

    def test_chord_abscissa(self):
        R = 160
        chord = R / np.pi * np.sin(np.pi * L_SYNTH / R)
        result = fit(synthetic(0.2 + np.log(chord) / 3.0), FitForm.LOG1D, (1, 40), chord=True)
        assert result.c_eff == pytest.approx(1.0, abs=1e-10)
        assert result.chord

    def test_deterministic(self, rng):
        curve = synthetic(rng.random(40))
        first = fit(curve, "log1d", (3, 30))
        second = fit(curve, "log1d", (3, 30))
        assert first.params == second.params

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamples):
            fit(synthetic(0.7 * L_SYNTH), "linear", (5, 6))

    def test_default_window(self):
        assert default_window_cap(LatticeSpec.chain(400)) == 100
        assert default_window_cap(LatticeSpec.square(61)) == 29.5
        result = fit(synthetic(0.7 * L_SYNTH), "linear")
        assert result.window == (1.0, 40.0)

    def test_curve_validation(self):
        with pytest.raises(UsageError):
            synthetic(np.ones(3))
        with pytest.raises(UsageError):
            EntropyCurve(ModelSpec(ModelKind.LOCAL_HOPPING), LatticeSpec.chain(8), [2, 1], [0.1, 0.2])


class TestSweep:
    def test_empty(self, chain10):
        with pytest.raises(UsageError):
            sweep(ModelSpec(ModelKind.LOCAL_HOPPING), chain10, [])

    def test_out_of_range(self, chain10):
        with pytest.raises(UsageError):
            sweep(ModelSpec(ModelKind.LOCAL_HOPPING), chain10, [0, 3])
        with pytest.raises(UsageError):
            sweep(ModelSpec(ModelKind.LOCAL_HOPPING), chain10, [11])

    def test_workers_do_not_change_results(self):
        lattice = LatticeSpec.chain(64)
        model = ModelSpec(ModelKind.COMPACT_COS, alpha=8.0)
        serial = sweep(model, lattice, range(1, 33))
        threaded = sweep(model, lattice, reversed(range(1, 33)), workers=4)
        np.testing.assert_array_equal(serial.L, threaded.L)
        np.testing.assert_allclose(serial.S, threaded.S, rtol=0, atol=1e-12)

    def test_complementary_sizes(self):
        lattice = LatticeSpec.chain(48)
        curve = sweep(ModelSpec(ModelKind.COMPACT_SIN, alpha=4.0), lattice, range(1, 48))
        np.testing.assert_allclose(curve.S, curve.S[::-1], atol=1e-8)


class TestChainScaling:
    def test_local_central_charge(self, local_curve_400):
        assert fit(local_curve_400, "log1d", (8, 100)).c_eff == pytest.approx(0.978, abs=0.03)

    def test_doubled_fermions(self, chain400):
        curve = sweep(ModelSpec(ModelKind.COMPACT_COS, alpha=0.01), chain400, range(8, 101))
        assert fit(curve, "log1d", (8, 100)).c_eff == pytest.approx(1.96, abs=0.06)

    def test_large_alpha_volume_law(self, chain400):
        # measured density 0.66; ln 2 bounds it from above
        curve = sweep(ModelSpec(ModelKind.COMPACT_COS, alpha=1400.0), chain400, range(2, 61))
        result = fit(curve, "linear", (2, 60))
        assert result.d == pytest.approx(0.66, abs=0.04)
        assert result.d < np.log(2.0)

    def test_nonrelativistic_zero_alpha_is_squared_hopping(self):
        lattice = LatticeSpec.chain(120)
        sizes = [1, 9, 30, 50]
        compact = sweep(ModelSpec(ModelKind.COMPACT_COS, alpha=0.0, nonrelativistic=True), lattice, sizes)
        squared = sweep(ModelSpec(ModelKind.LOCAL_SQUARED_HOPPING), lattice, sizes)
        np.testing.assert_allclose(compact.S, squared.S, atol=1e-10)

    def test_crossover_family(self, compact_cos_curves_400):
        alphas, c_effs = [], []
        for alpha, curve in compact_cos_curves_400.items():
            report = crossover_report(curve, alpha)
            assert not report.partial
            assert 0.45 < report.A < 0.75
            assert 0.45 < report.B < 0.85
            alphas.append(alpha)
            c_effs.append(report.c_eff)
        trend = linear_trend(alphas, c_effs)
        assert trend.slope > 0
        assert trend.r_squared > 0.95

    def test_crossover_windows(self, compact_cos_curves_400):
        report = crossover_report(compact_cos_curves_400[30.0], 30.0)
        assert report.linear.window == (1.0, 29.0)
        assert report.logarithmic.window == (31.0, 100.0)


class TestCrossoverEdges:
    def test_log_only_without_locality_scale(self):
        report = crossover_report(synthetic(0.4 + 0.5 * np.log(L_SYNTH)), 0.0)
        assert report.flags == ["log-only"]
        assert report.A is None
        assert report.B is None
        assert report.c_eff == pytest.approx(1.5, abs=1e-10)

    def test_linear_only_beyond_lattice(self):
        report = crossover_report(synthetic(0.7 * L_SYNTH, alpha=1400.0), 1400.0)
        assert report.flags == ["linear-only"]
        assert report.A == pytest.approx(0.7)
        assert report.partial

    def test_trend_needs_two_points(self):
        with pytest.raises(InsufficientSamples):
            linear_trend([10.0], [6.0])


class TestPairingCurves:
    def test_noncompact_pairing_saturates(self, chain100):
        curve = sweep(ModelSpec(ModelKind.NONCOMPACT_NL_PAIRING, alpha=30.0), chain100, [10, 30])
        assert curve.S[1] - curve.S[0] < 0.2

    def test_compact_pairing_volume_law(self, chain100):
        curve = sweep(ModelSpec(ModelKind.COMPACT_NL_PAIRING, alpha=30.0), chain100, range(2, 26))
        result = fit(curve, "linear", (2, 25))
        assert result.residual < 0.1 * np.mean(curve.S)

    def test_compact_pairing_small_alpha_saturates(self, chain100):
        curve = sweep(ModelSpec(ModelKind.COMPACT_NL_PAIRING, alpha=5.0), chain100, [5, 50])
        assert abs(curve.S[1] - curve.S[0]) < 0.5
        assert curve.S[1] < 4.0


@pytest.mark.slow
class TestSquareLattice:
    @pytest.mark.parametrize("alpha", [5.0, 15.0])
    def test_area_law_coefficient(self, square61, alpha):
        curve = sweep(ModelSpec(ModelKind.COMPACT_SIN, alpha=alpha), square61, range(1, 31), workers=4)
        report = crossover_report(curve, alpha)
        assert report.B == pytest.approx(1.26, abs=0.3)

    def test_volume_law_density(self, square61):
        curve = sweep(ModelSpec(ModelKind.COMPACT_SIN, alpha=1400.0), square61, range(1, 11), workers=4)
        density = curve.S / curve.L.astype(float) ** 2
        assert np.all((density > 0.6) & (density < 0.75))
