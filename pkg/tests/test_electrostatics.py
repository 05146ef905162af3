import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_mto.constants import CODATA
from casimir_mto.electrostatics import (
    CalibrationFit,
    CalibrationSample,
    ElectrostaticConfig,
    TruncationReport,
    calibrate,
    electrostatic_force,
    estimate_v0,
    make_calibration_samples,
    series_truncation_report,
    small_gap_force,
)
from casimir_mto.errors import (
    DomainError,
    IdentifiabilityError,
    ValidationError,
)
from casimir_mto.lifshitz import SpherePlaneGeometry

TRUTH = (50280.0, 0.6325, 294.3e-6, 39.4e-9)
Z_GRID = np.linspace(0.6e-6, 3e-6, 16)
VOLTS = (0.1325, 0.3325, 0.4825, 0.7825, 0.9325, 1.1325)
GUESS = (5.2e4, 0.6, 3.0e-4, 3e-8)


def _config(v_applied=0.3, v_residual=0.0, z_metal=1e-6, delta0=0.0,
            radius=294.3e-6, series_tol=1e-9):
    geom = SpherePlaneGeometry(radius=radius, separation=z_metal, delta0=delta0)
    return ElectrostaticConfig(v_applied, v_residual, geom, series_tol)


class TestForceSeries:
    def test_zero_at_matched_voltage(self):
        assert electrostatic_force(_config(v_applied=0.6325, v_residual=0.6325)) == 0.0

    def test_small_gap_asymptote(self):
        cfg = _config()
        force = electrostatic_force(cfg)
        asym = math.pi * CODATA.eps0 * 0.3**2 * 294.3e-6 / 1e-6
        assert force == pytest.approx(asym, rel=0.02)
        assert force == pytest.approx(7.3076e-10, rel=1e-4)

    def test_quadratic_in_voltage(self):
        f1 = electrostatic_force(_config(v_applied=0.3))
        f2 = electrostatic_force(_config(v_applied=0.6))
        assert f2 == pytest.approx(4 * f1, rel=1e-12)

    def test_voltage_offset_symmetry(self):
        fp = electrostatic_force(_config(v_applied=0.9325, v_residual=0.6325))
        fm = electrostatic_force(_config(v_applied=0.3325, v_residual=0.6325))
        assert fp == pytest.approx(fm, rel=1e-12)

    def test_monotone_decreasing_in_gap(self):
        forces = [electrostatic_force(_config(z_metal=z)) for z in (0.5e-6, 1e-6, 2e-6, 4e-6)]
        assert all(a > b for a, b in zip(forces, forces[1:]))

    def test_delta0_enters_the_gap(self):
        with_offset = electrostatic_force(_config(z_metal=1e-6, delta0=50e-9))
        plain = electrostatic_force(_config(z_metal=1.1e-6))
        assert with_offset == pytest.approx(plain, rel=1e-10)

    def test_series_tol_window(self):
        with pytest.raises(ValidationError):
            _config(series_tol=1e-5)
        with pytest.raises(ValidationError):
            _config(series_tol=0.0)

    @pytest.mark.parametrize("gap_ratio", [1e-4, 1e-3, 1e-2, 0.09])
    def test_partial_sums_monotone_after_first_term(self, gap_ratio):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = series_truncation_report(_config(z_metal=gap_ratio * 294.3e-6))
        sums = [s for _, s in report.terms]
        assert all(b >= a for a, b in zip(sums[1:], sums[2:]))

    @given(dv=st.floats(0.05, 2.0), z=st.floats(3e-7, 5e-6))
    @settings(max_examples=30, deadline=None)
    def test_positive_magnitude(self, dv, z):
        assert electrostatic_force(_config(v_applied=dv, z_metal=z)) > 0

    def test_series_nonconvergence_raises(self):
        from casimir_mto.errors import ConvergenceError

        # Vanishing gap drives u ~ sqrt(2 z/R) so small that 1e5 terms
        # cannot converge the image-charge sum.
        with pytest.raises(ConvergenceError):
            electrostatic_force(_config(z_metal=1e-15))


class TestTruncationReport:
    def test_reference_geometry_two_orders_suffice(self):
        report = series_truncation_report(_config(z_metal=1e-6))
        assert report.gap_ratio == pytest.approx(0.0034, rel=0.01)
        assert report.expansion_rel_error[1] > 1e-3
        assert report.expansion_rel_error[2] <= 1e-3
        assert report.orders_for_0p1pct == 2

    def test_wide_gap_needs_more_orders(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = series_truncation_report(_config(z_metal=0.1 * 294.3e-6))
        assert report.expansion_rel_error[2] > 1e-3
        assert report.orders_for_0p1pct is None

    def test_leading_term_dominates_at_tiny_gap(self):
        report = series_truncation_report(_config(z_metal=2.943e-8))  # d/R = 1e-4
        assert report.expansion_rel_error[1] < 1e-3
        assert report.orders_for_0p1pct == 1

    def test_report_structure(self):
        report = series_truncation_report(_config())
        assert isinstance(report, TruncationReport)
        ns = [n for n, _ in report.terms]
        assert ns[0] == 1
        assert report.terms[-1][1] == report.force

    def test_small_gap_force_orders(self):
        with pytest.raises(DomainError):
            small_gap_force(1e-6, 294.3e-6, 0.3, orders=3)


class TestCalibration:
    def test_noiseless_round_trip(self):
        samples = make_calibration_samples(*TRUTH, Z_GRID, VOLTS)
        fit = calibrate(samples, GUESS)
        assert fit.k == pytest.approx(TRUTH[0], rel=1e-6)
        assert fit.v0 == pytest.approx(TRUTH[1], rel=1e-6)
        assert fit.radius == pytest.approx(TRUTH[2], rel=1e-6)
        assert fit.delta0 == pytest.approx(TRUTH[3], rel=1e-6)
        assert fit.residual_rms < 1e-15

    def test_noisy_k_recovery(self):
        errs = []
        for seed in range(10):
            samples = make_calibration_samples(*TRUTH, Z_GRID, VOLTS,
                                               noise_rel=2e-6, seed=seed)
            fit = calibrate(samples, GUESS)
            errs.append(abs(fit.k / TRUTH[0] - 1.0))
        assert np.mean(errs) < 5e-4

    def test_single_voltage_unidentifiable(self):
        samples = make_calibration_samples(*TRUTH, Z_GRID, (0.9325,))
        with pytest.raises(IdentifiabilityError):
            calibrate(samples, GUESS)

    def test_too_few_samples(self):
        samples = make_calibration_samples(*TRUTH, Z_GRID[:2], (0.3325,))[:3]
        with pytest.raises(IdentifiabilityError):
            calibrate(samples, GUESS)

    def test_covariance_properties(self):
        samples = make_calibration_samples(*TRUTH, Z_GRID, VOLTS,
                                           noise_rel=2e-6, seed=3)
        fit = calibrate(samples, GUESS)
        cov = fit.covariance
        assert cov.shape == (4, 4)
        assert np.allclose(cov, cov.T)
        assert np.all(np.linalg.eigvalsh(cov) >= -1e-20)
        # Reported sigma should cover the actual error within a few x.
        assert abs(fit.k - TRUTH[0]) < 10 * fit.uncertainties()[0]

    def test_sample_validation(self):
        with pytest.raises(ValidationError):
            CalibrationSample(z_metal=-1e-6, v_applied=0.3, delta_c=1e-14)
        with pytest.raises(ValidationError):
            CalibrationSample(z_metal=1e-6, v_applied=math.nan, delta_c=1e-14)

    def test_fit_invariants_enforced(self):
        with pytest.raises(ValidationError):
            CalibrationFit(k=-1.0, v0=0.0, radius=1e-4, delta0=0.0,
                           covariance=np.eye(4), residual_rms=0.0)

    def test_estimate_v0_picks_quietest_voltage(self):
        samples = make_calibration_samples(*TRUTH, Z_GRID, (0.3325, 0.6325 + 1e-4, 0.9325))
        assert estimate_v0(samples) == pytest.approx(0.6325, abs=1e-3)

    def test_generator_determinism(self):
        a = make_calibration_samples(*TRUTH, Z_GRID, VOLTS, noise_rel=1e-6, seed=11)
        b = make_calibration_samples(*TRUTH, Z_GRID, VOLTS, noise_rel=1e-6, seed=11)
        assert all(x.delta_c == y.delta_c for x, y in zip(a, b))
