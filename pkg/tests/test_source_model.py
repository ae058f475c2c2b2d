"""
Unit tests for the source model
Tests single-photon sources with background noise on every layout
"""
import math

import pytest

from modules.detection.click_model import ClickStats, DetectorModel, Provenance
from modules.network.layouts import hom_extended, mach_zehnder, two_copy_variant, unbalanced_bs
from modules.source.source_model import (
    SourceParams, hbt_approximation, hbt_ratio_estimate, linear_threshold_ratio,
    mz_coherence_factor, mz_linear_threshold, mz_model_threshold, mz_photon_placement,
    mz_prefactor, noise_detector_means, single_copy_click_stats, source_click_stats,
    source_no_click, two_copy_click_stats, two_copy_tolerant_threshold,
    two_photon_output_distribution,
)
from modules.utils.exceptions import (
    InconsistentStatisticsException, InvalidSourceParamsException, WrongLayoutException,
)


class TestSourceParams:
    """Test parameter validation"""

    def test_invalid_eta(self):
        with pytest.raises(InvalidSourceParamsException):
            SourceParams(eta=1.5, nbar=0.0)

    def test_negative_nbar(self):
        with pytest.raises(InvalidSourceParamsException):
            SourceParams(eta=0.1, nbar=-1e-3)

    def test_replace(self, weak_source):
        changed = weak_source.replace(nbar=0.01)
        assert changed.nbar == 0.01
        assert changed.eta == weak_source.eta
        assert weak_source.ratio == pytest.approx(100.0)
        assert SourceParams(0.1, 0.0).ratio == math.inf


class TestPhotonPlacement:
    """Test where a single photon lands in the Mach-Zehnder"""

    def test_monochromatic(self):
        q = mz_photon_placement(SourceParams(0.1, 0.0, signal_coherence=1.0), mach_zehnder(0.5, 0.6))
        t1, t2 = 0.5, 0.6
        expected = t1 * 0.4 + t2 * 0.5 + 2 * math.sqrt(t1 * t2 * 0.5 * 0.4)
        assert q.probs[0] == pytest.approx(expected)
        assert sum(q.probs) == pytest.approx(1.0)

    def test_polychromatic(self):
        q = mz_photon_placement(SourceParams(0.1, 0.0, signal_coherence=0.0), mach_zehnder(0.5, 0.6))
        assert q.probs[0] == pytest.approx(0.5 * 0.4 + 0.6 * 0.5)

    def test_wrong_layout(self):
        with pytest.raises(WrongLayoutException):
            mz_photon_placement(SourceParams(0.1, 0.0), unbalanced_bs(0.5))

    def test_noise_means_two_copy(self):
        layout = two_copy_variant(0.6, 0.6)
        m = noise_detector_means(SourceParams(0.1, 0.02), layout)
        assert m.sum() == pytest.approx(0.04)


class TestSourceStatistics:
    """Test P_s and P_e of rho_eta x rho_nbar"""

    @pytest.mark.parametrize('t', [0.1, 0.5, 0.9])
    def test_ideal_single_photon(self, ideal_det2, t):
        stats = source_click_stats(SourceParams(1.0, 0.0), unbalanced_bs(t), ideal_det2)
        assert stats.p_success == pytest.approx(t)
        assert stats.p_error == pytest.approx(0.0, abs=1e-15)
        assert stats.provenance is Provenance.SOURCE

    def test_noise_only_is_coherent_like(self, ideal_det2):
        """Poissonian noise alone behaves like a coherent state of the same mean"""
        nbar, t = 0.3, 0.4
        stats = source_click_stats(SourceParams(0.0, nbar), unbalanced_bs(t), ideal_det2)
        assert stats.p_success == pytest.approx(1 - math.exp(-t * nbar))
        assert stats.p_error == pytest.approx((1 - math.exp(-t * nbar)) * (1 - math.exp(-(1 - t) * nbar)))

    def test_hbt_approximation(self, ideal_det2):
        p = SourceParams(1e-2, 1e-5)
        stats = source_click_stats(p, unbalanced_bs(0.5), ideal_det2)
        ps, pe = hbt_approximation(p, 0.5)
        assert stats.p_success == pytest.approx(ps, rel=1e-2)
        assert stats.p_error == pytest.approx(pe, rel=1e-2)

    @pytest.mark.parametrize('layout', [unbalanced_bs(0.3), mach_zehnder(0.5, 0.7)])
    def test_single_copy_methods_agree(self, ideal_det2, layout):
        p = SourceParams(0.3, 0.1, signal_coherence=0.6, noise_coherence=0.2)
        stable = single_copy_click_stats(p, layout, ideal_det2)
        ie = single_copy_click_stats(p, layout, ideal_det2, method='inclusion_exclusion')
        assert stable.p_success == pytest.approx(ie.p_success, abs=1e-12)
        assert stable.p_error == pytest.approx(ie.p_error, abs=1e-12)

    @pytest.mark.parametrize('layout', [two_copy_variant(0.7, 0.4), hom_extended(0.5, 0.5)])
    def test_two_copy_methods_agree(self, ideal_det3, layout):
        p = SourceParams(0.4, 0.05, indistinguishability=0.7)
        stable = two_copy_click_stats(p, layout, ideal_det3)
        ie = two_copy_click_stats(p, layout, ideal_det3, method='inclusion_exclusion')
        assert stable.p_success == pytest.approx(ie.p_success, abs=1e-12)
        assert stable.p_error == pytest.approx(ie.p_error, abs=1e-12)

    def test_ideal_two_copy_has_no_errors(self, ideal_det3):
        stats = source_click_stats(SourceParams(0.5, 0.0), two_copy_variant(0.7, 0.7), ideal_det3)
        assert stats.p_error == pytest.approx(0.0, abs=1e-15)
        assert stats.p_success > 0.0

    def test_tiny_error_probability_positive(self, ideal_det3):
        stats = source_click_stats(SourceParams(1e-4, 1e-6), two_copy_variant(0.9, 0.9), ideal_det3)
        assert 0.0 < stats.p_error < 1e-12

    def test_no_click_of_empty_noise(self, ideal_det2):
        p = SourceParams(0.2, 0.0)
        assert source_no_click(p, unbalanced_bs(0.5), ideal_det2, {1}) == pytest.approx(0.9)

    def test_wrong_layout(self, ideal_det2, ideal_det3):
        with pytest.raises(WrongLayoutException):
            single_copy_click_stats(SourceParams(0.1, 0.0), two_copy_variant(0.5, 0.5), ideal_det3)
        with pytest.raises(WrongLayoutException):
            two_copy_click_stats(SourceParams(0.1, 0.0), unbalanced_bs(0.5), ideal_det2)

    def test_detector_efficiency(self):
        det = DetectorModel.uniform(2, 0.5)
        stats = source_click_stats(SourceParams(1.0, 0.0), unbalanced_bs(0.6), det)
        assert stats.p_success == pytest.approx(0.3)

    @pytest.mark.parametrize('indist', [0.0, 0.5, 1.0])
    def test_two_photon_distribution_normalised(self, indist):
        dist = two_photon_output_distribution(two_copy_variant(0.3, 0.8), indist)
        assert sum(dist.values()) == pytest.approx(1.0)


class TestHbtRatio:
    """Test the eta/nbar estimate from (P_s, P_e)"""

    def test_ratio_100(self):
        estimate = hbt_ratio_estimate(ClickStats(0.0505, 5e-5))
        assert estimate.ratio == pytest.approx(100.0, rel=1e-3)
        assert estimate.roots[0] * estimate.roots[1] == pytest.approx(1.0)

    def test_zero_error_unbounded(self):
        assert hbt_ratio_estimate(ClickStats(0.05, 0.0)).unbounded

    def test_no_real_solution(self):
        with pytest.raises(InconsistentStatisticsException):
            hbt_ratio_estimate(ClickStats(0.001, 0.001))

    def test_real_root_boundary(self):
        """P_s^2 = 2 P_e gives the double root eta = nbar; just below it has no root"""
        assert hbt_ratio_estimate(ClickStats(0.1, 0.005)).ratio == pytest.approx(1.0, abs=1e-6)
        with pytest.raises(InconsistentStatisticsException):
            hbt_ratio_estimate(ClickStats(0.1, 0.0051))


class TestLinearThresholds:
    """Test the small-signal threshold laws"""

    def test_mz_model_threshold(self):
        assert mz_model_threshold(0.5, 0.6) == pytest.approx(50.0)
        assert mz_model_threshold(0.5, 0.6, polychromatic=True) == pytest.approx(200.0)
        assert mz_model_threshold(0.5, 0.5) == math.inf

    def test_coherence_factor(self):
        assert mz_coherence_factor(0.5, True) == pytest.approx(4.0)
        assert mz_coherence_factor(0.3, False) == 1.0

    def test_mz_prefactor(self):
        assert mz_prefactor(0.5, 0.1) == pytest.approx(10.0)

    def test_mz_linear_threshold_close_to_model(self):
        layout = mach_zehnder(0.5, 0.6)
        mono = mz_linear_threshold(SourceParams(1e-3, 0.0, signal_coherence=1.0), layout)
        poly = mz_linear_threshold(SourceParams(1e-3, 0.0, signal_coherence=0.0), layout)
        assert mono == pytest.approx(50.0, rel=0.05)
        assert poly == pytest.approx(200.0, rel=0.05)

    def test_two_copy_tolerant(self):
        assert two_copy_tolerant_threshold(0.99) == pytest.approx(0.1)
        assert linear_threshold_ratio(two_copy_variant(0.99, 0.99), SourceParams(0.1, 0.0)) == pytest.approx(0.1)

    def test_linear_threshold_dispatch(self):
        assert linear_threshold_ratio(unbalanced_bs(0.5), SourceParams(0.1, 0.0)) == 0.0
        with pytest.raises(WrongLayoutException):
            linear_threshold_ratio(hom_extended(0.5, 0.5), SourceParams(0.1, 0.0))
