"""
Unit tests for the linear network module
Tests transfer matrices, propagation and the four layouts
"""
import math

import pytest
import numpy as np

from modules.network.transfer import (
    TransferMatrix, bs_matrix, mz_matrix, phase_shift, propagate, three_mode_matrix,
)
from modules.network.layouts import (
    LayoutKind, LayoutSpec, build_layout, hom_extended, mach_zehnder,
    phase_from_path, two_copy_variant, unbalanced_bs,
)
from modules.source.source_model import two_photon_output_distribution
from modules.utils.exceptions import (
    DimensionMismatchException, InvalidTransmissionException, NetworkException,
)


class TestTransferMatrices:
    """Test matrix construction"""

    @pytest.mark.parametrize('t', [0.0, 0.1, 0.5, 0.9, 1.0])
    def test_beam_splitter_unitary(self, t):
        m = bs_matrix(t)
        assert m.is_unitary()
        assert m.intensities[0, 0] == pytest.approx(t)
        assert m.intensities[1, 0] == pytest.approx(1 - t)

    def test_invalid_transmission(self):
        with pytest.raises(InvalidTransmissionException):
            bs_matrix(1.2)
        with pytest.raises(InvalidTransmissionException):
            bs_matrix(float('nan'))

    @pytest.mark.parametrize('t1,t2,phase', [(0.5, 0.6, 0.0), (0.3, 0.8, 1.0), (0.5, 0.5, math.pi)])
    def test_mz_detector_one_intensity(self, t1, t2, phase):
        """Detector 1 sees T1 R2 + T2 R1 + 2 cos(phi) sqrt(T1 T2 R1 R2)"""
        r1, r2 = 1 - t1, 1 - t2
        expected = t1 * r2 + t2 * r1 + 2 * math.cos(phase) * math.sqrt(t1 * t2 * r1 * r2)
        m = mz_matrix(t1, t2, phase)
        assert m.is_unitary()
        assert m.intensities[0, 0] == pytest.approx(expected, abs=1e-12)
        assert m.intensities[1, 0] == pytest.approx(1 - expected, abs=1e-12)

    def test_three_mode_matrix_unitary(self):
        for t1, t2 in [(0.5, 0.5), (0.3, 0.9), (0.0, 1.0)]:
            assert three_mode_matrix(t1, t2).is_unitary()

    def test_three_mode_matrix_is_two_beam_splitters(self):
        t1, t2 = 0.3, 0.8
        bs1 = np.eye(3, dtype=complex)
        bs1[:2, :2] = bs_matrix(t1).entries
        bs2 = np.eye(3, dtype=complex)
        bs2[1:, 1:] = bs_matrix(t2).entries
        np.testing.assert_allclose(three_mode_matrix(t1, t2).entries, bs2 @ bs1, atol=1e-15)

    def test_entries_read_only(self):
        m = bs_matrix(0.5)
        with pytest.raises(ValueError):
            m.entries[0, 0] = 2.0

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatchException):
            TransferMatrix(np.ones((2, 3)))

    def test_phase_shift_arm_range(self):
        with pytest.raises(NetworkException):
            phase_shift(0.3, dim=2, arm=2)


class TestPropagation:
    """Test u = A v"""

    def test_single_input(self):
        u = propagate(bs_matrix(0.25), [2.0, 0.0])
        assert np.abs(u[0]) ** 2 == pytest.approx(1.0)
        assert np.abs(u[1]) ** 2 == pytest.approx(3.0)

    def test_batched_inputs(self):
        m = three_mode_matrix(0.4, 0.7)
        v = np.arange(12, dtype=complex).reshape(4, 3)
        u = propagate(m, v)
        assert u.shape == (4, 3)
        np.testing.assert_allclose(u[2], m.entries @ v[2])

    def test_intensity_conserved(self):
        v = np.array([0.3 + 0.2j, -0.7j, 1.1])
        u = propagate(three_mode_matrix(0.35, 0.6), v)
        assert np.sum(np.abs(u) ** 2) == pytest.approx(np.sum(np.abs(v) ** 2))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchException):
            propagate(bs_matrix(0.5), [1.0, 0.0, 0.0])


class TestLayouts:
    """Test the four layouts"""

    def test_patterns(self):
        assert unbalanced_bs(0.3).success_pattern == frozenset({1})
        assert mach_zehnder(0.5, 0.6).error_pattern == frozenset({1, 2})
        assert two_copy_variant(0.5, 0.5).success_pattern == frozenset({1, 2})
        assert hom_extended(0.5, 0.5).error_pattern == frozenset({1, 2, 3})

    def test_copies_and_ports(self):
        assert unbalanced_bs(0.5).copies == 1
        assert two_copy_variant(0.5, 0.5).input_ports == (0, 1)
        assert hom_extended(0.5, 0.5).input_ports == (1, 2)
        assert LayoutKind('twocopy').copies == 2

    def test_hom_matrix_unitary(self):
        assert hom_extended(0.3, 0.6).matrix().is_unitary()

    def test_success_must_be_strict_subset(self):
        with pytest.raises(NetworkException):
            LayoutSpec(LayoutKind.UNBALANCED_BS, 0.5, success_pattern=frozenset({1, 2}),
                       error_pattern=frozenset({1, 2}))

    def test_pattern_out_of_range(self):
        with pytest.raises(NetworkException):
            LayoutSpec(LayoutKind.UNBALANCED_BS, 0.5, error_pattern=frozenset({1, 3}))

    def test_delta(self):
        assert mach_zehnder(0.5, 0.6).delta == pytest.approx(0.1)
        assert mach_zehnder(0.3, 0.8).delta == pytest.approx(0.1)
        assert mach_zehnder(0.7, 0.3).delta == pytest.approx(0.0)

    def test_build_layout(self):
        assert build_layout('bs', t=0.4).t1 == 0.4
        twocopy = build_layout('twocopy', t=0.8)
        assert (twocopy.t1, twocopy.t2) == (0.8, 0.8)
        assert build_layout('mz', t1=0.5, t2=0.7, phase=0.2).phase == 0.2

    def test_build_layout_missing_transmission(self):
        with pytest.raises(NetworkException):
            build_layout('mz', t1=0.5)
        with pytest.raises(NetworkException):
            build_layout('bs')

    def test_with_phase_keeps_settings(self):
        layout = mach_zehnder(0.5, 0.6).with_phase(1.5)
        assert layout.phase == 1.5
        assert layout.t2 == 0.6

    def test_phase_from_path(self):
        from scipy.constants import c
        assert phase_from_path(c, 1.0) == pytest.approx(2 * math.pi)


class TestTwoPhotonInterference:
    """Bunching of two indistinguishable photons at a balanced BS1"""

    def test_hom_bunching(self):
        """SPAD3 takes one BS1 output, SPAD1 and SPAD2 the other"""
        layout = hom_extended(0.5, 0.5)
        dist = two_photon_output_distribution(layout, 1.0)
        cross = dist[(1, 3)] + dist[(2, 3)]
        assert cross == pytest.approx(0.0, abs=1e-15)
        assert sum(dist.values()) == pytest.approx(1.0)

    def test_distinguishable_photons_split(self):
        dist = two_photon_output_distribution(hom_extended(0.5, 0.5), 0.0)
        assert dist[(1, 3)] + dist[(2, 3)] == pytest.approx(0.5)

    def test_two_copy_variant_bunching(self):
        dist = two_photon_output_distribution(two_copy_variant(0.5, 0.3), 1.0)
        assert dist[(1, 2)] + dist[(1, 3)] == pytest.approx(0.0, abs=1e-15)


class TestUnitarityGrid:
    """Every matrix over a transmission grid stays unitary"""

    GRID = np.linspace(0.0, 1.0, 11)

    def test_beam_splitters(self):
        for t in self.GRID:
            assert bs_matrix(t).unitarity_error() < 1e-12

    def test_mach_zehnder(self):
        for t1 in self.GRID:
            for t2 in self.GRID:
                for phase in (0.0, 0.7, math.pi, 4.0):
                    assert mz_matrix(t1, t2, phase).unitarity_error() < 1e-12

    def test_three_mode_and_hom(self):
        for t1 in self.GRID:
            for t2 in self.GRID:
                assert three_mode_matrix(t1, t2).unitarity_error() < 1e-12
                assert hom_extended(t1, t2).matrix().unitarity_error() < 1e-12

    def test_propagation_conserves_intensity(self, rng):
        for _ in range(50):
            t1, t2 = rng.uniform(0, 1, size=2)
            for m in (mz_matrix(t1, t2, rng.uniform(0, 2 * math.pi)), three_mode_matrix(t1, t2)):
                v = rng.normal(size=m.dim) + 1j * rng.normal(size=m.dim)
                u = propagate(m, v)
                assert np.sum(np.abs(u) ** 2) == pytest.approx(np.sum(np.abs(v) ** 2), rel=1e-12)

    @pytest.mark.parametrize('phase', [0.0, 0.4, 2.5])
    def test_mz_phase_period(self, phase):
        base = mz_matrix(0.35, 0.8, phase)
        for n in (1, 2, -3):
            shifted = mz_matrix(0.35, 0.8, phase + 2 * math.pi * n)
            np.testing.assert_allclose(shifted.entries, base.entries, atol=1e-12)
