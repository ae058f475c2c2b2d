"""
Pytest configuration and fixtures for the threshold tests
"""
import pytest
import numpy as np
import sys
from pathlib import Path

# Add src to Python path
src_path = Path(__file__).parent.parent / 'src'
sys.path.insert(0, str(src_path))

from modules.detection.click_model import DetectorModel
from modules.network.layouts import hom_extended, mach_zehnder, two_copy_variant, unbalanced_bs
from modules.source.source_model import SourceParams
from modules.threshold.curve import threshold_curve


@pytest.fixture
def ideal_det2():
    return DetectorModel.ideal(2)


@pytest.fixture
def ideal_det3():
    return DetectorModel.ideal(3)


@pytest.fixture
def balanced_bs():
    return unbalanced_bs(0.5)


@pytest.fixture
def mz_layout():
    """T1 = 0.5, T2 = 0.6, so Delta = 0.1"""
    return mach_zehnder(0.5, 0.6)


@pytest.fixture
def twocopy_layout():
    return two_copy_variant(0.7, 0.7)


@pytest.fixture
def hom_layout():
    return hom_extended(0.5, 0.5)


@pytest.fixture
def weak_source():
    return SourceParams(eta=0.1, nbar=0.001)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Full a sweeps are shared across the acceptance tests of a session

@pytest.fixture(scope='session')
def bs_curve_half():
    return threshold_curve(unbalanced_bs(0.5))


@pytest.fixture(scope='session')
def bs_curve_09():
    return threshold_curve(unbalanced_bs(0.9))


@pytest.fixture(scope='session')
def mz_curve():
    return threshold_curve(mach_zehnder(0.5, 0.6))


@pytest.fixture(scope='session')
def twocopy_curve():
    return threshold_curve(two_copy_variant(0.7, 0.7))
