"""
Source Model - click statistics of realistic single-photon sources

The inspected state is rho_eta (x) rho_nbar per copy: a lossy single photon
(efficiency eta) in its own mode plus Poissonian background with mean nbar.
Signal and noise never interfere with each other, so their clicks factorise;
a Poisson mean split by the network stays Poissonian, which makes the
per-detector noise means all that is needed.
"""
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

from modules.detection.click_model import ClickStats, DetectorModel, Provenance, inclusion_exclusion
from modules.network.layouts import LayoutKind, LayoutSpec
from modules.utils.exceptions import (
    DimensionMismatchException,
    InconsistentStatisticsException,
    InvalidSourceParamsException,
    WrongLayoutException,
)
from modules.utils.validator import validate_mean_photons, validate_probability
from modules.utils.logger import get_logger

logger = get_logger(__name__)

_SINGLE_COPY = (LayoutKind.UNBALANCED_BS, LayoutKind.MACH_ZEHNDER)
_TWO_COPY = (LayoutKind.HOM_EXTENDED, LayoutKind.TWO_COPY_VARIANT)


@dataclass(frozen=True)
class SourceParams:
    """
    eta: emission/collection efficiency
    nbar: mean background photons per copy
    signal_coherence: Mach-Zehnder visibility of the single photon (1 = monochromatic)
    noise_coherence: Mach-Zehnder visibility of the background
    indistinguishability: mode overlap of the two copies at BS1
    """
    eta: float
    nbar: float
    signal_coherence: float = 1.0
    noise_coherence: float = 0.0
    indistinguishability: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'eta', validate_probability(self.eta, "eta"))
        object.__setattr__(self, 'nbar', validate_mean_photons(self.nbar, "nbar"))
        for name in ('signal_coherence', 'noise_coherence', 'indistinguishability'):
            object.__setattr__(self, name, validate_probability(getattr(self, name), name))

    def replace(self, **changes) -> 'SourceParams':
        values = {
            'eta': self.eta,
            'nbar': self.nbar,
            'signal_coherence': self.signal_coherence,
            'noise_coherence': self.noise_coherence,
            'indistinguishability': self.indistinguishability,
        }
        values.update(changes)
        return SourceParams(**values)

    @property
    def ratio(self) -> float:
        """eta / nbar"""
        return math.inf if self.nbar == 0 else self.eta / self.nbar


@dataclass(frozen=True)
class PhotonPlacement:
    """Per-detector arrival probabilities of one emitted photon"""
    probs: Tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if any(p < -1e-15 or p > 1 + 1e-15 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
            raise InvalidSourceParamsException(f"Photon placement {probs} is not a distribution")
        object.__setattr__(self, 'probs', tuple(min(max(p, 0.0), 1.0) for p in probs))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs)


# ──────────────────────────────────────────────
# Routing
# ──────────────────────────────────────────────

def _mz_incoherent(t1: float, t2: float) -> np.ndarray:
    r1, r2 = 1.0 - t1, 1.0 - t2
    return np.array([t1 * r2 + t2 * r1, t1 * t2 + r1 * r2])


def _mz_routing(layout: LayoutSpec, visibility: float) -> np.ndarray:
    coherent = layout.matrix().intensities[:, 0]
    blended = visibility * coherent + (1.0 - visibility) * _mz_incoherent(layout.t1, layout.t2)
    return blended / blended.sum()


def mz_photon_placement(p: SourceParams, layout: LayoutSpec) -> PhotonPlacement:
    """
    Detector-1 share V [T1 R2 + T2 R1 + 2 cos(phi) sqrt(T1 T2 R1 R2)]
    + (1 - V) (T1 R2 + T2 R1), detector 2 the complement
    """
    if layout.kind is not LayoutKind.MACH_ZEHNDER:
        raise WrongLayoutException(f"Mach-Zehnder placement on a '{layout.kind.value}' layout")
    return PhotonPlacement(tuple(_mz_routing(layout, p.signal_coherence)))


def photon_placement(p: SourceParams, layout: LayoutSpec) -> PhotonPlacement:
    """Single-copy placement for either single-copy layout"""
    if layout.kind is LayoutKind.MACH_ZEHNDER:
        return mz_photon_placement(p, layout)
    if layout.kind is LayoutKind.UNBALANCED_BS:
        return PhotonPlacement(tuple(layout.matrix().intensities[:, 0]))
    raise WrongLayoutException(f"Single-copy placement on a '{layout.kind.value}' layout")


def noise_detector_means(p: SourceParams, layout: LayoutSpec) -> np.ndarray:
    """
    Poisson means of background photons per detector

    Two-copy noise enters every signal port and never interferes.
    """
    if layout.kind is LayoutKind.MACH_ZEHNDER:
        return p.nbar * _mz_routing(layout, p.noise_coherence)
    intensities = layout.matrix().intensities
    ports = list(layout.input_ports)
    return p.nbar * intensities[:, ports].sum(axis=1)


def two_photon_output_distribution(layout: LayoutSpec, indistinguishability: float
                                   ) -> Dict[Tuple[int, int], float]:
    """
    Where the two signal photons land, keyed by sorted 1-based detector pairs

    Weight I interferes bosonically (A_ia A_jb + A_ja A_ib, and sqrt(2) A_ia A_ib
    for bunching on one detector); weight 1 - I routes them independently.
    """
    if layout.kind not in _TWO_COPY:
        raise WrongLayoutException(f"Two-photon routing on a '{layout.kind.value}' layout")
    indist = validate_probability(indistinguishability, "indistinguishability")
    m = layout.matrix().entries
    pa, pb = layout.input_ports
    dist = {}
    for i in range(layout.dim):
        for j in range(i, layout.dim):
            if i == j:
                quantum = 2.0 * abs(m[i, pa] * m[i, pb]) ** 2
                classical = abs(m[i, pa]) ** 2 * abs(m[i, pb]) ** 2
            else:
                quantum = abs(m[i, pa] * m[j, pb] + m[j, pa] * m[i, pb]) ** 2
                classical = (abs(m[i, pa]) ** 2 * abs(m[j, pb]) ** 2
                             + abs(m[j, pa]) ** 2 * abs(m[i, pb]) ** 2)
            dist[(i + 1, j + 1)] = indist * quantum + (1.0 - indist) * classical
    return dist


# ──────────────────────────────────────────────
# Signal click sets
# ──────────────────────────────────────────────

def _add(dist: Dict[FrozenSet[int], float], key, weight: float):
    if weight > 0.0:
        dist[key] = dist.get(key, 0.0) + weight


def _single_photon_clicks(placement: np.ndarray, nu: np.ndarray, weight: float,
                          dist: Dict[FrozenSet[int], float]):
    for i, q in enumerate(placement):
        _add(dist, frozenset({i}), weight * q * nu[i])
    _add(dist, frozenset(), weight * (1.0 - float(np.dot(placement, nu))))


def signal_click_sets(p: SourceParams, layout: LayoutSpec, det: DetectorModel) -> Dict[FrozenSet[int], float]:
    """
    Distribution of the (0-based) detector sets fired by signal photons alone
    """
    nu = det.nu
    dist: Dict[FrozenSet[int], float] = {}
    if layout.kind in _SINGLE_COPY:
        _single_photon_clicks(photon_placement(p, layout).as_array(), nu, p.eta, dist)
        _add(dist, frozenset(), 1.0 - p.eta)
        return dist

    intensities = layout.matrix().intensities
    pa, pb = layout.input_ports
    eta = p.eta
    _add(dist, frozenset(), (1.0 - eta) ** 2)
    _single_photon_clicks(intensities[:, pa], nu, eta * (1.0 - eta), dist)
    _single_photon_clicks(intensities[:, pb], nu, eta * (1.0 - eta), dist)

    pair_weight = eta * eta
    for (i, j), prob in two_photon_output_distribution(layout, p.indistinguishability).items():
        i, j = i - 1, j - 1
        w = pair_weight * prob
        if i == j:
            fired = 1.0 - (1.0 - nu[i]) ** 2
            _add(dist, frozenset({i}), w * fired)
            _add(dist, frozenset(), w * (1.0 - fired))
        else:
            _add(dist, frozenset({i, j}), w * nu[i] * nu[j])
            _add(dist, frozenset({i}), w * nu[i] * (1.0 - nu[j]))
            _add(dist, frozenset({j}), w * (1.0 - nu[i]) * nu[j])
            _add(dist, frozenset(), w * (1.0 - nu[i]) * (1.0 - nu[j]))
    return dist


def _pattern_probability(signal: Dict[FrozenSet[int], float], noise_click: np.ndarray,
                         pattern) -> float:
    """P(every detector of the 1-based pattern clicks), as a sum of positive terms"""
    targets = frozenset(i - 1 for i in pattern)
    total = 0.0
    for fired, weight in signal.items():
        missing = targets - fired
        total += weight * float(np.prod([noise_click[i] for i in missing])) if missing else weight
    return total


def source_no_click(p: SourceParams, layout: LayoutSpec, det: DetectorModel, k) -> float:
    """
    P(no click on K): signal sets avoiding K times exp(-sum_{i in K} nu_i m_i);
    single copy reduces to (1 - eta sum_K nu_i q_i) exp(-sum_K nu_i m_i)
    """
    idx = frozenset(i - 1 for i in k)
    signal = signal_click_sets(p, layout, det)
    means = noise_detector_means(p, layout)
    quiet = sum(w for fired, w in signal.items() if not (fired & idx))
    return quiet * math.exp(-float(sum(det.nu[i] * means[i] for i in idx)))


def _source_stats(p: SourceParams, layout: LayoutSpec, det: DetectorModel, method: str) -> ClickStats:
    if len(det.efficiencies) != layout.dim:
        raise DimensionMismatchException(
            f"Detector model has {len(det.efficiencies)} efficiencies for {layout.dim} outputs"
        )
    if method == 'inclusion_exclusion':
        def p0(subset):
            return source_no_click(p, layout, det, subset)

        p_s = inclusion_exclusion(layout.success_pattern, p0)
        p_e = inclusion_exclusion(layout.error_pattern, p0)
    elif method == 'stable':
        signal = signal_click_sets(p, layout, det)
        noise_click = -np.expm1(-det.nu * noise_detector_means(p, layout))
        p_s = _pattern_probability(signal, noise_click, layout.success_pattern)
        p_e = _pattern_probability(signal, noise_click, layout.error_pattern)
    else:
        raise ValueError(f"Unknown method: {method}")
    return ClickStats(p_s, p_e, Provenance.SOURCE, layout.label())


def single_copy_click_stats(p: SourceParams, layout: LayoutSpec, det: DetectorModel,
                            method: str = 'stable') -> ClickStats:
    """(P_s, P_e) of one copy on the unbalanced BS or the Mach-Zehnder"""
    if layout.kind not in _SINGLE_COPY:
        raise WrongLayoutException(f"Single-copy statistics on a '{layout.kind.value}' layout")
    return _source_stats(p, layout, det, method)


def two_copy_click_stats(p: SourceParams, layout: LayoutSpec, det: DetectorModel,
                         method: str = 'stable') -> ClickStats:
    """(P_s, P_e) of two copies on the three-detector layouts"""
    if layout.kind not in _TWO_COPY:
        raise WrongLayoutException(f"Two-copy statistics on a '{layout.kind.value}' layout")
    return _source_stats(p, layout, det, method)


def source_click_stats(p: SourceParams, layout: LayoutSpec, det: Optional[DetectorModel] = None) -> ClickStats:
    """Dispatch on the number of copies the layout takes"""
    det = DetectorModel.ideal(layout.dim) if det is None else det
    if layout.copies == 1:
        return single_copy_click_stats(p, layout, det)
    return two_copy_click_stats(p, layout, det)


# ──────────────────────────────────────────────
# Small-signal approximations
# ──────────────────────────────────────────────

@dataclass(frozen=True)
class HbtRatio:
    ratio: float
    roots: Tuple[float, float]
    unbounded: bool = False


def hbt_ratio_estimate(stats: ClickStats) -> HbtRatio:
    """
    Invert P_s ~ (eta + nbar)/2 and P_e ~ eta nbar/2 for x = eta/nbar:
    x^2 - ((2 P_s)^2 / (2 P_e) - 2) x + 1 = 0, the root >= 1 is reported.
    Real roots need (2 P_s)^2 >= 8 P_e, i.e. P_s^2 >= 2 P_e.
    """
    ps, pe = stats.p_success, stats.p_error
    if ps <= 0.0:
        raise InconsistentStatisticsException("HBT ratio needs P_s > 0")
    if pe == 0.0:
        return HbtRatio(math.inf, (0.0, math.inf), unbounded=True)
    b = (2.0 * ps) ** 2 / (2.0 * pe) - 2.0
    disc = b * b - 4.0
    if disc < 0.0:
        raise InconsistentStatisticsException(
            f"No real eta/nbar for P_s={ps:.3e}, P_e={pe:.3e} (needs P_s^2 >= 2 P_e)"
        )
    sq = math.sqrt(disc)
    big = (b + sq) / 2.0
    # product of roots is 1
    small = 1.0 / big
    return HbtRatio(big, (small, big))


def hbt_approximation(p: SourceParams, t: float) -> Tuple[float, float]:
    """Unbalanced BS: P_s ~ (eta + nbar) T, P_e ~ 2 T (1 - T) nbar eta"""
    return (p.eta + p.nbar) * t, 2.0 * t * (1.0 - t) * p.nbar * p.eta


def mz_prefactor(t: float, delta: float) -> float:
    """f(T, Delta) ~ 2 sqrt(T (1 - T)) / |Delta| for small |Delta|"""
    if delta == 0.0:
        return math.inf
    return 2.0 * math.sqrt(t * (1.0 - t)) / abs(delta)


def mz_coherence_factor(t1: float, polychromatic: bool) -> float:
    """C = 1 (monochromatic) or 2 / (1 - 2 T1 + 2 T1^2) (polychromatic)"""
    return 2.0 / (1.0 - 2.0 * t1 + 2.0 * t1 * t1) if polychromatic else 1.0


def mz_model_threshold(t1: float, t2: float, polychromatic: bool = False) -> float:
    """eta/nbar above 8 T1^2 (1 - T1)^2 C / Delta^2 is nonclassical"""
    delta = t1 + t2 - 1.0
    if delta == 0.0:
        return math.inf
    return 8.0 * t1 ** 2 * (1.0 - t1) ** 2 * mz_coherence_factor(t1, polychromatic) / delta ** 2


def mz_linear_threshold(p: SourceParams, layout: LayoutSpec) -> float:
    """
    Linearised eta/nbar threshold for any signal coherence:
    f^2 (q1 s2 + q2 s1) / q1^2 with q the photon placement and s the noise split
    """
    q = mz_photon_placement(p, layout).as_array()
    s = _mz_routing(layout, p.noise_coherence)
    f = mz_prefactor(layout.t1, layout.delta)
    return f * f * (q[0] * s[1] + q[1] * s[0]) / (q[0] * q[0])


def two_copy_tolerant_threshold(t: float) -> float:
    """eta/nbar > sqrt(1 - T), valid for 1 - T << 1"""
    return math.sqrt(1.0 - t)


def linear_threshold_ratio(layout: LayoutSpec, p: SourceParams) -> float:
    """Analytic small-signal eta/nbar threshold of a layout (dashed figure curves)"""
    if layout.kind is LayoutKind.UNBALANCED_BS:
        return 0.0
    if layout.kind is LayoutKind.MACH_ZEHNDER:
        return mz_linear_threshold(p, layout)
    if layout.kind is LayoutKind.TWO_COPY_VARIANT:
        return two_copy_tolerant_threshold(layout.t1)
    raise WrongLayoutException(f"No linear threshold law for layout '{layout.kind.value}'")
