"""
Fock Oracle - brute-force photon-number simulation of click statistics

Photons carry labels; photons sharing a label are indistinguishable and their
output distribution comes from matrix permanents, photons with different
labels combine as independent click patterns (logical OR of fired sets).
Small scale only: a few modes, a few photons per branch.
"""
import itertools
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import poisson
from thewalrus import perm

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.detection.click_model import ClickStats, DetectorModel, Provenance
from modules.network.layouts import LayoutKind, LayoutSpec
from modules.network.transfer import bs_matrix
from modules.source.source_model import SourceParams
from modules.utils.exceptions import DimensionMismatchException, OracleException, TailMassException
from modules.utils.logger import get_logger

logger = get_logger(__name__)

# (label, occupation per input slot); slot c feeds layout.input_ports[c]
Group = Tuple[str, Tuple[int, ...]]
Branch = Tuple[Group, ...]


@dataclass
class JointPhotonDist:
    cutoff: int
    slots: int
    probs: Dict[Branch, float]
    visibility: Dict[str, float] = field(default_factory=dict)
    tail_mass: float = 0.0

    def __post_init__(self):
        if any(w < 0 for w in self.probs.values()):
            raise OracleException("Negative branch weight")
        total = self.total()
        tol = config.ORACLE_CONFIG['tail_tol']
        if abs(total + self.tail_mass - 1.0) > tol:
            raise OracleException(f"Branch weights sum to {total:.15f} (tail {self.tail_mass:.2e})")

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def photon_presence(self) -> Dict[Tuple[int, ...], float]:
        """Weight per total photon count in each slot"""
        out: Dict[Tuple[int, ...], float] = {}
        for branch, w in self.probs.items():
            counts = tuple(sum(occ[c] for _, occ in branch) for c in range(self.slots))
            out[counts] = out.get(counts, 0.0) + w
        return out


# ──────────────────────────────────────────────
# Building photon-number distributions
# ──────────────────────────────────────────────

def _check_cutoff(cutoff: int) -> int:
    opts = config.ORACLE_CONFIG
    cutoff = int(cutoff)
    if cutoff < opts['min_cutoff']:
        raise OracleException(f"cutoff must be >= {opts['min_cutoff']}, got {cutoff}")
    return cutoff


def _poisson_weights(mean: float, cutoff: int) -> np.ndarray:
    tail = float(poisson.sf(cutoff, mean)) if mean > 0 else 0.0
    if tail > config.ORACLE_CONFIG['tail_tol']:
        raise TailMassException(
            f"Poisson tail {tail:.3e} beyond cutoff {cutoff} for mean {mean:g}; raise the cutoff"
        )
    return poisson.pmf(np.arange(cutoff + 1), mean) if mean > 0 else np.eye(1, cutoff + 1)[0]


def _unit(slots: int, c: int) -> Tuple[int, ...]:
    return tuple(1 if k == c else 0 for k in range(slots))


def _add(probs: Dict[Branch, float], branch, weight: float):
    if weight <= 0.0:
        return
    key = tuple(sorted(branch))
    probs[key] = probs.get(key, 0.0) + weight


def build_source_dist(p: SourceParams, copies: int, cutoff: Optional[int] = None) -> JointPhotonDist:
    """
    Per copy: a single photon with probability eta and a truncated Poisson
    number of background photons, every background photon its own label.
    Two emitted photons share a label with weight I.
    """
    if copies not in (1, 2):
        raise OracleException(f"copies must be 1 or 2, got {copies}")
    cutoff = _check_cutoff(config.ORACLE_CONFIG['cutoff'] if cutoff is None else cutoff)
    noise = _poisson_weights(p.nbar, cutoff)
    tail = 1.0 - math.fsum(noise)

    per_copy = []
    for c in range(copies):
        options = []
        for signal, ws in ((0, 1.0 - p.eta), (1, p.eta)):
            for k, wk in enumerate(noise):
                if ws * wk > 0:
                    groups = [(f"noise:{c + 1}:{j + 1}", _unit(copies, c)) for j in range(k)]
                    options.append((signal, groups, ws * wk))
        per_copy.append(options)

    probs: Dict[Branch, float] = {}
    pruned = 0.0
    for combo in itertools.product(*per_copy):
        weight = math.prod(w for _, _, w in combo)
        if weight < config.ORACLE_CONFIG['prune_tol']:
            pruned += weight
            continue
        noise_groups = [g for _, groups, _ in combo for g in groups]
        emitted = [c for c, (signal, _, _) in enumerate(combo) if signal]
        if len(emitted) == 2:
            _add(probs, noise_groups + [("signal", (1, 1))], weight * p.indistinguishability)
            _add(probs, noise_groups + [("signal:1", (1, 0)), ("signal:2", (0, 1))],
                 weight * (1.0 - p.indistinguishability))
        else:
            signal_groups = [(f"signal:{c + 1}", _unit(copies, c)) for c in emitted]
            _add(probs, noise_groups + signal_groups, weight)

    copies_tail = 1.0 - (1.0 - tail) ** copies + pruned
    return JointPhotonDist(cutoff, copies, probs,
                           {'signal': p.signal_coherence, 'noise': p.noise_coherence}, copies_tail)


def build_phase_randomized_dist(magnitudes: Sequence[float], cutoff: Optional[int] = None) -> JointPhotonDist:
    """
    Independently phase-randomized coherent states: Poisson photon numbers
    |alpha_c|^2 per slot, all photons in one label (same optical mode)
    """
    opts = config.ORACLE_CONFIG
    cutoff = _check_cutoff(opts['cutoff'] if cutoff is None else cutoff)
    weights = [_poisson_weights(float(m) ** 2, cutoff) for m in magnitudes]
    tail = 1.0 - math.prod(math.fsum(w) for w in weights)

    probs: Dict[Branch, float] = {}
    pruned = 0.0
    for counts in itertools.product(range(cutoff + 1), repeat=len(magnitudes)):
        weight = math.prod(w[n] for w, n in zip(weights, counts))
        if weight < opts['prune_tol']:
            pruned += weight
            continue
        branch = (("coherent", tuple(counts)),) if sum(counts) else ()
        _add(probs, branch, weight)
    if pruned + tail > opts['tail_tol']:
        raise TailMassException(f"Dropped mass {pruned + tail:.3e} above {opts['tail_tol']:g}")
    return JointPhotonDist(cutoff, len(magnitudes), probs, {'coherent': 1.0}, tail + pruned)


# ──────────────────────────────────────────────
# Propagation
# ──────────────────────────────────────────────

def permanent(mat: np.ndarray) -> complex:
    mat = np.asarray(mat, dtype=complex)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise DimensionMismatchException(f"Permanent needs a square matrix, got {mat.shape}")
    if n == 0:
        return 1.0 + 0j
    return complex(perm(mat))


def _compositions(total: int, parts: int):
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        edges = (-1,) + cut + (total + parts - 1,)
        yield tuple(edges[i + 1] - edges[i] - 1 for i in range(parts))


def fock_output_distribution(matrix: np.ndarray, occupation: Sequence[int]) -> Dict[Tuple[int, ...], float]:
    """Output photon-number distribution of one label group, u = A v convention"""
    occupation = tuple(int(n) for n in occupation)
    dim = matrix.shape[0]
    cols = [k for k, n in enumerate(occupation) for _ in range(n)]
    norm_in = math.prod(math.factorial(n) for n in occupation)
    out = {}
    for m in _compositions(sum(occupation), dim):
        rows = [j for j, n in enumerate(m) for _ in range(n)]
        amp = permanent(matrix[np.ix_(rows, cols)])
        prob = abs(amp) ** 2 / (norm_in * math.prod(math.factorial(n) for n in m))
        if prob > 0:
            out[m] = prob
    return out


def _mz_incoherent_routing(layout: LayoutSpec, port: int) -> np.ndarray:
    """Which-path mixture through both beam splitters, outputs ordered as the layout"""
    path = np.abs(bs_matrix(layout.t2).entries) ** 2 @ np.abs(bs_matrix(layout.t1).entries) ** 2
    return path[[1, 0], port]


def _click_patterns(output: Dict[Tuple[int, ...], float], nu: np.ndarray) -> np.ndarray:
    """Photon-number distribution to click-pattern distribution (bitmask index)"""
    dim = len(nu)
    dist = np.zeros(1 << dim)
    for m, prob in output.items():
        miss = (1.0 - nu) ** np.asarray(m)
        for mask in range(1 << dim):
            p = prob
            for j in range(dim):
                p *= (1.0 - miss[j]) if mask >> j & 1 else miss[j]
            dist[mask] += p
    return dist


def _or_convolve(d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    out = np.zeros_like(d1)
    for m1 in np.nonzero(d1)[0]:
        for m2 in np.nonzero(d2)[0]:
            out[m1 | m2] += d1[m1] * d2[m2]
    return out


class FockPropagator:
    """Caches one click-pattern distribution per (label kind, occupation)"""

    def __init__(self, layout: LayoutSpec, det: Optional[DetectorModel] = None):
        self.layout = layout
        self.det = DetectorModel.ideal(layout.dim) if det is None else det
        self.nu = self.det.nu
        if len(self.nu) != layout.dim:
            raise DimensionMismatchException(f"{len(self.nu)} detectors for a {layout.dim}-mode layout")
        self.matrix = layout.matrix().entries
        self._cache: Dict[Tuple[str, Tuple[int, ...], float], np.ndarray] = {}

    def _ports(self, occupation: Tuple[int, ...]) -> Tuple[int, ...]:
        full = [0] * self.layout.dim
        for c, n in enumerate(occupation):
            full[self.layout.input_ports[c]] += n
        return tuple(full)

    def group_patterns(self, kind: str, occupation: Tuple[int, ...], visibility: float) -> np.ndarray:
        key = (kind, occupation, visibility)
        if key not in self._cache:
            ports = self._ports(occupation)
            output = fock_output_distribution(self.matrix, ports)
            if visibility < 1.0 and self.layout.kind is LayoutKind.MACH_ZEHNDER:
                if sum(ports) != 1:
                    raise OracleException("Partial Mach-Zehnder visibility needs single-photon groups")
                incoherent = _mz_incoherent_routing(self.layout, ports.index(1))
                output = {
                    (1, 0): visibility * output.get((1, 0), 0.0) + (1.0 - visibility) * incoherent[0],
                    (0, 1): visibility * output.get((0, 1), 0.0) + (1.0 - visibility) * incoherent[1],
                }
            self._cache[key] = _click_patterns(output, self.nu)
        return self._cache[key]

    def branch_patterns(self, branch: Branch, visibility: Dict[str, float]) -> np.ndarray:
        dist = np.zeros(1 << self.layout.dim)
        dist[0] = 1.0
        for label, occupation in branch:
            kind = label.split(':')[0]
            dist = _or_convolve(dist, self.group_patterns(kind, occupation, visibility.get(kind, 1.0)))
        return dist


def propagate_and_click(dist: JointPhotonDist, layout: LayoutSpec,
                        det: Optional[DetectorModel] = None) -> Dict[FrozenSet[int], float]:
    """Probability of every click pattern, keyed by the 1-based fired detectors"""
    if dist.slots != len(layout.input_ports):
        raise DimensionMismatchException(
            f"Distribution over {dist.slots} inputs, layout {layout.label()} has {len(layout.input_ports)}"
        )
    prop = FockPropagator(layout, det)
    total = np.zeros(1 << layout.dim)
    for branch, weight in dist.probs.items():
        total += weight * prop.branch_patterns(branch, dist.visibility)
    logger.debug(f"Oracle on {layout.label()}: {len(dist.probs)} branches, mass {total.sum():.15f}")
    return {
        frozenset(j + 1 for j in range(layout.dim) if mask >> j & 1): float(total[mask])
        for mask in range(1 << layout.dim)
    }


def pattern_stats(patterns: Dict[FrozenSet[int], float], layout: LayoutSpec) -> ClickStats:
    """P_s and P_e: every detector of the pattern clicks, others unconstrained"""
    p_s = math.fsum(w for fired, w in patterns.items() if layout.success_pattern <= fired)
    p_e = math.fsum(w for fired, w in patterns.items() if layout.error_pattern <= fired)
    return ClickStats(p_s, p_e, Provenance.ORACLE, layout.label())


def oracle_click_stats(p: SourceParams, layout: LayoutSpec, det: Optional[DetectorModel] = None,
                       cutoff: Optional[int] = None) -> ClickStats:
    dist = build_source_dist(p, layout.copies, cutoff)
    return pattern_stats(propagate_and_click(dist, layout, det), layout)
