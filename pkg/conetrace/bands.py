"""
Resonance-band thresholds and hypothesis checks for planar cone configurations.
"""
import itertools
import logging
import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from conetrace import defaults
from conetrace.diffraction import is_diffractive_cone
from conetrace.enumeration import chain_from_word
from conetrace.exceptions import GeometricTransitionPresent, InvalidInputError
from conetrace.objects.chain import DiffractiveClosedGeodesic
from conetrace.objects.cone_graph import ConeGraph

log = logging.getLogger(__name__)

ESCAPE_RATIONALE = ("Escape of all geodesics that miss the cone points is a global dynamical property of the "
                    "configuration; it cannot be decided from a finite description and is not assumed.")


class HypothesisStatus(str, Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'
    UNCHECKED = 'UNCHECKED'


class HypothesisResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: HypothesisStatus
    detail: str = ''


class HypothesisReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    no_three_collinear: HypothesisResult
    collinear_triples: List[List[str]] = []
    non_conjugate: HypothesisResult
    diffraction_nonzero: HypothesisResult
    non_diffractive_cones: List[str] = []
    escape: HypothesisResult

    @property
    def failed(self) -> List[str]:
        return [name for name in ('no_three_collinear', 'non_conjugate', 'diffraction_nonzero', 'escape')
                if getattr(self, name).status == HypothesisStatus.FAIL]


class RegionSpec(BaseModel):
    """``{lambda : Im lambda > -rho log|Re lambda|, |Re lambda| > 1 / rho}``."""
    model_config = ConfigDict(frozen=True)

    rho: float

    @property
    def description(self) -> str:
        return f"Im(lambda) > -{self.rho!r} * log|Re(lambda)|, |Re(lambda)| > {1 / self.rho!r}"

    def contains(self, lam: complex) -> bool:
        return bawu_region_contains(self.rho, lam)


class BandSpec(BaseModel):
    """``(-rho_star - epsilon) log|Re lambda| < Im lambda < (-rho_star + epsilon) log|Re lambda|``."""
    model_config = ConfigDict(frozen=True)

    rho_star: float
    epsilon: float
    lower_slope: float
    upper_slope: float
    description: str


class ChainThreshold(BaseModel):
    model_config = ConfigDict(frozen=True)

    chain_id: str
    segment: str
    length: float
    k: int
    rho: float


class ResonanceBandReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    d_max: float
    n: int
    rho_star: float
    band: BandSpec
    witness_chain: str
    witness_segment: str
    thresholds: List[ChainThreshold]
    hypotheses: HypothesisReport
    applicable: bool
    lower_bound: Dict[str, str]
    resolvent_estimate: Dict[str, str]
    sharpness: Dict[str, str]


def _require_points(config: ConeGraph, minimum: int = 2):
    if len(config.cone_points) < minimum:
        raise InvalidInputError(f"need at least {minimum} cone points, got {len(config.cone_points)}")


def _distinct_segments(config: ConeGraph):
    return [(i, s) for i, s in enumerate(config.segments) if s.a != s.b]


def dmax(config: ConeGraph) -> float:
    """Greatest length of a segment joining two distinct cone points."""
    _require_points(config)
    segments = _distinct_segments(config)
    if not segments:
        raise InvalidInputError("no segment joins two distinct cone points")
    return max(s.length for _, s in segments)


def hiwu_threshold(chain: DiffractiveClosedGeodesic, n: int) -> float:
    """``(n - 1) k / (2 L)``, the band slope beyond which a strictly diffractive chain produces resonances."""
    if chain.geometric:
        raise GeometricTransitionPresent(f"chain {chain.id} has a geometric transition")
    return (n - 1) * chain.k / (2 * chain.length)


def bawu_region_contains(rho: float, lam: complex) -> bool:
    """Membership of `lam` in ``Im lambda > -rho log|Re lambda|``, ``|Re lambda| > 1 / rho``."""
    if not rho > 0:
        raise InvalidInputError(f"rho must be positive, got {rho}")
    lam = complex(lam)
    re = abs(lam.real)
    if re <= 1 / rho:
        return False
    return lam.imag > -rho * math.log(re)


def back_and_forth(config: ConeGraph, segment_index: int) -> DiffractiveClosedGeodesic:
    """The chain running along a segment and straight back."""
    return chain_from_word(config, (2 * segment_index, 2 * segment_index + 1))


def _witness(config: ConeGraph):
    """Longest segment between distinct cone points, ties broken by segment id."""
    segments = _distinct_segments(config)
    if not segments:
        raise InvalidInputError("no segment joins two distinct cone points")
    longest = max(s.length for _, s in segments)
    return min((item for item in segments if item[1].length >= longest - defaults.LENGTH_DEDUP_TOL),
               key=lambda item: item[1].id)


def _positions(config: ConeGraph):
    if not config.has_positions:
        raise InvalidInputError("hypothesis checks need cone point positions")
    return {pid: p.position for pid, p in config.cone_points.items()}


def check_hypotheses(config: ConeGraph, tol: float = None) -> HypothesisReport:
    """
    Checklist of the resonance-band hypotheses.

    Collinearity is tested on all triples (triangle area against ``tol * scale ** 2``); conjugate points
    do not exist on flat surfaces; the diffraction coefficients along the witness chain must not vanish;
    escape of non-diffractive geodesics is reported as unchecked.
    """
    if tol is None:
        tol = defaults.COLLINEAR_TOL
    positions = _positions(config)
    ids = sorted(positions)
    points = [positions[i] for i in ids]
    scale = max((math.dist(p, q) for p, q in itertools.combinations(points, 2)), default=0.0)

    triples = []
    for (i, p), (j, q), (l, r) in itertools.combinations(zip(ids, points), 3):
        cross = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        if abs(cross) <= tol * scale ** 2:
            triples.append([i, j, l])
    collinear = HypothesisResult(status=HypothesisStatus.FAIL if triples else HypothesisStatus.PASS,
                                 detail=f"{len(triples)} collinear triples" if triples else '')

    non_diffractive = sorted(pid for pid, p in config.cone_points.items() if not is_diffractive_cone(p.circumference))
    if _distinct_segments(config):
        _, witness = _witness(config)
        on_witness = sorted({witness.a, witness.b} & set(non_diffractive))
        diffraction = HypothesisResult(
            status=HypothesisStatus.FAIL if on_witness else HypothesisStatus.PASS,
            detail=f"vanishing diffraction coefficient at {', '.join(on_witness)}" if on_witness else '')
    else:
        diffraction = HypothesisResult(status=HypothesisStatus.UNCHECKED, detail="no candidate chain")

    report = HypothesisReport(
        no_three_collinear=collinear,
        collinear_triples=triples,
        non_conjugate=HypothesisResult(status=HypothesisStatus.PASS,
                                       detail="flat metric, geodesics have no conjugate points"),
        diffraction_nonzero=diffraction,
        non_diffractive_cones=non_diffractive,
        escape=HypothesisResult(status=HypothesisStatus.UNCHECKED, detail=ESCAPE_RATIONALE),
    )
    if report.failed:
        log.warning(f"Hypotheses failed: {report.failed}")
    return report


def optimal_band(config: ConeGraph, n: int = None, epsilon: float = 0.1) -> ResonanceBandReport:
    """
    The logarithmic band of slope ``rho_star = (n - 1) / (2 D_max)``, its witness back-and-forth chain
    along the longest segment and the per-segment thresholds. Failed hypotheses mark the report as not
    applicable instead of raising.
    """
    n = n or config.dimension
    if not epsilon > 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    _require_points(config)
    hypotheses = check_hypotheses(config)

    index, segment = _witness(config)
    d_max = segment.length
    witness = back_and_forth(config, index)
    rho_star = hiwu_threshold(witness, n)

    thresholds = []
    for i, s in _distinct_segments(config):
        chain = back_and_forth(config, i)
        thresholds.append(ChainThreshold(chain_id=chain.id, segment=s.id, length=chain.length, k=chain.k,
                                         rho=hiwu_threshold(chain, n)))
    thresholds.sort(key=lambda c: (c.rho, c.chain_id))

    band = BandSpec(rho_star=rho_star, epsilon=epsilon, lower_slope=-rho_star - epsilon,
                    upper_slope=-rho_star + epsilon,
                    description=f"({-rho_star - epsilon!r}) log|Re(lambda)| < Im(lambda) < "
                                f"({-rho_star + epsilon!r}) log|Re(lambda)|")
    applicable = not hypotheses.failed
    log.debug(f"D_max={d_max}, rho_star={rho_star}, applicable={applicable}")
    return ResonanceBandReport(
        d_max=d_max, n=n, rho_star=rho_star, band=band,
        witness_chain=witness.id, witness_segment=segment.id,
        thresholds=thresholds, hypotheses=hypotheses, applicable=applicable,
        lower_bound={'statement': 'N_rho(r) >= C r^(1 - eps) for rho > rho_gamma',
                     'C': 'unspecified positive constant', 'eps': 'any eps > 0'},
        resolvent_estimate={'statement': '||chi R(lambda) chi|| <= C |lambda|^-1 exp(T |Im lambda|) '
                                         'in the region Im lambda > -rho log|Re lambda|, |Re lambda| > 1/rho',
                            'C': 'unspecified', 'T': 'unspecified'},
        sharpness={'statement': 'N_rho(r) is bounded for every rho < rho_star', 'rho_star': repr(rho_star)},
    )
