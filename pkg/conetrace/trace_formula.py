"""
Trace-singularity symbols of strictly diffractive closed chains and their time-domain form.

A chain of k diffractions on an n-dimensional flat cone surface contributes

    a(xi) = C * chi(xi) * xi ** (-s),   s = k (n - 1) / 2,
    C = L_0 (2 pi) ** (k n / 2) * exp(i k (n - 3) pi / 4) * prod_j i ** (-m_j) D_j W_j

to ``Tr U(t) ~ int exp(i (t - L) xi) a(xi) dxi``. For non-integer s the leading time-domain term is
``C Gamma(1 - s) exp(i pi (1 - s) / 2) (t - L + i0) ** (s - 1)``; for integer ``s = m`` it is
``-C i ** (m - 1) / (m - 1)! (t - L) ** (m - 1) log(t - L + i0)``. Both constants are re-derived by
:func:`calibrate_transform_constant` through :func:`numeric_symbol_transform`.
"""
import cmath
import csv
import logging
import math
import warnings
from fractions import Fraction
from functools import lru_cache
from typing import List, Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma, roots_legendre

from conetrace import defaults
from conetrace.diffraction import DiffractionCoefficient, diffraction_coefficient_closed
from conetrace.enumeration import enumerate_closed_chains
from conetrace.exceptions import (GeometricSingularity, GeometricTransitionPresent, InvalidInputError,
                                  MissingCoefficient, NonConvergent)
from conetrace.helper import content_hash
from conetrace.objects.chain import DiffractiveClosedGeodesic
from conetrace.objects.properties import ComplexNumber, Rational

log = logging.getLogger(__name__)

_I_POWERS = (1, 1j, -1, -1j)


def _bump_density(y):
    return math.exp(-1.0 / (y * (1.0 - y))) if 0.0 < y < 1.0 else 0.0


@lru_cache(maxsize=None)
def _bump_norm() -> float:
    return quad(_bump_density, 0.0, 1.0, epsabs=0.0, epsrel=1e-13)[0]


def bump_profile(x):
    """Normalized integral of the bump ``exp(-1 / (y (1 - y)))``."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 1.0, 1.0, 0.0)
    inside = (x > 0.0) & (x < 1.0)
    out[inside] = [quad(_bump_density, 0.0, v, epsabs=0.0, epsrel=1e-13)[0] / _bump_norm() for v in x[inside]]
    return out


def smoothstep_profile(x):
    """``f(x) / (f(x) + f(1 - x))`` with ``f(x) = exp(-1 / x)``."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 1.0, 1.0, 0.0)
    inside = (x > 0.0) & (x < 1.0)
    v = x[inside]
    f, g = np.exp(-1.0 / v), np.exp(-1.0 / (1.0 - v))
    out[inside] = f / (f + g)
    return out


PROFILES = {'bump': bump_profile, 'smoothstep': smoothstep_profile}


class CutoffSpec(BaseModel):
    """Smooth cutoff chi, 0 below `lower` and 1 above `upper`."""
    model_config = ConfigDict(frozen=True)

    lower: float = 0.0
    upper: float = 1.0
    profile: Literal['bump', 'smoothstep'] = defaults.CUTOFF_PROFILE

    def evaluate(self, xi):
        xi = np.asarray(xi, dtype=float)
        return PROFILES[self.profile]((xi - self.lower) / (self.upper - self.lower))


class SegmentData(BaseModel):
    """Segment weight, `w_factor` is ``length ** (-(n - 1) / 2) * theta ** (-1 / 2)``."""
    model_config = ConfigDict(frozen=True)

    length: float = Field(gt=0)
    morse_index: int = Field(default=0, ge=0)
    theta: float = Field(default=1.0, gt=0)
    w_factor: float = Field(gt=0)


class SymbolDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    chain_id: str
    location: float
    primitive_length: float
    k: int
    n: int
    exponent: Rational
    prefactor: ComplexNumber
    coefficients: List[ComplexNumber]
    segments: List[SegmentData]
    orientations: int = 1
    vanishing: bool = False
    cutoff: CutoffSpec = CutoffSpec()

    def evaluate(self, xi):
        """``a(xi) = C chi(xi) xi ** (-s)``."""
        xi = np.asarray(xi, dtype=float)
        positive = np.where(xi > 0, xi, 1.0)
        return np.where(xi > 0, self.prefactor * self.cutoff.evaluate(xi) * positive ** (-float(self.exponent)), 0j)


class SingularityDescriptor(BaseModel):
    """
    Predicted singularity of the wave trace at `location`:
    ``coefficient * (t - L + i0) ** exponent``, times ``log(t - L + i0)`` when `log_flag` is set.
    """
    model_config = ConfigDict(frozen=True)

    location: float
    exponent: Rational
    log_flag: bool
    coefficient: ComplexNumber
    k: int
    n: int
    chain_ids: List[str]
    multiplicity: int = 1
    provenance: str
    sign_convention: str = defaults.SIGN_CONVENTION


class CalibrationRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: Rational
    profile: str
    taus: List[float]
    analytic: ComplexNumber
    numeric: ComplexNumber
    relative_error: float
    run_id: str


def oracle_run_id(profile: str = None, taus: Sequence[float] = None) -> str:
    """Identifier of a numeric oracle configuration."""
    return content_hash({'procedure': 'two-point elimination of numeric_symbol_transform',
                         'profile': profile or defaults.CUTOFF_PROFILE,
                         'taus': list(taus or defaults.CALIBRATION_TAUS),
                         'nodes': defaults.TRANSFORM_NODES,
                         'horizon': defaults.TRANSFORM_HORIZON,
                         'epsrel': defaults.TRANSFORM_EPSREL})


TRANSFORM_ORACLE_ID = oracle_run_id()


def segment_amplitude(segment, n: int) -> SegmentData:
    """
    Spreading weight of a segment on a flat surface: ``W = length ** (-(n - 1) / 2)``, Morse index 0, Theta 1.

    :param segment: Anything with a `length`, or the length itself.
    """
    length = float(getattr(segment, 'length', segment))
    if not length > 0:
        raise InvalidInputError(f"segment length must be positive, got {length}")
    return SegmentData(length=length, morse_index=0, theta=1.0, w_factor=length ** (-(n - 1) / 2))


def _coefficient_value(coefficient) -> complex:
    if coefficient is None:
        raise MissingCoefficient("diffraction coefficient missing")
    value = coefficient.value if isinstance(coefficient, DiffractionCoefficient) else complex(coefficient)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise MissingCoefficient(f"diffraction coefficient is not finite: {value}")
    return value


def assemble_symbol(chain: DiffractiveClosedGeodesic, n: int,
                    coefficients: Sequence[Union[DiffractionCoefficient, complex]],
                    cutoff: CutoffSpec = None) -> SymbolDescriptor:
    """
    Symbol of a strictly diffractive closed chain.

    :param chain: The chain, its primitive length enters the prefactor.
    :param n: Dimension of the surface.
    :param coefficients: One diffraction coefficient per transition, in chain order.
    """
    if chain.geometric:
        raise GeometricTransitionPresent(f"chain {chain.id} has a geometric transition")
    if coefficients is None or len(coefficients) != chain.k:
        got = 0 if coefficients is None else len(coefficients)
        raise MissingCoefficient(f"chain {chain.id} needs {chain.k} diffraction coefficients, got {got}")
    values = [_coefficient_value(c) for c in coefficients]
    segments = [segment_amplitude(t, n) for t in chain.traversals]
    vanishing = any(isinstance(c, DiffractionCoefficient) and c.diffractive is False for c in coefficients) \
        or any(v == 0 for v in values)

    k = chain.k
    if vanishing:
        prefactor = 0j
    else:
        prefactor = complex(chain.primitive_length * (2 * math.pi) ** (k * n / 2)) \
            * cmath.exp(1j * k * (n - 3) * math.pi / 4)
        for value, segment in zip(values, segments):
            prefactor *= _I_POWERS[(-segment.morse_index) % 4] * value * segment.w_factor

    return SymbolDescriptor(chain_id=chain.id, location=chain.length, primitive_length=chain.primitive_length,
                            k=k, n=n, exponent=Fraction(k * (n - 1), 2), prefactor=prefactor,
                            coefficients=values, segments=segments, orientations=chain.orientations,
                            vanishing=vanishing, cutoff=cutoff or CutoffSpec())


def transform_constant(s: Fraction) -> complex:
    """
    Leading constant of the Fourier transform of ``chi(xi) xi ** (-s)``: multiplies ``(tau + i0) ** (s - 1)``
    for non-integer s, and ``tau ** (m - 1) log(tau + i0)`` for ``s = m``.
    """
    s = Fraction(s)
    if s <= 0:
        raise InvalidInputError(f"symbol exponent must be positive, got {s}")
    if s.denominator == 1:
        m = int(s)
        return complex(-_I_POWERS[(m - 1) % 4]) / math.factorial(m - 1)
    return complex(gamma(float(1 - s))) * cmath.exp(1j * math.pi * float(1 - s) / 2)


def time_domain_singularity(symbol: SymbolDescriptor) -> SingularityDescriptor:
    s = Fraction(symbol.exponent)
    coefficient = 0j if symbol.vanishing else symbol.prefactor * transform_constant(s)
    return SingularityDescriptor(location=symbol.location, exponent=s - 1, log_flag=s.denominator == 1,
                                 coefficient=coefficient, k=symbol.k, n=symbol.n, chain_ids=[symbol.chain_id],
                                 provenance=TRANSFORM_ORACLE_ID)


class TransformSeries:
    """Numeric symbol transform on a time grid."""

    def __init__(self, t, values, location: float, exponent, taper: float = 0.0):
        self.t = np.asarray(t, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        self.location = location
        self.exponent = Fraction(exponent)
        self.taper = taper

    def __str__(self):
        return f"<TransformSeries (L={self.location:.6g}; s={self.exponent}; {len(self.t)} points)>"

    def to_csv(self, filepath: str, manifest_id: str = None) -> str:
        """
        CSV with columns ``t, re, im, abs``, floats with 17 significant digits, after an optional
        ``# manifest_id: ...`` line.
        """
        log.debug(f"Create CSV file {filepath} for {self}")
        with open(filepath, 'w', newline='') as csvfile:
            if manifest_id:
                csvfile.write(f"# manifest_id: {manifest_id}\n")
            writer = csv.writer(csvfile)
            writer.writerow(['t', 're', 'im', 'abs'])
            for t, v in zip(self.t, self.values):
                writer.writerow([defaults.CSV_FLOAT_FORMAT % x for x in (t, v.real, v.imag, abs(v))])
        return filepath


@lru_cache(maxsize=8)
def _weighted_nodes(profile: str, nodes: int):
    x, w = roots_legendre(nodes)
    x = (x + 1) / 2
    return x, w / 2 * PROFILES[profile](x)


def _quad_part(f, a, b):
    return quad(f, a, b, epsabs=defaults.TRANSFORM_EPSABS, epsrel=defaults.TRANSFORM_EPSREL, limit=200)[0]


def _tail_integral(z: complex, s: float) -> complex:
    """``int_1^inf xi ** (-s) exp(i z xi) dxi``, contour turned onto ``xi = 1 + i x / z``."""
    def integrand(x):
        return (1 + 1j * x / z) ** (-s) * math.exp(-x)

    horizon = defaults.TRANSFORM_HORIZON
    scale = abs(z)
    if scale < horizon:
        inner = np.geomspace(scale, horizon, max(2, int(math.ceil(math.log2(horizon / scale))) + 1))
        breakpoints = [0.0] + list(inner)
    else:
        breakpoints = [0.0, horizon]
    total = 0j
    for a, b in zip(breakpoints, breakpoints[1:]):
        total += complex(_quad_part(lambda x: integrand(x).real, a, b),
                         _quad_part(lambda x: integrand(x).imag, a, b))
    return 1j / z * cmath.exp(1j * z) * total


def numeric_symbol_transform(symbol: SymbolDescriptor, t_grid, taper: float = 0.0) -> TransformSeries:
    """
    ``C * int_0^inf exp(i (t - L + i taper) xi) chi(xi) xi ** (-s) dxi`` on `t_grid`.

    The part on [0, 1] uses Gauss-Legendre nodes, the tail is integrated along a turned contour, so
    ``taper = 0`` is allowed away from ``t = L``.

    :raises NonConvergent: if the quadrature fails, or at ``t = L`` without taper when ``s <= 1``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if taper < 0:
        raise InvalidInputError(f"taper must be non-negative, got {taper}")
    if symbol.prefactor == 0 or symbol.vanishing:
        return TransformSeries(t_grid, np.zeros(len(t_grid), dtype=complex), symbol.location, symbol.exponent, taper)

    if (symbol.cutoff.lower, symbol.cutoff.upper) != (0.0, 1.0):
        raise InvalidInputError("numeric transform supports the cutoff on [0, 1] only")
    s = float(symbol.exponent)
    x, wchi = _weighted_nodes(symbol.cutoff.profile, defaults.TRANSFORM_NODES)
    head_weights = wchi * x ** (-s)
    zs = (t_grid - symbol.location) + 1j * taper

    values = np.empty(len(zs), dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter('error', IntegrationWarning)
        for i, z in enumerate(zs):
            head = complex(np.sum(np.exp(1j * z * x) * head_weights))
            if z == 0:
                if s <= 1:
                    raise NonConvergent(f"symbol transform diverges at t = L for s = {symbol.exponent}")
                tail = 1 / (s - 1)
            else:
                try:
                    tail = _tail_integral(z, s)
                except IntegrationWarning as e:
                    raise NonConvergent(f"quadrature did not converge at t - L = {z}: {e}")
            values[i] = symbol.prefactor * (head + tail)
    log.debug(f"Numeric transform of {symbol.chain_id} on {len(zs)} points")
    return TransformSeries(t_grid, values, symbol.location, symbol.exponent, taper)


def _unit_symbol(s: Fraction, profile: str) -> SymbolDescriptor:
    return SymbolDescriptor(chain_id='unit', location=0.0, primitive_length=1.0, k=1, n=2, exponent=s,
                            prefactor=1 + 0j, coefficients=[1 + 0j], segments=[segment_amplitude(1.0, 2)],
                            cutoff=CutoffSpec(profile=profile))


def calibrate_transform_constant(s, profile: str = None, taus: Sequence[float] = None) -> CalibrationRecord:
    """
    Re-derive :func:`transform_constant` from :func:`numeric_symbol_transform` for ``0 < s <= 1``.

    The transform of a unit symbol is sampled at two small offsets and the leading term separated from
    the constant background.
    """
    s = Fraction(s)
    profile = profile or defaults.CUTOFF_PROFILE
    taus = list(taus or defaults.CALIBRATION_TAUS)
    if not 0 < s <= 1:
        raise InvalidInputError(f"calibration covers 0 < s <= 1, got {s}")
    if len(taus) != 2 or taus[0] == taus[1] or min(taus) <= 0:
        raise InvalidInputError(f"calibration needs two distinct positive offsets, got {taus}")

    series = numeric_symbol_transform(_unit_symbol(s, profile), taus)
    f1, f2 = series.values
    if s == 1:
        numeric = (f1 - f2) / (math.log(taus[0]) - math.log(taus[1]))
    else:
        numeric = (f1 - f2) / (taus[0] ** float(s - 1) - taus[1] ** float(s - 1))
    analytic = transform_constant(s)
    record = CalibrationRecord(s=s, profile=profile, taus=taus, analytic=analytic, numeric=numeric,
                               relative_error=abs(numeric - analytic) / abs(analytic),
                               run_id=oracle_run_id(profile, taus))
    log.debug(f"Calibrated s={s} ({profile}): relative error {record.relative_error:.3g}")
    return record


def predict_singularities(graph, max_length: float, max_diffractions: int = None, n: int = None,
                          chains: Sequence[DiffractiveClosedGeodesic] = None, cutoff: CutoffSpec = None,
                          tol: float = None, **kwargs) -> List[SingularityDescriptor]:
    """
    Time-domain singularities of all strictly diffractive closed chains up to `max_length`.

    Chains through a non-diffractive cone give no singularity. Contributions of the same order at
    lengths equal within `tol` are summed, each chain counted once per orientation.
    """
    n = n or graph.dimension
    if n != 2:
        raise InvalidInputError("closed form diffraction coefficients exist for circle links (n = 2) only")
    if tol is None:
        tol = defaults.LENGTH_DEDUP_TOL
    if chains is None:
        chains = enumerate_closed_chains(graph, max_length, max_diffractions, **kwargs)

    singularities = []
    for chain in chains:
        if chain.geometric:
            log.debug(f"Skip {chain.id}, geometric transition")
            continue
        try:
            coefficients = [diffraction_coefficient_closed(tr.circumference, tr.theta_in, tr.theta_out)
                            for tr in chain.transitions]
        except GeometricSingularity as e:
            log.warning(f"Skip {chain.id}: {e}")
            continue
        symbol = assemble_symbol(chain, n, coefficients, cutoff=cutoff)
        if symbol.vanishing:
            continue
        singularity = time_domain_singularity(symbol)
        if chain.orientations == 2:
            singularity = singularity.model_copy(update={'coefficient': 2 * singularity.coefficient,
                                                         'multiplicity': 2})
        singularities.append(singularity)

    return sum_coincident(singularities, tol=tol)


def sum_coincident(singularities: Sequence[SingularityDescriptor], tol: float = None) -> List[SingularityDescriptor]:
    """Sum descriptors of equal order whose locations agree within `tol`."""
    if tol is None:
        tol = defaults.LENGTH_DEDUP_TOL
    groups = []
    for d in sorted(singularities, key=lambda d: (d.exponent, d.location, d.chain_ids)):
        last = groups[-1] if groups else None
        if last and last[0].exponent == d.exponent and d.location - last[0].location <= tol:
            last.append(d)
        else:
            groups.append([d])

    summed = []
    for group in groups:
        first = group[0]
        summed.append(SingularityDescriptor(
            location=first.location, exponent=first.exponent, log_flag=first.log_flag,
            coefficient=sum((d.coefficient for d in group), 0j),
            k=min(d.k for d in group), n=first.n,
            chain_ids=sorted(i for d in group for i in d.chain_ids),
            multiplicity=sum(d.multiplicity for d in group),
            provenance=first.provenance, sign_convention=first.sign_convention))
    return sorted(summed, key=lambda d: (d.location, d.exponent))
