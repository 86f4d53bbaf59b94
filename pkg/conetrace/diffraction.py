"""
Diffraction coefficients: the kernel of the half Klein-Gordon group ``exp(-i*pi*nu)`` on a cone link,
``nu = sqrt(Delta_Y + ((2 - n) / 2) ** 2)``, taken with respect to the arc-length measure of the link.

On a circle link of circumference ``alpha`` (n = 2) the Abel summed mode series

    (1 / alpha) * sum_k exp(-i * pi * |omega k|) * exp(i * omega * k * delta),  omega = 2 pi / alpha

sums to ``(i / (2 alpha)) * (cot(pi (delta - pi) / alpha) - cot(pi (delta + pi) / alpha))`` where
``delta = theta_in - theta_out``. The kernel is singular exactly where ``delta +- pi`` is a multiple of
``alpha``, i.e. where a (possibly winding) link geodesic of length pi joins the two points.
"""
import logging
import math
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from conetrace import defaults
from conetrace.exceptions import GeometricSingularity, InvalidInputError, NonConvergent
from conetrace.helper import distance_to_lattice
from conetrace.objects.cone_graph import link_distance
from conetrace.objects.properties import ComplexNumber

log = logging.getLogger(__name__)


class Method(str, Enum):
    CLOSED_FORM = 'ClosedForm'
    MODE_SUM = 'ModeSum'


class DiffractionCoefficient(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: ComplexNumber
    method: Method
    circumference: Optional[float] = None
    theta_in: Optional[float] = None
    theta_out: Optional[float] = None
    diffractive: Optional[bool] = None
    residual: Optional[float] = None
    modes: Optional[int] = None
    damping: Optional[Sequence[float]] = None
    sign_convention: str = defaults.SIGN_CONVENTION

    def __str__(self):
        return f"<DiffractionCoefficient ({self.value.real:.6g}{self.value.imag:+.6g}j; {self.method.value})>"


class LinkSpectrum:
    """
    Truncated eigen-expansion of a link: eigenvalues of the link Laplacian and eigenfunction values at
    the entry point `y` and exit point `y'`. Orthonormality is the caller's responsibility.

    :param eigenvalues: Nondecreasing, non-negative eigenvalues.
    :param phi_in: Eigenfunction values at the entry point.
    :param phi_out: Eigenfunction values at the exit point.
    :param dimension: Dimension n of the cone manifold, the link has dimension n - 1.
    """

    def __init__(self, eigenvalues, phi_in, phi_out, dimension: int = 2, circumference: float = None,
                 theta_in: float = None, theta_out: float = None):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.phi_in = np.asarray(phi_in, dtype=complex)
        self.phi_out = np.asarray(phi_out, dtype=complex)
        if not (self.eigenvalues.shape == self.phi_in.shape == self.phi_out.shape) or self.eigenvalues.ndim != 1:
            raise InvalidInputError("eigenvalues and eigenfunction values must be 1D arrays of equal length")
        if np.any(self.eigenvalues < 0) or not np.all(np.isfinite(self.eigenvalues)):
            raise InvalidInputError("link eigenvalues must be finite and non-negative")
        if np.any(np.diff(self.eigenvalues) < 0):
            raise InvalidInputError("link eigenvalues must be nondecreasing")
        self.dimension = dimension
        self.circumference = circumference
        self.theta_in = theta_in
        self.theta_out = theta_out

    def __len__(self):
        return len(self.eigenvalues)

    def __str__(self):
        return f"<LinkSpectrum ({len(self)} modes; n={self.dimension})>"

    @property
    def shift(self) -> float:
        return ((2 - self.dimension) / 2) ** 2

    @property
    def nu(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues + self.shift)


def is_diffractive_cone(alpha: float, tol: float = None) -> bool:
    """
    False iff 2 pi / alpha is a positive integer, the cone is then a quotient of the plane and the
    diffraction coefficient vanishes identically.
    """
    if not alpha > 0:
        raise InvalidInputError(f"cone angle must be positive, got {alpha}")
    if tol is None:
        tol = defaults.DIFFRACTIVE_CONE_TOL
    ratio = 2 * math.pi / alpha
    nearest = round(ratio)
    return not (nearest >= 1 and abs(ratio - nearest) <= tol * max(1.0, ratio))


def closed_form_value(alpha: float, delta: float) -> complex:
    """
    Raw closed form ``(i / 2 alpha) (cot A - cot B)`` written as ``sin(B - A) / (sin A sin B)``,
    exactly even in `delta`. No guards.
    """
    numerator = math.sin(2 * math.pi ** 2 / alpha)
    denominator = math.sin(math.pi * (delta - math.pi) / alpha) * math.sin(math.pi * (delta + math.pi) / alpha)
    return complex(0.0, numerator / (2 * alpha * denominator))


def diffraction_coefficient_closed(alpha: float, theta_in: float, theta_out: float,
                                   tol: float = None) -> DiffractionCoefficient:
    """
    Diffraction coefficient of a circle link of circumference `alpha` in closed form.

    :param tol: Singularity guard on the link distance, defaults to
        :data:`conetrace.defaults.COEFFICIENT_GUARD_TOL`.
    :raises GeometricSingularity: if the points are joined by a link geodesic of length pi.
    """
    if tol is None:
        tol = defaults.COEFFICIENT_GUARD_TOL
    diffractive = is_diffractive_cone(alpha)
    if abs(link_distance(alpha, theta_in, theta_out) - math.pi) <= tol:
        raise GeometricSingularity(
            f"link points {theta_in} and {theta_out} on a link of length {alpha} are at distance pi")

    if not diffractive:
        value = 0j
    else:
        delta = theta_in - theta_out
        if min(distance_to_lattice(delta - math.pi, alpha), distance_to_lattice(delta + math.pi, alpha)) <= tol:
            raise GeometricSingularity(
                f"link points {theta_in} and {theta_out} on a link of length {alpha} are joined by a "
                f"winding link geodesic of length pi")
        value = closed_form_value(alpha, delta)

    return DiffractionCoefficient(value=value, method=Method.CLOSED_FORM, circumference=alpha,
                                  theta_in=theta_in, theta_out=theta_out, diffractive=diffractive)


def circle_link_spectrum(alpha: float, theta_in: float, theta_out: float, modes: int = None,
                         schedule: Sequence[float] = None) -> LinkSpectrum:
    """
    Exponential eigenbasis ``exp(2 pi i k theta / alpha) / sqrt(alpha)``, ``|k| <= K``, of a circle link.

    Without `modes` the truncation K is chosen so that the smallest damping of `schedule` has decayed
    the dropped modes below double precision, and never below :data:`conetrace.defaults.DEFAULT_MODES`.
    """
    if not alpha > 0:
        raise InvalidInputError(f"cone angle must be positive, got {alpha}")
    omega = 2 * math.pi / alpha
    if modes is None:
        schedule = schedule or defaults.DAMPING_SCHEDULE
        needed = math.ceil(defaults.MODE_DECAY_LENGTHS / (math.pi * min(schedule) * omega))
        modes = max(defaults.DEFAULT_MODES, needed)

    ks = np.arange(-modes, modes + 1)
    eigenvalues = (omega * ks) ** 2
    order = np.argsort(eigenvalues, kind='stable')
    ks = ks[order]
    norm = 1 / math.sqrt(alpha)
    return LinkSpectrum(eigenvalues=eigenvalues[order],
                        phi_in=norm * np.exp(1j * omega * ks * theta_in),
                        phi_out=norm * np.exp(1j * omega * ks * theta_out),
                        dimension=2, circumference=alpha, theta_in=theta_in, theta_out=theta_out)


def richardson_tableau(values: Sequence[complex], steps: Sequence[float], order: int = None) -> list:
    """
    Neville tableau extrapolating ``values[i] = f(steps[i])`` to step 0.

    Row i holds the extrapolants ``R[i][0..min(i, order)]``.
    """
    rows = []
    for i, (value, h) in enumerate(zip(values, steps)):
        row = [value]
        for j in range(1, i + 1 if order is None else min(i, order) + 1):
            ratio = h / (steps[i - j] - h)
            row.append(row[j - 1] + (row[j - 1] - rows[i - 1][j - 1]) * ratio)
        rows.append(row)
    return rows


def diffraction_coefficient_modesum(spectrum: LinkSpectrum, schedule: Sequence[float] = None,
                                    order: int = None, tol: float = None) -> DiffractionCoefficient:
    """
    Abel damped mode sum ``sum_k exp(-pi eps nu_k) exp(-i pi nu_k) phi_k(y) conj(phi_k(y'))``,
    evaluated on the damping `schedule` and extrapolated to ``eps = 0``.

    :param schedule: Strictly decreasing positive dampings, at least two.
    :param order: Highest extrapolation order, None uses the full tableau.
    :param tol: Maximal difference of the last two extrapolants.
    :raises NonConvergent: if the extrapolation has not settled.
    """
    schedule = tuple(schedule or defaults.DAMPING_SCHEDULE)
    if tol is None:
        tol = defaults.EXTRAPOLATION_TOL
    if len(schedule) < 2:
        raise InvalidInputError("damping schedule needs at least two values")
    if any(e <= 0 for e in schedule) or any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise InvalidInputError(f"damping schedule must be strictly decreasing and positive: {schedule}")

    meta = dict(method=Method.MODE_SUM, circumference=spectrum.circumference, theta_in=spectrum.theta_in,
                theta_out=spectrum.theta_out, modes=len(spectrum), damping=schedule)
    if spectrum.circumference is not None:
        meta['diffractive'] = is_diffractive_cone(spectrum.circumference)
    if len(spectrum) == 0:
        return DiffractionCoefficient(value=0j, residual=0.0, **meta)

    nu = spectrum.nu
    undamped = np.exp(-1j * math.pi * nu) * spectrum.phi_in * np.conj(spectrum.phi_out)
    sums = [complex(np.sum(np.exp(-math.pi * eps * nu) * undamped)) for eps in schedule]
    log.debug(f"Mode sum over {len(spectrum)} modes at dampings {schedule}")

    tableau = richardson_tableau(sums, schedule, order=order)
    value, previous = tableau[-1][-1], tableau[-2][-1]
    residual = abs(value - previous)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)) or residual > tol:
        raise NonConvergent(f"mode sum extrapolation did not settle: residual {residual:.3g} > {tol:.3g}")
    return DiffractionCoefficient(value=value, residual=residual, **meta)
