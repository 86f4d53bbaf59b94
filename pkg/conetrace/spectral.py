"""
Smoothed wave traces of externally computed spectra and their comparison with predicted singular times.
"""
import csv
import logging
import math
from multiprocessing.pool import ThreadPool
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.signal import find_peaks

from conetrace import defaults
from conetrace.exceptions import FrequencyFileError, InvalidInputError
from conetrace.helper import chunks

log = logging.getLogger(__name__)

# exp(-x) is exactly 0.0 in double precision beyond this
_UNDERFLOW_EXPONENT = 745.2


class FrequencyList:
    """
    Sorted frequencies ``lambda_j`` (square roots of Laplace eigenvalues), duplicates are multiplicities.

    :param values: Non-negative finite frequencies, in any order.
    :param source: Where the frequencies came from.
    """

    def __init__(self, values=None, source: str = None):
        values = np.asarray([] if values is None else values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("frequencies must be finite")
        if np.any(values < 0):
            raise InvalidInputError("frequencies must be non-negative")
        self.values = np.sort(values, kind='stable')
        self.source = source

    def __len__(self):
        return len(self.values)

    def __str__(self):
        return f"<FrequencyList ({len(self)} frequencies; {self.source})>"

    def __add__(self, other: 'FrequencyList') -> 'FrequencyList':
        return FrequencyList(np.concatenate([self.values, other.values]),
                             source=f"{self.source}+{other.source}")

    @property
    def max(self) -> Optional[float]:
        return float(self.values[-1]) if len(self) else None

    def metadata_dict(self) -> dict:
        return {'source': self.source, 'count': len(self), 'max': self.max}

    def to_file(self, path: str) -> str:
        """Write the plain text frequency format."""
        with open(path, 'wt') as f:
            if self.source:
                f.write(f"# source: {self.source}\n")
            for v in self.values:
                f.write(defaults.CSV_FLOAT_FORMAT % v + '\n')
        return path


def load_frequencies(path: str) -> FrequencyList:
    """
    Read a frequency file: one float per line, ``#`` starts a comment, blank lines are skipped.

    :raises FrequencyFileError: for a missing file, a line that is not a number, or a negative or
        non-finite value; the message names the line.
    """
    values = []
    try:
        with open(path) as f:
            for lineno, line in enumerate(f, start=1):
                content = line.split('#', 1)[0].strip()
                if not content:
                    continue
                try:
                    value = float(content)
                except ValueError:
                    raise FrequencyFileError(f"{path}:{lineno}: cannot parse '{content}' as a number")
                if not math.isfinite(value):
                    raise FrequencyFileError(f"{path}:{lineno}: frequency must be finite, got {content}")
                if value < 0:
                    raise FrequencyFileError(f"{path}:{lineno}: negative frequency {content}")
                values.append(value)
    except FileNotFoundError:
        raise FrequencyFileError(f"frequency file not found: {path}")

    freqs = FrequencyList(values, source=path)
    if not len(freqs):
        log.warning(f"Frequency file {path} contains no frequencies")
    else:
        log.debug(f"Loaded {len(freqs)} frequencies from {path}, max {freqs.max}")
    return freqs


def doubled_rectangle_frequencies(a: float = 1.0, b: float = 1.0, max_frequency: float = 100.0) -> FrequencyList:
    """
    Spectrum of the doubled a x b rectangle: Neumann (m, n >= 0) and Dirichlet (m, n >= 1) modes,
    ``lambda = pi * sqrt((m / a) ** 2 + (n / b) ** 2)``, up to `max_frequency`.
    """
    if not (a > 0 and b > 0):
        raise InvalidInputError("rectangle sides must be positive")
    m = np.arange(0, int(max_frequency * a / math.pi) + 1)
    n = np.arange(0, int(max_frequency * b / math.pi) + 1)
    mm, nn = np.meshgrid(m, n, indexing='ij')
    lam = math.pi * np.sqrt((mm / a) ** 2 + (nn / b) ** 2)
    neumann = lam[lam <= max_frequency]
    dirichlet = lam[(mm >= 1) & (nn >= 1) & (lam <= max_frequency)]
    return FrequencyList(np.concatenate([neumann, dirichlet]), source=f"doubled_rectangle({a}, {b})")


class SmoothedTrace:
    """
    ``sum_j exp(-i t lambda_j) exp(-sigma**2 lambda_j**2 / 2)`` on a time grid (`full`: twice its real part).
    """

    def __init__(self, t, values, sigma: float, full: bool = False):
        self.t = np.asarray(t, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        self.sigma = sigma
        self.full = full

    def __len__(self):
        return len(self.t)

    def __str__(self):
        return f"<SmoothedTrace ({len(self)} points; sigma={self.sigma})>"

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def to_csv(self, filepath: str, manifest_id: str = None) -> str:
        """
        CSV with columns ``t, re, im, abs``, floats with 17 significant digits.

        :param manifest_id: Written as a leading ``# manifest_id: ...`` line.
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


def _trace_block(args):
    t_block, lam, weights = args
    return np.sum(np.exp(-1j * np.outer(t_block, lam)) * weights, axis=1)


def smoothed_trace(freqs, sigma: float, t_grid, block_size: int = None, workers: int = None,
                   full: bool = False) -> SmoothedTrace:
    """
    Gaussian smoothed wave trace.

    The grid is processed in blocks of `block_size` times, each summed pairwise over the frequencies,
    so the values do not depend on `workers`.

    :param freqs: :class:`FrequencyList` or array of frequencies.
    :param sigma: Smoothing width, > 0.
    :param t_grid: Times.
    :param workers: Threads evaluating blocks concurrently.
    :param full: Return ``2 Re`` of the sum, the trace of the full wave group.
    """
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if block_size is None:
        block_size = defaults.TRACE_BLOCK_SIZE
    lam = freqs.values if isinstance(freqs, FrequencyList) else np.sort(np.asarray(freqs, dtype=float))
    t_grid = np.asarray(t_grid, dtype=float)

    # frequencies whose weight underflows add exactly nothing
    lam = lam[0.5 * (sigma * lam) ** 2 < _UNDERFLOW_EXPONENT]
    weights = np.exp(-0.5 * (sigma * lam) ** 2)
    if len(lam) == 0:
        values = np.zeros(len(t_grid), dtype=complex)
    else:
        tasks = [(np.fromiter(block, dtype=float), lam, weights) for block in chunks(t_grid, block_size)]
        log.debug(f"Smoothed trace of {len(lam)} frequencies on {len(t_grid)} times in {len(tasks)} blocks")
        if workers and workers > 1:
            with ThreadPool(workers) as pool:
                blocks = pool.map(_trace_block, tasks)
        else:
            blocks = [_trace_block(task) for task in tasks]
        values = np.concatenate(blocks) if blocks else np.zeros(0, dtype=complex)
    if full:
        values = (2 * values.real).astype(complex)
    return SmoothedTrace(t_grid, values, sigma, full=full)


class Peak(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float
    height: float


def detect_peaks(trace: SmoothedTrace, prominence: float = None) -> List[Peak]:
    """
    Local maxima of ``|trace|`` above ``prominence * median(|trace|)``, refined by a parabola through the
    maximum and its two neighbours.
    """
    if prominence is None:
        prominence = defaults.PEAK_PROMINENCE
    if not prominence > 0:
        raise InvalidInputError(f"prominence must be positive, got {prominence}")
    magnitude = trace.magnitude
    if len(magnitude) < 3:
        return []
    # a zero median leaves every positive local maximum
    threshold = prominence * float(np.median(magnitude))

    indices, _ = find_peaks(magnitude, height=threshold)
    peaks = []
    for i in indices:
        y0, y1, y2 = magnitude[i - 1], magnitude[i], magnitude[i + 1]
        t0, t1, t2 = trace.t[i - 1], trace.t[i], trace.t[i + 1]
        curvature = y0 - 2 * y1 + y2
        offset = 0.5 * (y0 - y2) / curvature if curvature != 0 else 0.0
        offset = min(max(offset, -1.0), 1.0)
        step = (t2 - t0) / 2
        time = t1 + offset * step
        height = y1 - 0.25 * (y0 - y2) * offset
        peaks.append(Peak(time=float(time), height=float(height)))
    log.debug(f"Detected {len(peaks)} peaks above {threshold:.6g}")
    return peaks


class PeakMatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    peak: float
    prediction: float
    offset: float
    height: Optional[float] = None
    diffraction_counts: List[int] = []


class ComparisonReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol: float
    matches: List[PeakMatch]
    unmatched_peaks: List[float]
    unrealized_predictions: List[float]
    amplitude_ratios: List[float]

    @property
    def contained(self) -> bool:
        """Every peak sits at a predicted time."""
        return not self.unmatched_peaks


def _location(item) -> float:
    for attr in ('time', 'location', 'length'):
        if hasattr(item, attr):
            return float(getattr(item, attr))
    return float(item)


def compare_with_prediction(peaks: Sequence, predictions: Sequence, tol: float) -> ComparisonReport:
    """
    Match every peak to the nearest predicted time within `tol`.

    Unmatched peaks contradict containment of the singular support in the predicted set (up to smoothing
    artifacts), unrealized predictions are allowed. Amplitude ratios are relative to the first matched peak.

    :param peaks: :class:`Peak` objects or times.
    :param predictions: Objects with a `location` or `length`, or plain times.
    """
    if tol < 0:
        raise InvalidInputError(f"tolerance must be non-negative, got {tol}")
    predicted = sorted(_location(p) for p in predictions)
    counts = {}
    for p in predictions:
        counts.setdefault(_location(p), []).extend(getattr(p, 'diffraction_counts', None) or [])
    realized = set()
    matches, unmatched = [], []
    for peak in sorted(peaks, key=_location):
        time = _location(peak)
        nearest = min(predicted, key=lambda p: abs(p - time)) if predicted else None
        if nearest is None or abs(nearest - time) > tol:
            unmatched.append(time)
            continue
        realized.add(nearest)
        matches.append(PeakMatch(peak=time, prediction=nearest, offset=time - nearest,
                                 height=getattr(peak, 'height', None),
                                 diffraction_counts=sorted(counts[nearest])))

    ratios = []
    heights = [m.height for m in matches]
    if matches and all(h is not None for h in heights) and heights[0] > 0:
        ratios = [h / heights[0] for h in heights]
    if unmatched:
        log.warning(f"{len(unmatched)} peaks without a predicted time: {unmatched}")
    return ComparisonReport(tol=tol, matches=matches, unmatched_peaks=unmatched,
                            unrealized_predictions=[p for p in predicted if p not in realized],
                            amplitude_ratios=ratios)
