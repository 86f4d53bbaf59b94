from itertools import chain, islice
import hashlib
import json
import logging
import math

log = logging.getLogger(__name__)


def chunks(iterable, size=10):
    """
    Get chunks of an iterable without pre-walking it.

    https://stackoverflow.com/questions/24527006/split-a-generator-into-chunks-without-pre-walking-it

    :param iterable: The iterable.
    :param size: Chunksize.
    :return: Yield chunks of defined size.
    """
    iterator = iter(iterable)
    for first in iterator:
        yield chain([first], islice(iterator, int(size) - 1))


def canonical_json(data) -> str:
    """Compact JSON with sorted keys, the byte representation used for hashing."""
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def content_hash(data) -> str:
    """
    SHA-256 hex digest of the canonical JSON form of `data`.

    :param data: Any JSON serializable object.
    """
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def file_hash(path) -> str:
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 16), b''):
            h.update(block)
    return h.hexdigest()


def ccw_angle(u, v) -> float:
    """
    Counterclockwise angle in [0, 2pi) that turns direction `u` onto direction `v`.

    :param u: 2D vector.
    :param v: 2D vector.
    """
    cross = u[0] * v[1] - u[1] * v[0]
    dot = u[0] * v[0] + u[1] * v[1]
    angle = math.atan2(cross, dot)
    if angle < 0:
        angle += 2 * math.pi
    return angle


def reduce_angle(theta: float, period: float) -> float:
    """Reduce `theta` into [0, period)."""
    reduced = math.fmod(theta, period)
    if reduced < 0:
        reduced += period
    # fmod of a tiny negative number plus period can round up to period
    if reduced >= period:
        reduced = 0.0
    return reduced


def distance_to_lattice(x: float, spacing: float) -> float:
    """Distance of `x` to the nearest multiple of `spacing`."""
    return abs(x - spacing * round(x / spacing))
