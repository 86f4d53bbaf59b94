import json
import logging
import math
import os
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from conetrace import defaults
from conetrace.exceptions import InvalidInputError
from conetrace.helper import content_hash, reduce_angle

log = logging.getLogger(__name__)


class TransitionKind(str, Enum):
    STRICTLY_DIFFRACTIVE = 'StrictlyDiffractive'
    GEOMETRIC = 'Geometric'


class LinkCircle(BaseModel):
    """
    The link of a cone point, a circle whose circumference is the cone angle.
    """
    model_config = ConfigDict(frozen=True)

    circumference: float = Field(gt=0)

    @field_validator('circumference')
    @classmethod
    def _finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("circumference must be finite")
        return v

    def reduce(self, theta: float) -> float:
        """Reduce a link coordinate into [0, circumference)."""
        return reduce_angle(theta, self.circumference)


class ConePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    link: LinkCircle
    position: Optional[Tuple[float, float]] = None

    @property
    def circumference(self) -> float:
        return self.link.circumference


class GeodesicSegment(BaseModel):
    """
    Undirected geodesic segment between two cone points. `theta_a` and `theta_b` are the link
    coordinates of the segment direction at `a` and `b`.
    """
    model_config = ConfigDict(frozen=True)

    id: str
    a: str
    theta_a: float
    b: str
    theta_b: float
    length: float = Field(gt=0)


def _circumference(link: Union[LinkCircle, ConePoint, float]) -> float:
    if isinstance(link, (LinkCircle, ConePoint)):
        return link.circumference
    alpha = float(link)
    if not alpha > 0:
        raise InvalidInputError(f"link circumference must be positive, got {alpha}")
    return alpha


def link_distance(link: Union[LinkCircle, float], theta1: float, theta2: float) -> float:
    """
    Arc distance of two points on a link circle. The result lies in [0, alpha/2].

    :param link: A :class:`LinkCircle` or its circumference.
    """
    alpha = _circumference(link)
    d = reduce_angle(abs(theta1 - theta2), alpha)
    return min(d, alpha - d)


def classify_transition(link: Union[LinkCircle, float], theta_in: float, theta_out: float,
                        tol: float = None) -> TransitionKind:
    """
    Geometric if entry and exit point are link distance pi apart (up to `tol`), otherwise strictly diffractive.
    """
    if tol is None:
        tol = defaults.GEOMETRIC_TOL
    if tol < 0:
        raise InvalidInputError(f"tolerance must be non-negative, got {tol}")
    if abs(link_distance(link, theta_in, theta_out) - math.pi) <= tol:
        return TransitionKind.GEOMETRIC
    return TransitionKind.STRICTLY_DIFFRACTIVE


class ConeGraph:
    """
    Container for the cone points of a flat surface and the geodesic segments joining them.

    The graph is filled by the builders (or :meth:`from_dict`) and treated as immutable afterwards.
    """

    def __init__(self, dimension: int = 2, source: str = None):
        if dimension < 2:
            raise InvalidInputError(f"dimension must be at least 2, got {dimension}")
        self.dimension = dimension
        self.source = source
        self.cone_points: Dict[str, ConePoint] = {}
        self.segments: List[GeodesicSegment] = []
        self._segment_ids = set()

    def __str__(self):
        return f"<ConeGraph ({len(self.cone_points)} cone points; {len(self.segments)} segments)>"

    def __len__(self):
        return len(self.segments)

    def add_cone_point(self, id: str, circumference: float, position=None) -> ConePoint:
        if id in self.cone_points:
            raise InvalidInputError(f"duplicate cone point id '{id}'")
        if position is not None:
            position = (position[0], position[1])
        try:
            point = ConePoint(id=id, link=LinkCircle(circumference=circumference), position=position)
        except ValueError as e:
            raise InvalidInputError(f"invalid cone point '{id}': {e}")
        self.cone_points[id] = point
        return point

    def add_segment(self, a: str, theta_a: float, b: str, theta_b: float, length: float,
                    id: str = None) -> GeodesicSegment:
        """
        Add a segment. Link coordinates are reduced modulo the circumference of their cone point.
        """
        for end in (a, b):
            if end not in self.cone_points:
                raise InvalidInputError(f"segment endpoint '{end}' is not a cone point")
        if not (length > 0 and math.isfinite(length)):
            raise InvalidInputError(f"segment length must be positive and finite, got {length}")
        if id is None:
            id = f"s{len(self.segments)}"
        if id in self._segment_ids:
            raise InvalidInputError(f"duplicate segment id '{id}'")

        segment = GeodesicSegment(id=id,
                                  a=a, theta_a=self.cone_points[a].link.reduce(theta_a),
                                  b=b, theta_b=self.cone_points[b].link.reduce(theta_b),
                                  length=length)
        self.segments.append(segment)
        self._segment_ids.add(id)
        return segment

    def circumference(self, cone_point_id: str) -> float:
        return self.cone_points[cone_point_id].circumference

    @property
    def has_positions(self) -> bool:
        return bool(self.cone_points) and all(p.position is not None for p in self.cone_points.values())

    def to_dict(self) -> dict:
        """
        Create dictionary defining the graph, the ``cone_graph`` surface format.
        """
        cone_points = []
        for p in self.cone_points.values():
            d = {'id': p.id, 'circumference': p.circumference}
            if p.position is not None:
                d['position'] = list(p.position)
            cone_points.append(d)
        segments = [{'id': s.id, 'a': s.a, 'theta_a': s.theta_a, 'b': s.b, 'theta_b': s.theta_b,
                     'length': s.length} for s in self.segments]
        return {'type': 'cone_graph', 'dimension': self.dimension,
                'cone_points': cone_points, 'segments': segments}

    @classmethod
    def from_dict(cls, graph_dict: dict, source: str = None) -> 'ConeGraph':
        try:
            graph = cls(dimension=int(graph_dict.get('dimension', 2)), source=source)
            for p in graph_dict['cone_points']:
                graph.add_cone_point(str(p['id']), float(p['circumference']), position=p.get('position'))
            for s in graph_dict.get('segments', []):
                graph.add_segment(str(s['a']), float(s['theta_a']), str(s['b']), float(s['theta_b']),
                                  float(s['length']), id=s.get('id'))
        except (KeyError, TypeError) as e:
            raise InvalidInputError(f"malformed cone graph description: {e!r}")
        return graph

    def graph_hash(self) -> str:
        """Content hash of the graph, independent of where it was read from."""
        return content_hash(self.to_dict())

    def object_file_name(self, suffix: str = None) -> str:
        """
        Create a name for this graph that indicates content. Pass an optional suffix.
        NOTE: suffix has to include the '.' for a filename!

            `conegraph_<hash prefix>`
        """
        basename = f"conegraph_{self.graph_hash()[:16]}"
        if suffix:
            basename += suffix
        return basename

    def to_json(self, target_dir: str, filename: str = None) -> str:
        """
        Serialize the graph to a JSON file in a target directory.
        """
        if not filename:
            filename = self.object_file_name(suffix='.json')
        path = os.path.join(target_dir, filename)
        with open(path, 'wt') as f:
            json.dump(self.to_dict(), f, indent=defaults.JSON_INDENT, sort_keys=True)
        return path
