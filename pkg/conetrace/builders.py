"""
Builders that turn planar input into a :class:`~conetrace.objects.cone_graph.ConeGraph`.

Link coordinates
----------------
At every vertex the wedge of directions that leave the vertex into the surface is measured from
the lower-indexed incident edge (for vertex ``i > 0`` the edge to vertex ``i-1``, for vertex 0 the
edge to vertex 1), turning into the wedge. Copy 1 of the doubled surface fills ``[0, w]`` where
``w`` is the wedge angle, copy 2 fills the mirror arc ``[w, 2w)`` with coordinate ``2w - theta``.
Directions along an edge get the same coordinate in both copies.
"""
import json
import logging
import math
from typing import List, Sequence

from shapely.geometry import LinearRing, LineString, Point, Polygon

from conetrace import defaults
from conetrace.exceptions import PolygonError, SurfaceFileError
from conetrace.helper import ccw_angle, reduce_angle
from conetrace.objects.cone_graph import ConeGraph

log = logging.getLogger(__name__)


def _as_points(vertices: Sequence) -> List[tuple]:
    try:
        points = [(float(v[0]), float(v[1])) for v in vertices]
    except (TypeError, ValueError, IndexError) as e:
        raise PolygonError(f"vertices must be pairs of numbers: {e}")
    if any(not (math.isfinite(x) and math.isfinite(y)) for x, y in points):
        raise PolygonError("vertex coordinates must be finite")
    return points


def _check_ring(points: List[tuple], what: str = "polygon") -> LinearRing:
    if len(points) < 3:
        raise PolygonError(f"{what} needs at least 3 vertices, got {len(points)}")
    for i, p in enumerate(points):
        if p == points[(i + 1) % len(points)]:
            raise PolygonError(f"{what} has repeated vertex {i}")
    ring = LinearRing(points)
    if not ring.is_simple:
        raise PolygonError(f"{what} is not simple (edges intersect)")
    return ring


def _interior_angles(points: List[tuple], tol: float, what: str = "polygon") -> List[float]:
    """Interior angles of a counterclockwise polygon; rejects straight vertices."""
    n = len(points)
    angles = []
    for i, v in enumerate(points):
        prev, nxt = points[i - 1], points[(i + 1) % n]
        to_next = (nxt[0] - v[0], nxt[1] - v[1])
        to_prev = (prev[0] - v[0], prev[1] - v[1])
        beta = ccw_angle(to_next, to_prev)
        if abs(beta - math.pi) <= tol:
            raise PolygonError(f"{what} vertex {i} has angle pi (collinear with its neighbours)")
        angles.append(beta)
    return angles


def _direction(p, q) -> tuple:
    return q[0] - p[0], q[1] - p[1]


def _dist(p, q) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def _touches_other_vertex(line: LineString, all_points, skip, tol) -> bool:
    for k, p in enumerate(all_points):
        if k in skip:
            continue
        if line.distance(Point(p)) <= tol:
            return True
    return False


def build_doubled_polygon(vertices: Sequence, tol: float = None) -> ConeGraph:
    """
    Double a simple counterclockwise polygon along its boundary.

    Every vertex becomes a cone point of angle twice the interior angle. Polygon edges are shared by
    both copies and give one segment each (``e{i}`` joins vertex i and i+1), chords whose open
    interior lies inside the polygon give two segments (``c{i}_{j}_1`` and ``c{i}_{j}_2``).

    :param vertices: Ordered planar points, counterclockwise.
    :param tol: Tolerance for straight vertices and grazing chords, defaults to
        :data:`conetrace.defaults.GEOMETRIC_TOL`.
    """
    if tol is None:
        tol = defaults.GEOMETRIC_TOL
    points = _as_points(vertices)
    ring = _check_ring(points)
    if not ring.is_ccw:
        raise PolygonError("polygon vertices must be ordered counterclockwise")
    betas = _interior_angles(points, tol)
    n = len(points)
    log.debug(f"Doubling polygon with {n} vertices")

    graph = ConeGraph(dimension=2, source='doubled_polygon')
    for i, (p, beta) in enumerate(zip(points, betas)):
        graph.add_cone_point(f"v{i}", 2 * beta, position=p)

    def coordinate(i, target):
        """Copy-1 coordinate at vertex i of the direction towards `target`."""
        v = points[i]
        psi = ccw_angle(_direction(v, points[(i + 1) % n]), _direction(v, target))
        # directions inside the wedge only, snap rounding noise at the edges
        psi = min(max(psi if psi <= betas[i] + tol else 0.0, 0.0), betas[i])
        return psi if i == 0 else betas[i] - psi

    for i in range(n):
        j = (i + 1) % n
        graph.add_segment(f"v{i}", coordinate(i, points[j]), f"v{j}", coordinate(j, points[i]),
                          _dist(points[i], points[j]), id=f"e{i}")

    polygon = Polygon(points)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            line = LineString([points[i], points[j]])
            if not polygon.contains(line):
                continue
            if _touches_other_vertex(line, points, {i, j}, tol):
                log.debug(f"Chord v{i}-v{j} grazes another vertex, skipped")
                continue
            theta_i, theta_j = coordinate(i, points[j]), coordinate(j, points[i])
            alpha_i, alpha_j = 2 * betas[i], 2 * betas[j]
            length = _dist(points[i], points[j])
            graph.add_segment(f"v{i}", theta_i, f"v{j}", theta_j, length, id=f"c{i}_{j}_1")
            graph.add_segment(f"v{i}", reduce_angle(alpha_i - theta_i, alpha_i),
                              f"v{j}", reduce_angle(alpha_j - theta_j, alpha_j), length, id=f"c{i}_{j}_2")

    log.debug(f"Built {graph}")
    return graph


def _orient_ccw(points: List[tuple]) -> List[tuple]:
    """Reverse a clockwise ring, keeping the first vertex first."""
    if LinearRing(points).is_ccw:
        return points
    return [points[0]] + points[1:][::-1]


def build_planar_exterior(obstacles: Sequence[Sequence], tol: float = None) -> ConeGraph:
    """
    Cone graph of the doubled exterior of disjoint polygonal obstacles in the plane.

    Every obstacle vertex becomes a cone point of angle twice its exterior angle. Mutually visible
    vertices (the open straight line misses every obstacle interior and no other vertex) are joined by
    two segments ``s{u}_{v}_1``/``s{u}_{v}_2`` (global vertex numbers), obstacle edges by a single
    segment ``e{k}_{i}``. Cone point ids are ``o{k}v{i}``, vertices are numbered after orienting each
    obstacle counterclockwise.

    :param obstacles: List of polygons, each a list of planar points.
    """
    if tol is None:
        tol = defaults.GEOMETRIC_TOL
    if not obstacles:
        raise PolygonError("at least one obstacle is required")

    rings = []
    for k, obstacle in enumerate(obstacles):
        points = _as_points(obstacle)
        _check_ring(points, what=f"obstacle {k}")
        rings.append(_orient_ccw(points))

    polygons = [Polygon(r) for r in rings]
    for k in range(len(polygons)):
        for l in range(k + 1, len(polygons)):
            if polygons[k].intersects(polygons[l]):
                raise PolygonError(f"obstacles {k} and {l} intersect")

    graph = ConeGraph(dimension=2, source='exterior')
    vertices = []
    for k, ring in enumerate(rings):
        betas = _interior_angles(ring, tol, what=f"obstacle {k}")
        for i, (p, beta) in enumerate(zip(ring, betas)):
            omega = 2 * math.pi - beta
            vertices.append({'id': f"o{k}v{i}", 'obstacle': k, 'index': i, 'point': p, 'omega': omega,
                             'prev': ring[i - 1], 'next': ring[(i + 1) % len(ring)], 'size': len(ring)})
            graph.add_cone_point(f"o{k}v{i}", 2 * omega, position=p)
    all_points = [v['point'] for v in vertices]

    def coordinate(vertex, target):
        v = vertex['point']
        omega = vertex['omega']
        psi = ccw_angle(_direction(v, vertex['prev']), _direction(v, target))
        psi = min(max(psi if psi <= omega + tol else 0.0, 0.0), omega)
        return omega - psi if vertex['index'] == 0 else psi

    log.debug(f"Visibility over {len(vertices)} obstacle vertices")
    for u in range(len(vertices)):
        for w in range(u + 1, len(vertices)):
            vu, vw = vertices[u], vertices[w]
            length = _dist(vu['point'], vw['point'])
            theta_u, theta_w = coordinate(vu, vw['point']), coordinate(vw, vu['point'])
            if vu['obstacle'] == vw['obstacle'] and (vw['index'] - vu['index']) % vu['size'] in (1, vu['size'] - 1):
                first = vu if (vw['index'] - vu['index']) % vu['size'] == 1 else vw
                graph.add_segment(vu['id'], theta_u, vw['id'], theta_w, length,
                                  id=f"e{first['obstacle']}_{first['index']}")
                continue
            line = LineString([vu['point'], vw['point']])
            if not all(line.relate_pattern(p, 'F********') for p in polygons):
                continue
            if _touches_other_vertex(line, all_points, {u, w}, tol):
                continue
            alpha_u, alpha_w = 2 * vu['omega'], 2 * vw['omega']
            graph.add_segment(vu['id'], theta_u, vw['id'], theta_w, length, id=f"s{u}_{w}_1")
            graph.add_segment(vu['id'], reduce_angle(alpha_u - theta_u, alpha_u),
                              vw['id'], reduce_angle(alpha_w - theta_w, alpha_w), length, id=f"s{u}_{w}_2")

    log.debug(f"Built {graph}")
    return graph


def surface_from_dict(surface: dict, source: str = None) -> ConeGraph:
    """
    Build a cone graph from a surface description::

        {"type": "doubled_polygon", "vertices": [[x, y], ...]}
        {"type": "exterior", "obstacles": [[[x, y], ...], ...]}
        {"type": "cone_graph", "cone_points": [...], "segments": [...]}
    """
    if not isinstance(surface, dict) or 'type' not in surface:
        raise SurfaceFileError("surface description needs a 'type'")
    kind = surface['type']
    try:
        if kind == 'doubled_polygon':
            graph = build_doubled_polygon(surface['vertices'])
        elif kind == 'exterior':
            graph = build_planar_exterior(surface['obstacles'])
        elif kind == 'cone_graph':
            graph = ConeGraph.from_dict(surface)
        else:
            raise SurfaceFileError(f"unknown surface type '{kind}'")
    except KeyError as e:
        raise SurfaceFileError(f"surface of type '{kind}' misses field {e}")
    graph.source = source or graph.source
    return graph


def load_surface(path: str) -> ConeGraph:
    """
    Read a JSON surface description from `path`.
    """
    try:
        with open(path) as f:
            surface = json.load(f)
    except FileNotFoundError:
        raise SurfaceFileError(f"surface file not found: {path}")
    except json.JSONDecodeError as e:
        raise SurfaceFileError(f"{path}: invalid JSON ({e})")
    log.debug(f"Loaded surface description {path}")
    return surface_from_dict(surface, source=path)
