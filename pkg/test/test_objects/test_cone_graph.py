import json
import math
import os

import pytest
from hypothesis import given, strategies as st

from conetrace.exceptions import InvalidInputError
from conetrace.objects.cone_graph import ConeGraph, LinkCircle, TransitionKind, classify_transition, link_distance


def test_link_distance_wraps():
    assert link_distance(2 * math.pi, 0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)
    assert link_distance(LinkCircle(circumference=3 * math.pi), 0.0, math.pi) == pytest.approx(math.pi)


@given(alpha=st.floats(0.5, 20), theta1=st.floats(-50, 50), theta2=st.floats(-50, 50))
def test_link_distance_range_and_symmetry(alpha, theta1, theta2):
    d = link_distance(alpha, theta1, theta2)
    assert 0 <= d <= alpha / 2 + 1e-12
    assert d == link_distance(alpha, theta2, theta1)


@given(alpha=st.floats(0.5, 20), thetas=st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_link_distance_triangle_inequality(alpha, thetas):
    a, b, c = thetas
    assert link_distance(alpha, a, c) <= link_distance(alpha, a, b) + link_distance(alpha, b, c) + 1e-9


def test_link_distance_rejects_bad_circumference():
    with pytest.raises(InvalidInputError):
        link_distance(0.0, 0.0, 1.0)


class TestClassifyTransition:

    def test_geometric_at_distance_pi(self):
        assert classify_transition(3 * math.pi, 0.0, math.pi) == TransitionKind.GEOMETRIC
        assert classify_transition(3 * math.pi, 0.0, math.pi + 1e-12) == TransitionKind.GEOMETRIC

    def test_strictly_diffractive_otherwise(self):
        assert classify_transition(3 * math.pi, 0.0, math.pi + 1e-3) == TransitionKind.STRICTLY_DIFFRACTIVE
        assert classify_transition(3 * math.pi, 0.5, 0.5) == TransitionKind.STRICTLY_DIFFRACTIVE

    def test_short_link_has_no_geometric_transition(self):
        # on a link shorter than 2 pi no two points are pi apart
        assert classify_transition(math.pi, 0.0, math.pi / 2) == TransitionKind.STRICTLY_DIFFRACTIVE

    def test_negative_tolerance(self):
        with pytest.raises(InvalidInputError):
            classify_transition(3 * math.pi, 0.0, 1.0, tol=-1)


class TestConeGraph:

    def test_str(self, two_points):
        assert str(two_points) == "<ConeGraph (2 cone points; 1 segments)>"
        assert len(two_points) == 1

    def test_add_segment_reduces_coordinates(self):
        graph = ConeGraph()
        graph.add_cone_point('a', 3 * math.pi)
        graph.add_cone_point('b', math.pi)
        segment = graph.add_segment('a', 3 * math.pi + 0.5, 'b', -0.25, 2.0)
        assert segment.id == 's0'
        assert segment.theta_a == pytest.approx(0.5)
        assert segment.theta_b == pytest.approx(math.pi - 0.25)

    def test_duplicate_cone_point(self, two_points):
        with pytest.raises(InvalidInputError):
            two_points.add_cone_point('p0', math.pi)

    def test_invalid_circumference(self):
        graph = ConeGraph()
        with pytest.raises(InvalidInputError):
            graph.add_cone_point('a', 0.0)
        with pytest.raises(InvalidInputError):
            graph.add_cone_point('b', float('inf'))

    def test_segment_errors(self, two_points):
        with pytest.raises(InvalidInputError):
            two_points.add_segment('p0', 0.0, 'missing', 0.0, 1.0)
        with pytest.raises(InvalidInputError):
            two_points.add_segment('p0', 0.0, 'p1', 0.0, -1.0)
        with pytest.raises(InvalidInputError):
            two_points.add_segment('p0', 0.0, 'p1', 0.0, 1.0, id='s0')

    def test_dimension(self):
        with pytest.raises(InvalidInputError):
            ConeGraph(dimension=1)

    def test_has_positions(self, two_points):
        assert two_points.has_positions
        graph = ConeGraph()
        graph.add_cone_point('a', math.pi)
        assert not graph.has_positions

    def test_from_dict(self, two_points):
        graph_dict = two_points.to_dict()
        graph_copy = ConeGraph.from_dict(graph_dict)
        assert graph_copy.to_dict() == graph_dict
        assert graph_copy.graph_hash() == two_points.graph_hash()

    def test_from_dict_malformed(self):
        with pytest.raises(InvalidInputError):
            ConeGraph.from_dict({'cone_points': [{'id': 'a'}]})

    def test_graph_hash_changes_with_content(self, two_points):
        other = ConeGraph.from_dict(two_points.to_dict())
        other.add_segment('p0', 1.0, 'p0', 2.0, 3.0)
        assert other.graph_hash() != two_points.graph_hash()

    def test_to_json(self, two_points, tmp_path):
        path = two_points.to_json(str(tmp_path))
        assert os.path.basename(path) == two_points.object_file_name(suffix='.json')
        assert os.path.basename(path).startswith('conegraph_')
        with open(path) as f:
            assert ConeGraph.from_dict(json.load(f)).graph_hash() == two_points.graph_hash()
