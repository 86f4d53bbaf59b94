import logging
import math
import os

import pytest

from conetrace.builders import build_doubled_polygon
from conetrace.objects.cone_graph import ConeGraph

logging.basicConfig()

log = logging.getLogger(__name__)

TEST_DIR = os.path.dirname(os.path.abspath(__file__))

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


@pytest.fixture
def root_dir(request):
    return request.config.rootdir


@pytest.fixture
def files_dir():
    return os.path.join(TEST_DIR, 'files')


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep the enumeration cache of every test in its own directory."""
    cache = tmp_path / 'cache'
    monkeypatch.setenv('CONETRACE_CACHE', str(cache))
    return cache


@pytest.fixture
def square() -> ConeGraph:
    return build_doubled_polygon(UNIT_SQUARE)


@pytest.fixture
def two_points() -> ConeGraph:
    """Two cone points of angle 3 pi at distance 1, joined by one segment."""
    graph = ConeGraph()
    graph.add_cone_point('p0', 3 * math.pi, position=(0.0, 0.0))
    graph.add_cone_point('p1', 3 * math.pi, position=(1.0, 0.0))
    graph.add_segment('p0', 0.0, 'p1', 0.0, 1.0, id='s0')
    return graph


@pytest.fixture
def triangle_graph() -> ConeGraph:
    """Three cone points in a cycle, all segments of length 2."""
    graph = ConeGraph()
    for i in range(3):
        graph.add_cone_point(f"p{i}", 3 * math.pi)
    graph.add_segment('p0', 0.0, 'p1', 1.0, 2.0, id='s0')
    graph.add_segment('p1', 2.5, 'p2', 1.0, 2.0, id='s1')
    graph.add_segment('p2', 2.5, 'p0', 1.0, 2.0, id='s2')
    return graph
