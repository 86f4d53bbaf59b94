import json
import logging
import os
from typing import List, Optional

from conetrace import defaults
from conetrace.helper import content_hash
from conetrace.objects.chain import DiffractiveClosedGeodesic

log = logging.getLogger(__name__)


def cache_dir() -> str:
    """Cache directory, the ``CONETRACE_CACHE`` environment variable or ``.conetrace-cache``."""
    return os.getenv(defaults.CACHE_ENV) or defaults.CACHE_DIR


class EnumerationCache:
    """
    Content addressed file cache of chain enumerations.

    Entries are keyed by the graph hash, the length bound, the diffraction bound, the classification
    tolerance and the file format version. One JSON file per key.
    """

    def __init__(self, directory: str = None):
        self.directory = directory or cache_dir()

    def __str__(self):
        return f"<EnumerationCache ({self.directory})>"

    def key(self, graph, max_length, max_diffractions, tol=None) -> str:
        return content_hash({'graph': graph.graph_hash(),
                             'max_length': float(max_length),
                             'max_diffractions': max_diffractions,
                             'tol': defaults.GEOMETRIC_TOL if tol is None else float(tol),
                             'version': defaults.CACHE_FORMAT_VERSION})

    def path(self, key: str) -> str:
        return os.path.join(self.directory, f"chains_{key}.json")

    def get(self, graph, max_length, max_diffractions, tol=None) -> Optional[List[DiffractiveClosedGeodesic]]:
        path = self.path(self.key(graph, max_length, max_diffractions, tol))
        if not os.path.exists(path):
            return None
        try:
            with open(path) as f:
                data = json.load(f)
            chains = [DiffractiveClosedGeodesic.from_dict(c) for c in data['chains']]
        except (OSError, ValueError, KeyError) as e:
            log.warning(f"Ignoring unreadable cache entry {path}: {e}")
            return None
        log.debug(f"Cache hit {path}")
        return chains

    def put(self, graph, max_length, max_diffractions, chains, tol=None) -> str:
        key = self.key(graph, max_length, max_diffractions, tol)
        os.makedirs(self.directory, exist_ok=True)
        path = self.path(key)
        tmp = f"{path}.{os.getpid()}.tmp"
        with open(tmp, 'wt') as f:
            json.dump({'key': key, 'chains': [c.to_dict() for c in chains]}, f, sort_keys=True)
        os.replace(tmp, path)
        log.debug(f"Cached {len(chains)} chains in {path}")
        return path
