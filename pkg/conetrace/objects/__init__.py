from conetrace.objects.cone_graph import ConeGraph, ConePoint, LinkCircle, GeodesicSegment, TransitionKind
from conetrace.objects.chain import DiffractiveClosedGeodesic, LengthSpectrumEntry, Transition, Traversal
from conetrace.objects.manifest import RunManifest
