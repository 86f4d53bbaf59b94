from conetrace.objects.cone_graph import ConeGraph, ConePoint, LinkCircle, GeodesicSegment, TransitionKind
from conetrace.objects.chain import DiffractiveClosedGeodesic, LengthSpectrumEntry
from conetrace.objects.manifest import RunManifest
from conetrace.builders import build_doubled_polygon, build_planar_exterior, load_surface
from conetrace.enumeration import enumerate_closed_chains, dlspec, primitive_decompose
from conetrace.diffraction import DiffractionCoefficient, diffraction_coefficient_closed, \
    diffraction_coefficient_modesum, circle_link_spectrum, is_diffractive_cone
from conetrace.trace_formula import assemble_symbol, time_domain_singularity, numeric_symbol_transform, \
    predict_singularities
from conetrace.spectral import FrequencyList, load_frequencies, smoothed_trace, detect_peaks, compare_with_prediction
from conetrace.bands import dmax, hiwu_threshold, optimal_band, check_hypotheses, bawu_region_contains
