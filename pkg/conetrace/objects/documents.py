"""
Output documents of the command line tool. Every output file is ``{"manifest_id": ..., "result": ...}``;
the JSON schemas in ``docs/schemas`` describe these models.
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from conetrace.bands import ResonanceBandReport
from conetrace.diffraction import DiffractionCoefficient
from conetrace.objects.chain import DiffractiveClosedGeodesic, LengthSpectrumEntry
from conetrace.spectral import ComparisonReport, Peak
from conetrace.trace_formula import SingularityDescriptor


class CompareResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma: float
    t_min: float
    t_max: float
    step: float
    frequency_count: int
    frequency_max: Optional[float] = None
    peaks: List[Peak]
    predictions: List[LengthSpectrumEntry]
    report: ComparisonReport


class GeodesicsDocument(BaseModel):
    manifest_id: str
    result: List[DiffractiveClosedGeodesic]


class DLSpecDocument(BaseModel):
    manifest_id: str
    result: List[LengthSpectrumEntry]


class DiffractDocument(BaseModel):
    manifest_id: str
    result: DiffractionCoefficient


class TraceDocument(BaseModel):
    manifest_id: str
    result: List[SingularityDescriptor]


class CompareDocument(BaseModel):
    manifest_id: str
    result: CompareResult


class BandsDocument(BaseModel):
    manifest_id: str
    result: ResonanceBandReport


DOCUMENTS = {
    'geodesics': GeodesicsDocument,
    'dlspec': DLSpecDocument,
    'diffract': DiffractDocument,
    'trace': TraceDocument,
    'compare': CompareDocument,
    'bands': BandsDocument,
}
