from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from conetrace.objects.cone_graph import TransitionKind


class Traversal(BaseModel):
    """One segment of a chain, walked from `tail` to `head`."""
    model_config = ConfigDict(frozen=True)

    segment: str
    reversed: bool = False
    tail: str
    head: str
    theta_tail: float
    theta_head: float
    length: float

    @property
    def label(self) -> str:
        return f"{self.segment}{'-' if self.reversed else '+'}"


class Transition(BaseModel):
    """Passage through a cone point: entry at `theta_in`, exit at `theta_out`."""
    model_config = ConfigDict(frozen=True)

    cone_point: str
    circumference: float
    theta_in: float
    theta_out: float
    link_distance: float
    kind: TransitionKind

    @property
    def geometric(self) -> bool:
        return self.kind == TransitionKind.GEOMETRIC


class DiffractiveClosedGeodesic(BaseModel):
    """
    Closed chain of segments through cone points.

    Transition ``j`` sits at the head of traversal ``j`` and leads into traversal ``j + 1`` (cyclically).
    `word` encodes the traversals as ``2 * segment index + direction`` for the graph the chain was
    enumerated on; the stored rotation is the canonical one.
    """
    model_config = ConfigDict(frozen=True)

    id: str
    word: Tuple[int, ...]
    traversals: List[Traversal]
    transitions: List[Transition]
    length: float = Field(gt=0)
    k: int = Field(ge=1)
    primitive_length: float = Field(gt=0)
    multiplicity: int = Field(ge=1)
    primitive_id: str
    orientations: int = Field(ge=1, le=2)
    geometric: bool = False

    def __str__(self):
        return f"<DiffractiveClosedGeodesic ({self.id}; L={self.length:.6g}; k={self.k})>"

    @property
    def strictly_diffractive(self) -> bool:
        return not self.geometric

    @property
    def cone_points(self) -> List[str]:
        return [t.cone_point for t in self.transitions]

    def to_dict(self) -> dict:
        return self.model_dump(mode='json')

    @classmethod
    def from_dict(cls, chain_dict: dict) -> 'DiffractiveClosedGeodesic':
        return cls.model_validate(chain_dict)


class LengthSpectrumEntry(BaseModel):
    """One length of the diffractive length spectrum and the chains realizing it."""
    model_config = ConfigDict(frozen=True)

    length: float
    geodesic_ids: List[str]
    diffraction_counts: List[int]
    any_geometric_transition: bool = False

    @property
    def multiplicity(self) -> int:
        return len(self.geodesic_ids)
