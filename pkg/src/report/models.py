"""
Report schema. Every optional field is present in output, as null when empty.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class PccCell(BaseModel):
    """Pearson correlation of one saliency feature with one emotion dimension."""
    feature: str
    emotion: str
    r: Optional[float] = None
    p: Optional[float] = None
    n: Optional[int] = None
    error: Optional[str] = None


class Contributor(BaseModel):
    name: str
    share: float


class TopContributors(BaseModel):
    """Strongest variables of a per-target CCA, overall and by sign."""
    target: str
    correlation: Optional[float] = None
    all: Optional[List[Contributor]] = None
    positive: Optional[List[Contributor]] = None
    negative: Optional[List[Contributor]] = None
    dropped_columns: List[str] = Field(default_factory=list)
    error: Optional[str] = None


class CcaSection(BaseModel):
    """Joint CCA of two blocks plus per-target top contributor lists."""
    level: str
    n_observations: int = 0
    x_variables: List[str] = Field(default_factory=list)
    y_variables: List[str] = Field(default_factory=list)
    dropped_columns: List[str] = Field(default_factory=list)
    correlations: Optional[List[float]] = None
    x_shares: Optional[Dict[str, float]] = None
    y_shares: Optional[Dict[str, float]] = None
    error: Optional[str] = None
    top_contributors: Dict[str, TopContributors] = Field(default_factory=dict)


class QuadrantProfile(BaseModel):
    trials: int
    mean_saliency_area: Optional[float] = None
    mean_region_count: Optional[float] = None


class ExcludedTrial(BaseModel):
    model_config = ConfigDict(frozen=True)

    trial_id: str
    stream: str
    reason: str


class Provenance(BaseModel):
    threshold: float
    connectivity: int
    min_region_fraction: float
    target_fps: float
    ridge: float
    corpus_digest: str
    trials_in_manifest: int
    trials_complete: int
    excluded: List[ExcludedTrial] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    pcc_table: List[PccCell]
    cca_saliency_vs_au: CcaSection
    cca_au_vs_emotion: CcaSection
    quadrant_census: Dict[str, int]
    quadrant_profile: Dict[str, QuadrantProfile]
    region_count_histogram: Dict[str, int]
    provenance: Provenance
