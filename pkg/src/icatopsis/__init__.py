"""Ranking alternatives under statistically dependent criteria.

TOPSIS and TOPSIS-M, plus ICA-TOPSIS and ICA-TOPSIS-M, which first estimate
independent latent criteria by independent component analysis.
"""

from .core import (
    DecisionMatrix,
    IcaTopsisError,
    IdealPair,
    MixingInstance,
    RankingOutcome,
    SeparationResult,
    SpaceTag,
    ValidationError,
    WeightVector,
    validate_problem,
)
from .ica import IcaConfig, fastica, jade, separate
from .pipelines import ica_topsis, ica_topsis_m, utopic_pipeline
from .topsis import topsis_rank
from .topsis_m import topsis_m_rank, topsis_m_rank_with_ideals

__all__ = [
    "DecisionMatrix",
    "IcaConfig",
    "IcaTopsisError",
    "IdealPair",
    "MixingInstance",
    "RankingOutcome",
    "SeparationResult",
    "SpaceTag",
    "ValidationError",
    "WeightVector",
    "fastica",
    "ica_topsis",
    "ica_topsis_m",
    "jade",
    "separate",
    "topsis_m_rank",
    "topsis_m_rank_with_ideals",
    "topsis_rank",
    "utopic_pipeline",
    "validate_problem",
]

__version__ = "0.1.0"
