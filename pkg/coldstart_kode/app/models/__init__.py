from .schemas import (
    ModelMode,
    ModelKind,
    InterviewSource,
    SelectionMethod,
    Method,
    UserSet,
    Hyperparams,
    Interview,
    SelectionScore,
    TrainingReport,
    MetricsReport,
    GridCell,
    GridSearchResult,
)
from .data_models import (
    RatingTriple,
    SparseRatings,
    AnswerList,
    DatasetSplit,
    MfModel,
    IamModel,
    ItemSimilarityMatrix,
    ItemKnnModel,
)

__all__ = [
    "ModelMode",
    "ModelKind",
    "InterviewSource",
    "SelectionMethod",
    "Method",
    "UserSet",
    "Hyperparams",
    "Interview",
    "SelectionScore",
    "TrainingReport",
    "MetricsReport",
    "GridCell",
    "GridSearchResult",
    "RatingTriple",
    "SparseRatings",
    "AnswerList",
    "DatasetSplit",
    "MfModel",
    "IamModel",
    "ItemSimilarityMatrix",
    "ItemKnnModel",
]
