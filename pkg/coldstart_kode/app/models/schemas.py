from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelMode(str, Enum):
    warm = "warm"
    cold = "cold"
    csw = "csw"


class ModelKind(str, Enum):
    mf = "mf"
    iam_warm = "iam-warm"
    iam_cold = "iam-cold"
    iam_csw = "iam-csw"
    itemknn = "itemknn"
    interview = "interview"


class InterviewSource(str, Enum):
    learned_alpha = "learned-alpha"
    pop = "pop"
    helf = "helf"
    manual = "manual"


class SelectionMethod(str, Enum):
    pop = "pop"
    helf = "helf"


class Method(str, Enum):
    """Métodos avaliados pela CLI."""
    mf = "mf"
    iam = "iam"
    csiam = "csiam"
    cswiam = "cswiam"
    itemknn = "itemknn"
    iampop = "iampop"
    majority = "majority"


class UserSet(str, Enum):
    valid = "valid"
    test = "test"


class Hyperparams(BaseModel):
    """
    Hiperparâmetros compartilhados por MF e IAM (λ2 só afeta CS-IAM/CSW-IAM,
    `neighbors` só o ItemKNN; 0 = todos os vizinhos).
    """
    model_config = ConfigDict(frozen=True)

    latent_dim: int = Field(20, ge=1)
    learning_rate: float = Field(0.01, gt=0)
    lambda1: float = Field(1e-4, ge=0)
    lambda2: float = Field(0.0, ge=0)
    epochs: int = Field(20, ge=1)
    seed: int = 42
    neighbors: int = Field(0, ge=0)

    def with_seed(self, seed: int) -> "Hyperparams":
        return self.model_copy(update={"seed": int(seed)})


class Interview(BaseModel):
    """
    Conjunto fixo de itens perguntado a todo novo usuário (#Q = len(items)).
    `weights` guarda |α| com sinal quando a origem é learned-alpha.
    """
    model_config = ConfigDict(frozen=True)

    items: Tuple[int, ...] = ()
    source: InterviewSource = InterviewSource.manual
    weights: Optional[Tuple[float, ...]] = None

    @field_validator("items")
    @classmethod
    def validate_unique(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("Itens da entrevista devem ser únicos.")
        if any(i < 0 for i in v):
            raise ValueError("Itens da entrevista devem ser índices não negativos.")
        return v

    @model_validator(mode="after")
    def validate_weights(self):
        if self.weights is not None and len(self.weights) != len(self.items):
            raise ValueError("weights deve ter o mesmo tamanho de items.")
        return self

    @property
    def size(self) -> int:
        return len(self.items)

    def truncated(self, m: int) -> "Interview":
        """Mantém os m primeiros itens (ordem da entrevista)."""
        weights = self.weights[:m] if self.weights is not None else None
        return Interview(items=self.items[:m], source=self.source, weights=weights)


class SelectionScore(BaseModel):
    item: int
    score: float
    method: SelectionMethod

    @model_validator(mode="after")
    def validate_score(self):
        if self.score < 0:
            raise ValueError("Score de seleção deve ser não negativo.")
        if self.method == SelectionMethod.helf and self.score > 1.0:
            raise ValueError("Score HELF deve estar em [0, 1].")
        return self


class TrainingReport(BaseModel):
    """
    Rastro de um treino: perdas por época e contadores de auditoria.
    `clip_trace` guarda (α antes, α após gradiente, α final) no modo auditoria.
    """
    epoch_losses: List[float] = []
    self_contributions: int = 0
    clip_events: int = 0
    forbidden_reads: int = 0
    clip_trace: List[Tuple[float, float, float]] = []


class MetricsReport(BaseModel):
    rmse: float = Field(..., ge=0)
    accuracy: float = Field(..., ge=0, le=1)
    interview_size: int = Field(0, ge=0)
    users_evaluated: int = Field(0, ge=0)
    method: str
    config: Optional[Hyperparams] = None
    seeds: List[int] = []
    dataset: str = ""
    user_set: str = UserSet.valid.value
    target_size: Optional[int] = None
    added_fraction: Optional[float] = None


class GridCell(BaseModel):
    """Uma célula (config, semente) do grid search."""
    config_index: int
    seed: int
    hyper: Hyperparams
    report: Optional[MetricsReport] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.report is None


class GridSearchResult(BaseModel):
    best_index: int
    best_config: Hyperparams
    mean_accuracy: List[Optional[float]]
    cells: List[GridCell]
    test_report: Optional[MetricsReport] = None


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
]
