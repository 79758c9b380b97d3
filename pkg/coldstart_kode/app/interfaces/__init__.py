# coldstart_kode/app/interfaces/__init__.py

from typing import Any, Callable, Protocol, runtime_checkable

import numpy as np

from ..models.data_models import AnswerList
from ..models.schemas import Hyperparams, MetricsReport, UserSet


# ========== PREDITORES ==========

@runtime_checkable
class RatingPredictor(Protocol):
    """Interface comum dos preditores avaliados pelo protocolo"""

    name: str
    inductive: bool

    def check_user(self, user: int) -> None: ...

    def predict_user(self, user: int, answers: AnswerList, items: np.ndarray) -> np.ndarray: ...


# ========== GRID SEARCH ==========

TrainFn = Callable[[Hyperparams], Any]
EvalFn = Callable[[Any, UserSet], MetricsReport]
CellRunner = Callable[[Hyperparams, UserSet], MetricsReport]


__all__ = [
    "RatingPredictor",
    "TrainFn",
    "EvalFn",
    "CellRunner",
]
