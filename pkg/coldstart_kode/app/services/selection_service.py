# coldstart_kode/app/services/selection_service.py

from typing import List

import numpy as np

from ..core.exceptions import SelectionRangeError
from ..models.data_models import SparseRatings
from ..models.schemas import Interview, InterviewSource, SelectionMethod, SelectionScore
from ..utilities.helpers import stable_top_k
from ..utilities.logging_config import logger


def _check_k(train: SparseRatings, k: int) -> None:
    if k < 0 or k > train.num_items:
        raise SelectionRangeError(f"k={k} fora de [0, {train.num_items}]")


def pop_scores(train: SparseRatings) -> np.ndarray:
    return train.item_counts().astype(np.float64)


def helf_scores(train: SparseRatings) -> np.ndarray:
    """
    Média harmônica entre log-frequência normalizada (base U ativos, limitada a
    [0, 1]) e entropia binária like/dislike em bits. Itens sem avaliação valem 0.
    """
    freq = train.item_counts().astype(np.float64)
    likes = np.bincount(train.items, weights=(train.values > 0).astype(np.float64), minlength=train.num_items)
    num_users = train.active_users().size

    with np.errstate(divide="ignore", invalid="ignore"):
        if num_users > 1:
            lf = np.where(freq > 0, np.log(np.maximum(freq, 1.0)) / np.log(num_users), 0.0)
        else:
            lf = np.where(freq > 0, 1.0, 0.0)
        lf = np.clip(lf, 0.0, 1.0)

        p = np.where(freq > 0, likes / freq, 0.0)
        ent = np.zeros_like(p)
        mixed = (p > 0) & (p < 1)
        pm = p[mixed]
        ent[mixed] = -(pm * np.log2(pm) + (1 - pm) * np.log2(1 - pm))
        ent = np.clip(ent, 0.0, 1.0)

        denom = lf + ent
        scores = np.where(denom > 0, 2.0 * lf * ent / denom, 0.0)
    return np.clip(scores, 0.0, 1.0)


def select_pop(train: SparseRatings, k: int) -> Interview:
    """Os k itens mais avaliados no treino, empates por índice crescente."""
    _check_k(train, k)
    chosen = stable_top_k(pop_scores(train), k)
    logger.info(f"🔹 Entrevista POP com {k} itens")
    return Interview(items=tuple(int(i) for i in chosen), source=InterviewSource.pop)


def select_helf(train: SparseRatings, k: int) -> Interview:
    """Os k itens de maior score HELF, empates por índice crescente."""
    _check_k(train, k)
    chosen = stable_top_k(helf_scores(train), k)
    logger.info(f"🔹 Entrevista HELF com {k} itens")
    return Interview(items=tuple(int(i) for i in chosen), source=InterviewSource.helf)


def select_interview(train: SparseRatings, method: SelectionMethod, k: int) -> Interview:
    method = SelectionMethod(method)
    if method == SelectionMethod.pop:
        return select_pop(train, k)
    return select_helf(train, k)


def selection_scores(train: SparseRatings, method: SelectionMethod) -> List[SelectionScore]:
    method = SelectionMethod(method)
    scores = pop_scores(train) if method == SelectionMethod.pop else helf_scores(train)
    return [SelectionScore(item=i, score=float(s), method=method) for i, s in enumerate(scores)]


__all__ = [
    "pop_scores",
    "helf_scores",
    "select_pop",
    "select_helf",
    "select_interview",
    "selection_scores",
]
