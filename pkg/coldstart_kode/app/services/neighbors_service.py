# coldstart_kode/app/services/neighbors_service.py

from typing import Optional

import numpy as np
from scipy import sparse

from ..core.config import settings
from ..core.exceptions import EmptyDatasetError, ItemLimitError
from ..models.data_models import AnswerList, ItemKnnModel, ItemSimilarityMatrix, SparseRatings
from ..utilities.logging_config import logger

_VARIANCE_EPS = 1e-12


def pearson(data: SparseRatings, i: int, j: int) -> Optional[float]:
    """
    Correlação de Pearson entre os itens i e j sobre os usuários que avaliaram
    ambos, centrada nas médias do subconjunto co-avaliado.
    None = indefinida (menos de 2 co-avaliadores ou variância nula).
    """
    users_i, values_i = data.by_item(i)
    users_j, values_j = data.by_item(j)
    common, idx_i, idx_j = np.intersect1d(users_i, users_j, assume_unique=True, return_indices=True)
    if common.size < 2:
        return None
    x = values_i[idx_i] - values_i[idx_i].mean()
    y = values_j[idx_j] - values_j[idx_j].mean()
    var_x, var_y = float(x @ x), float(y @ y)
    if var_x <= _VARIANCE_EPS or var_y <= _VARIANCE_EPS:
        return None
    return float(np.clip((x @ y) / np.sqrt(var_x * var_y), -1.0, 1.0))


def _entries(matrix: sparse.csr_matrix, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    if rows.size == 0:
        return np.zeros(0)
    return np.asarray(matrix[rows, cols], dtype=np.float64).ravel()


def build_similarity(data: SparseRatings, max_items: Optional[int] = None) -> ItemSimilarityMatrix:
    """
    Correlações de Pearson de todos os pares co-avaliados, por somas de
    co-avaliação esparsas (BᵀB, XᵀB, XᵀX). Só o triângulo superior é calculado
    e depois espelhado, então a matriz é exatamente simétrica.
    """
    limit = settings.ITEMKNN_MAX_ITEMS if max_items is None else max_items
    if data.num_items > limit:
        raise ItemLimitError(f"ItemKNN recusado: {data.num_items} itens > limite de {limit}")
    if len(data) == 0:
        raise EmptyDatasetError("Sem avaliações para calcular similaridades.")

    shape = (data.num_users, data.num_items)
    X = sparse.csr_matrix((data.values, (data.users, data.items)), shape=shape)
    B = sparse.csr_matrix((np.ones(len(data)), (data.users, data.items)), shape=shape)

    co = (B.T @ B).tocoo()
    upper = co.row < co.col
    rows = co.row[upper].astype(np.int64)
    cols = co.col[upper].astype(np.int64)
    n = co.data[upper]

    sx = (X.T @ B).tocsr()     # sx[i, j] = Σ x_ui sobre co-avaliadores de (i, j)
    sxy = (X.T @ X).tocsr()
    sx_i = _entries(sx, rows, cols)
    sx_j = _entries(sx, cols, rows)
    sum_xy = _entries(sxy, rows, cols)

    with np.errstate(divide="ignore", invalid="ignore"):
        var_i = n - sx_i * sx_i / n
        var_j = n - sx_j * sx_j / n
        cov = sum_xy - sx_i * sx_j / n
        sims = cov / np.sqrt(var_i * var_j)

    defined = (n >= 2) & (var_i > _VARIANCE_EPS) & (var_j > _VARIANCE_EPS)
    sims = np.where(defined, np.clip(sims, -1.0, 1.0), np.nan)

    matrix = ItemSimilarityMatrix.from_pairs(data.num_items, rows, cols, n.astype(np.int64), sims)
    logger.info(
        f"✅ Similaridades ItemKNN: I={data.num_items}, pares co-avaliados={rows.size}, "
        f"definidos={matrix.num_defined}"
    )
    return matrix


def train_itemknn(train: SparseRatings, k: int = 0, max_items: Optional[int] = None) -> ItemKnnModel:
    """Similaridades + médias de item do treino (fallback) + média global."""
    similarity = build_similarity(train, max_items=max_items)
    counts = train.item_counts()
    sums = np.bincount(train.items, weights=train.values, minlength=train.num_items)
    with np.errstate(divide="ignore", invalid="ignore"):
        item_means = np.where(counts > 0, sums / counts, np.nan)
    return ItemKnnModel(
        similarity=similarity,
        item_means=item_means,
        global_mean=float(train.values.mean()),
        k=int(k),
        item_ids=train.item_ids,
    )


def _fallback(model: ItemKnnModel, item: int) -> float:
    mean = model.item_means[item]
    return float(mean) if np.isfinite(mean) else model.global_mean


def itemknn_predict_items(
    model: ItemKnnModel, answers: AnswerList, items: np.ndarray, k: Optional[int] = None
) -> np.ndarray:
    """
    Para cada item alvo: os k vizinhos de maior similaridade entre as respostas
    (empates por item crescente), Σ sim·valor / Σ|sim|; sem vizinhos, média do
    item e depois média global. k = 0 usa todos os vizinhos.
    """
    k = model.k if k is None else int(k)
    items = np.asarray(items, dtype=np.int64)
    preds = np.empty(items.size, dtype=np.float64)
    if not len(answers):
        for row, item in enumerate(items):
            preds[row] = _fallback(model, int(item))
        return preds

    block = model.similarity.block(items, answers.items)
    block[items[:, None] == answers.items[None, :]] = np.nan
    ranked = np.argsort(np.where(np.isnan(block), np.inf, -block), axis=1, kind="stable")
    if k > 0:
        ranked = ranked[:, :k]

    for row, item in enumerate(items):
        sims = block[row, ranked[row]]
        values = answers.values[ranked[row]]
        ok = np.isfinite(sims)
        weight = float(np.abs(sims[ok]).sum())
        if weight > 0.0:
            preds[row] = float(sims[ok] @ values[ok]) / weight
        else:
            preds[row] = _fallback(model, int(item))
    return preds


def itemknn_predict(model: ItemKnnModel, answers: AnswerList, i: int, k: Optional[int] = None) -> float:
    return float(itemknn_predict_items(model, answers, np.array([i]), k=k)[0])


class ItemKnnPredictor:
    """Preditor por vizinhança de itens sobre as respostas visíveis."""

    inductive = True

    def __init__(self, model: ItemKnnModel, name: str = "itemknn"):
        self.model = model
        self.name = name

    def check_user(self, user: int) -> None:
        return None

    def predict_user(self, user: int, answers: AnswerList, items: np.ndarray) -> np.ndarray:
        return itemknn_predict_items(self.model, answers, items)


__all__ = [
    "pearson",
    "build_similarity",
    "train_itemknn",
    "itemknn_predict",
    "itemknn_predict_items",
    "ItemKnnPredictor",
]
