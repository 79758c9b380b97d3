# coldstart_kode/app/services/synth_service.py

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..models.data_models import SparseRatings
from ..utilities.helpers import make_rng
from ..utilities.logging_config import logger

SCALES = ("stars", "yahoo", "binary")


def _to_scale(scores: np.ndarray, scale: str) -> np.ndarray:
    """
    Converte o score latente na escala do dataset, preservando o sinal
    depois da binarização pelo limiar padrão (3 para estrelas, 50 para 0–100).
    """
    if scale == "stars":
        return np.where(
            scores > 0,
            np.where(scores > 1.0, 5.0, 4.0),
            np.where(scores < -1.0, 1.0, np.where(scores < -0.5, 2.0, 3.0)),
        )
    if scale == "yahoo":
        raw = np.round(50.0 + 50.0 * np.tanh(scores))
        raw = np.where((scores > 0) & (raw <= 50.0), 51.0, raw)
        return np.clip(raw, 0.0, 100.0)
    if scale == "binary":
        return np.where(scores > 0, 1.0, -1.0)
    raise ValueError(f"Escala desconhecida: {scale} (use {', '.join(SCALES)})")


def planted_frame(
    num_users: int,
    num_items: int,
    ratings_per_user: int,
    rank: int = 2,
    noise: float = 0.1,
    scale: str = "stars",
    popularity_skew: float = 0.8,
    seed: int = 0,
) -> pd.DataFrame:
    """
    Dados planted de posto baixo: score = a_uᵀb_i + ruído; os itens de cada
    usuário são sorteados com popularidade do tipo Zipf (expoente `popularity_skew`).
    """
    if ratings_per_user > num_items:
        raise ValueError("ratings_per_user não pode exceder num_items")
    rng = make_rng(seed)
    users_f = rng.normal(size=(num_users, rank))
    items_f = rng.normal(size=(num_items, rank))
    weights = 1.0 / np.arange(1, num_items + 1) ** popularity_skew
    probs = weights / weights.sum()

    users, items = [], []
    for u in range(num_users):
        chosen = rng.choice(num_items, size=ratings_per_user, replace=False, p=probs)
        users.append(np.full(ratings_per_user, u))
        items.append(chosen)
    users = np.concatenate(users)
    items = np.concatenate(items)
    scores = np.einsum("ij,ij->i", users_f[users], items_f[items]) + noise * rng.normal(size=users.size)

    return pd.DataFrame({
        "user": users,
        "item": items,
        "rating": _to_scale(scores, scale),
    })


def planted_ratings(num_users: int, num_items: int, ratings_per_user: int, **kwargs) -> SparseRatings:
    """planted_frame já binarizado (+1 sse score > 0), em índices densos."""
    kwargs["scale"] = "binary"
    frame = planted_frame(num_users, num_items, ratings_per_user, **kwargs)
    values = frame["rating"].to_numpy(dtype=np.float64)
    return SparseRatings(
        num_users=num_users,
        num_items=num_items,
        users=frame["user"].to_numpy(),
        items=frame["item"].to_numpy(),
        raw=values,
        values=values,
    )


def write_synthetic(path: Union[str, Path], frame: pd.DataFrame, separator: str = "\t") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = (f"{u}{separator}{i}{separator}{r:g}\n" for u, i, r in frame.itertuples(index=False))
    path.write_text("".join(lines), encoding="utf-8")
    logger.info(f"✅ Dataset sintético gravado em {path}: {len(frame)} avaliações")
    return path


__all__ = ["SCALES", "planted_frame", "planted_ratings", "write_synthetic"]
