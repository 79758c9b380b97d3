# coldstart_kode/app/services/dataset_service.py

from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from ..core.exceptions import DatasetParseError, EmptyDatasetError
from ..models.data_models import SparseRatings
from ..utilities.constants import DEFAULT_THRESHOLDS, SEPARATORS
from ..utilities.logging_config import logger


def resolve_separator(fmt: str) -> str:
    """
    Aceita o nome do formato (tab, comma, colons) ou o próprio separador.
    """
    return SEPARATORS.get(fmt, fmt)


def load_dataset(
    path: Union[str, Path],
    separator: str = "\t",
    min_user_ratings: int = 0,
    id_map_dir: Optional[Union[str, Path]] = None,
) -> SparseRatings:
    """
    Lê linhas `user<sep>item<sep>rating[<sep>timestamp]` e remapeia ids para
    índices densos 0-based (ordem de primeira aparição).
    - Linhas vazias ou iniciadas por `#` são ignoradas.
    - Par (usuário, item) repetido: vale a última ocorrência.
    - Se `id_map_dir` for informado, os mapas de ids são gravados ao lado.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Arquivo de ratings não encontrado: {path}")

    sep = resolve_separator(separator)
    lines = pd.Series(path.read_text(encoding="utf-8").splitlines(), dtype=object)
    line_numbers = np.arange(1, len(lines) + 1)

    stripped = lines.str.strip()
    keep = (stripped != "") & ~stripped.str.startswith("#")
    body = stripped[keep]
    if body.empty:
        raise EmptyDatasetError(f"Nenhuma avaliação encontrada em {path}")
    numbers = line_numbers[keep.to_numpy()]

    parts = body.str.split(sep, regex=False, expand=True)
    parts.index = numbers
    if parts.shape[1] < 3:
        raise DatasetParseError("esperados ao menos 3 campos (user, item, rating)", int(numbers[0]))
    if parts.shape[1] > 4:
        extra = parts.iloc[:, 4:].notna().any(axis=1)
        if extra.any():
            raise DatasetParseError("campos demais na linha", int(parts.index[extra.to_numpy()][0]))

    users = parts[0].str.strip()
    items = parts[1].str.strip()
    ratings = pd.to_numeric(parts[2].str.strip(), errors="coerce")

    bad = users.isna() | (users == "") | items.isna() | (items == "") | ratings.isna()
    if bad.any():
        line = int(parts.index[bad.to_numpy()][0])
        raise DatasetParseError("campos ausentes ou rating não numérico", line)

    frame = pd.DataFrame({"user": users.to_numpy(), "item": items.to_numpy(), "raw": ratings.to_numpy()})
    before = len(frame)
    frame = frame.drop_duplicates(subset=["user", "item"], keep="last")
    if len(frame) < before:
        logger.warning(f"⚠️ {before - len(frame)} pares (usuário, item) repetidos; mantida a última ocorrência")

    if min_user_ratings > 0:
        counts = frame.groupby("user", sort=False)["item"].transform("size")
        frame = frame[counts >= min_user_ratings]
        if frame.empty:
            raise EmptyDatasetError(f"Nenhum usuário com ao menos {min_user_ratings} avaliações")

    user_codes, user_ids = pd.factorize(frame["user"], sort=False)
    item_codes, item_ids = pd.factorize(frame["item"], sort=False)

    data = SparseRatings(
        num_users=len(user_ids),
        num_items=len(item_ids),
        users=user_codes,
        items=item_codes,
        raw=frame["raw"].to_numpy(dtype=np.float64),
        values=np.zeros(len(frame), dtype=np.float64),
        user_ids=np.asarray(user_ids, dtype=object),
        item_ids=np.asarray(item_ids, dtype=object),
    )
    logger.info(
        f"✅ Dataset {path.name} carregado: U={data.num_users}, I={data.num_items}, |O|={len(data)}"
    )

    if id_map_dir is not None:
        from ..database.text_exports import write_id_maps
        write_id_maps(data, id_map_dir)

    return data


def infer_threshold(data: SparseRatings) -> float:
    """
    Limiar padrão pela escala observada: Jester (−10..10) → 0,
    Yahoo (0..100) → 50, estrelas 1–5 → 3.
    """
    low, high = float(data.raw.min()), float(data.raw.max())
    if low < 0:
        return DEFAULT_THRESHOLDS["jester"]
    if high > 5:
        return DEFAULT_THRESHOLDS["yahoo"]
    return DEFAULT_THRESHOLDS["stars"]


def binarize(data: SparseRatings, threshold: Optional[float] = None) -> SparseRatings:
    """
    value = +1 se raw > threshold (estrito), senão −1; raw é preservado.
    """
    if threshold is None:
        threshold = infer_threshold(data)
    if len(data) and not (data.raw.min() <= threshold <= data.raw.max()):
        logger.warning(
            f"⚠️ Limiar {threshold} fora da escala observada [{data.raw.min()}, {data.raw.max()}]"
        )
    values = np.where(data.raw > threshold, 1.0, -1.0)
    return data.with_values(values)


def dataset_stats(data: SparseRatings) -> Dict[str, Any]:
    """Resumo para o comando ingest."""
    cells = data.num_users * data.num_items
    stats: Dict[str, Any] = {
        "users": data.num_users,
        "items": data.num_items,
        "ratings": len(data),
        "density": (len(data) / cells) if cells else 0.0,
        "raw_min": float(data.raw.min()) if len(data) else None,
        "raw_max": float(data.raw.max()) if len(data) else None,
    }
    if data.is_binarized:
        stats["like_rate"] = float(np.mean(data.values > 0))
    return stats


__all__ = [
    "resolve_separator",
    "load_dataset",
    "infer_threshold",
    "binarize",
    "dataset_stats",
]
