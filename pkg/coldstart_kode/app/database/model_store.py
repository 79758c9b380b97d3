# coldstart_kode/app/database/model_store.py

import struct
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from ..core.exceptions import ModelFormatError, ModelVersionError
from ..models.data_models import IamModel, ItemKnnModel, ItemSimilarityMatrix, MfModel
from ..models.schemas import Hyperparams, Interview, InterviewSource, ModelKind, ModelMode
from ..utilities.constants import MODEL_MAGIC, MODEL_VERSION
from ..utilities.logging_config import logger

# ========== LAYOUT ==========
# magic (8 bytes) | versão (uint32 LE) | tamanho do cabeçalho (uint32 LE)
# | cabeçalho JSON (utf-8) | arrays na ordem declarada, float64 little-endian
_PREFIX = struct.Struct("<II")
_PAYLOAD_DTYPE = np.dtype("<f8")

ModelLike = Union[MfModel, IamModel, ItemKnnModel, Interview]


class ArraySpec(BaseModel):
    name: str
    shape: List[int]
    dtype: str


class ModelFileHeader(BaseModel):
    kind: ModelKind
    dims: Tuple[int, int, int]
    hyper: Optional[Hyperparams] = None
    mode: Optional[ModelMode] = None
    arrays: List[ArraySpec] = []
    user_ids: Optional[List[str]] = None
    item_ids: Optional[List[str]] = None
    meta: Dict[str, Any] = {}


# ========== FUNÇÕES AUXILIARES ==========

def _ids(values: Optional[np.ndarray]) -> Optional[List[str]]:
    return None if values is None else [str(v) for v in values]


def _restore_ids(values: Optional[List[str]]) -> Optional[np.ndarray]:
    return None if values is None else np.asarray(values, dtype=object)


def _iam_kind(mode: ModelMode) -> ModelKind:
    return {
        ModelMode.warm: ModelKind.iam_warm,
        ModelMode.cold: ModelKind.iam_cold,
        ModelMode.csw: ModelKind.iam_csw,
    }[ModelMode(mode)]


def _describe(model: ModelLike) -> Tuple[ModelFileHeader, Dict[str, np.ndarray]]:
    if isinstance(model, MfModel):
        arrays = {"P": model.P, "Q": model.Q, "fold_in": model.fold_in}
        header = ModelFileHeader(
            kind=ModelKind.mf,
            dims=(model.num_users, model.num_items, model.hyper.latent_dim),
            hyper=model.hyper,
            user_ids=_ids(model.user_ids),
            item_ids=_ids(model.item_ids),
        )
    elif isinstance(model, IamModel):
        arrays = {
            "Q": model.Q,
            "psi0": model.psi0,
            "psi_pos": model.psi_pos,
            "psi_neg": model.psi_neg,
            "alpha": model.alpha,
        }
        header = ModelFileHeader(
            kind=_iam_kind(model.mode),
            dims=(0, model.num_items, model.latent_dim),
            hyper=model.hyper,
            mode=model.mode,
            item_ids=_ids(model.item_ids),
        )
    elif isinstance(model, ItemKnnModel):
        rows, cols, support, sims = model.similarity.pairs()
        arrays = {
            "rows": rows,
            "cols": cols,
            "sims": sims,
            "support": support,
            "item_means": model.item_means,
        }
        header = ModelFileHeader(
            kind=ModelKind.itemknn,
            dims=(0, model.num_items, 0),
            item_ids=_ids(model.item_ids),
            meta={"k": model.k, "global_mean": model.global_mean},
        )
    elif isinstance(model, Interview):
        arrays = {"items": np.asarray(model.items, dtype=np.int64)}
        if model.weights is not None:
            arrays["weights"] = np.asarray(model.weights, dtype=np.float64)
        header = ModelFileHeader(
            kind=ModelKind.interview,
            dims=(0, model.size, 0),
            meta={"source": model.source.value},
        )
    else:
        raise TypeError(f"Tipo de modelo não suportado: {type(model).__name__}")

    header.arrays = [
        ArraySpec(name=name, shape=list(np.shape(arr)), dtype=np.asarray(arr).dtype.str)
        for name, arr in arrays.items()
    ]
    return header, arrays


# ========== SAVE / LOAD ==========

def save_model(model: ModelLike, path: Union[str, Path]) -> Path:
    """Grava qualquer tipo de modelo no contêiner binário versionado."""
    path = Path(path)
    header, arrays = _describe(model)
    header_bytes = header.model_dump_json().encode("utf-8")

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(_PREFIX.pack(MODEL_VERSION, len(header_bytes)))
        fh.write(header_bytes)
        for name in (spec.name for spec in header.arrays):
            fh.write(np.ascontiguousarray(arrays[name], dtype=_PAYLOAD_DTYPE).tobytes())

    logger.info(f"✅ Modelo {header.kind.value} salvo em {path}")
    return path


def read_header(path: Union[str, Path]) -> Tuple[ModelFileHeader, bytes]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Arquivo de modelo não encontrado: {path}")
    blob = path.read_bytes()

    if len(blob) < len(MODEL_MAGIC) + _PREFIX.size or blob[:len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise ModelFormatError(f"{path}: assinatura inválida (não é um arquivo de modelo)")
    offset = len(MODEL_MAGIC)
    version, header_len = _PREFIX.unpack_from(blob, offset)
    if version != MODEL_VERSION:
        raise ModelVersionError(version, MODEL_VERSION)
    offset += _PREFIX.size

    try:
        header = ModelFileHeader.model_validate_json(blob[offset:offset + header_len])
    except ValidationError as e:
        raise ModelFormatError(f"{path}: cabeçalho inválido: {e}") from e
    return header, blob[offset + header_len:]


def _read_arrays(header: ModelFileHeader, payload: bytes, path: Path) -> Dict[str, np.ndarray]:
    arrays: Dict[str, np.ndarray] = {}
    offset = 0
    for spec in header.arrays:
        count = int(np.prod(spec.shape)) if spec.shape else 1
        size = count * _PAYLOAD_DTYPE.itemsize
        if offset + size > len(payload):
            raise ModelFormatError(f"{path}: payload truncado em '{spec.name}'")
        if count:
            data = np.frombuffer(payload, dtype=_PAYLOAD_DTYPE, count=count, offset=offset)
        else:
            data = np.zeros(0, dtype=_PAYLOAD_DTYPE)
        arrays[spec.name] = data.astype(np.dtype(spec.dtype)).reshape(spec.shape)
        offset += size
    if offset != len(payload):
        raise ModelFormatError(f"{path}: {len(payload) - offset} bytes sobrando no payload")
    return arrays


def load_model(path: Union[str, Path]) -> ModelLike:
    """Lê um arquivo de modelo; versões diferentes são rejeitadas."""
    path = Path(path)
    header, payload = read_header(path)
    arrays = _read_arrays(header, payload, path)

    try:
        if header.kind == ModelKind.mf:
            model: ModelLike = MfModel(
                P=arrays["P"], Q=arrays["Q"], hyper=header.hyper, fold_in=arrays["fold_in"],
                user_ids=_restore_ids(header.user_ids), item_ids=_restore_ids(header.item_ids),
            )
        elif header.kind in (ModelKind.iam_warm, ModelKind.iam_cold, ModelKind.iam_csw):
            model = IamModel(
                Q=arrays["Q"], psi0=arrays["psi0"], psi_pos=arrays["psi_pos"], psi_neg=arrays["psi_neg"],
                alpha=arrays["alpha"], mode=header.mode, hyper=header.hyper,
                item_ids=_restore_ids(header.item_ids),
            )
        elif header.kind == ModelKind.itemknn:
            similarity = ItemSimilarityMatrix.from_pairs(
                header.dims[1], arrays["rows"], arrays["cols"], arrays["support"], arrays["sims"]
            )
            model = ItemKnnModel(
                similarity=similarity,
                item_means=arrays["item_means"],
                global_mean=float(header.meta["global_mean"]),
                k=int(header.meta["k"]),
                item_ids=_restore_ids(header.item_ids),
            )
        else:
            weights = arrays.get("weights")
            model = Interview(
                items=tuple(int(i) for i in arrays["items"]),
                source=InterviewSource(header.meta.get("source", InterviewSource.manual.value)),
                weights=None if weights is None else tuple(float(w) for w in weights),
            )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"{path}: conteúdo inconsistente com o tipo {header.kind.value}: {e}") from e

    logger.info(f"✅ Modelo {header.kind.value} carregado de {path}")
    return model


__all__ = [
    "ModelFileHeader",
    "ArraySpec",
    "save_model",
    "read_header",
    "load_model",
]
