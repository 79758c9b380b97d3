# coldstart_kode/app/services/pca_export.py

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..core.exceptions import InsufficientDataError, ModelModeError
from ..models.data_models import IamModel
from ..models.schemas import ModelMode
from ..utilities.constants import PCA_MAX_ITER, PCA_SEED, PCA_TOLERANCE
from ..utilities.helpers import make_rng
from ..utilities.logging_config import logger

PCA_COLUMNS = ["itemId", "sign", "x", "y", "norm"]


def translation_set(model: IamModel) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vetores α_iΨ_i^{+1} e α_iΨ_i^{−1} dos itens com α_i ≠ 0, em ordem de
    item e depois de sinal (+1 antes de −1).
    """
    items = np.flatnonzero(model.alpha != 0.0)
    vectors = np.empty((2 * items.size, model.latent_dim))
    vectors[0::2] = model.alpha[items, None] * model.psi_pos[items]
    vectors[1::2] = model.alpha[items, None] * model.psi_neg[items]
    return vectors, np.repeat(items, 2), np.tile([1, -1], items.size)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nonzero = np.flatnonzero(np.abs(v) > 1e-12)
    if nonzero.size and v[nonzero[0]] < 0:
        return -v
    return v


def principal_components(
    X: np.ndarray,
    n_components: int = 2,
    tol: float = PCA_TOLERANCE,
    max_iter: int = PCA_MAX_ITER,
    seed: int = PCA_SEED,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Componentes principais por iteração de potência com deflação sobre a
    covariância (1/(m−1)) dos dados centrados. Devolve (componentes k×N,
    autovalores). Componentes são ortonormais; a primeira coordenada não nula
    de cada uma é positiva.
    """
    X = np.asarray(X, dtype=np.float64)
    centered = X - X.mean(axis=0)
    cov = centered.T @ centered / (X.shape[0] - 1)
    dim = cov.shape[0]
    rng = make_rng(seed)

    components = np.zeros((n_components, dim))
    eigenvalues = np.zeros(n_components)
    scale = max(float(np.abs(cov).max()), 1.0)
    work = cov.copy()

    for c in range(min(n_components, dim)):
        basis = components[:c]
        v = rng.normal(size=dim)
        v -= basis.T @ (basis @ v)
        v /= np.linalg.norm(v)
        for _ in range(max_iter):
            w = work @ v
            w -= basis.T @ (basis @ w)
            norm = np.linalg.norm(w)
            if norm <= 1e-14 * scale:
                break
            w /= norm
            done = np.linalg.norm(w - v) < tol
            v = w
            if done:
                break
        v = _fix_sign(v)
        components[c] = v
        eigenvalues[c] = float(v @ cov @ v)
        work = work - eigenvalues[c] * np.outer(v, v)

    return components, eigenvalues


def export_pca(
    model: IamModel,
    out_path: Optional[Union[str, Path]] = None,
) -> pd.DataFrame:
    """
    Projeta as translações não nulas nas 2 primeiras componentes principais.
    Colunas: itemId, sign, x, y, norm (‖α_iΨ_i^r‖₂, sem centrar).
    """
    if model.mode == ModelMode.warm:
        raise ModelModeError("Export PCA requer modelo cold ou csw.")
    vectors, items, signs = translation_set(model)
    if vectors.shape[0] < 3:
        raise InsufficientDataError(f"PCA requer ao menos 3 translações (há {vectors.shape[0]}).")

    components, eigenvalues = principal_components(vectors)
    coords = (vectors - vectors.mean(axis=0)) @ components.T
    ids = model.item_ids[items] if model.item_ids is not None else items

    frame = pd.DataFrame({
        "itemId": ids,
        "sign": signs,
        "x": coords[:, 0],
        "y": coords[:, 1],
        "norm": np.linalg.norm(vectors, axis=1),
    }, columns=PCA_COLUMNS)
    logger.info(f"✅ PCA: {len(frame)} translações, autovalores={eigenvalues.round(6).tolist()}")

    if out_path is not None:
        from ..database.text_exports import write_table
        write_table(frame, out_path)
    return frame


__all__ = ["PCA_COLUMNS", "translation_set", "principal_components", "export_pca"]
