# coldstart_kode/app/services/objectives.py
"""
Objetivos completos e gradientes analíticos de referência (MF e IAM).
Implementação direta, sem cache nem kernels: serve para checagem de gradiente
por diferenças finitas em instâncias pequenas.
"""

from typing import Dict, Tuple

import numpy as np

from ..models.data_models import SparseRatings
from ..models.schemas import ModelMode

IAM_KEYS = ("Q", "psi0", "psi_pos", "psi_neg", "alpha")


# ========== MF ==========

def mf_triple_loss(p: np.ndarray, q: np.ndarray, r: float, lam: float) -> float:
    e = r - float(q @ p)
    return e * e + lam * (float(q @ q) + float(p @ p))


def mf_triple_gradient(p: np.ndarray, q: np.ndarray, r: float, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    e = r - float(q @ p)
    return -2.0 * e * q + 2.0 * lam * p, -2.0 * e * p + 2.0 * lam * q


def mf_objective(P: np.ndarray, Q: np.ndarray, data: SparseRatings, lam: float) -> float:
    total = 0.0
    for t in data.triples():
        e = t.value - float(Q[t.item] @ P[t.user])
        total += e * e
    return total + lam * (float(np.sum(P * P)) + float(np.sum(Q * Q)))


def mf_gradient(P: np.ndarray, Q: np.ndarray, data: SparseRatings, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    gP = 2.0 * lam * P
    gQ = 2.0 * lam * Q
    for t in data.triples():
        e = t.value - float(Q[t.item] @ P[t.user])
        gP[t.user] += -2.0 * e * Q[t.item]
        gQ[t.item] += -2.0 * e * P[t.user]
    return gP, gQ


# ========== IAM ==========

def _user_rep(params: Dict[str, np.ndarray], items, values, skip: int, mode: ModelMode) -> np.ndarray:
    rep = params["psi0"].copy()
    for j, v in zip(items, values):
        if j == skip:
            continue
        a = 1.0 if mode == ModelMode.warm else params["alpha"][j]
        rep = rep + a * (params["psi_pos"][j] if v > 0 else params["psi_neg"][j])
    return rep


def iam_objective(params: Dict[str, np.ndarray], data: SparseRatings, mode: ModelMode, lambda1: float) -> float:
    """
    Σ (r − q_iᵀ s(f_{u,−i}))² + λ1(‖Q‖² + ‖Ψ0‖² + ‖Ψ⁺‖² + ‖Ψ⁻‖²),
    s = tanh no modo csw e identidade nos demais. O termo L1 de α fica de fora
    (não diferenciável; tratado pelo clipping).
    """
    mode = ModelMode(mode)
    total = 0.0
    for u in range(data.num_users):
        items, values = data.by_user(u)
        for i, r in zip(items, values):
            f = _user_rep(params, items, values, i, mode)
            z = np.tanh(f) if mode == ModelMode.csw else f
            e = r - float(params["Q"][i] @ z)
            total += e * e
    reg = sum(float(np.sum(params[k] ** 2)) for k in ("Q", "psi0", "psi_pos", "psi_neg"))
    return total + lambda1 * reg


def iam_gradient(
    params: Dict[str, np.ndarray], data: SparseRatings, mode: ModelMode, lambda1: float
) -> Dict[str, np.ndarray]:
    """Gradiente analítico de iam_objective; α só recebe gradiente fora do modo warm."""
    mode = ModelMode(mode)
    grads = {k: np.zeros_like(params[k]) for k in IAM_KEYS}
    for u in range(data.num_users):
        items, values = data.by_user(u)
        for i, r in zip(items, values):
            f = _user_rep(params, items, values, i, mode)
            q_i = params["Q"][i]
            if mode == ModelMode.csw:
                z = np.tanh(f)
                g = q_i * (1.0 - z * z)
            else:
                z = f
                g = q_i
            e = r - float(q_i @ z)
            grads["Q"][i] += -2.0 * e * z
            grads["psi0"] += -2.0 * e * g
            for j, v in zip(items, values):
                if j == i:
                    continue
                key = "psi_pos" if v > 0 else "psi_neg"
                a = 1.0 if mode == ModelMode.warm else params["alpha"][j]
                grads[key][j] += -2.0 * e * a * g
                if mode != ModelMode.warm:
                    grads["alpha"][j] += -2.0 * e * float(g @ params[key][j])
    for k in ("Q", "psi0", "psi_pos", "psi_neg"):
        grads[k] += 2.0 * lambda1 * params[k]
    return grads


def _touched(params: Dict[str, np.ndarray], items, values, target: int, mode: ModelMode):
    """Translações (chave, item) que o passo da avaliação `target` altera."""
    out = []
    for j, v in zip(items, values):
        if j == target:
            continue
        if mode != ModelMode.warm and params["alpha"][j] == 0.0:
            continue
        out.append(("psi_pos" if v > 0 else "psi_neg", int(j)))
    return out


def iam_rating_loss(
    params: Dict[str, np.ndarray], items, values, target: int, mode: ModelMode, lambda1: float
) -> float:
    """
    Termo de uma única avaliação (alvo `target` entre as do usuário) com L2
    apenas nos parâmetros que o passo de SGD toca: q_i, Ψ0 e as translações
    dos demais itens com α ≠ 0.
    """
    mode = ModelMode(mode)
    pos = list(items).index(target)
    f = _user_rep(params, items, values, target, mode)
    z = np.tanh(f) if mode == ModelMode.csw else f
    e = values[pos] - float(params["Q"][target] @ z)
    reg = float(params["Q"][target] @ params["Q"][target]) + float(params["psi0"] @ params["psi0"])
    for key, j in _touched(params, items, values, target, mode):
        reg += float(params[key][j] @ params[key][j])
    return e * e + lambda1 * reg


def iam_rating_gradient(
    params: Dict[str, np.ndarray], items, values, target: int, mode: ModelMode, lambda1: float
) -> Dict[str, np.ndarray]:
    """Gradiente analítico de iam_rating_loss."""
    mode = ModelMode(mode)
    grads = {k: np.zeros_like(params[k]) for k in IAM_KEYS}
    pos = list(items).index(target)
    f = _user_rep(params, items, values, target, mode)
    q_i = params["Q"][target]
    if mode == ModelMode.csw:
        z = np.tanh(f)
        g = q_i * (1.0 - z * z)
    else:
        z = f
        g = q_i
    e = values[pos] - float(q_i @ z)
    grads["Q"][target] = -2.0 * e * z + 2.0 * lambda1 * q_i
    grads["psi0"] = -2.0 * e * g + 2.0 * lambda1 * params["psi0"]
    for j, v in zip(items, values):
        if j == target or mode == ModelMode.warm:
            continue
        key = "psi_pos" if v > 0 else "psi_neg"
        grads["alpha"][j] = -2.0 * e * float(g @ params[key][j])
    for key, j in _touched(params, items, values, target, mode):
        a = 1.0 if mode == ModelMode.warm else params["alpha"][j]
        grads[key][j] = -2.0 * e * a * g + 2.0 * lambda1 * params[key][j]
    return grads


def numeric_gradient(fn, params: Dict[str, np.ndarray], h: float = 1e-5) -> Dict[str, np.ndarray]:
    """Diferenças finitas centrais em todas as entradas de todos os parâmetros."""
    out = {}
    for key, arr in params.items():
        grad = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            old = arr[idx]
            arr[idx] = old + h
            up = fn(params)
            arr[idx] = old - h
            down = fn(params)
            arr[idx] = old
            grad[idx] = (up - down) / (2.0 * h)
        out[key] = grad
    return out


__all__ = [
    "IAM_KEYS",
    "mf_triple_loss",
    "mf_triple_gradient",
    "mf_objective",
    "mf_gradient",
    "iam_objective",
    "iam_gradient",
    "iam_rating_loss",
    "iam_rating_gradient",
    "numeric_gradient",
]
