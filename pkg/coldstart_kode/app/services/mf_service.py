# coldstart_kode/app/services/mf_service.py

from typing import Iterable, Optional

import numpy as np

from ..core.config import settings
from ..core.exceptions import CapabilityError, DivergenceError, EmptyDatasetError, IndexRangeError, LeakageError
from ..models.data_models import AnswerList, DatasetSplit, MfModel, SparseRatings
from ..models.schemas import Hyperparams, Interview, TrainingReport
from ..utilities.constants import INIT_STD
from ..utilities.helpers import make_rng
from ..utilities.jit import njit
from ..utilities.logging_config import logger
from .split_service import answer_ratings


# ========== KERNEL ==========

@njit(cache=True)
def _mf_epoch(P, Q, users, items, values, order, lr, lam):
    """
    Uma época de SGD por avaliação sobre (r − q_iᵀp_u)² + λ(‖q_i‖² + ‖p_u‖²).
    Retorna a soma dos erros quadráticos observados na época.
    """
    n_factors = P.shape[1]
    loss = 0.0
    for t in range(order.size):
        idx = order[t]
        u = users[idx]
        i = items[idx]
        pred = 0.0
        for k in range(n_factors):
            pred += P[u, k] * Q[i, k]
        e = values[idx] - pred
        loss += e * e
        for k in range(n_factors):
            pu = P[u, k]
            qi = Q[i, k]
            P[u, k] = pu + lr * (e * qi - lam * pu)
            Q[i, k] = qi + lr * (e * pu - lam * qi)
    return loss


# ========== PREDIÇÃO ==========

def mf_predict(model: MfModel, u: int, i: int) -> float:
    """Predição q_iᵀp_u, sem clamping."""
    if not 0 <= u < model.num_users:
        raise IndexRangeError(f"Usuário {u} fora de [0, {model.num_users}).")
    if not 0 <= i < model.num_items:
        raise IndexRangeError(f"Item {i} fora de [0, {model.num_items}).")
    return float(np.dot(model.Q[i], model.P[u]))


# ========== TREINO ==========

def _pair_keys(users: np.ndarray, items: np.ndarray, num_items: int) -> np.ndarray:
    return np.asarray(users, dtype=np.int64) * num_items + np.asarray(items, dtype=np.int64)


def check_divergence(epoch: int, loss: float, reference: Optional[float]) -> None:
    if not np.isfinite(loss):
        raise DivergenceError(epoch, loss, reference if reference is not None else float("nan"))
    if reference is not None and loss > settings.DIVERGENCE_FACTOR * reference:
        raise DivergenceError(epoch, loss, reference)


def mf_train(
    train: SparseRatings,
    hyper: Hyperparams,
    forbidden: Optional[np.ndarray] = None,
    include_users: Optional[Iterable[int]] = None,
    report: Optional[TrainingReport] = None,
) -> MfModel:
    """
    SGD por avaliação com decaimento L2 local nos dois vetores tocados.
    - Init Gaussiana(0, 0.01²) pela semente da execução; triplas embaralhadas a cada época.
    - `forbidden`: chaves u·I + i que nunca podem ser visitadas (Evaluation Sets).
    - `include_users`: usuários considerados parte do protocolo (fold-in),
      mesmo sem triplas de treino.
    """
    if len(train) == 0:
        raise EmptyDatasetError("Conjunto de treino vazio para MF.")
    if not train.is_binarized:
        raise ValueError("MF espera avaliações binarizadas (±1).")

    if forbidden is not None and forbidden.size:
        hits = np.isin(_pair_keys(train.users, train.items, train.num_items), forbidden)
        if report is not None:
            report.forbidden_reads += int(hits.sum())
        if hits.any():
            raise LeakageError(f"{int(hits.sum())} avaliações proibidas no treino de MF")

    rng = make_rng(hyper.seed)
    P = rng.normal(0.0, INIT_STD, size=(train.num_users, hyper.latent_dim))
    Q = rng.normal(0.0, INIT_STD, size=(train.num_items, hyper.latent_dim))

    users = np.ascontiguousarray(train.users)
    items = np.ascontiguousarray(train.items)
    values = np.ascontiguousarray(train.values)

    reference = None
    for epoch in range(hyper.epochs):
        order = rng.permutation(len(train)).astype(np.int64)
        loss = float(_mf_epoch(P, Q, users, items, values, order, hyper.learning_rate, hyper.lambda1))
        check_divergence(epoch, loss, reference)
        if reference is None:
            reference = loss
        if report is not None:
            report.epoch_losses.append(loss)
        logger.debug(f"MF época {epoch + 1}/{hyper.epochs}: perda={loss:.6f}")

    fold_in = train.user_counts() > 0
    if include_users is not None:
        fold_in[np.asarray(list(include_users), dtype=np.int64)] = True

    logger.info(f"✅ MF treinado: N={hyper.latent_dim}, épocas={hyper.epochs}, |O|={len(train)}")
    return MfModel(P=P, Q=Q, hyper=hyper, fold_in=fold_in, user_ids=train.user_ids, item_ids=train.item_ids)


def evaluation_keys(split: DatasetSplit, num_items: int) -> np.ndarray:
    """Chaves u·I + i de todas as avaliações dos Evaluation Sets."""
    keys = [
        _pair_keys(np.full(len(ev), user, dtype=np.int64), ev.items, num_items)
        for user, ev in split.evaluation.items()
        if len(ev)
    ]
    return np.concatenate(keys) if keys else np.zeros(0, dtype=np.int64)


def mf_train_coldstart_baseline(
    data: SparseRatings,
    split: DatasetSplit,
    interview: Optional[Interview],
    hyper: Hyperparams,
    report: Optional[TrainingReport] = None,
) -> MfModel:
    """
    Treina em treino ∪ respostas dos usuários de avaliação restritas aos itens
    da entrevista (None = Answer Sets completos, protocolo warm transdutivo).
    """
    allowed = None if interview is None else interview.items
    train = answer_ratings(data, split, allowed_items=allowed)
    return mf_train(
        train,
        hyper,
        forbidden=evaluation_keys(split, data.num_items),
        include_users=split.evaluation_users,
        report=report,
    )


# ========== PREDITOR ==========

class MfPredictor:
    """Preditor transdutivo: usa p_u aprendido; respostas já estão no treino."""

    inductive = False

    def __init__(self, model: MfModel, name: str = "mf"):
        self.model = model
        self.name = name

    def check_user(self, user: int) -> None:
        if not 0 <= user < self.model.num_users or not self.model.fold_in[user]:
            raise CapabilityError(
                f"MF sem fold-in para o usuário {user}: treine com mf_train_coldstart_baseline"
            )

    def predict_user(self, user: int, answers: AnswerList, items: np.ndarray) -> np.ndarray:
        self.check_user(user)
        return self.model.Q[np.asarray(items, dtype=np.int64)] @ self.model.P[user]


__all__ = [
    "mf_predict",
    "mf_train",
    "mf_train_coldstart_baseline",
    "evaluation_keys",
    "check_divergence",
    "MfPredictor",
]
