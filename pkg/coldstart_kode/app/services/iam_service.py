# coldstart_kode/app/services/iam_service.py

from typing import Optional

import numpy as np

from ..core.exceptions import EmptyDatasetError, ModelModeError
from ..models.data_models import AnswerList, IamModel, SparseRatings
from ..models.schemas import Hyperparams, Interview, InterviewSource, ModelMode, TrainingReport
from ..utilities.constants import AUDIT_TRACE_CAPACITY, INIT_STD
from ..utilities.helpers import make_rng
from ..utilities.jit import njit
from ..utilities.logging_config import logger
from .mf_service import check_divergence


# ========== KERNELS ==========

@njit(cache=True)
def _l1_clip(stepped, penalty):
    if stepped > 0.0:
        out = stepped - penalty
        return out if out > 0.0 else 0.0
    if stepped < 0.0:
        out = stepped + penalty
        return out if out < 0.0 else 0.0
    return 0.0


@njit(cache=True)
def _user_sum(alpha, psi_pos, psi_neg, items, values, start, stop, S):
    """S = Σ_j α_j·Ψ_j^{r_j} sobre as avaliações [start, stop) do usuário."""
    S[:] = 0.0
    for p in range(start, stop):
        j = items[p]
        a = alpha[j]
        if a == 0.0:
            continue
        T = psi_pos if values[p] > 0.0 else psi_neg
        for k in range(S.size):
            S[k] += a * T[j, k]


@njit(cache=True)
def _iam_visit(
    Q, psi0, psi_pos, psi_neg, alpha,
    items, values, start, stop, p, S,
    lr, lam1, penalty,
    update_params, learn_alpha, use_tanh, audit,
    trace, counters, work,
):
    """
    Passo de SGD de uma avaliação (alvo items[p]) do usuário [start, stop).
    - f = Ψ0 + S − α_i·Ψ_i^{r_i}, com S mantido em dia por soma/subtração.
    - q_i, Ψ0, as translações dos demais itens do usuário (α_j ≠ 0) e os α
      andam juntos, todos a partir dos valores anteriores ao passo.
    - O decaimento L2 só atinge parâmetros tocados.
    Retorna o erro quadrático da avaliação.
    """
    n_factors = Q.shape[1]
    f = work[0]
    z = work[1]
    g = work[2]
    i = items[p]
    r = values[p]
    a_i = alpha[i]
    T_i = psi_pos if r > 0.0 else psi_neg
    for k in range(n_factors):
        f[k] = psi0[k] + (S[k] - a_i * T_i[i, k])

    if audit:
        scale = 1.0
        worst = 0.0
        for k in range(n_factors):
            ref = psi0[k]
            for q in range(start, stop):
                if q == p:
                    continue
                j = items[q]
                T = psi_pos if values[q] > 0.0 else psi_neg
                ref += alpha[j] * T[j, k]
            diff = abs(f[k] - ref)
            if diff > worst:
                worst = diff
            if abs(ref) + 1.0 > scale:
                scale = abs(ref) + 1.0
        if worst > 1e-9 * scale * (stop - start):
            counters[0] += 1

    pred = 0.0
    for k in range(n_factors):
        z[k] = np.tanh(f[k]) if use_tanh else f[k]
        pred += Q[i, k] * z[k]
    e = r - pred
    for k in range(n_factors):
        g[k] = Q[i, k] * (1.0 - z[k] * z[k]) if use_tanh else Q[i, k]

    if update_params:
        for k in range(n_factors):
            qk = Q[i, k]
            Q[i, k] = qk + lr * (e * z[k] - lam1 * qk)
            psi0[k] = psi0[k] + lr * (e * g[k] - lam1 * psi0[k])

    for q in range(start, stop):
        if q == p:
            continue
        j = items[q]
        a = alpha[j]
        T = psi_pos if values[q] > 0.0 else psi_neg
        new_alpha = a
        if learn_alpha:
            ga = 0.0
            for k in range(n_factors):
                ga += g[k] * T[j, k]
            stepped = a + lr * e * ga
            new_alpha = _l1_clip(stepped, penalty)
            if stepped != 0.0 and new_alpha == 0.0:
                counters[1] += 1
            if counters[2] < trace.shape[0]:
                trace[counters[2], 0] = a
                trace[counters[2], 1] = stepped
                trace[counters[2], 2] = new_alpha
                counters[2] += 1
        move = update_params and a != 0.0
        if not move and new_alpha == a:
            continue
        for k in range(n_factors):
            old = T[j, k]
            new = old + lr * (a * e * g[k] - lam1 * old) if move else old
            T[j, k] = new
            S[k] += new_alpha * new - a * old
        alpha[j] = new_alpha

    return e * e


@njit(cache=True)
def _iam_epoch(
    Q, psi0, psi_pos, psi_neg, alpha,
    user_order, indptr, items, values,
    lr, lam1, penalty,
    update_params, learn_alpha, use_tanh, audit,
    trace, counters,
):
    """
    Uma época IAM: usuários na ordem dada, SGD por avaliação dentro de cada um.
    counters = [auto-contribuições, eventos de clipping, tamanho do trace].
    """
    n_factors = Q.shape[1]
    S = np.empty(n_factors)
    work = np.empty((3, n_factors))
    loss = 0.0
    for ui in range(user_order.size):
        u = user_order[ui]
        start = indptr[u]
        stop = indptr[u + 1]
        if stop == start:
            continue
        _user_sum(alpha, psi_pos, psi_neg, items, values, start, stop, S)
        for p in range(start, stop):
            loss += _iam_visit(
                Q, psi0, psi_pos, psi_neg, alpha,
                items, values, start, stop, p, S,
                lr, lam1, penalty,
                update_params, learn_alpha, use_tanh, audit,
                trace, counters, work,
            )
    return loss


# ========== CLIPPING ==========

def l1_clip_step(alpha_old: float, alpha_stepped: float, penalty: float) -> float:
    """
    Clipping L1 preguiçoso: encolhe o α já atualizado pelo gradiente em direção
    a 0 por `penalty` (η·λ2); se cruzar ou atingir 0, devolve exatamente 0.
    `alpha_old` é o valor antes do gradiente e só entra no rastro de auditoria.
    """
    if penalty < 0:
        raise ValueError("penalty deve ser ≥ 0")
    return float(_l1_clip(float(alpha_stepped), float(penalty)))


# ========== REPRESENTAÇÃO ==========

def _representation_weight(model: IamModel, item: int) -> float:
    return 1.0 if model.mode == ModelMode.warm else float(model.alpha[item])


def _update_weight(model: IamModel, item: int) -> float:
    """warm: 1; cold: α_item; csw: α_item se não nulo, senão 1."""
    if model.mode == ModelMode.warm:
        return 1.0
    a = float(model.alpha[item])
    if model.mode == ModelMode.csw and a == 0.0:
        return 1.0
    return a


def iam_representation(model: IamModel, answers: AnswerList) -> np.ndarray:
    """
    Ψ0 + Σ α_i·Ψ_i^{valor}, somando em ordem crescente de item.
    Nos modos cold/csw, respostas com α_i = 0 não contribuem.
    """
    rep = model.psi0.copy()
    for item, value in answers.pairs():
        model.check_item(item)
        weight = _representation_weight(model, item)
        if weight == 0.0:
            continue
        rep += weight * model.translation(item, value)
    return rep


def iam_update(rep: np.ndarray, model: IamModel, item: int, value: float) -> np.ndarray:
    """Acrescenta uma nova avaliação à representação (forma incremental)."""
    return rep + _update_weight(model, item) * model.translation(item, value)


def iam_retract(rep: np.ndarray, model: IamModel, item: int, value: float) -> np.ndarray:
    """Inverso de iam_update: subtrai a mesma translação."""
    return rep - _update_weight(model, item) * model.translation(item, value)


def _squash(model: IamModel, rep: np.ndarray) -> np.ndarray:
    return np.tanh(rep) if model.mode == ModelMode.csw else rep


def iam_predict(model: IamModel, answers: AnswerList, i: int) -> float:
    model.check_item(i)
    if np.any(answers.items == i):
        answers = answers.without(i)
    rep = _squash(model, iam_representation(model, answers))
    return float(np.dot(model.Q[i], rep))


def iam_predict_from_rep(model: IamModel, rep: np.ndarray, items: np.ndarray) -> np.ndarray:
    """Predições para vários itens a partir de uma representação pronta."""
    items = np.asarray(items, dtype=np.int64)
    return model.Q[items] @ _squash(model, rep)


def iam_predict_items(model: IamModel, answers: AnswerList, items: np.ndarray) -> np.ndarray:
    """
    Versão vetorizada de iam_predict; itens presentes nas respostas caem no
    caminho leave-one-out item a item.
    """
    items = np.asarray(items, dtype=np.int64)
    for item in items:
        model.check_item(int(item))
    preds = iam_predict_from_rep(model, iam_representation(model, answers), items)
    overlap = np.flatnonzero(np.isin(items, answers.items))
    for idx in overlap:
        preds[idx] = iam_predict(model, answers, int(items[idx]))
    return preds


# ========== TREINO ==========

def _init_model_arrays(num_items: int, hyper: Hyperparams, rng: np.random.Generator):
    n = hyper.latent_dim
    Q = rng.normal(0.0, INIT_STD, size=(num_items, n))
    psi0 = rng.normal(0.0, INIT_STD, size=n)
    psi_pos = rng.normal(0.0, INIT_STD, size=(num_items, n))
    psi_neg = rng.normal(0.0, INIT_STD, size=(num_items, n))
    return Q, psi0, psi_pos, psi_neg


def _initial_alpha(train: SparseRatings, mode: ModelMode) -> np.ndarray:
    freq = train.item_counts().astype(np.float64)
    if mode == ModelMode.warm:
        return np.ones(train.num_items)
    if mode == ModelMode.csw:
        return np.where(freq > 0, 1.0, 0.0)
    alpha = np.where(freq > 0, 1.0 / np.sqrt(freq + 1.0), 0.0)
    top = alpha.max() if alpha.size else 0.0
    return alpha / top if top > 0 else alpha


def _run_epochs(
    train: SparseRatings,
    hyper: Hyperparams,
    arrays: tuple,
    rng: np.random.Generator,
    *,
    update_params: bool,
    learn_alpha: bool,
    use_tanh: bool,
    label: str,
    report: Optional[TrainingReport],
    audit: bool,
) -> None:
    Q, psi0, psi_pos, psi_neg, alpha = arrays
    active = train.active_users()
    penalty = hyper.learning_rate * hyper.lambda2 if learn_alpha else 0.0
    trace = np.zeros((AUDIT_TRACE_CAPACITY if audit else 0, 3))
    counters = np.zeros(3, dtype=np.int64)

    reference = None
    for epoch in range(hyper.epochs):
        user_order = rng.permutation(active).astype(np.int64)
        keys = rng.random(len(train))
        pos = np.lexsort((keys, train.users))
        items = np.ascontiguousarray(train.items[pos])
        values = np.ascontiguousarray(train.values[pos])

        loss = float(_iam_epoch(
            Q, psi0, psi_pos, psi_neg, alpha,
            user_order, np.asarray(train.user_indptr), items, values,
            hyper.learning_rate, hyper.lambda1, penalty,
            update_params, learn_alpha, use_tanh, audit,
            trace, counters,
        ))
        check_divergence(epoch, loss, reference)
        if reference is None:
            reference = loss
        if report is not None:
            report.epoch_losses.append(loss)
        logger.debug(f"IAM {label} época {epoch + 1}/{hyper.epochs}: perda={loss:.6f}")

    if report is not None:
        report.self_contributions += int(counters[0])
        report.clip_events += int(counters[1])
        report.clip_trace.extend(tuple(float(v) for v in row) for row in trace[:counters[2]])


def _check_train(train: SparseRatings) -> None:
    if len(train) == 0:
        raise EmptyDatasetError("Conjunto de treino vazio para IAM.")
    if not train.is_binarized:
        raise ValueError("IAM espera avaliações binarizadas (±1).")


def _build(arrays: tuple, mode: ModelMode, hyper: Hyperparams, train: SparseRatings) -> IamModel:
    Q, psi0, psi_pos, psi_neg, alpha = arrays
    return IamModel(
        Q=Q, psi0=psi0, psi_pos=psi_pos, psi_neg=psi_neg, alpha=alpha,
        mode=mode, hyper=hyper, item_ids=train.item_ids,
    )


def iam_train_warm(
    train: SparseRatings,
    hyper: Hyperparams,
    report: Optional[TrainingReport] = None,
    audit: bool = False,
) -> IamModel:
    """
    IAM warm: aprende q_i, Ψ0 e Ψ_i^{±1} com α ≡ 1; o alvo nunca entra na
    própria representação.
    """
    _check_train(train)
    rng = make_rng(hyper.seed)
    arrays = (*_init_model_arrays(train.num_items, hyper, rng), _initial_alpha(train, ModelMode.warm))
    _run_epochs(
        train, hyper, arrays, rng,
        update_params=True, learn_alpha=False, use_tanh=False,
        label="warm", report=report, audit=audit,
    )
    logger.info(f"✅ IAM warm treinado: N={hyper.latent_dim}, épocas={hyper.epochs}, |O|={len(train)}")
    return _build(arrays, ModelMode.warm, hyper, train)


def iam_train_cold(
    train: SparseRatings,
    hyper: Hyperparams,
    report: Optional[TrainingReport] = None,
    audit: bool = False,
) -> IamModel:
    """
    CS-IAM: q, Ψ e α conjuntamente, com clipping L1 preguiçoso (η·λ2) após
    cada passo de α. Os α não nulos definem a entrevista.
    """
    _check_train(train)
    rng = make_rng(hyper.seed)
    arrays = (*_init_model_arrays(train.num_items, hyper, rng), _initial_alpha(train, ModelMode.cold))
    _run_epochs(
        train, hyper, arrays, rng,
        update_params=True, learn_alpha=True, use_tanh=False,
        label="cold", report=report, audit=audit,
    )
    model = _build(arrays, ModelMode.cold, hyper, train)
    logger.info(
        f"✅ CS-IAM treinado: λ2={hyper.lambda2}, #Q={int(np.count_nonzero(model.alpha))}"
    )
    return model


def iam_train_csw(
    train: SparseRatings,
    hyper: Hyperparams,
    report: Optional[TrainingReport] = None,
    audit: bool = False,
) -> IamModel:
    """
    CSW-IAM em duas fases:
    1. treino warm de q e Ψ;
    2. q e Ψ congelados, só α aprendido com L1 e tanh na representação.
    """
    _check_train(train)
    rng = make_rng(hyper.seed)
    Q, psi0, psi_pos, psi_neg = _init_model_arrays(train.num_items, hyper, rng)

    warm_arrays = (Q, psi0, psi_pos, psi_neg, _initial_alpha(train, ModelMode.warm))
    _run_epochs(
        train, hyper, warm_arrays, rng,
        update_params=True, learn_alpha=False, use_tanh=False,
        label="csw/fase1", report=report, audit=audit,
    )

    alpha_arrays = (Q, psi0, psi_pos, psi_neg, _initial_alpha(train, ModelMode.csw))
    _run_epochs(
        train, hyper, alpha_arrays, rng,
        update_params=False, learn_alpha=True, use_tanh=True,
        label="csw/fase2", report=report, audit=audit,
    )
    model = _build(alpha_arrays, ModelMode.csw, hyper, train)
    logger.info(
        f"✅ CSW-IAM treinado: λ2={hyper.lambda2}, #Q={int(np.count_nonzero(model.alpha))}"
    )
    return model


def iam_train(
    train: SparseRatings,
    hyper: Hyperparams,
    mode: ModelMode,
    report: Optional[TrainingReport] = None,
    audit: bool = False,
) -> IamModel:
    trainers = {
        ModelMode.warm: iam_train_warm,
        ModelMode.cold: iam_train_cold,
        ModelMode.csw: iam_train_csw,
    }
    return trainers[ModelMode(mode)](train, hyper, report=report, audit=audit)


# ========== ENTREVISTA ==========

def interview_items(model: IamModel) -> Interview:
    """Itens com α ≠ 0 por |α| decrescente, empates por índice crescente."""
    if model.mode == ModelMode.warm:
        raise ModelModeError("Modelo warm não define entrevista (α ≡ 1).")
    nonzero = np.flatnonzero(model.alpha != 0.0)
    order = np.lexsort((nonzero, -np.abs(model.alpha[nonzero])))
    chosen = nonzero[order]
    return Interview(
        items=tuple(int(i) for i in chosen),
        source=InterviewSource.learned_alpha,
        weights=tuple(float(model.alpha[i]) for i in chosen),
    )


# ========== PREDITOR ==========

class IamPredictor:
    """Preditor indutivo: representação construída só a partir das respostas visíveis."""

    inductive = True

    def __init__(self, model: IamModel, name: str = "iam"):
        self.model = model
        self.name = name

    def check_user(self, user: int) -> None:
        return None

    def predict_user(self, user: int, answers: AnswerList, items: np.ndarray) -> np.ndarray:
        return iam_predict_items(self.model, answers, items)


__all__ = [
    "l1_clip_step",
    "iam_representation",
    "iam_update",
    "iam_retract",
    "iam_predict",
    "iam_predict_items",
    "iam_predict_from_rep",
    "iam_train_warm",
    "iam_train_cold",
    "iam_train_csw",
    "iam_train",
    "interview_items",
    "IamPredictor",
]
