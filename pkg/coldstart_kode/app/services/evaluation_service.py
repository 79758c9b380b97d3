# coldstart_kode/app/services/evaluation_service.py

import math
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import LeakageError, NoDataError
from ..interfaces import RatingPredictor
from ..models.data_models import AnswerList, DatasetSplit, IamModel, SparseRatings
from ..models.schemas import Interview, MetricsReport, UserSet
from ..utilities.helpers import make_rng, sign_positive_zero
from ..utilities.logging_config import logger
from .iam_service import iam_predict_from_rep, iam_representation, iam_update


# ========== MÉTRICAS ==========

def _as_arrays(pairs) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.float64)
    if arr.size == 0:
        return np.zeros(0), np.zeros(0)
    arr = arr.reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def rmse(pairs: Iterable[Tuple[float, float]]) -> float:
    """sqrt(média de (predito − real)²) sobre todos os pares."""
    predicted, actual = _as_arrays(pairs)
    if predicted.size == 0:
        raise NoDataError("RMSE sem pares (predito, real).")
    return float(np.sqrt(np.mean((predicted - actual) ** 2)))


def local_accuracy(pairs) -> Optional[float]:
    predicted, actual = _as_arrays(pairs)
    if predicted.size == 0:
        return None
    return float(np.mean(sign_positive_zero(predicted) == actual))


def accuracy(per_user: Mapping[int, Sequence[Tuple[float, float]]]) -> float:
    """
    Média não ponderada das acurácias locais (sign(0) := +1); usuários com
    lista vazia ficam fora da média.
    """
    local = [acc for acc in (local_accuracy(p) for p in per_user.values()) if acc is not None]
    if not local:
        raise NoDataError("Acurácia sem nenhum usuário com pares.")
    return float(np.mean(local))


# ========== GUARDA DE VAZAMENTO ==========

class LeakageGuard:
    """
    Confere que nenhuma entrada de um preditor pertence ao Evaluation Set do
    usuário. `reads` conta leituras proibidas; `strict` lança LeakageError.
    """

    def __init__(self, split: DatasetSplit, strict: bool = True):
        self.forbidden = {user: set(map(int, ev.items)) for user, ev in split.evaluation.items()}
        self.strict = strict
        self.reads = 0
        self.checked = 0

    def check(self, user: int, answers: AnswerList) -> None:
        self.checked += len(answers)
        forbidden = self.forbidden.get(int(user), set())
        hits = [int(i) for i in answers.items if int(i) in forbidden]
        if hits:
            self.reads += len(hits)
            if self.strict:
                raise LeakageError(f"Usuário {user}: itens do Evaluation Set nas entradas: {hits[:5]}")


# ========== PREDITOR MAJORITÁRIO ==========

class MajorityPredictor:
    """Prevê sempre o sinal majoritário do treino (piso de zero perguntas)."""

    inductive = True

    def __init__(self, train: SparseRatings, name: str = "majority"):
        self.value = 1.0 if float(train.values.mean()) >= 0 else -1.0
        self.name = name

    def check_user(self, user: int) -> None:
        return None

    def predict_user(self, user: int, answers: AnswerList, items: np.ndarray) -> np.ndarray:
        return np.full(np.asarray(items).size, self.value)


# ========== PROTOCOLO ==========

def _require_answers(split: DatasetSplit) -> None:
    if not split.has_answers:
        raise NoDataError("Split sem Answer/Evaluation Sets: rode split_answers antes.")


def _report(
    per_user: Dict[int, List[Tuple[float, float]]],
    method: str,
    interview_size: int,
    user_set: UserSet,
    **extra,
) -> MetricsReport:
    pooled = [pair for pairs in per_user.values() for pair in pairs]
    return MetricsReport(
        rmse=rmse(pooled),
        accuracy=accuracy(per_user),
        interview_size=interview_size,
        users_evaluated=sum(1 for pairs in per_user.values() if pairs),
        method=method,
        user_set=UserSet(user_set).value,
        **extra,
    )


def _evaluate(
    predictor: RatingPredictor,
    split: DatasetSplit,
    user_set: UserSet,
    visible_fn,
    guard: Optional[LeakageGuard],
) -> Dict[int, List[Tuple[float, float]]]:
    _require_answers(split)
    guard = guard if guard is not None else LeakageGuard(split)
    per_user: Dict[int, List[Tuple[float, float]]] = {}
    for user in split.users_of(user_set):
        user = int(user)
        ev = split.evaluation.get(user)
        if ev is None or not len(ev):
            continue
        predictor.check_user(user)
        visible = visible_fn(split.answers.get(user, AnswerList()))
        guard.check(user, visible)
        preds = predictor.predict_user(user, visible, ev.items)
        per_user[user] = list(zip(map(float, preds), map(float, ev.values)))
    return per_user


def run_cold_eval(
    predictor: RatingPredictor,
    split: DatasetSplit,
    interview: Interview,
    user_set: UserSet = UserSet.valid,
    guard: Optional[LeakageGuard] = None,
) -> MetricsReport:
    """
    Simula a entrevista: respostas visíveis = Answer Set ∩ itens da entrevista;
    prevê todo o Evaluation Set de cada usuário do conjunto pedido.
    """
    allowed = np.asarray(interview.items, dtype=np.int64)
    per_user = _evaluate(predictor, split, user_set, lambda ans: ans.restrict(allowed), guard)
    report = _report(per_user, predictor.name, interview.size, user_set)
    logger.info(
        f"✅ Cold-start {predictor.name} (#Q={interview.size}, {UserSet(user_set).value}): "
        f"acc={report.accuracy:.4f} rmse={report.rmse:.4f}"
    )
    return report


def run_warm_eval(
    predictor: RatingPredictor,
    split: DatasetSplit,
    user_set: UserSet = UserSet.valid,
    guard: Optional[LeakageGuard] = None,
) -> MetricsReport:
    """Cenário warm: Answer Set completo visível para modelos indutivos."""
    per_user = _evaluate(predictor, split, user_set, lambda ans: ans, guard)
    report = _report(per_user, predictor.name, 0, user_set)
    logger.info(
        f"✅ Warm {predictor.name} ({UserSet(user_set).value}): "
        f"acc={report.accuracy:.4f} rmse={report.rmse:.4f}"
    )
    return report


def run_interview_curve(
    predictor: RatingPredictor,
    split: DatasetSplit,
    interview: Interview,
    sizes: Sequence[int],
    user_set: UserSet = UserSet.valid,
) -> List[MetricsReport]:
    """Avalia o mesmo modelo com a entrevista truncada aos m primeiros itens."""
    reports = []
    for m in sizes:
        truncated = interview.truncated(int(m))
        report = run_cold_eval(predictor, split, truncated, user_set)
        reports.append(report.model_copy(update={"target_size": int(m)}))
    return reports


def run_csw_sweep(
    model: IamModel,
    split: DatasetSplit,
    interview: Interview,
    fractions: Sequence[float],
    seeds: Sequence[int],
    user_set: UserSet = UserSet.valid,
    name: str = "cswiam",
) -> List[MetricsReport]:
    """
    Após a entrevista, acrescenta ⌊f·n⌋ avaliações sorteadas do restante do
    Answer Set (n = respostas fora da entrevista) via iam_update, em ordem
    crescente de item. Os sorteios são aninhados entre frações da mesma
    semente. Uma linha por (fração, semente).
    """
    _require_answers(split)
    guard = LeakageGuard(split)
    allowed = np.asarray(interview.items, dtype=np.int64)
    reports: List[MetricsReport] = []

    for seed in seeds:
        rng = make_rng(seed)
        per_fraction: Dict[float, Dict[int, List[Tuple[float, float]]]] = {f: {} for f in fractions}
        for user in split.users_of(user_set):
            user = int(user)
            ev = split.evaluation.get(user)
            if ev is None or not len(ev):
                continue
            answers = split.answers.get(user, AnswerList())
            visible = answers.restrict(allowed)
            rest_mask = ~np.isin(answers.items, allowed)
            rest_items = answers.items[rest_mask]
            rest_values = answers.values[rest_mask]
            order = rng.permutation(rest_items.size)
            base = iam_representation(model, visible)

            for fraction in fractions:
                n_add = int(math.floor(fraction * rest_items.size))
                pick = np.sort(order[:n_add])
                extra = AnswerList(rest_items[pick], rest_values[pick])
                guard.check(user, visible.extend(extra))
                rep = base
                for item, value in extra.pairs():
                    rep = iam_update(rep, model, item, value)
                preds = iam_predict_from_rep(model, rep, ev.items)
                per_fraction[fraction][user] = list(zip(map(float, preds), map(float, ev.values)))

        for fraction in fractions:
            report = _report(
                per_fraction[fraction], name, interview.size, user_set,
                seeds=[int(seed)], added_fraction=float(fraction),
            )
            logger.info(
                f"🔹 CSW seed={seed} +{fraction:.0%}: acc={report.accuracy:.4f} rmse={report.rmse:.4f}"
            )
            reports.append(report)
    return reports


__all__ = [
    "rmse",
    "local_accuracy",
    "accuracy",
    "LeakageGuard",
    "MajorityPredictor",
    "run_cold_eval",
    "run_warm_eval",
    "run_interview_curve",
    "run_csw_sweep",
]
