# coldstart_kode/app/services/split_service.py

import math
from typing import Dict, Tuple

import numpy as np

from ..core.exceptions import TooFewUsersError
from ..models.data_models import AnswerList, DatasetSplit, SparseRatings
from ..utilities.constants import ANSWER_FRACTION, MIN_USERS_FOR_SPLIT, USER_FRACTIONS
from ..utilities.helpers import make_rng
from ..utilities.logging_config import logger


def split_users(
    data: SparseRatings,
    seed: int,
    fractions: Tuple[float, float, float] = USER_FRACTIONS,
) -> DatasetSplit:
    """
    Partição semeada dos usuários em treino/validação/teste com tamanhos
    ⌊f0·U⌋ / ⌊f1·U⌋ / restante.
    """
    num_users = data.num_users
    if num_users < MIN_USERS_FOR_SPLIT:
        raise TooFewUsersError(
            f"São necessários ao menos {MIN_USERS_FOR_SPLIT} usuários para o split (U={num_users})"
        )
    if abs(sum(fractions) - 1.0) > 1e-9 or any(f < 0 for f in fractions):
        raise ValueError(f"Frações inválidas: {fractions}")

    n_train = int(math.floor(fractions[0] * num_users))
    n_valid = int(math.floor(fractions[1] * num_users))

    perm = make_rng(seed).permutation(num_users)
    split = DatasetSplit(
        train_users=perm[:n_train],
        valid_users=perm[n_train:n_train + n_valid],
        test_users=perm[n_train + n_valid:],
        seed=int(seed),
    )
    logger.info(
        f"🔹 Split de usuários (seed={seed}): treino={split.train_users.size}, "
        f"validação={split.valid_users.size}, teste={split.test_users.size}"
    )
    return split


def split_answers(
    data: SparseRatings,
    split: DatasetSplit,
    seed: int,
    fraction: float = ANSWER_FRACTION,
) -> DatasetSplit:
    """
    Para cada usuário de validação/teste (ordem crescente), embaralha suas
    avaliações e corta em ⌈fraction·n_u⌉: o início vira Answer Set e o resto
    Evaluation Set. Usuários com n_u < 2 ficam sem respostas.
    """
    rng = make_rng(seed)
    answers: Dict[int, AnswerList] = {}
    evaluation: Dict[int, AnswerList] = {}

    for user in split.evaluation_users:
        user = int(user)
        items, values = data.by_user(user)
        n_u = items.size
        if n_u < 2:
            answers[user] = AnswerList()
            evaluation[user] = AnswerList(items, values)
            continue
        perm = rng.permutation(n_u)
        cut = int(math.ceil(fraction * n_u))
        answers[user] = AnswerList(items[perm[:cut]], values[perm[:cut]])
        evaluation[user] = AnswerList(items[perm[cut:]], values[perm[cut:]])

    n_answers = sum(len(a) for a in answers.values())
    n_eval = sum(len(e) for e in evaluation.values())
    logger.info(f"🔹 Answer/Evaluation Sets (seed={seed}): {n_answers} respostas, {n_eval} avaliações")
    return split.with_answers(answers, evaluation, int(seed))


def training_ratings(data: SparseRatings, split: DatasetSplit) -> SparseRatings:
    """Avaliações dos usuários de treino (espaço de índices preservado)."""
    return data.restrict_users(split.train_users)


def answer_ratings(
    data: SparseRatings,
    split: DatasetSplit,
    allowed_items=None,
) -> SparseRatings:
    """
    Treino ∪ Answer Sets dos usuários de avaliação, opcionalmente restritos
    aos itens permitidos (entrevista). Usado pelos modelos transdutivos.
    """
    allowed = None if allowed_items is None else np.asarray(list(allowed_items), dtype=np.int64)
    users, items, values = [], [], []
    for user in split.evaluation_users:
        ans = split.answers.get(int(user))
        if ans is None or not len(ans):
            continue
        if allowed is not None:
            ans = ans.restrict(allowed)
        users.append(np.full(len(ans), int(user), dtype=np.int64))
        items.append(ans.items)
        values.append(ans.values)

    base = training_ratings(data, split)
    if not users:
        return base
    return base.union(np.concatenate(users), np.concatenate(items), np.concatenate(values))


__all__ = [
    "split_users",
    "split_answers",
    "training_ratings",
    "answer_ratings",
]
