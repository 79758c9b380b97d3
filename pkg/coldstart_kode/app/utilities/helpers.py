from typing import Sequence

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """
    Gera um Generator numpy determinístico a partir da semente da execução.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def sign_positive_zero(values: np.ndarray) -> np.ndarray:
    """
    Sinal com sign(0) := +1, usado na acurácia.
    """
    values = np.asarray(values, dtype=np.float64)
    return np.where(values >= 0.0, 1.0, -1.0)


def parse_float_list(text: str) -> list:
    """
    Converte "0,0.1,0.25" em [0.0, 0.1, 0.25].
    """
    return [float(part) for part in text.split(",") if part.strip()]


def parse_int_list(text: str) -> list:
    """
    Converte "5,10,20" em [5, 10, 20].
    """
    return [int(part) for part in text.split(",") if part.strip()]


def log_space(low: float, high: float, points: int) -> list:
    """
    Grade log-espaçada inclusiva (usada para λ2).
    """
    if points == 1:
        return [float(low)]
    return [float(v) for v in np.logspace(np.log10(low), np.log10(high), points)]


def stable_top_k(scores: Sequence[float], k: int) -> np.ndarray:
    """
    Índices dos k maiores scores, empates por índice crescente.
    """
    scores = np.asarray(scores, dtype=np.float64)
    order = np.lexsort((np.arange(scores.size), -scores))
    return order[:k].astype(np.int64)
