# coldstart_kode/tests/conftest.py

import pytest

from coldstart_kode.app.models.schemas import Hyperparams
from coldstart_kode.app.services.split_service import split_answers, split_users, training_ratings
from coldstart_kode.app.services.synth_service import planted_frame, planted_ratings, write_synthetic
from coldstart_kode.tests.factories import HAND_TRIPLES, ratings_from_triples


@pytest.fixture
def hand_data():
    return ratings_from_triples(HAND_TRIPLES, 4, 5)


@pytest.fixture
def planted():
    """Dados planted binarizados: 120 usuários, 30 itens, 15 avaliações cada."""
    return planted_ratings(120, 30, 15, rank=1, noise=0.05, seed=0)


@pytest.fixture
def planted_split(planted):
    split = split_users(planted, seed=1)
    return split_answers(planted, split, seed=1)


@pytest.fixture
def planted_train(planted, planted_split):
    return training_ratings(planted, planted_split)


@pytest.fixture
def small_hyper():
    return Hyperparams(latent_dim=4, learning_rate=0.05, lambda1=1e-4, lambda2=0.0, epochs=5, seed=3)


@pytest.fixture
def synthetic_file(tmp_path):
    """Arquivo de ratings em estrelas (1–5), separado por tab."""
    frame = planted_frame(60, 20, 10, rank=1, noise=0.05, scale="stars", seed=5)
    return write_synthetic(tmp_path / "ratings.tsv", frame)
