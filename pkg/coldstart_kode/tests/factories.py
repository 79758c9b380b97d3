# coldstart_kode/tests/factories.py

import numpy as np

from coldstart_kode.app.models.data_models import IamModel, SparseRatings
from coldstart_kode.app.models.schemas import Hyperparams, ModelMode

# 🔹 Conjunto 4 usuários × 5 itens usado nos exemplos calculados à mão
HAND_TRIPLES = [
    (0, 0, 1.0), (0, 1, 1.0), (0, 2, -1.0), (0, 3, 1.0),
    (1, 0, 1.0), (1, 1, -1.0), (1, 2, -1.0), (1, 4, 1.0),
    (2, 0, -1.0), (2, 1, 1.0), (2, 3, -1.0), (2, 4, -1.0),
    (3, 1, 1.0), (3, 2, 1.0), (3, 3, 1.0), (3, 4, -1.0),
]


def ratings_from_triples(triples, num_users: int, num_items: int) -> SparseRatings:
    users, items, values = zip(*triples)
    values = np.array(values, dtype=np.float64)
    return SparseRatings(
        num_users=num_users,
        num_items=num_items,
        users=np.array(users),
        items=np.array(items),
        raw=values,
        values=values,
    )


def random_iam_model(mode: ModelMode, num_items: int = 5, latent_dim: int = 3, seed: int = 0) -> IamModel:
    """Modelo IAM com parâmetros aleatórios; fora do modo warm, α_1 = 0."""
    rng = np.random.default_rng(seed)
    if mode == ModelMode.warm:
        alpha = np.ones(num_items)
    else:
        alpha = rng.uniform(0.2, 1.0, size=num_items)
        alpha[1] = 0.0
    return IamModel(
        Q=rng.normal(size=(num_items, latent_dim)),
        psi0=rng.normal(size=latent_dim),
        psi_pos=rng.normal(size=(num_items, latent_dim)),
        psi_neg=rng.normal(size=(num_items, latent_dim)),
        alpha=alpha,
        mode=mode,
        hyper=Hyperparams(latent_dim=latent_dim),
    )


def dyadic_iam_model(mode: ModelMode, num_items: int = 6, latent_dim: int = 3, seed: int = 0) -> IamModel:
    """Parâmetros múltiplos de 1/8 e α ∈ {0, 0.5, 1}: somas exatas em ponto flutuante."""
    rng = np.random.default_rng(seed)

    def grid(shape):
        return rng.integers(-8, 9, size=shape) / 8.0

    alpha = np.ones(num_items) if mode == ModelMode.warm else rng.choice([0.5, 1.0], size=num_items)
    if mode != ModelMode.warm:
        alpha[0] = 0.0
    return IamModel(
        Q=grid((num_items, latent_dim)),
        psi0=grid(latent_dim),
        psi_pos=grid((num_items, latent_dim)),
        psi_neg=grid((num_items, latent_dim)),
        alpha=alpha,
        mode=mode,
        hyper=Hyperparams(latent_dim=latent_dim),
    )
