import numpy as np
import pytest

from coldstart_kode.app.models.data_models import SparseRatings
from coldstart_kode.app.models.schemas import ModelMode
from coldstart_kode.app.services.objectives import (
    IAM_KEYS,
    iam_gradient,
    iam_objective,
    iam_rating_gradient,
    iam_rating_loss,
    mf_gradient,
    mf_objective,
    numeric_gradient,
)

INSTANCES = 50


def _tiny_instance(seed: int, num_users: int = 3, num_items: int = 4):
    rng = np.random.default_rng(seed)
    users, items = [], []
    for u in range(num_users):
        chosen = rng.choice(num_items, size=3, replace=False)
        users.extend([u] * chosen.size)
        items.extend(chosen.tolist())
    values = rng.choice([-1.0, 1.0], size=len(users))
    data = SparseRatings(
        num_users=num_users, num_items=num_items,
        users=np.array(users), items=np.array(items), raw=values, values=values,
    )
    return data, rng


def _assert_close(analytic, numeric):
    for key in numeric:
        np.testing.assert_allclose(analytic[key], numeric[key], rtol=1e-4, atol=1e-7, err_msg=key)


def test_mf_gradient_matches_finite_differences():
    for seed in range(INSTANCES):
        data, rng = _tiny_instance(seed)
        params = {"P": rng.normal(scale=0.5, size=(3, 2)), "Q": rng.normal(scale=0.5, size=(4, 2))}
        lam = 0.1

        gP, gQ = mf_gradient(params["P"], params["Q"], data, lam)
        numeric = numeric_gradient(lambda p: mf_objective(p["P"], p["Q"], data, lam), params)
        _assert_close({"P": gP, "Q": gQ}, numeric)


@pytest.mark.parametrize("mode", list(ModelMode))
def test_iam_gradient_matches_finite_differences(mode):
    for seed in range(INSTANCES):
        data, rng = _tiny_instance(100 + seed)
        params = {
            "Q": rng.normal(scale=0.5, size=(4, 2)),
            "psi0": rng.normal(scale=0.5, size=2),
            "psi_pos": rng.normal(scale=0.5, size=(4, 2)),
            "psi_neg": rng.normal(scale=0.5, size=(4, 2)),
            "alpha": rng.uniform(0.1, 1.0, size=4),
        }
        lambda1 = 0.05

        analytic = iam_gradient(params, data, mode, lambda1)
        numeric = numeric_gradient(lambda p: iam_objective(p, data, mode, lambda1), params)
        assert set(analytic) == set(IAM_KEYS)
        _assert_close(analytic, numeric)


def test_warm_objective_ignores_alpha():
    data, rng = _tiny_instance(7)
    params = {
        "Q": rng.normal(size=(4, 2)),
        "psi0": rng.normal(size=2),
        "psi_pos": rng.normal(size=(4, 2)),
        "psi_neg": rng.normal(size=(4, 2)),
        "alpha": rng.uniform(size=4),
    }
    before = iam_objective(params, data, ModelMode.warm, 0.0)
    params["alpha"] = params["alpha"] * 3.0
    assert iam_objective(params, data, ModelMode.warm, 0.0) == before
    assert np.all(iam_gradient(params, data, ModelMode.warm, 0.0)["alpha"] == 0.0)


@pytest.mark.parametrize("mode", list(ModelMode))
def test_rating_gradient_matches_finite_differences(mode):
    items = np.array([0, 2, 3])
    values = np.array([1.0, -1.0, 1.0])
    for seed in range(INSTANCES):
        rng = np.random.default_rng(200 + seed)
        params = {
            "Q": rng.normal(scale=0.5, size=(4, 2)),
            "psi0": rng.normal(scale=0.5, size=2),
            "psi_pos": rng.normal(scale=0.5, size=(4, 2)),
            "psi_neg": rng.normal(scale=0.5, size=(4, 2)),
            "alpha": rng.uniform(0.1, 1.0, size=4),
        }
        target = int(items[seed % items.size])
        lambda1 = 0.05

        analytic = iam_rating_gradient(params, items, values, target, mode, lambda1)
        numeric = numeric_gradient(lambda p: iam_rating_loss(p, items, values, target, mode, lambda1), params)
        _assert_close(analytic, numeric)
