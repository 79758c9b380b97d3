import numpy as np
import pytest

from coldstart_kode.app.core.exceptions import CapabilityError, DivergenceError, IndexRangeError, LeakageError
from coldstart_kode.app.models.schemas import Hyperparams, Interview, TrainingReport
from coldstart_kode.app.services.mf_service import (
    MfPredictor,
    _mf_epoch,
    check_divergence,
    evaluation_keys,
    mf_predict,
    mf_train,
    mf_train_coldstart_baseline,
)
from coldstart_kode.app.services.objectives import mf_triple_gradient
from coldstart_kode.app.utilities.constants import INIT_STD
from coldstart_kode.app.utilities.helpers import make_rng, sign_positive_zero
from coldstart_kode.tests.factories import ratings_from_triples


def test_sgd_step_follows_triple_gradient():
    """Um passo do kernel é p − (η/2)·∇ da perda de uma tripla."""
    rng = np.random.default_rng(0)
    P = rng.normal(size=(1, 3))
    Q = rng.normal(size=(1, 3))
    p0, q0 = P[0].copy(), Q[0].copy()
    lr, lam = 0.1, 0.05

    _mf_epoch(P, Q, np.array([0]), np.array([0]), np.array([1.0]), np.array([0]), lr, lam)

    gp, gq = mf_triple_gradient(p0, q0, 1.0, lam)
    np.testing.assert_allclose(P[0], p0 - 0.5 * lr * gp, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(Q[0], q0 - 0.5 * lr * gq, rtol=1e-12, atol=1e-14)


def test_mf_train_is_deterministic(hand_data):
    hyper = Hyperparams(latent_dim=3, learning_rate=0.05, epochs=5, seed=11)
    a = mf_train(hand_data, hyper)
    b = mf_train(hand_data, hyper)
    assert np.array_equal(a.P, b.P)
    assert np.array_equal(a.Q, b.Q)


def test_mf_loss_decreases(planted_train):
    report = TrainingReport()
    mf_train(planted_train, Hyperparams(latent_dim=4, learning_rate=0.05, epochs=15, seed=1), report=report)
    assert len(report.epoch_losses) == 15
    assert report.epoch_losses[-1] < report.epoch_losses[0]


def test_mf_predict_range(hand_data):
    model = mf_train(hand_data, Hyperparams(latent_dim=2, epochs=1))
    assert mf_predict(model, 0, 0) == pytest.approx(float(model.Q[0] @ model.P[0]))
    with pytest.raises(IndexRangeError):
        mf_predict(model, 4, 0)
    with pytest.raises(IndexRangeError):
        mf_predict(model, 0, -1)


def test_check_divergence():
    check_divergence(0, 10.0, None)
    check_divergence(3, 5.0, 10.0)
    with pytest.raises(DivergenceError):
        check_divergence(1, float("nan"), 10.0)
    with pytest.raises(DivergenceError):
        check_divergence(2, 1e12, 1.0)


# ========== CONVERGÊNCIA ==========

def test_single_triple_converges_to_its_rating():
    data = ratings_from_triples([(0, 0, 1.0)], 1, 1)
    model = mf_train(data, Hyperparams(latent_dim=2, learning_rate=0.1, lambda1=0.0, epochs=200, seed=0))
    assert abs(mf_predict(model, 0, 0) - 1.0) < 0.01


def test_single_rating_error_decreases_every_epoch():
    data = ratings_from_triples([(0, 0, 1.0)], 1, 1)
    report = TrainingReport()
    mf_train(data, Hyperparams(latent_dim=2, learning_rate=0.01, lambda1=0.0, epochs=60, seed=4), report=report)
    assert np.all(np.diff(report.epoch_losses) < 0)


def test_planted_rank_one_signs_are_recovered():
    rng = np.random.default_rng(12)
    a = rng.normal(size=20)
    b = rng.normal(size=20)
    signs = sign_positive_zero(np.outer(a, b))
    triples = [(u, i, float(signs[u, i])) for u in range(20) for i in range(20)]
    data = ratings_from_triples(triples, 20, 20)

    model = mf_train(data, Hyperparams(latent_dim=4, learning_rate=0.05, lambda1=1e-4, epochs=200, seed=2))
    predicted = sign_positive_zero(model.P @ model.Q.T)
    assert np.mean(predicted == signs) >= 0.95


def test_all_likes_matrix_predicts_like():
    triples = [(u, i, 1.0) for u in range(8) for i in range(6)]
    data = ratings_from_triples(triples, 8, 6)
    model = mf_train(data, Hyperparams(latent_dim=2, learning_rate=0.05, lambda1=0.0, epochs=300, seed=5))
    np.testing.assert_allclose(model.P @ model.Q.T, 1.0, atol=0.05)


def test_empty_interview_leaves_evaluation_users_at_init(planted, planted_split, small_hyper):
    model = mf_train_coldstart_baseline(planted, planted_split, Interview(), small_hyper)
    initial = make_rng(small_hyper.seed).normal(
        0.0, INIT_STD, size=(planted.num_users, small_hyper.latent_dim)
    )
    users = planted_split.evaluation_users
    assert np.array_equal(model.P[users], initial[users])
    assert model.fold_in[users].all()
    trained = planted_split.train_users
    assert not np.array_equal(model.P[trained], initial[trained])


# ========== ISOLAMENTO ==========

def test_forbidden_pairs_raise_leakage(hand_data):
    report = TrainingReport()
    forbidden = np.array([0 * 5 + 1])  # (usuário 0, item 1)
    with pytest.raises(LeakageError):
        mf_train(hand_data, Hyperparams(epochs=1), forbidden=forbidden, report=report)
    assert report.forbidden_reads == 1


def test_coldstart_baseline_reads_no_evaluation_ratings(planted, planted_split, small_hyper):
    report = TrainingReport()
    model = mf_train_coldstart_baseline(planted, planted_split, None, small_hyper, report=report)

    assert report.forbidden_reads == 0
    assert evaluation_keys(planted_split, planted.num_items).size > 0
    assert model.fold_in[planted_split.evaluation_users].all()


def test_mf_predictor_requires_fold_in(planted, planted_split, planted_train, small_hyper):
    model = mf_train(planted_train, small_hyper)
    predictor = MfPredictor(model)
    user = int(planted_split.valid_users[0])
    with pytest.raises(CapabilityError):
        predictor.check_user(user)

    folded = MfPredictor(mf_train_coldstart_baseline(planted, planted_split, None, small_hyper))
    preds = folded.predict_user(user, planted_split.answers[user], np.array([0, 1, 2]))
    assert preds.shape == (3,)
