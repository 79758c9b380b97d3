import math

import numpy as np
import pytest

from coldstart_kode.app.core.exceptions import LeakageError, NoDataError
from coldstart_kode.app.models.data_models import AnswerList
from coldstart_kode.app.models.schemas import Hyperparams, Interview, ModelMode, TrainingReport, UserSet
from coldstart_kode.app.services.evaluation_service import (
    LeakageGuard,
    MajorityPredictor,
    accuracy,
    rmse,
    run_cold_eval,
    run_csw_sweep,
    run_interview_curve,
    run_warm_eval,
)
from coldstart_kode.app.services.iam_service import IamPredictor, iam_train, iam_train_cold, iam_train_csw, interview_items
from coldstart_kode.app.services.mf_service import MfPredictor, mf_train_coldstart_baseline
from coldstart_kode.app.services.neighbors_service import ItemKnnPredictor, train_itemknn
from coldstart_kode.app.services.selection_service import select_pop
from coldstart_kode.app.services.split_service import split_answers, split_users, training_ratings
from coldstart_kode.app.utilities.constants import GRID_SEEDS
from coldstart_kode.tests.factories import random_iam_model, ratings_from_triples


# ========== MÉTRICAS ==========

def test_rmse():
    assert rmse([(1.0, 1.0), (0.0, 2.0)]) == pytest.approx(math.sqrt(2.0))


def test_rmse_without_pairs():
    with pytest.raises(NoDataError):
        rmse([])


def test_accuracy_is_unweighted_mean_of_users():
    per_user = {0: [(0.0, 1.0)], 1: [(0.3, -1.0), (-0.2, -1.0)], 2: []}
    assert accuracy(per_user) == pytest.approx(0.75)


def test_accuracy_without_users():
    with pytest.raises(NoDataError):
        accuracy({0: []})


def test_accuracy_ignores_duplicated_pairs():
    per_user = {0: [(0.4, 1.0), (-0.1, 1.0), (0.2, -1.0)], 1: [(0.5, 1.0), (-0.3, 1.0)]}
    doubled = {0: per_user[0] * 2, 1: per_user[1]}
    assert accuracy(doubled) == pytest.approx(accuracy(per_user), abs=1e-15)


def test_rmse_ignores_pair_order():
    rng = np.random.default_rng(3)
    pairs = list(zip(rng.normal(size=40), rng.choice([-1.0, 1.0], size=40)))
    shuffled = [pairs[k] for k in rng.permutation(len(pairs))]
    assert rmse(shuffled) == pytest.approx(rmse(pairs), rel=1e-12)


# ========== GUARDA ==========

def test_leakage_guard(planted_split):
    user = int(planted_split.valid_users[0])
    leaked = planted_split.evaluation[user]
    guard = LeakageGuard(planted_split)
    with pytest.raises(LeakageError):
        guard.check(user, leaked)

    lenient = LeakageGuard(planted_split, strict=False)
    lenient.check(user, leaked)
    assert lenient.reads == len(leaked)
    lenient.check(user, planted_split.answers[user])
    assert lenient.reads == len(leaked)


# ========== PROTOCOLO ==========

def test_majority_predictor(hand_data):
    predictor = MajorityPredictor(hand_data)
    assert predictor.value == 1.0
    np.testing.assert_array_equal(predictor.predict_user(0, AnswerList(), np.array([1, 2])), [1.0, 1.0])


def test_evaluation_requires_answer_sets(planted):
    split = split_users(planted, seed=1)
    with pytest.raises(NoDataError):
        run_warm_eval(MajorityPredictor(planted), split)


def test_zero_question_floor_is_shared_by_all_users(planted_split):
    model = random_iam_model(ModelMode.warm, num_items=30, latent_dim=3, seed=8)
    report = run_cold_eval(IamPredictor(model), planted_split, Interview())

    baseline = model.Q @ model.psi0
    per_user = {}
    for user in planted_split.valid_users:
        ev = planted_split.evaluation[int(user)]
        per_user[int(user)] = list(zip(baseline[ev.items], ev.values))
    assert report.interview_size == 0
    assert report.accuracy == pytest.approx(accuracy(per_user), abs=1e-12)


def test_warm_eval_sees_whole_answer_set(planted_split):
    model = random_iam_model(ModelMode.warm, num_items=30, latent_dim=3, seed=9)
    warm = run_warm_eval(IamPredictor(model), planted_split, UserSet.test)
    full = run_cold_eval(IamPredictor(model), planted_split, Interview(items=tuple(range(30))), UserSet.test)
    assert warm.accuracy == full.accuracy
    assert warm.rmse == full.rmse
    assert warm.user_set == UserSet.test.value


def test_interview_curve_sizes(planted_split):
    model = random_iam_model(ModelMode.cold, num_items=30, latent_dim=3, seed=10)
    interview = interview_items(model)
    reports = run_interview_curve(IamPredictor(model), planted_split, interview, [0, 3, 10])
    assert [r.target_size for r in reports] == [0, 3, 10]
    assert [r.interview_size for r in reports] == [0, 3, 10]


def test_csw_sweep_zero_fraction_equals_cold_eval(planted_split):
    model = random_iam_model(ModelMode.csw, num_items=30, latent_dim=3, seed=11)
    interview = interview_items(model).truncated(5)
    cold = run_cold_eval(IamPredictor(model), planted_split, interview)

    reports = run_csw_sweep(model, planted_split, interview, [0.0, 0.5, 1.0], seeds=[1, 2])
    assert len(reports) == 6
    zero = [r for r in reports if r.added_fraction == 0.0]
    for report in zero:
        assert report.accuracy == cold.accuracy
        assert report.rmse == cold.rmse
    assert {tuple(r.seeds) for r in reports} == {(1,), (2,)}


def test_csw_sweep_is_deterministic(planted_split):
    model = random_iam_model(ModelMode.csw, num_items=30, latent_dim=3, seed=12)
    interview = interview_items(model).truncated(3)
    first = run_csw_sweep(model, planted_split, interview, [0.25, 0.75], seeds=[4])
    second = run_csw_sweep(model, planted_split, interview, [0.25, 0.75], seeds=[4])
    assert [r.accuracy for r in first] == [r.accuracy for r in second]


class _AlwaysLike:
    inductive = True
    name = "like"

    def check_user(self, user: int) -> None:
        return None

    def predict_user(self, user, answers, items):
        return np.ones(np.asarray(items).size)


def test_constant_like_predictor_scores_the_like_rate(planted_split):
    report = run_warm_eval(_AlwaysLike(), planted_split)
    rates = [
        float(np.mean(planted_split.evaluation[int(u)].values > 0))
        for u in planted_split.valid_users
        if len(planted_split.evaluation[int(u)])
    ]
    assert report.accuracy == pytest.approx(float(np.mean(rates)), abs=1e-12)


# ========== PROPRIEDADES COM MODELOS TREINADOS ==========

def _item_bias_data(num_users: int = 150, num_items: int = 20, seed: int = 0):
    """Metade dos itens agrada quase todos, a outra metade quase ninguém."""
    rng = np.random.default_rng(seed)
    bias = np.where(np.arange(num_items) % 2 == 0, 1.0, -1.0)
    taste = rng.normal(scale=0.4, size=num_users)
    triples = []
    for u in range(num_users):
        scores = bias + taste[u] * rng.normal(size=num_items) + rng.normal(scale=0.3, size=num_items)
        triples.extend((u, i, 1.0 if scores[i] >= 0 else -1.0) for i in range(num_items))
    return ratings_from_triples(triples, num_users, num_items)


def test_zero_question_csiam_beats_majority():
    data = _item_bias_data()
    split = split_answers(data, split_users(data, seed=1), seed=1)
    train = training_ratings(data, split)
    hyper = Hyperparams(latent_dim=4, learning_rate=0.05, lambda1=1e-4, lambda2=0.5, epochs=10, seed=1)
    model = iam_train_cold(train, hyper)

    csiam = run_cold_eval(IamPredictor(model, name="csiam"), split, Interview())
    majority = run_cold_eval(MajorityPredictor(train), split, Interview())
    assert csiam.accuracy > majority.accuracy


@pytest.mark.slow
def test_truncated_interview_accuracy_is_monotone(planted_split, planted_train):
    hyper = Hyperparams(latent_dim=4, learning_rate=0.05, lambda1=1e-4, lambda2=0.005, epochs=10)
    sizes = [0, 2, 5, 10]
    curves = []
    for seed in GRID_SEEDS:
        model = iam_train_cold(planted_train, hyper.with_seed(seed))
        reports = run_interview_curve(IamPredictor(model), planted_split, interview_items(model), sizes)
        curves.append([r.accuracy for r in reports])
    mean = np.mean(curves, axis=0)
    assert np.all(np.diff(mean) >= -0.01)


@pytest.mark.slow
def test_csw_sweep_improves_as_ratings_are_added(planted_split, planted_train):
    hyper = Hyperparams(latent_dim=4, learning_rate=0.05, lambda1=1e-4, lambda2=0.005, epochs=10, seed=2)
    model = iam_train_csw(planted_train, hyper)
    interview = interview_items(model).truncated(3)
    fractions = [0.0, 0.25, 0.5]
    reports = run_csw_sweep(model, planted_split, interview, fractions, seeds=GRID_SEEDS)

    mean = [np.mean([r.accuracy for r in reports if r.added_fraction == f]) for f in fractions]
    assert np.all(np.diff(mean) >= -0.005)


def test_no_method_reads_evaluation_ratings(planted, planted_split, planted_train, small_hyper):
    interview = select_pop(planted_train, 5)
    report = TrainingReport()
    predictors = [
        MfPredictor(mf_train_coldstart_baseline(planted, planted_split, interview, small_hyper, report=report)),
        ItemKnnPredictor(train_itemknn(planted_train, k=10)),
        MajorityPredictor(planted_train),
    ]
    for mode in ModelMode:
        audit = TrainingReport()
        hyper = small_hyper.model_copy(update={"lambda2": 0.01})
        predictors.append(IamPredictor(iam_train(planted_train, hyper, mode, report=audit, audit=True)))
        assert audit.self_contributions == 0

    assert report.forbidden_reads == 0
    for predictor in predictors:
        guard = LeakageGuard(planted_split, strict=False)
        run_cold_eval(predictor, planted_split, interview, guard=guard)
        if predictor.inductive:
            run_warm_eval(predictor, planted_split, guard=guard)
        assert guard.checked > 0
        assert guard.reads == 0
