import numpy as np
import pytest

from coldstart_kode.app.core.exceptions import ItemLimitError
from coldstart_kode.app.models.data_models import AnswerList
from coldstart_kode.app.services.neighbors_service import (
    ItemKnnPredictor,
    build_similarity,
    itemknn_predict,
    pearson,
    train_itemknn,
)
from coldstart_kode.tests.factories import ratings_from_triples


def test_pearson_hand_example(hand_data):
    assert pearson(hand_data, 0, 1) == pytest.approx(-0.5)
    assert pearson(hand_data, 0, 4) == pytest.approx(1.0)


def test_pearson_undefined_on_zero_variance(hand_data):
    # item 1 só tem likes entre os co-avaliadores de 3
    assert pearson(hand_data, 1, 3) is None


def test_matrix_matches_pairwise(hand_data):
    dense = build_similarity(hand_data).to_dense()
    for i in range(hand_data.num_items):
        for j in range(hand_data.num_items):
            if i == j:
                continue
            expected = pearson(hand_data, i, j)
            if expected is None:
                assert np.isnan(dense[i, j])
            else:
                assert dense[i, j] == pytest.approx(expected, abs=1e-12)


def test_matrix_is_symmetric(planted_train):
    sims = build_similarity(planted_train).to_dense()
    np.testing.assert_array_equal(sims, sims.T)
    assert np.all(np.isnan(sims) | (np.abs(sims) <= 1.0))


def test_only_co_rated_pairs_are_stored(planted_train):
    matrix = build_similarity(planted_train)
    dense = matrix.to_dense()
    co_rated = 0
    for i in range(planted_train.num_items):
        users_i, _ = planted_train.by_item(i)
        for j in range(i + 1, planted_train.num_items):
            users_j, _ = planted_train.by_item(j)
            common = np.intersect1d(users_i, users_j).size
            co_rated += common > 0
            assert matrix.support[i, j] == common
            expected = pearson(planted_train, i, j)
            if expected is None:
                assert np.isnan(dense[i, j])
            else:
                assert dense[i, j] == pytest.approx(expected, abs=1e-12)
    assert matrix.support.nnz == 2 * co_rated
    assert matrix.sims.nnz <= matrix.support.nnz


def test_items_without_co_raters_have_no_entry():
    data = ratings_from_triples(
        [(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0), (2, 2, 1.0), (2, 3, 1.0)], 3, 4
    )
    matrix = build_similarity(data)
    assert matrix.support.nnz == 4
    assert matrix.num_defined == 1
    assert matrix.to_dense()[0, 1] == pytest.approx(-1.0)
    assert np.isnan(matrix.to_dense()[0, 2])


def test_item_limit(hand_data):
    with pytest.raises(ItemLimitError):
        build_similarity(hand_data, max_items=3)


def test_predict_uses_neighbors(hand_data):
    model = train_itemknn(hand_data)
    answers = AnswerList.from_pairs([(0, 1.0)])
    assert itemknn_predict(model, answers, 1) == pytest.approx(-1.0)


def test_predict_falls_back_to_item_mean(hand_data):
    model = train_itemknn(hand_data)
    assert itemknn_predict(model, AnswerList(), 1) == pytest.approx(0.5)


def test_k_truncation(hand_data):
    model = train_itemknn(hand_data)
    answers = AnswerList.from_pairs([(0, 1.0), (1, 1.0)])
    # sim(4, 0) = 1, sim(4, 1) = -1
    assert itemknn_predict(model, answers, 4, k=0) == pytest.approx(0.0)
    assert itemknn_predict(model, answers, 4, k=1) == pytest.approx(1.0)


def test_target_never_neighbors_itself(hand_data):
    model = train_itemknn(hand_data)
    answers = AnswerList.from_pairs([(0, 1.0), (4, -1.0)])
    assert itemknn_predict(model, answers, 4) == pytest.approx(1.0)


def test_predictor_batch(hand_data):
    predictor = ItemKnnPredictor(train_itemknn(hand_data))
    answers = AnswerList.from_pairs([(0, 1.0)])
    preds = predictor.predict_user(0, answers, np.array([1, 4]))
    np.testing.assert_allclose(preds, [-1.0, 1.0])
