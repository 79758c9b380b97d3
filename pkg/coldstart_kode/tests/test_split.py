import math

import numpy as np
import pytest

from coldstart_kode.app.core.exceptions import DatasetParseError, TooFewUsersError
from coldstart_kode.app.database.text_exports import read_split_manifest, write_split_manifest
from coldstart_kode.app.services.split_service import (
    answer_ratings,
    split_answers,
    split_users,
    training_ratings,
)
from coldstart_kode.tests.factories import ratings_from_triples


# ========== USUÁRIOS ==========

def test_split_users_partition_and_sizes(planted):
    split = split_users(planted, seed=7)
    everyone = np.concatenate([split.train_users, split.valid_users, split.test_users])

    assert split.train_users.size == 60
    assert split.valid_users.size == 30
    assert split.test_users.size == 30
    assert sorted(everyone.tolist()) == list(range(planted.num_users))


def test_split_users_is_deterministic(planted):
    a = split_users(planted, seed=7)
    b = split_users(planted, seed=7)
    c = split_users(planted, seed=8)
    assert np.array_equal(a.train_users, b.train_users)
    assert np.array_equal(a.test_users, b.test_users)
    assert not np.array_equal(a.train_users, c.train_users)


def test_split_users_requires_four_users():
    data = ratings_from_triples([(0, 0, 1.0), (1, 0, -1.0), (2, 1, 1.0)], 3, 2)
    with pytest.raises(TooFewUsersError):
        split_users(data, seed=1)


# ========== ANSWER / EVALUATION ==========

def test_split_answers_disjoint_and_complete(planted, planted_split):
    for user in planted_split.evaluation_users:
        user = int(user)
        items, _ = planted.by_user(user)
        answers = planted_split.answers[user]
        evaluation = planted_split.evaluation[user]

        assert len(answers) == math.ceil(0.5 * items.size)
        assert not set(answers.items.tolist()) & set(evaluation.items.tolist())
        assert sorted(answers.items.tolist() + evaluation.items.tolist()) == items.tolist()


def test_training_users_have_no_answer_sets(planted, planted_split):
    train = training_ratings(planted, planted_split)
    assert set(np.unique(train.users).tolist()) <= set(planted_split.train_users.tolist())
    assert not set(planted_split.answers) & set(planted_split.train_users.tolist())


def test_answer_ratings_never_include_evaluation(planted, planted_split):
    data = answer_ratings(planted, planted_split, allowed_items=[0, 1, 2])
    for user in planted_split.evaluation_users:
        items, _ = data.by_user(int(user))
        assert set(items.tolist()) <= {0, 1, 2}
        assert not set(items.tolist()) & set(planted_split.evaluation[int(user)].items.tolist())


# ========== MANIFESTO ==========

def test_manifest_round_trip(tmp_path, planted, planted_split):
    path = write_split_manifest(planted_split, planted, tmp_path / "split.tsv")
    loaded = read_split_manifest(path, planted)

    assert np.array_equal(loaded.train_users, planted_split.train_users)
    assert np.array_equal(loaded.valid_users, planted_split.valid_users)
    assert loaded.answer_seed == planted_split.answer_seed
    for user, answers in planted_split.answers.items():
        assert np.array_equal(loaded.answers[user].items, answers.items)
        assert np.array_equal(loaded.answers[user].values, answers.values)


def test_manifest_is_byte_identical_for_same_seed(tmp_path, planted):
    paths = []
    for name in ("a.tsv", "b.tsv"):
        split = split_answers(planted, split_users(planted, seed=7), seed=7)
        paths.append(write_split_manifest(split, planted, tmp_path / name))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_manifest_for_other_dataset_is_rejected(tmp_path, planted, planted_split, hand_data):
    path = write_split_manifest(planted_split, planted, tmp_path / "split.tsv")
    with pytest.raises(DatasetParseError):
        read_split_manifest(path, hand_data)
