import pytest

from coldstart_kode.app.core.exceptions import SelectionRangeError
from coldstart_kode.app.models.schemas import InterviewSource, SelectionMethod
from coldstart_kode.app.services.selection_service import (
    helf_scores,
    select_helf,
    select_interview,
    select_pop,
    selection_scores,
)
from coldstart_kode.tests.factories import ratings_from_triples


def test_pop_ties_by_index(hand_data):
    interview = select_pop(hand_data, 2)
    assert interview.items == (1, 0)
    assert interview.source == InterviewSource.pop


def test_helf_hand_value(hand_data):
    assert helf_scores(hand_data)[0] == pytest.approx(0.85076, abs=1e-4)


def test_helf_unanimous_item_scores_zero():
    data = ratings_from_triples(
        [(0, 0, 1.0), (1, 0, 1.0), (2, 0, 1.0), (0, 1, 1.0), (1, 1, -1.0)], 3, 2
    )
    scores = helf_scores(data)
    assert scores[0] == 0.0
    assert 0.0 < scores[1] <= 1.0


def test_helf_interview_size(planted_train):
    interview = select_helf(planted_train, 5)
    assert len(interview.items) == 5
    assert interview.source == InterviewSource.helf


@pytest.mark.parametrize("k", [-1, 6])
def test_out_of_range(hand_data, k):
    with pytest.raises(SelectionRangeError):
        select_interview(hand_data, SelectionMethod.pop, k)


def test_empty_interview(hand_data):
    assert select_interview(hand_data, SelectionMethod.helf, 0).items == ()


def test_selection_scores(hand_data):
    scores = selection_scores(hand_data, SelectionMethod.pop)
    assert [s.score for s in scores] == [3.0, 4.0, 3.0, 3.0, 3.0]
    assert all(s.method == SelectionMethod.pop for s in scores)
