import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prefcomplete.model import (
    Dataset,
    Ranking,
    TrustVector,
    common_alternatives,
    rank_position,
)


def test_rank_position_examples():
    r = Ranking(0, [2, 0, 1])
    assert rank_position(r, 2) == 1
    assert rank_position(r, 1) == 3
    assert rank_position(r, 3) is None


def test_rank_position_is_bijection():
    r = Ranking(0, [4, 1, 3, 0])
    positions = [rank_position(r, a) for a in r.order]
    assert positions == [1, 2, 3, 4]


def test_common_alternatives_examples():
    assert common_alternatives(Ranking(0, [0, 1, 2]), Ranking(1, [1, 2, 3])) == {1, 2}
    assert common_alternatives(Ranking(0, [0, 1]), Ranking(1, [2, 3])) == set()
    assert common_alternatives(Ranking(0, [0, 1, 2]), Ranking(1, [2, 1, 0])) == {0, 1, 2}


@given(
    st.lists(st.integers(0, 9), unique=True),
    st.lists(st.integers(0, 9), unique=True),
)
def test_common_alternatives_symmetric(o1, o2):
    r1, r2 = Ranking(0, o1), Ranking(1, o2)
    assert common_alternatives(r1, r2) == common_alternatives(r2, r1)


def test_ranking_rejects_duplicates():
    with pytest.raises(ValueError):
        Ranking(0, [1, 2, 1])


def test_empty_ranking_is_legal_and_flagged():
    ds = Dataset(m=3, rankings=(Ranking(0, []), Ranking(1, [0, 1])))
    assert ds.empty_agents() == {0}


def test_dataset_validates_ids():
    with pytest.raises(ValueError):
        Dataset(m=2, rankings=(Ranking(0, [0, 2]),))


def test_dataset_latent_shape_checks():
    with pytest.raises(ValueError):
        Dataset(m=2, rankings=(Ranking(0, [0]),), latent_agents=np.zeros((3, 2)))
    ds = Dataset(
        m=2,
        rankings=(Ranking(0, [0]),),
        latent_agents=np.zeros((1, 2)),
        latent_alternatives=np.zeros((2, 2)),
    )
    assert ds.latent_agents.shape == (1, 2)
    with pytest.raises(ValueError):
        Dataset(
            m=2,
            rankings=(Ranking(0, [0]),),
            latent_agents=np.zeros((1, 2)),
            latent_alternatives=np.zeros((2, 3)),
        )


def test_trust_vector_bounds():
    TrustVector(np.array([0.0, 0.5, 1.0]))
    with pytest.raises(ValueError):
        TrustVector(np.array([1.1]))
    with pytest.raises(ValueError):
        TrustVector(np.array([-0.1]))
