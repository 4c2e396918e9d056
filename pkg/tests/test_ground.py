import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betamix.ground import (
    GroundSpace,
    config_to_mask,
    distance,
    enumerate_subsets,
    mask_to_config,
    measure,
)


def test_enumerate_empty_region():
    assert list(enumerate_subsets(GroundSpace.line(3), [])) == [()]


def test_enumerate_order():
    assert list(enumerate_subsets(GroundSpace.line(3), [0, 1])) == [(), (0,), (1,), (0, 1)]
    assert list(enumerate_subsets(GroundSpace.line(4), [1, 2, 3])) == [
        (), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)
    ]


def test_enumerate_counts():
    configs = list(enumerate_subsets(GroundSpace.line(6), range(5)))
    assert len(configs) == 32
    assert len(set(configs)) == 32


def test_measure():
    assert measure(GroundSpace.line(3), [0, 1, 2]) == 3.0
    assert measure(GroundSpace.line(3), []) == 0.0
    space = GroundSpace.from_coords([[0.0], [1.0]], weights=[0.5, 2.0])
    assert measure(space, [0, 1]) == 2.5


def test_distance():
    space = GroundSpace.from_coords([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]])
    assert distance(space, [0], [1]) == 5.0
    assert distance(space, [0, 2], [2, 1]) == 0.0
    assert distance(space, [0], []) == math.inf


def test_json_round_trip():
    data = {"dimension": 2, "sites": [{"coord": [0, 1]}, {"coord": [2, 3], "weight": 0.5}]}
    space = GroundSpace.from_dict(data)
    assert space.weights.tolist() == [1.0, 0.5]
    assert GroundSpace.from_dict(space.to_dict()).to_dict() == space.to_dict()


@pytest.mark.parametrize(
    "data",
    [
        {"dimension": 2, "sites": [{"coord": [0]}]},
        {"dimension": 1, "sites": [{"coord": [0], "weight": -1}]},
    ],
)
def test_bad_spaces(data):
    with pytest.raises(ValueError):
        GroundSpace.from_dict(data)


def test_site_cap():
    with pytest.raises(ValueError, match="cap"):
        GroundSpace.line(21)
    assert GroundSpace.from_coords(np.zeros((22, 1)), max_sites=25).size == 22


def test_region_validation():
    space = GroundSpace.line(3)
    assert space.region([2, 0]) == (0, 2)
    with pytest.raises(ValueError):
        space.region([3])
    with pytest.raises(ValueError):
        space.region([1, 1])


@given(st.lists(st.booleans(), min_size=6, max_size=6), st.lists(st.booleans(), min_size=6, max_size=6))
def test_measure_additive_and_distance_symmetric(in_a, in_b):
    space = GroundSpace.from_coords(
        np.arange(12.0).reshape(6, 2), weights=[0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    )
    a = [i for i in range(6) if in_a[i]]
    b = [i for i in range(6) if in_b[i] and not in_a[i]]
    assert measure(space, a + b) == pytest.approx(measure(space, a) + measure(space, b))
    assert distance(space, a, b) == distance(space, b, a)


@given(st.integers(0, 255))
def test_mask_round_trip(mask):
    region = (1, 3, 4, 7, 8, 10, 11, 12)
    assert config_to_mask(region, mask_to_config(region, mask)) == mask
