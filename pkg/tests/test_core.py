import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from odc.core import Dataset, denormalize, euclidean_distance, initial_prototypes, normalize, spawn_rngs

unit = st.floats(0.0, 1.0, allow_nan=False)


def vectors(n):
    return st.lists(unit, min_size=n, max_size=n)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((0, 0, 0), (0, 0, 0), 0.0),
        ((0, 0), (3 / 255, 4 / 255), 5 / 255),
        # frozen from oracles.distance
        ((0.2, 0.5, 0.9), (0.1, 0.7, 0.5), 0.45825756949558405),
    ],
)
def test_euclidean_distance_examples(a, b, expected):
    assert euclidean_distance(a, b) == pytest.approx(expected, abs=1e-15)


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        euclidean_distance((0, 0), (0, 0, 0))


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(vectors(n), vectors(n), vectors(n))))
def test_distance_axioms(triple):
    a, b, c = triple
    ab = euclidean_distance(a, b)
    assert ab >= 0.0
    assert ab == euclidean_distance(b, a)
    assert ab <= euclidean_distance(a, c) + euclidean_distance(c, b) + 1e-12
    assert ab == pytest.approx(oracles.distance(a, b), abs=1e-12)


def test_normalize_examples():
    assert normalize([0, 255, 255], 255).tolist() == [0.0, 1.0, 1.0]
    assert normalize([51], 255).tolist() == [0.2]


def test_normalize_round_trip_exhaustive():
    raw = np.arange(256)
    assert np.array_equal(denormalize(normalize(raw, 255), 255), raw)


@pytest.mark.parametrize("raw", [[-1], [256], [0, 300]])
def test_normalize_rejects_out_of_range(raw):
    with pytest.raises(ValueError):
        normalize(raw, 255)


def test_normalize_rejects_bad_gamut():
    with pytest.raises(ValueError):
        normalize([0], 0)


@given(st.lists(st.tuples(st.integers(0, 255), st.integers(0, 255)), min_size=1, max_size=20))
def test_normalize_monotone(pairs):
    lo = np.array([min(p) for p in pairs])
    hi = np.array([max(p) for p in pairs])
    assert np.all(normalize(lo, 255) <= normalize(hi, 255))


def test_denormalize_rounds_half_away_from_zero():
    assert denormalize([0.5 / 255, 1.5 / 255, 2.4999 / 255], 255).tolist() == [1, 2, 2]


def test_dataset_shapes():
    d = Dataset.from_raw(np.zeros((4, 4, 3), dtype=int))
    assert len(d) == 16 and d.dim == 3
    with pytest.raises(ValueError):
        Dataset(np.zeros((0, 0)))


def test_initial_prototypes_are_distinct_data_points():
    d = Dataset(np.array([[0.0], [0.0], [0.5], [1.0]]))
    rng = spawn_rngs(1, 1)[0]
    w = initial_prototypes(d, 3, rng)
    assert sorted(w[:, 0].tolist()) == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        initial_prototypes(d, 4, spawn_rngs(1, 1)[0])


def test_spawned_streams_are_reproducible():
    a = [g.random() for g in spawn_rngs(9, 3)]
    b = [g.random() for g in spawn_rngs(9, 3)]
    assert a == b and len(set(a)) == 3
    assert math.isfinite(sum(a))
