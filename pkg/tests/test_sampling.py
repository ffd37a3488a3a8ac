import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kaczopt.errors import InvalidDistributionError
from kaczopt.sampling import ALIAS_MIN_CATEGORIES, RowSampler, as_distribution, make_rng


def frequencies(sampler, draws):
    return np.bincount(sampler.draw(draws), minlength=sampler.m) / draws


def test_cumulative_frequencies():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    s = RowSampler(p, seed=3)
    assert s.kind == "cumulative"
    np.testing.assert_allclose(frequencies(s, 1_000_000), p, atol=5e-3)


def test_alias_frequencies():
    rng = np.random.default_rng(1)
    p = rng.dirichlet(np.ones(100))
    s = RowSampler(p, seed=4)
    assert s.kind == "alias"
    np.testing.assert_allclose(frequencies(s, 1_000_000), p, atol=5e-3)


@pytest.mark.parametrize("m", [5, ALIAS_MIN_CATEGORIES + 6])
def test_zero_weight_rows_never_drawn(m):
    p = np.zeros(m)
    p[1::3] = 1.0
    p /= p.sum()
    draws = RowSampler(p, seed=9).draw(200_000)
    assert np.all(p[draws] > 0)


def test_degenerate_point_mass():
    p = np.zeros(80)
    p[17] = 1.0
    assert set(RowSampler(p).draw(1000)) == {17}
    p = np.zeros(3)
    p[2] = 1.0
    assert set(RowSampler(p).draw(1000)) == {2}


def test_same_seed_same_stream():
    p = np.full(10, 0.1)
    a = RowSampler(p, seed=5, stream=2).draw(50)
    b = RowSampler(p, seed=5, stream=2).draw(50)
    np.testing.assert_array_equal(a, b)
    c = RowSampler(p, seed=5, stream=3).draw(50)
    assert not np.array_equal(a, c)


def test_reseeded_matches_fresh():
    p = np.random.default_rng(0).dirichlet(np.ones(70))
    base = RowSampler(p, seed=1)
    np.testing.assert_array_equal(base.reseeded(8, 1).draw(30), RowSampler(p, 8, 1).draw(30))


def test_rng_streams_independent_of_order():
    a = make_rng(11, 1).random(5)
    make_rng(11, 2).random(100)
    np.testing.assert_array_equal(a, make_rng(11, 1).random(5))


@pytest.mark.parametrize(
    "bad",
    [[0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0], [], [[0.5, 0.5]]],
)
def test_invalid_distributions(bad):
    with pytest.raises(InvalidDistributionError):
        as_distribution(bad)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 150), st.integers(0, 2**31))
def test_draws_in_support(m, seed):
    r = np.random.default_rng(seed)
    p = r.dirichlet(np.ones(m)) * (r.random(m) < 0.7)
    if p.sum() == 0:
        p[0] = 1.0
    p /= p.sum()
    d = RowSampler(p, seed=seed).draw(500)
    assert d.min() >= 0 and d.max() < m
    assert np.all(p[d] > 0)
