import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zosmooth.randomness import (
    Purpose, SampleStream, StreamCursor, ball_block, integers_block, sample_unit_ball,
    sample_unit_sphere, sphere_block, uniforms,
)

N = 100_000


def test_sphere_in_one_dimension_is_sign():
    vals = sphere_block(1, 3, 0, 1000)
    assert set(np.unique(vals)) <= {-1.0, 1.0}
    assert 0.4 < np.mean(vals > 0) < 0.6


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**63 - 1), sid=st.integers(0, 2**40))
def test_sphere_point_has_unit_norm(seed, sid):
    e = sample_unit_sphere(3, SampleStream(seed, sid))
    assert abs(np.linalg.norm(e) - 1.0) <= 1e-12


def test_sphere_second_moment_d2():
    E = sphere_block(2, 7, 0, N)
    assert abs(np.mean(E[:, 0] ** 2) - 0.5) <= 0.01


def test_sphere_mean_near_zero():
    for d in (2, 10, 50):
        E = sphere_block(d, 11, 0, N)
        assert np.linalg.norm(E.mean(axis=0)) <= 4 / np.sqrt(N * d) * np.sqrt(d)


def test_ball_norm_bounded():
    for d in (1, 2, 5, 40):
        U = ball_block(d, 5, 0, 10_000)
        assert np.all(np.linalg.norm(U, axis=1) <= 1.0 + 1e-15)


def test_ball_moments():
    U1 = ball_block(1, 1, 0, N)
    assert abs(np.mean(U1[:, 0] ** 2) - 1 / 3) <= 0.01
    U2 = ball_block(2, 2, 0, N)
    assert abs(np.mean(np.sum(U2**2, axis=1)) - 0.5) <= 0.01


def test_ball_radial_law():
    d = 3
    r = np.linalg.norm(ball_block(d, 9, 0, N), axis=1)
    for t in (0.3, 0.6, 0.9):
        assert abs(np.mean(r <= t) - t**d) <= 0.01


def test_dimension_zero_rejected():
    with pytest.raises(ValueError):
        sample_unit_sphere(0, SampleStream(0))
    with pytest.raises(ValueError):
        sample_unit_ball(0, SampleStream(0))


def test_sample_is_pure_function_of_seed_and_id():
    block = sphere_block(6, 42, 1000, 64)
    for k in (0, 17, 63):
        np.testing.assert_array_equal(block[k], sample_unit_sphere(6, SampleStream(42, 1000 + k)))
    # overlapping windows agree bit for bit
    np.testing.assert_array_equal(sphere_block(6, 42, 1010, 20), block[10:30])


def test_streams_differ_by_seed_and_purpose():
    a = sphere_block(4, 1, 0, 8)
    assert not np.array_equal(a, sphere_block(4, 2, 0, 8))
    assert not np.array_equal(a, sphere_block(4, 1, 0, 8, Purpose.NOISE))


def test_uniforms_range_and_replay():
    u = uniforms(3, Purpose.NOISE, 5, 1000, 2)
    assert u.shape == (1000, 2)
    assert np.all((u > 0) & (u <= 1))
    np.testing.assert_array_equal(u[100:], uniforms(3, Purpose.NOISE, 105, 900, 2))


def test_integers_block():
    ix = integers_block(7, 0, 0, 20_000, 3)
    assert ix.shape == (20_000, 3)
    assert ix.min() == 0 and ix.max() == 6
    counts = np.bincount(ix.ravel(), minlength=7) / ix.size
    assert np.all(np.abs(counts - 1 / 7) < 0.01)


def test_cursor_hands_out_contiguous_ranges():
    c = StreamCursor(9)
    assert c.take(4) == 0
    assert c.take(1) == 4
    assert c.take(10) == 5
    assert c.position == 15
    with pytest.raises(ValueError):
        c.take(0)
