import numpy as np
import pytest

from graconv import bmm, conv2d

from oracles import bmm_loop, conv2d_loop


def test_zero_input_gives_zero_output():
    w = np.random.default_rng(0).standard_normal((1, 1, 3, 3))
    out = conv2d(np.zeros((1, 1, 4, 4)), w, padding=1)
    assert out.shape == (1, 1, 4, 4)
    assert np.all(out == 0)


def test_impulse_matches_loop_oracle():
    rng = np.random.default_rng(1)
    x = np.zeros((1, 1, 3, 3))
    x[0, 0, 1, 1] = 1.0
    w = rng.standard_normal((1, 1, 3, 3))
    out = conv2d(x, w, stride=1, padding=1)
    # cross-correlation of a centered impulse reproduces the unflipped kernel
    np.testing.assert_allclose(out[0, 0], w[0, 0], rtol=1e-12)
    np.testing.assert_allclose(out, conv2d_loop(x, w, 1, 1), rtol=1e-12)


def test_depthwise_equals_per_channel_stack():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((2, 3, 5, 5))
    w = rng.standard_normal((3, 1, 3, 3))
    out = conv2d(x, w, padding=1, groups=3)
    per_channel = np.concatenate(
        [conv2d(x[:, c : c + 1], w[c : c + 1], padding=1) for c in range(3)], axis=1
    )
    np.testing.assert_allclose(out, per_channel, atol=1e-12)


@pytest.mark.parametrize("dtype,tol", [(np.float64, 1e-6), (np.float32, 1e-4)])
def test_conv2d_matches_oracle_random(dtype, tol):
    rng = np.random.default_rng(3)
    for _ in range(8):
        b, cin, cout = rng.integers(1, 3), int(rng.integers(1, 5)), int(rng.integers(1, 5))
        k = int(rng.choice([1, 3, 5]))
        h = int(rng.integers(k, k + 5))
        x = rng.standard_normal((b, cin, h, h)).astype(dtype)
        w = rng.standard_normal((cout, cin, k, k)).astype(dtype)
        got = conv2d(x, w, stride=1, padding=k // 2)
        want = conv2d_loop(x, w, stride=1, padding=k // 2)
        err = np.abs(got - want).max() / max(np.abs(want).max(), 1e-12)
        assert err < tol


def test_conv2d_linear_in_both_arguments():
    rng = np.random.default_rng(4)
    x1, x2 = rng.standard_normal((2, 1, 2, 6, 6))
    w1, w2 = rng.standard_normal((2, 3, 2, 3, 3))
    a, b = 0.7, -1.3
    lhs = conv2d(a * x1 + b * x2, w1, padding=1)
    rhs = a * conv2d(x1, w1, padding=1) + b * conv2d(x2, w1, padding=1)
    np.testing.assert_allclose(lhs, rhs, atol=1e-5)
    lhs_w = conv2d(x1, a * w1 + b * w2, padding=1)
    rhs_w = a * conv2d(x1, w1, padding=1) + b * conv2d(x1, w2, padding=1)
    np.testing.assert_allclose(lhs_w, rhs_w, atol=1e-5)


def test_bmm_identity_and_hand_value():
    rng = np.random.default_rng(5)
    eye = np.stack([np.eye(3), np.eye(3)])
    b = rng.standard_normal((2, 3, 4))
    np.testing.assert_array_equal(bmm(eye, b), b)
    out = bmm(np.array([[[1.0, 2.0, 3.0]]]), np.array([[[4.0], [5.0], [6.0]]]))
    assert out.shape == (1, 1, 1)
    assert out[0, 0, 0] == 32.0


def test_bmm_matches_loop_oracle():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((4, 9, 9))
    b = rng.standard_normal((4, 9, 72))
    np.testing.assert_allclose(bmm(a, b), bmm_loop(a, b), atol=1e-10)


def test_bmm_associativity():
    rng = np.random.default_rng(7)
    a, b, c = rng.standard_normal((3, 2, 5, 5))
    np.testing.assert_allclose(bmm(a, bmm(b, c)), bmm(bmm(a, b), c), atol=1e-5)


def test_repeated_runs_bitwise_identical():
    rng = np.random.default_rng(8)
    x = rng.standard_normal((2, 8, 12, 12)).astype(np.float32)
    w = rng.standard_normal((8, 4, 3, 3)).astype(np.float32)
    first = conv2d(x, w, padding=1, groups=2)
    for _ in range(3):
        assert np.array_equal(conv2d(x, w, padding=1, groups=2), first)
    a = rng.standard_normal((4, 9, 9)).astype(np.float32)
    b = rng.standard_normal((4, 9, 16)).astype(np.float32)
    assert np.array_equal(bmm(a, b), bmm(a, b))


@pytest.mark.parametrize(
    "x_shape,w_shape,kwargs,match",
    [
        ((2, 3, 4), (1, 1, 3, 3), {}, "rank 4"),
        ((1, 4, 6, 6), (2, 3, 3, 3), {}, "channel axis"),
        ((1, 4, 6, 6), (2, 2, 3, 3), {"groups": 3}, "not divisible"),
        ((1, 3, 6, 6), (2, 1, 3, 3), {"groups": 3}, "Cout axis"),
        ((1, 2, 6, 6), (2, 2, 2, 2), {}, "odd"),
        ((1, 2, 6, 6), (2, 2, 3, 5), {}, "square"),
        ((1, 2, 6, 6), (2, 2, 3, 3), {"stride": 2}, "integral output extent"),
    ],
)
def test_conv2d_rejects_bad_shapes(x_shape, w_shape, kwargs, match):
    rng = np.random.default_rng(9)
    with pytest.raises(ValueError, match=match):
        conv2d(rng.standard_normal(x_shape), rng.standard_normal(w_shape), **kwargs)


def test_bmm_rejects_bad_shapes():
    with pytest.raises(ValueError, match="rank 3"):
        bmm(np.zeros((2, 2)), np.zeros((2, 2, 2)))
    with pytest.raises(ValueError, match="inner axes"):
        bmm(np.zeros((1, 2, 3)), np.zeros((1, 4, 2)))
    with pytest.raises(ValueError, match="batch axes"):
        bmm(np.zeros((1, 2, 3)), np.zeros((2, 3, 2)))


def test_mixed_dtypes_rejected():
    with pytest.raises(ValueError, match="mixed dtypes"):
        conv2d(np.zeros((1, 1, 3, 3), np.float32), np.ones((1, 1, 3, 3), np.float64))
