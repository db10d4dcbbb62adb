"""Lightweight routing network predicting per-sample rotation angles and scales.

Pipeline: depthwise 3x3 conv -> ReLU -> LayerNorm over the channel axis at
each spatial position -> global average pool -> two linear heads. The angle
head is unconstrained (radians); the scale head is squashed by a sigmoid so
every scale lies in (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import DEFAULT_DTYPE, check_dtype, conv2d, relu, sigmoid

LAYERNORM_EPS = 1e-5


@dataclass(frozen=True)
class AngleGenParams:
    """Learnable state of one angle generator for Cin channels and n groups."""

    dw_kernel: np.ndarray  # [Cin, 1, 3, 3]
    dw_bias: np.ndarray    # [Cin]
    ln_gamma: np.ndarray   # [Cin]
    ln_beta: np.ndarray    # [Cin]
    w_theta: np.ndarray    # [n, Cin]
    b_theta: np.ndarray    # [n]
    w_lambda: np.ndarray   # [n, Cin]
    b_lambda: np.ndarray   # [n]

    def __post_init__(self):
        cin = self.dw_kernel.shape[0]
        n = self.w_theta.shape[0]
        if n < 1 or cin < 1:
            raise ValueError(f"need Cin >= 1 and n >= 1, got Cin={cin}, n={n}")
        if self.dw_kernel.shape != (cin, 1, 3, 3):
            raise ValueError(f"dw_kernel must be [Cin,1,3,3], got {self.dw_kernel.shape}")
        for name, arr, shape in (
            ("dw_bias", self.dw_bias, (cin,)),
            ("ln_gamma", self.ln_gamma, (cin,)),
            ("ln_beta", self.ln_beta, (cin,)),
            ("w_theta", self.w_theta, (n, cin)),
            ("b_theta", self.b_theta, (n,)),
            ("w_lambda", self.w_lambda, (n, cin)),
            ("b_lambda", self.b_lambda, (n,)),
        ):
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")

    @property
    def cin(self) -> int:
        return self.dw_kernel.shape[0]

    @property
    def n(self) -> int:
        return self.w_theta.shape[0]


@dataclass(frozen=True)
class AngleSet:
    """Per-sample angles (radians) and scale factors, both [B, n]."""

    thetas: np.ndarray
    lambdas: np.ndarray

    def __post_init__(self):
        if self.thetas.ndim != 2 or self.thetas.shape != self.lambdas.shape:
            raise ValueError(
                f"thetas and lambdas must share a [B, n] shape, got "
                f"{self.thetas.shape} and {self.lambdas.shape}"
            )
        if not np.all(np.isfinite(self.thetas)):
            raise ValueError("angles must be finite")

    @property
    def batch(self) -> int:
        return self.thetas.shape[0]

    @property
    def n(self) -> int:
        return self.thetas.shape[1]


def generator_init(cin: int, n: int, seed: int, dtype=DEFAULT_DTYPE) -> AngleGenParams:
    """Deterministic init: weights uniform in +/- 1/sqrt(fan_in), biases zero."""
    if cin < 1 or n < 1:
        raise ValueError(f"need Cin >= 1 and n >= 1, got Cin={cin}, n={n}")
    rng = np.random.default_rng(seed)
    dw_bound = 1.0 / 3.0  # fan_in = 1 channel * 3 * 3
    head_bound = 1.0 / np.sqrt(cin)
    return AngleGenParams(
        dw_kernel=rng.uniform(-dw_bound, dw_bound, (cin, 1, 3, 3)).astype(dtype),
        dw_bias=np.zeros(cin, dtype=dtype),
        ln_gamma=np.ones(cin, dtype=dtype),
        ln_beta=np.zeros(cin, dtype=dtype),
        w_theta=rng.uniform(-head_bound, head_bound, (n, cin)).astype(dtype),
        b_theta=np.zeros(n, dtype=dtype),
        w_lambda=rng.uniform(-head_bound, head_bound, (n, cin)).astype(dtype),
        b_lambda=np.zeros(n, dtype=dtype),
    )


def generator_forward(x: np.ndarray, p: AngleGenParams) -> AngleSet:
    """Predict [B, n] angles and scales from features [B, Cin, H, W]."""
    x = np.asarray(x)
    if x.ndim != 4:
        raise ValueError(f"generator_forward: x must have rank 4, got rank {x.ndim}")
    if x.shape[1] != p.cin:
        raise ValueError(
            f"generator_forward: channel axis is {x.shape[1]}, parameters expect {p.cin}"
        )
    check_dtype(x, p.dw_kernel)
    z = conv2d(x, p.dw_kernel, stride=1, padding=1, groups=p.cin)
    z += p.dw_bias[:, None, None]
    z = relu(z)
    mean = z.mean(axis=1, keepdims=True)
    var = z.var(axis=1, keepdims=True)
    z = (z - mean) / np.sqrt(var + np.asarray(LAYERNORM_EPS, dtype=z.dtype))
    z = p.ln_gamma[:, None, None] * z + p.ln_beta[:, None, None]
    pooled = z.mean(axis=(2, 3))  # [B, Cin]
    thetas = pooled @ p.w_theta.T + p.b_theta
    lambdas = sigmoid(pooled @ p.w_lambda.T + p.b_lambda)
    return AngleSet(thetas=thetas, lambdas=lambdas)
