"""Group-wise spatial attention.

Each group of Cout/n feature channels is pooled across channels (average and
max), the two maps pass through one shared conv F (2 -> 1 channels), and the
sigmoid of the result gates every channel of the group elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import DEFAULT_DTYPE, check_dtype, conv2d, sigmoid


@dataclass(frozen=True)
class AttentionParams:
    """Shared attention conv: weights [1, 2, ka, ka] and bias [1], ka odd."""

    f_weight: np.ndarray
    f_bias: np.ndarray

    def __post_init__(self):
        if self.f_weight.ndim != 4 or self.f_weight.shape[:2] != (1, 2):
            raise ValueError(
                f"f_weight must be [1, 2, ka, ka], got {self.f_weight.shape}"
            )
        ka = self.f_weight.shape[2]
        if self.f_weight.shape[3] != ka or ka % 2 == 0:
            raise ValueError(f"attention kernel must be square and odd, got {self.f_weight.shape[2:]}")
        if self.f_bias.shape != (1,):
            raise ValueError(f"f_bias must be [1], got {self.f_bias.shape}")

    @property
    def ka(self) -> int:
        return self.f_weight.shape[2]


def attention_init(ka: int = 7, seed: int = 0, dtype=DEFAULT_DTYPE) -> AttentionParams:
    """Deterministic init matching the conv convention: uniform +/- 1/sqrt(2*ka*ka)."""
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(2 * ka * ka)
    return AttentionParams(
        f_weight=rng.uniform(-bound, bound, (1, 2, ka, ka)).astype(dtype),
        f_bias=np.zeros(1, dtype=dtype),
    )


def attention_forward(y: np.ndarray, n: int, p: AttentionParams) -> np.ndarray:
    """Gate features [B, Cout, H, W] group-wise; spatial extent is preserved."""
    y = np.asarray(y)
    if y.ndim != 4:
        raise ValueError(f"attention_forward: y must have rank 4, got rank {y.ndim}")
    b, cout, h, w = y.shape
    if n < 1 or cout % n != 0:
        raise ValueError(
            f"attention_forward: Cout axis ({cout}) not divisible by group count ({n})"
        )
    check_dtype(y, p.f_weight)
    gs = cout // n
    yg = y.reshape(b, n, gs, h, w)
    pooled = np.stack([yg.mean(axis=2), yg.max(axis=2)], axis=2)  # [B, n, 2, H, W]
    gate = conv2d(
        pooled.reshape(b * n, 2, h, w), p.f_weight, stride=1, padding=p.ka // 2
    )
    gate = sigmoid(gate + p.f_bias[:, None, None])
    gate = gate.reshape(b, n, 1, h, w)
    return (yg * gate).reshape(b, cout, h, w)
