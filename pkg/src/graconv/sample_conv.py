"""Per-sample convolution through the grouped-convolution reshape.

Every sample b convolves with its own kernel set w[b]: fold the batch into
channels ([1, B*Cin, H, W]), stack the kernels ([B*Cout, Cin, k, k]) and run
one grouped convolution with groups = B.
"""

from __future__ import annotations

import numpy as np

from .tensor_core import conv2d


def conv_per_sample(
    x: np.ndarray,
    w_rot: np.ndarray,
    stride: int = 1,
    padding: int | None = None,
) -> np.ndarray:
    """Convolve x[b] with w_rot[b] for every sample.

    Args:
        x: inputs [B, Cin, H, W].
        w_rot: per-sample kernels [B, Cout, Cin, k, k].
        stride: spatial step.
        padding: zero padding; defaults to k//2 (shape-preserving at stride 1).

    Returns:
        Outputs [B, Cout, H', W'].
    """
    x = np.asarray(x)
    w_rot = np.asarray(w_rot)
    if x.ndim != 4:
        raise ValueError(f"conv_per_sample: x must have rank 4, got rank {x.ndim}")
    if w_rot.ndim != 5:
        raise ValueError(f"conv_per_sample: w must have rank 5, got rank {w_rot.ndim}")
    b, cin, h, wi = x.shape
    bw, cout, cin_w, k, _ = w_rot.shape
    if bw != b:
        raise ValueError(f"conv_per_sample: batch axes differ, x has {b}, w has {bw}")
    if cin_w != cin:
        raise ValueError(
            f"conv_per_sample: channel axes differ, x has {cin}, w has {cin_w}"
        )
    if padding is None:
        padding = k // 2
    y = conv2d(
        x.reshape(1, b * cin, h, wi),
        w_rot.reshape(b * cout, cin, k, k),
        stride=stride,
        padding=padding,
        groups=b,
    )
    return y.reshape(b, cout, y.shape[2], y.shape[3])
