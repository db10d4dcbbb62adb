"""Dense-array substrate: validated 2-D convolution and batched matmul.

Arrays are plain numpy ndarrays in row-major layout. float32 is the working
precision; float64 is accepted everywhere so oracle tests can run at higher
precision. Operands of one call must share a dtype.

Both heavy kernels lower to a single ``np.matmul`` per call with the
contraction axis laid out channel-major ``(c, dy, dx)``, so repeated runs on
identical inputs are bit-identical.
"""

from __future__ import annotations

import numpy as np

DEFAULT_DTYPE = np.float32
SUPPORTED_DTYPES = (np.float32, np.float64)


def check_dtype(*arrays: np.ndarray) -> np.dtype:
    """Return the common dtype of `arrays`, rejecting mixes and non-floats."""
    dt = arrays[0].dtype
    if dt.type not in SUPPORTED_DTYPES:
        raise ValueError(f"unsupported dtype {dt}; expected float32 or float64")
    for a in arrays[1:]:
        if a.dtype != dt:
            raise ValueError(f"mixed dtypes: {dt} vs {a.dtype}")
    return dt


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function, elementwise."""
    z = np.asarray(z)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0)


def conv_out_extent(size: int, k: int, stride: int, padding: int) -> int:
    """Output extent of a convolution axis; rejects non-exact stride fits."""
    span = size + 2 * padding - k
    if span < 0 or span % stride != 0:
        raise ValueError(
            f"conv2d: extent {size} with kernel {k}, stride {stride}, "
            f"padding {padding} does not produce an integral output extent"
        )
    return span // stride + 1


def conv2d(
    x: np.ndarray,
    w: np.ndarray,
    stride: int = 1,
    padding: int = 0,
    groups: int = 1,
) -> np.ndarray:
    """Grouped 2-D cross-correlation.

    Args:
        x: input features [B, Cin, H, W].
        w: filters [Cout, Cin/groups, k, k] with k odd.
        stride: positive spatial step.
        padding: zero padding applied to both spatial axes.
        groups: channel groups; group g's filters read only group g's inputs.

    Returns:
        Output features [B, Cout, H', W'] in the operands' dtype.
    """
    x = np.asarray(x)
    w = np.asarray(w)
    if x.ndim != 4:
        raise ValueError(f"conv2d: x must have rank 4, got rank {x.ndim}")
    if w.ndim != 4:
        raise ValueError(f"conv2d: w must have rank 4, got rank {w.ndim}")
    dt = check_dtype(x, w)
    b, cin, h, wi = x.shape
    cout, cin_g, kh, kw = w.shape
    if min(b, cin, h, wi, cout, cin_g) < 1:
        raise ValueError("conv2d: all extents must be positive")
    if kh != kw:
        raise ValueError(f"conv2d: kernel axes must be square, got {kh}x{kw}")
    k = kh
    if k % 2 == 0:
        raise ValueError(f"conv2d: kernel extent must be odd, got {k}")
    if stride < 1:
        raise ValueError(f"conv2d: stride must be >= 1, got {stride}")
    if padding < 0:
        raise ValueError(f"conv2d: padding must be >= 0, got {padding}")
    if groups < 1:
        raise ValueError(f"conv2d: groups must be >= 1, got {groups}")
    if cin % groups != 0:
        raise ValueError(f"conv2d: Cin axis ({cin}) not divisible by groups ({groups})")
    if cout % groups != 0:
        raise ValueError(f"conv2d: Cout axis ({cout}) not divisible by groups ({groups})")
    if cin_g != cin // groups:
        raise ValueError(
            f"conv2d: w channel axis is {cin_g}, expected Cin/groups = {cin // groups}"
        )
    ho = conv_out_extent(h, k, stride, padding)
    wo = conv_out_extent(wi, k, stride, padding)

    if padding:
        xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    else:
        xp = x
    # im2col with the contraction axis in (c, dy, dx) order
    cols = np.empty((b, cin, k, k, ho, wo), dtype=dt)
    for dy in range(k):
        for dx in range(k):
            cols[:, :, dy, dx] = xp[
                :, :, dy : dy + stride * (ho - 1) + 1 : stride,
                dx : dx + stride * (wo - 1) + 1 : stride,
            ]
    cols = cols.reshape(b, groups, (cin // groups) * k * k, ho * wo)
    wg = w.reshape(groups, cout // groups, cin_g * k * k)
    out = np.matmul(wg[None], cols)  # [B, g, Cout/g, H'*W']
    return out.reshape(b, cout, ho, wo)


def bmm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched matrix product: out[g] = a[g] @ b[g] for [G,M,K] x [G,K,N]."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 3 or b.ndim != 3:
        raise ValueError(f"bmm: operands must have rank 3, got {a.ndim} and {b.ndim}")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"bmm: batch axes differ, {a.shape[0]} vs {b.shape[0]}")
    if a.shape[2] != b.shape[1]:
        raise ValueError(f"bmm: inner axes differ, K={a.shape[2]} vs K={b.shape[1]}")
    check_dtype(a, b)
    return np.matmul(a, b)
