"""Group-wise kernel rotation: reference loop and single-batched-matmul path.

The kernel bank [Cout, Cin, k, k] splits into n contiguous groups along Cout;
group j of sample b rotates by thetas[b, j] and is scaled by lambdas[b, j].
The fast path folds all B*n rotations into one batched matmul of shape
[n, B*k^2, k^2] x [n, k^2, (Cout/n)*Cin].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angle_generator import AngleSet
from .rotation import rotate_kernel_direct, rotation_matrices
from .tensor_core import bmm


@dataclass(frozen=True)
class KernelBank:
    """Convolution weights [Cout, Cin, k, k] partitioned into n groups on Cout."""

    w: np.ndarray
    n: int

    def __post_init__(self):
        if self.w.ndim != 4:
            raise ValueError(f"kernel bank must have rank 4, got rank {self.w.ndim}")
        cout, _, kh, kw = self.w.shape
        if kh != kw or kh % 2 == 0:
            raise ValueError(f"kernel extent must be square and odd, got {kh}x{kw}")
        if self.n < 1:
            raise ValueError(f"group count must be >= 1, got {self.n}")
        if cout % self.n != 0:
            raise ValueError(
                f"Cout axis ({cout}) not divisible by group count ({self.n})"
            )

    @property
    def cout(self) -> int:
        return self.w.shape[0]

    @property
    def cin(self) -> int:
        return self.w.shape[1]

    @property
    def k(self) -> int:
        return self.w.shape[2]

    @property
    def group_size(self) -> int:
        return self.cout // self.n


def group_view(bank: KernelBank) -> np.ndarray:
    """Reshape the bank to [n, Cout/n, Cin, k, k]; group j holds filters
    [j*Cout/n, (j+1)*Cout/n)."""
    return bank.w.reshape(bank.n, bank.group_size, bank.cin, bank.k, bank.k)


def _check_angles(bank: KernelBank, angles: AngleSet) -> None:
    if angles.n != bank.n:
        raise ValueError(
            f"group-count mismatch: angles carry n={angles.n}, bank has n={bank.n}"
        )


def rotate_groups_naive(bank: KernelBank, angles: AngleSet) -> np.ndarray:
    """Reference loop: per (sample, group) direct rotation and scaling.

    Returns per-sample kernels [B, Cout, Cin, k, k].
    """
    _check_angles(bank, angles)
    b, n = angles.batch, bank.n
    gs = bank.group_size
    out = np.empty((b,) + bank.w.shape, dtype=bank.w.dtype)
    lam = angles.lambdas.astype(bank.w.dtype, copy=False)
    for bi in range(b):
        for j in range(n):
            block = rotate_kernel_direct(
                bank.w[j * gs : (j + 1) * gs], float(angles.thetas[bi, j])
            )
            out[bi, j * gs : (j + 1) * gs] = lam[bi, j] * block
    return out


def rotate_groups_batched(bank: KernelBank, angles: AngleSet) -> np.ndarray:
    """Fast path: one batched matmul rotates every (sample, group) pair.

    Dataflow: rotation matrices [B,n,k2,k2] -> [n, B*k2, k2]; weights
    [Cout,Cin,k,k] -> [n, k2, (Cout/n)*Cin]; bmm -> [n, B*k2, (Cout/n)*Cin]
    -> [B, Cout, Cin, k, k], then each group is scaled by its lambda.
    """
    _check_angles(bank, angles)
    b, n = angles.batch, bank.n
    gs, cin, k = bank.group_size, bank.cin, bank.k
    k2 = k * k
    rm = rotation_matrices(angles.thetas, k)  # [B, n, k2, k2]
    rm = rm.astype(bank.w.dtype, copy=False)
    rm = rm.transpose(1, 0, 2, 3).reshape(n, b * k2, k2)
    wg = bank.w.reshape(n, gs, cin, k2).transpose(0, 3, 1, 2).reshape(n, k2, gs * cin)
    rot = bmm(rm, wg)  # [n, B*k2, gs*cin]
    rot = rot.reshape(n, b, k2, gs, cin).transpose(1, 0, 3, 4, 2)
    rot = rot.reshape(b, n, gs, cin, k, k)
    lam = angles.lambdas.astype(bank.w.dtype, copy=False)
    rot = rot * lam[:, :, None, None, None, None]
    return rot.reshape(b, bank.cout, cin, k, k)
