"""Bilinear kernel-rotation operators.

A k x k kernel cell (r, c) sits at centered coordinates
(x, y) = (c - (k-1)/2, (k-1)/2 - r), x rightward and y upward. Rotating the
kernel pattern counterclockwise by theta means target cell p reads the source
at R(-theta) @ p, where R is the standard 2-D rotation matrix. The read is
bilinear over the four surrounding integer cells; cells outside the k x k
support contribute zero, so mass leaks away near the corners.

Sample coordinates within SNAP_TOL of a grid line are collapsed onto it, which
keeps the operators for theta in {0, pi/2, pi, ...} exact 0/1 matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SNAP_TOL = 1e-12
SEAM_TOL = 1e-6

# corner offsets (dx, dy) of the bilinear stencil
_CORNERS = ((0, 0), (1, 0), (0, 1), (1, 1))


def _check_k(k: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
        raise ValueError(f"kernel extent must be a positive odd integer, got {k}")


def _centered_coords(k: int) -> tuple[np.ndarray, np.ndarray]:
    half = (k - 1) / 2.0
    r, c = np.indices((k, k))
    return (c.ravel() - half).astype(np.float64), (half - r.ravel()).astype(np.float64)


def _sample_points(thetas: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Source sample point of every target cell, shape thetas.shape + (k*k,)."""
    u, v = _centered_coords(k)
    t = np.asarray(thetas, dtype=np.float64)[..., None]
    ct, st = np.cos(t), np.sin(t)
    sx = ct * u + st * v
    sy = -st * u + ct * v
    for s in (sx, sy):
        snapped = np.rint(s)
        near = np.abs(s - snapped) <= SNAP_TOL
        s[near] = snapped[near]
    return sx, sy


def _stencil(sx: np.ndarray, sy: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear gather stencil: flat source indices and weights, [..., k*k, 4].

    Out-of-support corners get weight 0 and a clamped index.
    """
    half = (k - 1) // 2
    x0 = np.floor(sx)
    y0 = np.floor(sy)
    fx = sx - x0
    fy = sy - y0
    parts_x = (1.0 - fx, fx)
    parts_y = (1.0 - fy, fy)
    idx = np.empty(sx.shape + (4,), dtype=np.int64)
    wgt = np.empty(sx.shape + (4,), dtype=np.float64)
    for t, (dx, dy) in enumerate(_CORNERS):
        cx = x0 + dx
        cy = y0 + dy
        ok = (np.abs(cx) <= half) & (np.abs(cy) <= half)
        flat = (half - cy) * k + (cx + half)
        idx[..., t] = np.where(ok, flat, 0).astype(np.int64)
        wgt[..., t] = np.where(ok, parts_x[dx] * parts_y[dy], 0.0)
    return idx, wgt


def rotation_matrices(thetas: np.ndarray, k: int) -> np.ndarray:
    """Rotation operators for a batch of angles, shape thetas.shape + (k², k²)."""
    _check_k(k)
    thetas = np.asarray(thetas, dtype=np.float64)
    if not np.all(np.isfinite(thetas)):
        raise ValueError("rotation angle must be finite")
    k2 = k * k
    sx, sy = _sample_points(thetas, k)
    idx, wgt = _stencil(sx, sy, k)
    out = np.zeros(thetas.shape + (k2, k2), dtype=np.float64)
    flat = out.reshape(-1, k2, k2)
    bidx = np.arange(flat.shape[0])[:, None, None]
    pidx = np.arange(k2)[None, :, None]
    np.add.at(flat, (bidx, pidx, idx.reshape(-1, k2, 4)), wgt.reshape(-1, k2, 4))
    return out


@dataclass(frozen=True)
class RotationOperator:
    """The k²×k² linear map sending a flattened kernel to its rotation."""

    k: int
    theta: float
    matrix: np.ndarray

    def apply(self, w: np.ndarray) -> np.ndarray:
        """Rotate the trailing k x k axes of `w` through the matrix."""
        w = np.asarray(w)
        if w.ndim < 2 or w.shape[-1] != self.k or w.shape[-2] != self.k:
            raise ValueError(f"expected trailing axes ({self.k}, {self.k}), got {w.shape}")
        flat = w.reshape(-1, self.k * self.k)
        out = flat @ self.matrix.astype(w.dtype, copy=False).T
        return out.reshape(w.shape)


def rotation_matrix(theta: float, k: int) -> RotationOperator:
    """Build the bilinear rotation operator for one angle."""
    m = rotation_matrices(np.float64(theta), k)
    return RotationOperator(k=int(k), theta=float(theta), matrix=m)


def rotate_kernel_direct(w: np.ndarray, theta: float) -> np.ndarray:
    """Rotate the trailing k x k axes of `w` by direct per-cell bilinear sampling.

    Reference path: no operator matrix is formed; each target cell gathers its
    four source neighbors independently.
    """
    w = np.asarray(w)
    if w.ndim < 2:
        raise ValueError(f"w must have at least rank 2, got rank {w.ndim}")
    if w.shape[-1] != w.shape[-2]:
        raise ValueError(f"trailing axes must be square, got {w.shape[-2:]}")
    k = w.shape[-1]
    _check_k(k)
    if not np.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    sx, sy = _sample_points(np.float64(theta), k)
    idx, wgt = _stencil(sx, sy, k)  # [k*k, 4]
    wgt = wgt.astype(w.dtype, copy=False)
    flat = w.reshape(-1, k * k)
    out = np.zeros_like(flat)
    for t in range(4):
        out += wgt[:, t] * flat[:, idx[:, t]]
    return out.reshape(w.shape)


def seam_angles(k: int) -> list[tuple[float, int]]:
    """All angles in [0, 2*pi) at which some sample point crosses a grid line.

    Returns (angle, flat cell index) pairs. Cell p sits at radius rho and phase
    phi, so its sample point is (rho*cos(phi-theta), rho*sin(phi-theta)); each
    coordinate crosses integer m whenever cos/sin(phi-theta) = m/rho.
    """
    _check_k(k)
    u, v = _centered_coords(k)
    rho = np.hypot(u, v)
    phi = np.arctan2(v, u)
    out: list[tuple[float, int]] = []
    two_pi = 2.0 * np.pi
    for p in range(k * k):
        if rho[p] == 0.0:
            continue  # the center never moves
        for m in range(-int(np.floor(rho[p])), int(np.floor(rho[p])) + 1):
            ratio = m / rho[p]
            a = np.arccos(np.clip(ratio, -1.0, 1.0))
            b = np.arcsin(np.clip(ratio, -1.0, 1.0))
            # sx = m: phi - theta = +/- a ; sy = m: phi - theta = b or pi - b
            for d in (a, -a, b, np.pi - b):
                out.append((float((phi[p] - d) % two_pi), p))
    return out


def seam_distance(theta: float, k: int) -> tuple[float, int]:
    """Angular distance from theta to the nearest bilinear seam, with its cell."""
    if not np.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    best = np.inf
    best_cell = -1
    for ang, cell in seam_angles(k):
        d = abs((theta - ang + np.pi) % (2.0 * np.pi) - np.pi)
        if d < best:
            best, best_cell = d, cell
    return best, best_cell


def rotation_matrix_dtheta(theta: float, k: int) -> np.ndarray:
    """Entrywise derivative of rotation_matrix(theta, k) with respect to theta.

    The bilinear weights are piecewise bilinear in the sample point, which
    moves at ds/dtheta = (sy, -sx); the product rule gives every entry.
    Rejects theta within SEAM_TOL of an angle where any sample point crosses a
    grid line, where the weights are not differentiable.
    """
    _check_k(k)
    dist, cell = seam_distance(theta, k)
    if dist < SEAM_TOL:
        raise ValueError(
            f"rotation_matrix_dtheta: theta={theta!r} is within {SEAM_TOL} of a "
            f"bilinear seam (offending cell {cell})"
        )
    k2 = k * k
    half = (k - 1) // 2
    sx, sy = _sample_points(np.float64(theta), k)
    dsx, dsy = sy, -sx
    x0 = np.floor(sx)
    y0 = np.floor(sy)
    fx = sx - x0
    fy = sy - y0
    # d/dtheta of the four corner weights
    dw = (
        -dsx * (1.0 - fy) - (1.0 - fx) * dsy,
        dsx * (1.0 - fy) - fx * dsy,
        -dsx * fy + (1.0 - fx) * dsy,
        dsx * fy + fx * dsy,
    )
    out = np.zeros((k2, k2), dtype=np.float64)
    for t, (dx, dy) in enumerate(_CORNERS):
        cx = x0 + dx
        cy = y0 + dy
        ok = (np.abs(cx) <= half) & (np.abs(cy) <= half)
        for p in np.nonzero(ok)[0]:
            q = int((half - cy[p]) * k + (cx[p] + half))
            out[p, q] += dw[t][p]
    return out
