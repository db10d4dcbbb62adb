"""Independent straight-line references used as test oracles.

Everything here runs scalar loops in float64 and shares no code with the
library paths it checks (beyond composing other oracles).
"""

import math

import numpy as np


def conv2d_loop(x, w, stride=1, padding=0, groups=1):
    """Triple-loop grouped cross-correlation, channel-major accumulation."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    b, cin, h, wi = x.shape
    cout, cin_g, k, _ = w.shape
    ho = (h + 2 * padding - k) // stride + 1
    wo = (wi + 2 * padding - k) // stride + 1
    xp = np.zeros((b, cin, h + 2 * padding, wi + 2 * padding))
    xp[:, :, padding : padding + h, padding : padding + wi] = x
    out = np.zeros((b, cout, ho, wo))
    cpg = cout // groups
    for bi in range(b):
        for o in range(cout):
            g = o // cpg
            for i in range(ho):
                for j in range(wo):
                    acc = 0.0
                    for c in range(cin_g):
                        for dy in range(k):
                            for dx in range(k):
                                acc += (
                                    xp[bi, g * cin_g + c, i * stride + dy, j * stride + dx]
                                    * w[o, c, dy, dx]
                                )
                    out[bi, o, i, j] = acc
    return out


def bmm_loop(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    g, m, k = a.shape
    n = b.shape[2]
    out = np.zeros((g, m, n))
    for gi in range(g):
        for i in range(m):
            for j in range(n):
                acc = 0.0
                for t in range(k):
                    acc += a[gi, i, t] * b[gi, t, j]
                out[gi, i, j] = acc
    return out


def rotate_kernel_scalar(w2d, theta):
    """Per-cell bilinear rotation of one k x k kernel."""
    w2d = np.asarray(w2d, dtype=np.float64)
    k = w2d.shape[0]
    half = (k - 1) // 2
    ct, st = math.cos(theta), math.sin(theta)
    out = np.zeros((k, k))
    for r in range(k):
        for c in range(k):
            u = c - half
            v = half - r
            sx = ct * u + st * v
            sy = -st * u + ct * v
            x0 = math.floor(sx)
            y0 = math.floor(sy)
            fx = sx - x0
            fy = sy - y0
            acc = 0.0
            for dx, dy, wt in (
                (0, 0, (1 - fx) * (1 - fy)),
                (1, 0, fx * (1 - fy)),
                (0, 1, (1 - fx) * fy),
                (1, 1, fx * fy),
            ):
                cx = x0 + dx
                cy = y0 + dy
                if abs(cx) <= half and abs(cy) <= half:
                    acc += wt * w2d[int(half - cy), int(cx + half)]
            out[r, c] = acc
    return out


def _sigmoid_scalar(v):
    if v >= 0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def generator_reference(x, p):
    """Scalar angle-generator pipeline; returns (thetas, lambdas) in float64."""
    x = np.asarray(x, dtype=np.float64)
    b, cin, h, wi = x.shape
    n = p.n
    z = np.zeros((b, cin, h, wi))
    for bi in range(b):
        for c in range(cin):
            for i in range(h):
                for j in range(wi):
                    acc = float(p.dw_bias[c])
                    for dy in range(3):
                        for dx in range(3):
                            ii = i + dy - 1
                            jj = j + dx - 1
                            if 0 <= ii < h and 0 <= jj < wi:
                                acc += x[bi, c, ii, jj] * float(p.dw_kernel[c, 0, dy, dx])
                    z[bi, c, i, j] = max(acc, 0.0)
    thetas = np.zeros((b, n))
    lambdas = np.zeros((b, n))
    for bi in range(b):
        pooled = np.zeros(cin)
        for i in range(h):
            for j in range(wi):
                mean = sum(z[bi, c, i, j] for c in range(cin)) / cin
                var = sum((z[bi, c, i, j] - mean) ** 2 for c in range(cin)) / cin
                for c in range(cin):
                    norm = (z[bi, c, i, j] - mean) / math.sqrt(var + 1e-5)
                    pooled[c] += float(p.ln_gamma[c]) * norm + float(p.ln_beta[c])
        pooled /= h * wi
        for t in range(n):
            acc_t = float(p.b_theta[t])
            acc_l = float(p.b_lambda[t])
            for c in range(cin):
                acc_t += pooled[c] * float(p.w_theta[t, c])
                acc_l += pooled[c] * float(p.w_lambda[t, c])
            thetas[bi, t] = acc_t
            lambdas[bi, t] = _sigmoid_scalar(acc_l)
    return thetas, lambdas


def attention_reference(y, n, p):
    """Scalar group-wise spatial attention."""
    y = np.asarray(y, dtype=np.float64)
    b, cout, h, wi = y.shape
    gs = cout // n
    ka = p.f_weight.shape[2]
    pad = ka // 2
    out = np.zeros_like(y)
    for bi in range(b):
        for j in range(n):
            grp = y[bi, j * gs : (j + 1) * gs]
            avg = grp.mean(axis=0)
            mx = grp.max(axis=0)
            for i in range(h):
                for jj in range(wi):
                    acc = float(p.f_bias[0])
                    for dy in range(ka):
                        for dx in range(ka):
                            ii = i + dy - pad
                            kk = jj + dx - pad
                            if 0 <= ii < h and 0 <= kk < wi:
                                acc += avg[ii, kk] * float(p.f_weight[0, 0, dy, dx])
                                acc += mx[ii, kk] * float(p.f_weight[0, 1, dy, dx])
                    gate = _sigmoid_scalar(acc)
                    for l in range(gs):
                        out[bi, j * gs + l, i, jj] = grp[l, i, jj] * gate
    return out


def gra_reference(x, p):
    """Monolithic scalar reference of the full module forward pass."""
    x = np.asarray(x, dtype=np.float64)
    thetas, lambdas = generator_reference(x, p.gen)
    cout, cin, k, _ = p.bank.w.shape
    n = p.bank.n
    gs = cout // n
    pad = p.padding if p.padding is not None else k // 2
    ys = []
    for bi in range(x.shape[0]):
        w_rot = np.zeros((cout, cin, k, k))
        for j in range(n):
            for l in range(gs):
                for c in range(cin):
                    w_rot[j * gs + l, c] = lambdas[bi, j] * rotate_kernel_scalar(
                        p.bank.w[j * gs + l, c], float(thetas[bi, j])
                    )
        ys.append(conv2d_loop(x[bi : bi + 1], w_rot, stride=p.stride, padding=pad)[0])
    return attention_reference(np.stack(ys), n, p.attn)
