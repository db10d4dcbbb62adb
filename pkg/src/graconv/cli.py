"""Command-line surface: operator inspection, forward passes on container
files, rotation benchmarks, architecture reports and an orientation demo.

All report lines meant for scripting are `key=value` tokens. Exit codes:
0 success, 1 validation or I/O failure, 2 bad usage.
"""

from __future__ import annotations

import argparse
import sys
import time
import zlib

import numpy as np

from .angle_generator import AngleSet, generator_forward, generator_init
from .arch_metrics import build_resnet50, report
from .grouped_rotation import KernelBank, rotate_groups_batched, rotate_groups_naive
from .pipeline import (
    GraParams,
    arc_forward,
    arc_params_from_container,
    gra_forward,
    gra_params_from_container,
)
from .rotation import rotation_matrix, rotation_matrix_dtheta
from .sample_conv import conv_per_sample
from .weights_io import GrawError, read_container_file, write_container_file
from .attention import AttentionParams


def _print_matrix(m: np.ndarray) -> None:
    for row in m:
        print(" ".join(f"{v:15.9g}" for v in row))


def _cmd_rotmat(args) -> int:
    if args.deriv:
        _print_matrix(rotation_matrix_dtheta(args.theta, args.k))
    else:
        _print_matrix(rotation_matrix(args.theta, args.k).matrix)
    return 0


def _cmd_forward(args) -> int:
    params_c = read_container_file(args.params)
    input_c = read_container_file(args.input)
    if "x" not in input_c:
        raise ValueError("input container is missing entry 'x'")
    x = input_c["x"]
    if args.mode == "gra":
        p = gra_params_from_container(params_c, args.groups)
        angles = generator_forward(x, p.gen)
        y = gra_forward(x, p, angles=angles)
    else:
        p = arc_params_from_container(params_c, args.groups)
        angles = generator_forward(x, p.routing)
        y = arc_forward(x, p, angles=angles)
    write_container_file(
        {"output": y, "thetas": angles.thetas, "lambdas": angles.lambdas}, args.out
    )
    return 0


def _median_us(fn, iters: int) -> float:
    times = []
    for _ in range(iters):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times) * 1e6)


def _cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    k = 3
    w = rng.standard_normal((args.cout, args.cin, k, k)).astype(np.float32)
    bank = KernelBank(w=w, n=args.groups)
    angles = AngleSet(
        thetas=rng.uniform(-np.pi, np.pi, (args.batch, args.groups)),
        lambdas=rng.uniform(0.1, 0.9, (args.batch, args.groups)),
    )
    x = rng.standard_normal((args.batch, args.cin, args.hw, args.hw)).astype(np.float32)
    w_rot = rotate_groups_batched(bank, angles)  # warm-up and conv operand
    rotate_groups_naive(bank, angles)
    conv_per_sample(x, w_rot)

    naive_us = _median_us(lambda: rotate_groups_naive(bank, angles), args.iters)
    batched_us = _median_us(lambda: rotate_groups_batched(bank, angles), args.iters)
    conv_us = _median_us(lambda: conv_per_sample(x, w_rot), args.iters)
    overhead = 100.0 * batched_us / conv_us
    y = conv_per_sample(x, w_rot)
    print(f"checksum={zlib.crc32(y.tobytes()):08x}")
    print(
        f"bench naive_us={naive_us:.1f} batched_us={batched_us:.1f} "
        f"conv_us={conv_us:.1f} overhead_pct={overhead:.3f}"
    )
    return 0


def _cmd_params(args) -> int:
    if args.variant == "arc":
        spec = build_resnet50("arc", args.hw, m=args.m)
    elif args.variant == "gra":
        spec = build_resnet50("gra", args.hw, groups=args.groups)
    else:
        spec = build_resnet50("plain", args.hw)
    print(report(spec))
    return 0


def _oriented_edge_kernel(k: int) -> np.ndarray:
    """Horizontal-gradient detector: x * gaussian envelope, zero column sum."""
    half = (k - 1) / 2.0
    r, c = np.indices((k, k))
    x = c - half
    y = half - r
    sigma = max(1.0, k / 3.0)
    return (x * np.exp(-(x**2 + y**2) / (2 * sigma**2))).astype(np.float64)


def _stripe_image(hw: int, angle: float, phase: float, period: float = 4.0) -> np.ndarray:
    """Sinusoidal grating whose gradient points along `angle` (x right, y up)."""
    half = (hw - 1) / 2.0
    r, c = np.indices((hw, hw))
    x = c - half
    y = half - r
    t = 2.0 * np.pi / period * (x * np.cos(angle) + y * np.sin(angle)) + phase
    return np.sin(t)


def _cmd_demo(args) -> int:
    thetas = [float(t) for t in args.thetas.split(",") if t != ""]
    if not thetas:
        raise ValueError("demo: need at least one angle in --thetas")
    k = args.k
    rng = np.random.default_rng(args.seed)
    hw = 48
    kernel = _oriented_edge_kernel(k)[None, None]
    params = GraParams(
        bank=KernelBank(w=kernel, n=1),
        gen=generator_init(1, 1, seed=args.seed, dtype=np.float64),
        attn=AttentionParams(
            f_weight=np.zeros((1, 2, 7, 7)), f_bias=np.zeros(1)
        ),
    )
    stripes = [
        _stripe_image(hw, ang, rng.uniform(0, 2 * np.pi))[None, None] for ang in thetas
    ]
    print("demo kernel=oriented-edge k=%d stripes=%s" % (k, args.thetas))
    header = " ".join(f"{a:10.4f}" for a in thetas)
    corner = "kern\\stripe"
    print(f"{corner:>12} {header}")
    for ang in thetas:
        override = AngleSet(thetas=np.array([[ang]]), lambdas=np.array([[1.0]]))
        row = []
        for img in stripes:
            y = gra_forward(img, params, angles=override)
            row.append(float(np.abs(y).mean()))
        print(f"kern {ang:7.4f} " + " ".join(f"{v:10.6f}" for v in row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graconv",
        description="Group-wise rotating convolution tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rotmat", help="print a kernel-rotation operator")
    p.add_argument("--theta", type=float, required=True, help="angle in radians")
    p.add_argument("--k", type=int, required=True, help="odd kernel extent")
    p.add_argument("--deriv", action="store_true", help="print d/dtheta instead")
    p.set_defaults(func=_cmd_rotmat)

    p = sub.add_parser("forward", help="run a forward pass on container files")
    p.add_argument("--mode", choices=("gra", "arc"), required=True)
    p.add_argument("--params", required=True, help="parameter .graw file")
    p.add_argument("--input", required=True, help="input .graw file with entry 'x'")
    p.add_argument("--groups", type=int, required=True,
                   help="group count n (gra) or kernel copies m (arc)")
    p.add_argument("--out", required=True, help="output .graw file")
    p.set_defaults(func=_cmd_forward)

    p = sub.add_parser("bench", help="time rotation paths against convolution")
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--cin", type=int, default=256)
    p.add_argument("--cout", type=int, default=256)
    p.add_argument("--hw", type=int, default=64)
    p.add_argument("--groups", type=int, default=32)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("params", help="parameter/FLOP report for a backbone")
    p.add_argument("--variant", choices=("plain", "arc", "gra"), required=True)
    p.add_argument("--m", type=int, default=4, help="kernel copies for arc")
    p.add_argument("--groups", type=int, default=32, help="group count for gra")
    p.add_argument("--hw", type=int, default=1024, help="input resolution")
    p.set_defaults(func=_cmd_params)

    p = sub.add_parser("demo", help="oriented-kernel vs stripe-orientation matrix")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--thetas", required=True, help="comma-separated radians")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (GrawError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
