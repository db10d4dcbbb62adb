"""Full forward passes: the group-wise rotating-and-attention module and the
adaptive-rotated-convolution baseline it is measured against.

Both consume [B, Cin, H, W] features. The group-wise module predicts n angles
and scales per sample, rotates its single kernel bank group-wise, convolves
each sample with its own kernels and gates the result with group-wise spatial
attention. The baseline keeps m full kernel copies, rotates each whole, and
sums the m convolution outputs weighted by the predicted scales.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angle_generator import AngleGenParams, AngleSet, generator_forward, generator_init
from .attention import AttentionParams, attention_forward, attention_init
from .grouped_rotation import KernelBank, rotate_groups_batched
from .sample_conv import conv_per_sample
from .tensor_core import DEFAULT_DTYPE


@dataclass(frozen=True)
class GraParams:
    """All learnable state of one group-wise rotating-and-attention module."""

    bank: KernelBank
    gen: AngleGenParams
    attn: AttentionParams
    stride: int = 1
    padding: int | None = None  # None -> k//2

    def __post_init__(self):
        if self.gen.n != self.bank.n:
            raise ValueError(
                f"group counts differ: generator has n={self.gen.n}, "
                f"bank has n={self.bank.n}"
            )
        if self.gen.cin != self.bank.cin:
            raise ValueError(
                f"channel counts differ: generator expects {self.gen.cin}, "
                f"bank has {self.bank.cin}"
            )


@dataclass(frozen=True)
class ArcParams:
    """Baseline state: m whole-kernel copies plus one routing network."""

    banks: np.ndarray  # [m, Cout, Cin, k, k]
    routing: AngleGenParams  # m outputs per head
    stride: int = 1
    padding: int | None = None

    def __post_init__(self):
        if self.banks.ndim != 5:
            raise ValueError(f"banks must have rank 5, got rank {self.banks.ndim}")
        m, _, cin, kh, kw = self.banks.shape
        if m < 1:
            raise ValueError(f"need m >= 1 kernel copies, got {m}")
        if kh != kw or kh % 2 == 0:
            raise ValueError(f"kernel extent must be square and odd, got {kh}x{kw}")
        if self.routing.n != m:
            raise ValueError(
                f"routing head width {self.routing.n} does not match m={m}"
            )
        if self.routing.cin != cin:
            raise ValueError(
                f"channel counts differ: routing expects {self.routing.cin}, "
                f"banks have {cin}"
            )

    @property
    def m(self) -> int:
        return self.banks.shape[0]


def gra_init(
    cin: int,
    cout: int,
    n: int,
    k: int = 3,
    ka: int = 7,
    seed: int = 0,
    dtype=DEFAULT_DTYPE,
    stride: int = 1,
    padding: int | None = None,
) -> GraParams:
    """Deterministic random module; weights uniform in +/- 1/sqrt(fan_in)."""
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(cin * k * k)
    w = rng.uniform(-bound, bound, (cout, cin, k, k)).astype(dtype)
    return GraParams(
        bank=KernelBank(w=w, n=n),
        gen=generator_init(cin, n, seed=seed + 1, dtype=dtype),
        attn=attention_init(ka=ka, seed=seed + 2, dtype=dtype),
        stride=stride,
        padding=padding,
    )


def arc_init(
    cin: int,
    cout: int,
    m: int,
    k: int = 3,
    seed: int = 0,
    dtype=DEFAULT_DTYPE,
    stride: int = 1,
    padding: int | None = None,
) -> ArcParams:
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(cin * k * k)
    banks = rng.uniform(-bound, bound, (m, cout, cin, k, k)).astype(dtype)
    return ArcParams(
        banks=banks,
        routing=generator_init(cin, m, seed=seed + 1, dtype=dtype),
        stride=stride,
        padding=padding,
    )


def gra_forward(
    x: np.ndarray,
    p: GraParams,
    angles: AngleSet | None = None,
    bypass_attention: bool = False,
) -> np.ndarray:
    """Run the module on [B, Cin, H, W].

    `angles` overrides the generator (testing and demos); `bypass_attention`
    replaces the gate with identity to isolate the rotating stage. Neither
    hook is reachable from the CLI.
    """
    if angles is None:
        angles = generator_forward(x, p.gen)
    w_rot = rotate_groups_batched(p.bank, angles)
    y = conv_per_sample(x, w_rot, stride=p.stride, padding=p.padding)
    if bypass_attention:
        return y
    return attention_forward(y, p.bank.n, p.attn)


def arc_forward(
    x: np.ndarray,
    p: ArcParams,
    angles: AngleSet | None = None,
) -> np.ndarray:
    """Baseline forward: rotate each of the m kernel copies whole, convolve,
    and aggregate the outputs with the predicted weights."""
    if angles is None:
        angles = generator_forward(x, p.routing)
    if angles.n != p.m:
        raise ValueError(f"angle set carries n={angles.n}, expected m={p.m}")
    b = x.shape[0]
    out = None
    ones = np.ones((b, 1), dtype=p.banks.dtype)
    for i in range(p.m):
        branch = AngleSet(
            thetas=angles.thetas[:, i : i + 1].astype(np.float64), lambdas=ones
        )
        w_rot = rotate_groups_batched(KernelBank(w=p.banks[i], n=1), branch)
        y_i = conv_per_sample(x, w_rot, stride=p.stride, padding=p.padding)
        lam = angles.lambdas[:, i].astype(y_i.dtype)[:, None, None, None]
        out = lam * y_i if out is None else out + lam * y_i
    return out


# Container key schema used by the CLI and the on-disk fixture format.
_GEN_KEYS = (
    "dw_kernel", "dw_bias", "ln_gamma", "ln_beta",
    "w_theta", "b_theta", "w_lambda", "b_lambda",
)


def _gen_to_entries(gen: AngleGenParams, prefix: str) -> dict[str, np.ndarray]:
    return {f"{prefix}.{key}": getattr(gen, key) for key in _GEN_KEYS}


def _gen_from_entries(c: dict[str, np.ndarray], prefix: str) -> AngleGenParams:
    try:
        fields = {key: c[f"{prefix}.{key}"] for key in _GEN_KEYS}
    except KeyError as e:
        raise ValueError(f"parameter container is missing entry {e.args[0]!r}") from None
    return AngleGenParams(**fields)


def gra_params_to_container(p: GraParams) -> dict[str, np.ndarray]:
    out = {"bank.w": p.bank.w}
    out.update(_gen_to_entries(p.gen, "gen"))
    out["attn.f_weight"] = p.attn.f_weight
    out["attn.f_bias"] = p.attn.f_bias
    return out


def gra_params_from_container(c: dict[str, np.ndarray], n: int) -> GraParams:
    for key in ("bank.w", "attn.f_weight", "attn.f_bias"):
        if key not in c:
            raise ValueError(f"parameter container is missing entry {key!r}")
    return GraParams(
        bank=KernelBank(w=c["bank.w"], n=n),
        gen=_gen_from_entries(c, "gen"),
        attn=AttentionParams(f_weight=c["attn.f_weight"], f_bias=c["attn.f_bias"]),
    )


def arc_params_to_container(p: ArcParams) -> dict[str, np.ndarray]:
    out = {"banks": p.banks}
    out.update(_gen_to_entries(p.routing, "gen"))
    return out


def arc_params_from_container(c: dict[str, np.ndarray], m: int) -> ArcParams:
    if "banks" not in c:
        raise ValueError("parameter container is missing entry 'banks'")
    if c["banks"].ndim != 5 or c["banks"].shape[0] != m:
        raise ValueError(
            f"banks entry must be [m={m}, Cout, Cin, k, k], got {c['banks'].shape}"
        )
    return ArcParams(banks=c["banks"], routing=_gen_from_entries(c, "gen"))
