"""Symbolic layer specs for ResNet-50 backbones and their rotating-kernel
variants, with exact parameter and FLOP accounting (no weights allocated).

Conventions: one multiply-accumulate counts as 2 FLOPs, backbone convolutions
are unbiased, normalizations and activations cost 2 FLOPs per element, and the
default spatial resolution is 1024x1024. The (1024^2, 2 FLOPs/MAC) pair is a
reconstruction: it is the only convention that lands the plain backbone at
171.5 GFLOPs, and the report flags it as inferred.
"""

from __future__ import annotations

from dataclasses import dataclass

KINDS = (
    "conv", "depthwise_conv", "linear", "layernorm", "batchnorm", "pool",
    "attention_conv",
)

# bottleneck blocks per stage and their 3x3 widths / output channels
_BLOCKS = (3, 4, 6, 3)
_WIDTHS = (64, 128, 256, 512)
_OUTS = (256, 512, 1024, 2048)
_ATTN_K = 7


@dataclass(frozen=True)
class LayerSpec:
    """One counted layer: geometry plus accounting multipliers.

    hw is the output spatial extent at which the layer executes, hw_in the
    input extent (used by pools). weight_copies multiplies parameters (kernel
    copies with independent weights), runs multiplies FLOPs (shared weights
    executed several times), rot_copies adds that many kernel-rotation matmuls
    to the FLOP count, act_elems counts elements passed through a pointwise
    activation right after this layer, and extra_flops carries auxiliary terms
    (channel pooling, sigmoid, gating) computed by the builder.
    """

    kind: str
    cin: int
    cout: int
    hw: int
    k: int = 1
    stride: int = 1
    groups: int = 1
    bias: bool = False
    hw_in: int = 0
    weight_copies: int = 1
    runs: int = 1
    rot_copies: int = 0
    act_elems: int = 0
    extra_flops: int = 0
    stage: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if min(self.cin, self.cout, self.hw, self.k, self.stride, self.groups) < 1:
            raise ValueError(f"layer extents must be positive: {self}")


@dataclass(frozen=True)
class ArchSpec:
    """Ordered layer list for one backbone variant at one input resolution."""

    layers: tuple[LayerSpec, ...]
    variant: str
    variant_arg: int
    input_hw: int


def layer_params(layer: LayerSpec) -> int:
    if layer.kind in ("conv", "depthwise_conv", "attention_conv"):
        weights = layer.cout * (layer.cin // layer.groups) * layer.k * layer.k
        if layer.bias:
            weights += layer.cout
        return layer.weight_copies * weights
    if layer.kind == "linear":
        return layer.cout * (layer.cin + 1)
    if layer.kind in ("layernorm", "batchnorm"):
        return 2 * layer.cout
    return 0  # pool


def layer_flops(layer: LayerSpec) -> int:
    area = layer.hw * layer.hw
    if layer.kind in ("conv", "depthwise_conv", "attention_conv"):
        flops = layer.runs * 2 * area * layer.cout * (layer.cin // layer.groups) * layer.k**2
        if layer.rot_copies:
            k2 = layer.k * layer.k
            flops += layer.rot_copies * 2 * k2 * k2 * layer.cout * layer.cin
    elif layer.kind == "linear":
        flops = layer.runs * 2 * layer.cin * layer.cout
    elif layer.kind in ("layernorm", "batchnorm"):
        flops = 2 * layer.cout * area
    else:  # pool: one pass over the window (or whole input when k covers it)
        if layer.hw_in:
            flops = layer.cin * layer.hw_in * layer.hw_in
        else:
            flops = layer.cout * area * layer.k * layer.k
    return flops + 2 * layer.act_elems + layer.extra_flops


def count_params(spec: ArchSpec) -> int:
    return sum(layer_params(layer) for layer in spec.layers)


def count_flops(spec: ArchSpec) -> int:
    return sum(layer_flops(layer) for layer in spec.layers)


def _down(hw: int, k: int, stride: int, padding: int) -> int:
    return (hw + 2 * padding - k) // stride + 1


def _router_layers(cin: int, n_out: int, hw: int, stage: str) -> list[LayerSpec]:
    """Angle-generator / routing net: depthwise 3x3 -> ReLU -> LN -> global
    pool -> two n_out-wide linear heads."""
    area = hw * hw
    return [
        LayerSpec("depthwise_conv", cin, cin, hw, k=3, groups=cin, bias=True,
                  act_elems=cin * area, stage=stage),
        LayerSpec("layernorm", cin, cin, hw, stage=stage),
        LayerSpec("pool", cin, cin, 1, hw_in=hw, stage=stage),
        LayerSpec("linear", cin, n_out, 1, bias=True, stage=stage),
        LayerSpec("linear", cin, n_out, 1, bias=True, stage=stage),
    ]


def build_resnet50(
    variant: str, input_hw: int = 1024, *, m: int = 4, groups: int = 32
) -> ArchSpec:
    """Symbolic ResNet-50 backbone (no classifier head).

    variant "plain" is the stock backbone; "arc" replaces every 3x3 conv in
    the last three stages with m rotated kernel copies plus a routing net;
    "gra" replaces the same 13 sites with one group-wise rotated kernel, an
    angle generator and a shared group-wise attention conv. 1x1 convolutions
    are preserved everywhere.
    """
    if variant not in ("plain", "arc", "gra"):
        raise ValueError(f"unknown variant {variant!r}; expected plain, arc or gra")
    if input_hw < 32:
        raise ValueError(f"input resolution must be >= 32, got {input_hw}")
    if variant == "arc" and m < 1:
        raise ValueError(f"arc variant needs m >= 1 kernel copies, got {m}")
    if variant == "gra" and groups < 1:
        raise ValueError(f"gra variant needs >= 1 groups, got {groups}")

    layers: list[LayerSpec] = []
    hw = _down(input_hw, 7, 2, 3)
    layers.append(LayerSpec("conv", 3, 64, hw, k=7, stride=2, stage="stem"))
    layers.append(LayerSpec("batchnorm", 64, 64, hw, act_elems=64 * hw * hw,
                            stage="stem"))
    hw = _down(hw, 3, 2, 1)
    layers.append(LayerSpec("pool", 64, 64, hw, k=3, stride=2, stage="stem"))

    in_ch = 64
    for si, (blocks, width, out_ch) in enumerate(zip(_BLOCKS, _WIDTHS, _OUTS)):
        stage = f"stage{si + 1}"
        replace = variant != "plain" and si >= 1  # the last three stages
        for bi in range(blocks):
            stride = 2 if (si > 0 and bi == 0) else 1
            hw_out = _down(hw, 3, stride, 1)
            area_out = hw_out * hw_out
            layers.append(LayerSpec("conv", in_ch, width, hw, stage=stage))
            layers.append(LayerSpec("batchnorm", width, width, hw,
                                    act_elems=width * hw * hw, stage=stage))
            if replace:
                n_out = m if variant == "arc" else groups
                layers.extend(_router_layers(width, n_out, hw, stage))
                copies = m if variant == "arc" else 1
                layers.append(LayerSpec("conv", width, width, hw_out, k=3,
                                        stride=stride, weight_copies=copies,
                                        runs=copies, rot_copies=copies,
                                        stage=stage))
                if variant == "gra":
                    extras = (3 * width + 2 * groups) * area_out
                    layers.append(LayerSpec("attention_conv", 2, 1, hw_out,
                                            k=_ATTN_K, bias=True, runs=groups,
                                            extra_flops=extras, stage=stage))
            else:
                layers.append(LayerSpec("conv", width, width, hw_out, k=3,
                                        stride=stride, stage=stage))
            layers.append(LayerSpec("batchnorm", width, width, hw_out,
                                    act_elems=width * area_out, stage=stage))
            layers.append(LayerSpec("conv", width, out_ch, hw_out, stage=stage))
            layers.append(LayerSpec("batchnorm", out_ch, out_ch, hw_out,
                                    act_elems=out_ch * area_out, stage=stage))
            if bi == 0:
                layers.append(LayerSpec("conv", in_ch, out_ch, hw_out,
                                        stride=stride, stage=stage))
                layers.append(LayerSpec("batchnorm", out_ch, out_ch, hw_out,
                                        stage=stage))
            in_ch = out_ch
            hw = hw_out

    arg = {"plain": 0, "arc": m, "gra": groups}[variant]
    return ArchSpec(layers=tuple(layers), variant=variant, variant_arg=arg,
                    input_hw=input_hw)


def replacement_sites(spec: ArchSpec) -> list[LayerSpec]:
    """The 3x3 convolution sites subject to replacement (stages 2-4)."""
    return [
        l for l in spec.layers
        if l.kind == "conv" and l.k == 3 and l.stage in ("stage2", "stage3", "stage4")
    ]


def report(spec: ArchSpec) -> str:
    """Structured counting report: one line per stage plus totals."""
    order: list[str] = []
    agg: dict[str, list[int]] = {}
    for layer in spec.layers:
        if layer.stage not in agg:
            order.append(layer.stage)
            agg[layer.stage] = [0, 0]
        agg[layer.stage][0] += layer_params(layer)
        agg[layer.stage][1] += layer_flops(layer)
    label = spec.variant
    if spec.variant == "arc":
        label = f"arc(m={spec.variant_arg})"
    elif spec.variant == "gra":
        label = f"gra(n={spec.variant_arg})"
    lines = [
        f"backbone resnet50 variant={label} input={spec.input_hw}x{spec.input_hw}",
        "convention: 2 FLOPs per multiply-accumulate; resolution reconstructed, "
        "not quoted from a reference",
    ]
    for stage in order:
        p, f = agg[stage]
        lines.append(f"{stage:<8} params={p:<12} flops={f}")
    total_p = count_params(spec)
    total_f = count_flops(spec)
    lines.append(f"{'total':<8} params={total_p:<12} flops={total_f}")
    lines.append(f"params_M={total_p / 1e6:.2f}")
    lines.append(f"flops_G={total_f / 1e9:.1f}")
    return "\n".join(lines)
