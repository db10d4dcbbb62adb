"""Group-wise rotating convolution kernels with group-wise spatial attention.

From-scratch numerics on numpy arrays: bilinear kernel-rotation operators,
an angle-generator routing net, batched group-wise rotation, per-sample
convolution, spatial attention gating, a symbolic parameter/FLOP counter for
ResNet-50 variants, and a bit-exact tensor container format.
"""

from .angle_generator import (
    AngleGenParams,
    AngleSet,
    generator_forward,
    generator_init,
)
from .arch_metrics import (
    ArchSpec,
    LayerSpec,
    build_resnet50,
    count_flops,
    count_params,
    replacement_sites,
    report,
)
from .attention import AttentionParams, attention_forward, attention_init
from .grouped_rotation import (
    KernelBank,
    group_view,
    rotate_groups_batched,
    rotate_groups_naive,
)
from .pipeline import (
    ArcParams,
    GraParams,
    arc_forward,
    arc_init,
    arc_params_from_container,
    arc_params_to_container,
    gra_forward,
    gra_init,
    gra_params_from_container,
    gra_params_to_container,
)
from .rotation import (
    RotationOperator,
    rotate_kernel_direct,
    rotation_matrices,
    rotation_matrix,
    rotation_matrix_dtheta,
    seam_distance,
)
from .sample_conv import conv_per_sample
from .tensor_core import bmm, conv2d, relu, sigmoid
from .weights_io import (
    BadMagicError,
    BadVersionError,
    DuplicateNameError,
    GrawError,
    SizeOverflowError,
    TruncatedError,
    read_container,
    read_container_file,
    write_container,
    write_container_file,
)

__version__ = "0.1.0"

__all__ = [
    "AngleGenParams",
    "AngleSet",
    "ArcParams",
    "ArchSpec",
    "AttentionParams",
    "BadMagicError",
    "BadVersionError",
    "DuplicateNameError",
    "GraParams",
    "GrawError",
    "KernelBank",
    "LayerSpec",
    "RotationOperator",
    "SizeOverflowError",
    "TruncatedError",
    "arc_forward",
    "arc_init",
    "arc_params_from_container",
    "arc_params_to_container",
    "attention_forward",
    "attention_init",
    "bmm",
    "build_resnet50",
    "conv2d",
    "conv_per_sample",
    "count_flops",
    "count_params",
    "generator_forward",
    "generator_init",
    "gra_forward",
    "gra_init",
    "gra_params_from_container",
    "gra_params_to_container",
    "group_view",
    "read_container",
    "read_container_file",
    "relu",
    "replacement_sites",
    "report",
    "rotate_groups_batched",
    "rotate_groups_naive",
    "rotate_kernel_direct",
    "rotation_matrices",
    "rotation_matrix",
    "rotation_matrix_dtheta",
    "seam_distance",
    "sigmoid",
    "write_container",
    "write_container_file",
]
