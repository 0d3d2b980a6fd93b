"""Image representation, codecs, and the robustness perturbations."""

from .codec import (
    decode_image,
    decode_raw,
    encode_image,
    encode_netpbm,
    encode_png,
    read_image,
    write_image,
)
from .ops import (
    LUMA_WEIGHTS,
    as_image,
    binarize,
    box_blur,
    channels,
    nonzero_mask,
    output_size,
    resize_bilinear,
    resize_nearest,
    rgb_to_lab,
    to_grayscale,
)

__all__ = [
    "LUMA_WEIGHTS",
    "as_image",
    "binarize",
    "box_blur",
    "channels",
    "decode_image",
    "decode_raw",
    "encode_image",
    "encode_netpbm",
    "encode_png",
    "nonzero_mask",
    "output_size",
    "read_image",
    "resize_bilinear",
    "resize_nearest",
    "rgb_to_lab",
    "to_grayscale",
    "write_image",
]
