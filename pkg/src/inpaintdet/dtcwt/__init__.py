"""Dual-tree complex wavelet transform."""

from .filters import (
    DEFAULT_LEVEL1,
    DEFAULT_QSHIFT,
    DELTA,
    LEVEL1_TABLES,
    QSHIFT_TABLES,
    FilterBank,
    build_filter_bank,
    reconstruction_error,
)
from .transform import (
    ORIENTATIONS,
    ComplexSubband,
    DtcwtPyramid,
    forward,
    inverse,
    magnitude,
    max_levels,
    subband_shape,
)

__all__ = [
    "DEFAULT_LEVEL1",
    "DEFAULT_QSHIFT",
    "DELTA",
    "LEVEL1_TABLES",
    "ORIENTATIONS",
    "QSHIFT_TABLES",
    "ComplexSubband",
    "DtcwtPyramid",
    "FilterBank",
    "build_filter_bank",
    "forward",
    "inverse",
    "magnitude",
    "max_levels",
    "reconstruction_error",
    "subband_shape",
]
