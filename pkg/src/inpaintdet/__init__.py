"""Wavelet-based refinement of inpainting-forgery masks.

The package combines a dual-tree complex wavelet transform, scattering
features, colour segmentation and patch noise statistics to sharpen a
candidate forgery mask, plus the metrics and CLI used to evaluate it.
"""

from .config import RunConfig, load_config
from .fusion import detect

__version__ = "0.1.0"

__all__ = ["RunConfig", "detect", "load_config", "__version__"]
