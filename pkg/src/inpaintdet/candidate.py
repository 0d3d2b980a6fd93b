"""Candidate-mask providers: masks read from disk, or a scattering-anomaly baseline."""

import numpy as np
from scipy import ndimage

from .imaging import read_image
from .imaging.ops import as_image
from .noise import MAD_SCALE
from .scattering import ScatteringConfig, scatter_image

BASELINE_LEVELS = 2


def load_candidate(path, shape):
    """Read a probability mask and check it against the image shape.

    Parameters
    ----------
    path : str or Path
        Single-channel PNG or NetPBM file; 8- and 16-bit samples are scaled
        by their full-scale value.
    shape : tuple
        Expected (H, W).  The mask is never resampled to fit.

    Raises
    ------
    ValueError
        On a shape mismatch or a multi-channel file.
    DecodeError
        If the file cannot be decoded.
    """
    mask = read_image(path)
    if mask.ndim != 2:
        raise ValueError(f"{path}: candidate masks must be single-channel, got {mask.shape}")
    expected = tuple(shape[:2])
    if mask.shape != expected:
        raise ValueError(
            f"{path}: candidate is {mask.shape[1]}x{mask.shape[0]}, "
            f"image is {expected[1]}x{expected[0]}"
        )
    return mask


def _logistic(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def baseline_score(img, radius=4, z_threshold=3.0, fb=None):
    """Per-pixel anomaly probability from first-order scattering statistics.

    Each output-grid cell gets the mean scattering vector of its
    ``(2 * radius + 1)``-cell neighbourhood.  The neighbourhood vector is
    robust-z scored per channel against the image-wide median and MAD, the
    RMS z-score ``d`` is mapped to ``1 / (1 + exp(-(d - z_threshold)))``, and
    the result is repeated back to full resolution.

    Channels with zero MAD contribute zero, so a featureless image scores
    uniformly.  Because z-scores are affine invariant, so is the ordering of
    the output.
    """
    img = as_image(img)
    cfg = ScatteringConfig(BASELINE_LEVELS, include_order2=False)
    feats = scatter_image(img, cfg, fb).channels
    if radius > 0:
        size = (1, 2 * radius + 1, 2 * radius + 1)
        feats = ndimage.uniform_filter(feats, size=size, mode="reflect")
    flat = feats.reshape(feats.shape[0], -1)
    med = np.median(flat, axis=1, keepdims=True)
    mad = np.median(np.abs(flat - med), axis=1, keepdims=True) * MAD_SCALE
    safe = np.where(mad > 0, mad, 1.0)
    z = np.where(mad > 0, (flat - med) / safe, 0.0)
    d = np.sqrt(np.mean(z**2, axis=0)).reshape(feats.shape[1:])
    cells = _logistic(d - z_threshold)
    h, w = img.shape[:2]
    f = 2**BASELINE_LEVELS
    ys = np.minimum(np.arange(h) // f, cells.shape[0] - 1)
    xs = np.minimum(np.arange(w) // f, cells.shape[1] - 1)
    return cells[ys[:, None], xs[None, :]]
