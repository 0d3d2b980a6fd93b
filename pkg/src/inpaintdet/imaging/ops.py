"""Pixel-level operations on float images and masks.

Every function is pure: inputs are never modified and a new array is
returned.
"""

import numpy as np
from scipy import ndimage

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def as_image(img):
    """Return ``img`` as a float64 array of shape (H, W) or (H, W, 3)."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[..., 0]
    if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
        raise ValueError(f"expected an (H, W) or (H, W, 3) image, got shape {arr.shape}")
    return arr


def channels(img):
    return 1 if np.ndim(img) == 2 else np.shape(img)[2]


def to_grayscale(img):
    """BT.601 luma; a single-channel input is returned unchanged (as a copy)."""
    img = as_image(img)
    if img.ndim == 2:
        return img.copy()
    r, g, b = LUMA_WEIGHTS
    return r * img[..., 0] + g * img[..., 1] + b * img[..., 2]


def output_size(size, factor):
    """round(size * factor) with halves rounded up, as used by the resizer."""
    return int(np.floor(size * factor + 0.5))


def resize_bilinear(img, factor):
    """Resize by ``factor`` with bilinear interpolation on pixel centres.

    Output dimensions are ``round(dim * factor)``.  Source coordinates follow
    the half-pixel-centre convention ``src = (dst + 0.5) / scale - 0.5`` with
    ``scale = out / in`` per axis, clamped to the image.  No antialiasing
    prefilter is applied.
    """
    if not factor > 0:
        raise ValueError(f"resize factor must be positive, got {factor}")
    img = as_image(img)
    h, w = img.shape[:2]
    oh, ow = output_size(h, factor), output_size(w, factor)
    if oh < 1 or ow < 1:
        raise ValueError(f"resize factor {factor} maps {w}x{h} to an empty image")
    if (oh, ow) == (h, w):
        return img.copy()
    y0, y1, fy = _axis_weights(h, oh)
    x0, x1, fx = _axis_weights(w, ow)
    fy = fy[:, None]
    fx = fx[None, :]
    if img.ndim == 3:
        fy = fy[..., None]
        fx = fx[..., None]
    rows0 = img[y0]
    rows1 = img[y1]
    top = rows0[:, x0] * (1 - fx) + rows0[:, x1] * fx
    bottom = rows1[:, x0] * (1 - fx) + rows1[:, x1] * fx
    return top * (1 - fy) + bottom * fy


def _axis_weights(n_in, n_out):
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0, n_in - 1)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, src - lo


def resize_nearest(mask, shape):
    """Nearest-neighbour resampling of a 2-D mask to ``shape`` (H, W)."""
    mask = np.asarray(mask)
    h, w = mask.shape[:2]
    oh, ow = shape
    ys = np.minimum(((np.arange(oh) + 0.5) * h / oh).astype(np.intp), h - 1)
    xs = np.minimum(((np.arange(ow) + 0.5) * w / ow).astype(np.intp), w - 1)
    return mask[ys[:, None], xs[None, :]]


def box_blur(img, radius):
    """Mean over the (2r+1) x (2r+1) window around each pixel.

    Borders use half-sample symmetric extension (edge sample repeated, as in
    ``d c b a | a b c d``), the same extension the wavelet transform uses.
    """
    radius = int(radius)
    if radius < 0:
        raise ValueError(f"blur radius must be >= 0, got {radius}")
    img = as_image(img)
    if radius == 0:
        return img.copy()
    size = 2 * radius + 1
    sizes = (size, size) if img.ndim == 2 else (size, size, 1)
    return ndimage.uniform_filter(img, size=sizes, mode="reflect")


def binarize(mask, threshold=0.5):
    """Per-pixel ``value > threshold``; an all-0.5 map is rejected at 0.5."""
    return np.asarray(mask, dtype=np.float64) > threshold


def nonzero_mask(img):
    """Binary mask from a decoded single-channel image (nonzero = True)."""
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"masks must be single-channel, got shape {img.shape}")
    return img != 0


def rgb_to_lab(img):
    """CIELAB (D65) coordinates of an RGB or grayscale image."""
    from skimage.color import rgb2lab

    img = as_image(img)
    if img.ndim == 2:
        img = np.repeat(img[..., None], 3, axis=2)
    return rgb2lab(np.clip(img, 0.0, 1.0))
