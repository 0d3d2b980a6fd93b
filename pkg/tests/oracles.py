"""Independent reference implementations used only by the tests.

Each oracle is written from the defining formula with explicit loops or a
third-party library, never by calling into the package under test.
"""

import io

import numpy as np
import pywt
from PIL import Image


def confusion_counts(pred, truth):
    """(tp, fp, fn, tn) by visiting every pixel."""
    tp = fp = fn = tn = 0
    for p, t in zip(np.ravel(pred).tolist(), np.ravel(truth).tolist()):
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def metrics_from_counts(tp, fp, fn, tn):
    def ratio(a, b):
        return a / b if b else None

    rec = ratio(tp, tp + fn)
    specificity = ratio(tn, tn + fp)
    return {
        "iou": ratio(tp, tp + fp + fn),
        "f1": ratio(2 * tp, 2 * tp + fp + fn),
        "precision": ratio(tp, tp + fp),
        "recall": rec,
        "accuracy": ratio(tp + tn, tp + fp + fn + tn),
        "balanced_accuracy": None if rec is None or specificity is None else (rec + specificity) / 2,
    }


def _half_sample(i, n):
    """Index map for d c b a | a b c d extension."""
    period = 2 * n
    i %= period
    return i if i < n else period - 1 - i


def box_blur_loops(img, radius):
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    out = np.zeros_like(img)
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for dr in range(-radius, radius + 1):
                for dc in range(-radius, radius + 1):
                    acc += img[_half_sample(r + dr, h), _half_sample(c + dc, w)]
            out[r, c] = acc / (2 * radius + 1) ** 2
    return out


def bilinear_loops(img, factor):
    """Half-pixel-centre bilinear resampling with clamped coordinates."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    oh, ow = int(np.floor(h * factor + 0.5)), int(np.floor(w * factor + 0.5))
    out = np.zeros((oh, ow))
    for r in range(oh):
        sy = min(max((r + 0.5) * h / oh - 0.5, 0.0), h - 1)
        y0 = int(np.floor(sy))
        y1 = min(y0 + 1, h - 1)
        for c in range(ow):
            sx = min(max((c + 0.5) * w / ow - 0.5, 0.0), w - 1)
            x0 = int(np.floor(sx))
            x1 = min(x0 + 1, w - 1)
            fy, fx = sy - y0, sx - x0
            out[r, c] = (
                img[y0, x0] * (1 - fy) * (1 - fx)
                + img[y0, x1] * (1 - fy) * fx
                + img[y1, x0] * fy * (1 - fx)
                + img[y1, x1] * fy * fx
            )
    return out


def dwt_detail_magnitudes(img, level=2, wavelet="db4"):
    """Magnitudes of the three critically sampled detail bands at ``level``."""
    coeffs = pywt.wavedec2(np.asarray(img, dtype=np.float64), wavelet, mode="periodization", level=level)
    return np.abs(np.stack(coeffs[1]))


def relative_change(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(a))


def pillow_decode(data):
    """Decode 8-bit PNG/NetPBM bytes with Pillow, scaled to [0, 1]."""
    with Image.open(io.BytesIO(data)) as im:
        arr = np.asarray(im.convert("RGB") if im.mode not in ("L", "RGB") else im)
    return arr.astype(np.float64) / 255.0


def pillow_encode(arr, fmt="PNG"):
    """Encode a uint8 (H, W) or (H, W, 3) array with Pillow."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(buf, format=fmt)
    return buf.getvalue()


def grid_labels(shape, rows, cols):
    """Label map of a rows x cols rectangular tiling (for segment tests)."""
    h, w = shape
    r = np.minimum(np.arange(h) * rows // h, rows - 1)
    c = np.minimum(np.arange(w) * cols // w, cols - 1)
    return r[:, None] * cols + c[None, :]
