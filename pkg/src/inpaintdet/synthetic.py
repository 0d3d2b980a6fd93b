"""Seeded synthetic images with known ground truth.

These stand in for a forensic dataset in tests and demos.  The forgery
construction mimics what inpainting leaves behind: a patch that matches the
surrounding colour and structure but lacks the sensor noise of the rest of
the picture.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


def textured_image(rng, size=64, noise=0.12, gratings=2):
    """Grayscale texture in [0, 1]: smoothed noise plus random oriented gratings."""
    if np.isscalar(size):
        size = (size, size)
    h, w = size
    x = ndimage.gaussian_filter(rng.standard_normal((h, w)), 1.5, mode="wrap")
    x *= noise / x.std()
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(gratings):
        freq = rng.uniform(0.05, 0.2)
        theta = rng.uniform(0, np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        x += 0.1 * np.cos(2 * np.pi * freq * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)
    return np.clip(0.5 + x, 0.0, 1.0)


def shifted_pair(rng, size=64, shift=(1, 0), margin=4):
    """Two crops of one larger texture, the second displaced by ``shift`` pixels.

    Cropping avoids the wrap-around seam a circular shift would introduce.
    """
    big = textured_image(rng, size + 2 * margin)
    dy, dx = shift
    a = big[margin : margin + size, margin : margin + size]
    b = big[margin + dy : margin + dy + size, margin + dx : margin + dx + size]
    return a, b


@dataclass(frozen=True)
class Forgery:
    """One synthetic forgery: image, true forged region and a loose candidate."""

    image: np.ndarray
    truth: np.ndarray
    candidate: np.ndarray
    rect: tuple


def blur_forgery(seed, size=128, noise_sigma=0.06, dilation=8):
    """Two-texture RGB image with a noise-free rectangle inside the left texture.

    The forged rectangle (24 to 40 px per side) is a Gaussian-blurred copy of
    the underlying texture, so it keeps the local colour and low-frequency
    structure while losing the noise.  The candidate is the rectangle dilated
    by ``dilation`` pixels, which is what a coarse detector might report.
    """
    rng = np.random.default_rng(seed)
    h = w = size
    yy, xx = np.mgrid[0:h, 0:w]
    split = int(rng.integers(int(0.62 * w), int(0.72 * w)))
    colours = np.array([[0.62, 0.48, 0.36], [0.30, 0.42, 0.62]])
    colours += rng.uniform(-0.04, 0.04, colours.shape)
    theta = rng.uniform(0, np.pi)
    freq = rng.uniform(0.03, 0.06)
    grating = 0.04 * np.cos(2 * np.pi * freq * (xx * np.cos(theta) + yy * np.sin(theta)))
    clean = np.where((xx < split)[..., None], colours[0], colours[1]) + grating[..., None]
    noisy = clean + rng.normal(0.0, noise_sigma, (h, w, 3))

    rh, rw = (int(v) for v in rng.integers(24, 41, 2))
    margin = dilation + 4
    r0 = int(rng.integers(margin, h - margin - rh))
    c0 = int(rng.integers(margin, split - margin - rw))
    truth = np.zeros((h, w), dtype=bool)
    truth[r0 : r0 + rh, c0 : c0 + rw] = True
    smooth = ndimage.gaussian_filter(noisy, (2.0, 2.0, 0), mode="reflect")
    image = np.where(truth[..., None], smooth, noisy)
    candidate = ndimage.binary_dilation(truth, np.ones((2 * dilation + 1,) * 2, bool))
    return Forgery(np.clip(image, 0.0, 1.0), truth, candidate, (r0, r0 + rh, c0, c0 + rw))


def noisy_square(seed, size=64, square=24, noise=0.15):
    """Uniform-noise grayscale image with one blurred (denoised) square in the middle."""
    rng = np.random.default_rng(seed)
    img = rng.uniform(0.5 - noise, 0.5 + noise, (size, size))
    truth = np.zeros((size, size), dtype=bool)
    s0 = (size - square) // 2
    truth[s0 : s0 + square, s0 : s0 + square] = True
    smooth = ndimage.gaussian_filter(img, 3.0, mode="reflect")
    return np.where(truth, smooth, img), truth
