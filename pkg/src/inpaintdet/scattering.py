"""Second-order scattering features built on the dual-tree transform.

A first-order channel is the modulus of one oriented subband, low-pass
smoothed and brought onto the common output grid of the deepest level.  A
second-order channel repeats the wavelet-modulus step on a first-order
modulus plane before smoothing.  The final lowpass band never becomes a
channel.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .dtcwt import ORIENTATIONS, build_filter_bank, forward, subband_shape
from .imaging import as_image

GAUSSIAN_TRUNCATE = 3.0


@dataclass(frozen=True)
class ScatteringConfig:
    """Scattering parameters.

    Attributes
    ----------
    levels : int
        DTCWT depth ``n`` of the first-order transform.
    smoothing : float or None
        Gaussian standard deviation in pixels of the output grid.  ``None``
        means ``2**n / 2``.  A level-``j`` plane is smoothed with the same
        physical width on its own grid, i.e. ``smoothing * 2**(n - j)``
        coefficients.
    include_order2 : bool
    """

    levels: int = 2
    smoothing: float = None
    include_order2: bool = True

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 1:
            raise ValueError(f"levels must be an integer >= 1, got {self.levels}")
        if self.smoothing is not None and not self.smoothing > 0:
            raise ValueError(f"smoothing must be > 0, got {self.smoothing}")

    @property
    def sigma(self):
        return float(self.smoothing) if self.smoothing is not None else 2.0 ** self.levels / 2


@dataclass(frozen=True)
class ChannelPath:
    """Provenance of one scattering channel.

    ``levels`` and ``orientations`` have one entry per wavelet stage (one for
    order 1, two for order 2).  Orientations are in degrees.
    """

    order: int
    levels: tuple
    orientations: tuple
    color: int = 0

    def as_dict(self):
        return {
            "order": self.order,
            "levels": list(self.levels),
            "orientations": list(self.orientations),
            "color": self.color,
        }


@dataclass(frozen=True)
class ScatteringMap:
    """Stack of nonnegative feature planes, shape (C, h, w), with one path per channel."""

    channels: np.ndarray
    layout: tuple

    def __len__(self):
        return self.channels.shape[0]

    @property
    def shape(self):
        return self.channels.shape[1:]

    def select(self, order=None, color=None):
        keep = [
            i
            for i, p in enumerate(self.layout)
            if (order is None or p.order == order) and (color is None or p.color == color)
        ]
        return ScatteringMap(self.channels[keep], tuple(self.layout[i] for i in keep))

    @staticmethod
    def concatenate(maps):
        maps = list(maps)
        return ScatteringMap(
            np.concatenate([m.channels for m in maps], axis=0),
            tuple(p for m in maps for p in m.layout),
        )


def output_shape(shape, levels):
    """Spatial shape of a scattering map for an input of ``shape``."""
    return subband_shape(shape, levels)


def _smooth_and_pool(plane, sigma, out_shape):
    """Gaussian smoothing (sigma in plane pixels) then block-mean onto ``out_shape``."""
    plane = ndimage.gaussian_filter(plane, sigma, mode="reflect", truncate=GAUSSIAN_TRUNCATE)
    fy = -(-plane.shape[0] // out_shape[0])
    fx = -(-plane.shape[1] // out_shape[1])
    if fy == fx == 1:
        return plane
    pad = ((0, fy * out_shape[0] - plane.shape[0]), (0, fx * out_shape[1] - plane.shape[1]))
    plane = np.pad(plane, pad, mode="symmetric")
    return plane.reshape(out_shape[0], fy, out_shape[1], fx).mean(axis=(1, 3))


def _check_gray(img):
    img = as_image(img)
    if img.ndim != 2:
        raise ValueError("expected a single-channel image; use scatter_image for colour")
    return img


def _order1_parts(img, cfg, fb):
    pyr = forward(img, cfg.levels, fb)
    out_shape = output_shape(img.shape, cfg.levels)
    mags = [np.abs(h) for h in pyr.highpasses]
    return mags, out_shape


def scatter_order1(img, cfg=None, fb=None):
    """First-order scattering: ``6 * n`` channels, level-major then orientation."""
    cfg = cfg or ScatteringConfig()
    fb = fb or build_filter_bank()
    img = _check_gray(img)
    mags, out_shape = _order1_parts(img, cfg, fb)
    return _pool_order1(mags, cfg, out_shape)


def _pool_order1(mags, cfg, out_shape):
    planes, layout = [], []
    for j, level_mags in enumerate(mags, start=1):
        sigma = cfg.sigma * 2 ** (cfg.levels - j)
        for k, theta in enumerate(ORIENTATIONS):
            planes.append(np.maximum(_smooth_and_pool(level_mags[k], sigma, out_shape), 0.0))
            layout.append(ChannelPath(1, (j,), (theta,)))
    return ScatteringMap(np.stack(planes), tuple(layout))


def order2_paths(levels):
    """Admissible (j1, j2) level pairs: the second stage is one level coarser."""
    return [(j, j + 1) for j in range(1, levels)]


def scatter_order2(img, cfg=None, fb=None):
    """Second-order scattering channels only (``36 * (n - 1)`` of them).

    Each first-order modulus plane at level ``j < n`` gets a further one-level
    transform whose six moduli sit at level ``j + 1``.
    """
    cfg = cfg or ScatteringConfig()
    if not cfg.include_order2:
        raise ValueError("scatter_order2 called with include_order2 disabled")
    fb = fb or build_filter_bank()
    img = _check_gray(img)
    mags, out_shape = _order1_parts(img, cfg, fb)
    return _pool_order2(mags, cfg, out_shape, fb)


def _pool_order2(mags, cfg, out_shape, fb):
    planes, layout = [], []
    for j1, j2 in order2_paths(cfg.levels):
        sigma = cfg.sigma * 2 ** (cfg.levels - j2)
        for k1, theta1 in enumerate(ORIENTATIONS):
            inner = forward(mags[j1 - 1][k1], 1, fb).highpasses[0]
            for k2, theta2 in enumerate(ORIENTATIONS):
                plane = _smooth_and_pool(np.abs(inner[k2]), sigma, out_shape)
                planes.append(np.maximum(plane, 0.0))
                layout.append(ChannelPath(2, (j1, j2), (theta1, theta2)))
    if not planes:
        h, w = out_shape
        return ScatteringMap(np.zeros((0, h, w)), ())
    return ScatteringMap(np.stack(planes), tuple(layout))


def _scatter_gray(img, cfg, fb, color=0):
    mags, out_shape = _order1_parts(img, cfg, fb)
    parts = [_pool_order1(mags, cfg, out_shape)]
    if cfg.include_order2:
        parts.append(_pool_order2(mags, cfg, out_shape, fb))
    smap = ScatteringMap.concatenate(parts)
    if color:
        smap = ScatteringMap(
            smap.channels,
            tuple(ChannelPath(p.order, p.levels, p.orientations, color) for p in smap.layout),
        )
    return smap


def scatter_image(img, cfg=None, fb=None):
    """Scatter every colour channel and stack the results channel-major.

    For one input channel the output equals order 1 followed by order 2 (when
    enabled).  ``ChannelPath.color`` records the source channel.
    """
    cfg = cfg or ScatteringConfig()
    fb = fb or build_filter_bank()
    img = as_image(img)
    if img.ndim == 2:
        return _scatter_gray(img, cfg, fb)
    return ScatteringMap.concatenate(
        _scatter_gray(img[..., c], cfg, fb, color=c) for c in range(img.shape[2])
    )
