"""Patch-level noise and texture statistics on level-1 DTCWT subbands.

A segment is cut by a regular grid of cells laid over the level-1
coefficient grid.  Each cell with enough in-segment coefficients gets
per-band magnitude statistics and a robust noise estimate.  Cells whose
statistics are outliers relative to the other cells, in the robust z-score
sense, are flagged.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .dtcwt import ORIENTATIONS, build_filter_bank, forward

MAD_TO_SIGMA = 0.6745
MAD_SCALE = 1.4826
# mean absolute deviation to sigma, used when the MAD is zero
MEANAD_SCALE = 1.2533
# scales at or below this are rounding noise on [0, 1] images, not texture
SCALE_FLOOR = 1e-12
DEFAULT_K = 2.5
# 45 degree band: the finest diagonal subband used for noise estimation.
NOISE_BAND = 1


def estimate_noise_sigma(samples):
    """Robust Gaussian sigma: ``median(|x - median(x)|) / 0.6745``.

    Raises
    ------
    ValueError
        If fewer than two samples are given.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError(f"noise estimation needs at least 2 samples, got {x.size}")
    return float(np.median(np.abs(x - np.median(x))) / MAD_TO_SIGMA)


@lru_cache(maxsize=None)
def noise_gain(fb=None):
    """Per-pixel white-noise gain of the real and imaginary parts of the 45 degree band.

    For unit-variance white noise the real part of a level-1 45 degree
    coefficient has standard deviation ``gain[0]`` and the imaginary part
    ``gain[1]``.  Computed from impulse responses of the filter bank.
    """
    fb = fb or build_filter_bank()
    size = 64
    energy = np.zeros(2)
    for dy in (0, 1):
        for dx in (0, 1):
            x = np.zeros((size, size))
            x[size // 2 + dy, size // 2 + dx] = 1.0
            band = forward(x, 1, fb).highpasses[0][NOISE_BAND]
            energy += [np.sum(band.real**2), np.sum(band.imag**2)]
    return tuple(np.sqrt(energy))


def normalized_noise_samples(bands, fb=None):
    """Real and imaginary 45 degree coefficients scaled to unit noise gain, pooled."""
    g_re, g_im = noise_gain(fb)
    band = np.asarray(bands[NOISE_BAND])
    return np.concatenate([band.real.ravel() / g_re, band.imag.ravel() / g_im])


def estimate_image_noise(img, fb=None):
    """Noise sigma of a grayscale image from its finest 45 degree subband."""
    fb = fb or build_filter_bank()
    bands = forward(img, 1, fb).highpasses[0]
    return estimate_noise_sigma(normalized_noise_samples(bands, fb))


@dataclass(frozen=True)
class PatchGrid:
    """``rows`` x ``cols`` cells over the level-1 coefficient grid."""

    rows: int = 8
    cols: int = 8
    min_count: int = 16

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid needs at least one cell, got {self.rows}x{self.cols}")
        if self.min_count < 2:
            raise ValueError(f"min_count must be >= 2, got {self.min_count}")

    def cells(self, shape):
        """Cell rectangles ``(r0, r1, c0, c1)`` in raster order for a grid of ``shape``.

        Edges sit at ``floor(i * h / rows)``; with fewer coefficients than cells
        some rectangles are empty.
        """
        h, w = shape
        ry = [i * h // self.rows for i in range(self.rows + 1)]
        rx = [j * w // self.cols for j in range(self.cols + 1)]
        return [
            (ry[i], ry[i + 1], rx[j], rx[j + 1])
            for i in range(self.rows)
            for j in range(self.cols)
        ]


@dataclass(frozen=True)
class PatchStats:
    cell: int
    rect: tuple
    count: int
    valid: bool
    mag_mean: tuple = ()
    mag_std: tuple = ()
    re_mean: tuple = ()
    noise_sigma: float = 0.0

    def as_dict(self):
        return {
            "cell": self.cell,
            "rect": list(self.rect),
            "count": self.count,
            "valid": self.valid,
            "mag_mean": list(self.mag_mean),
            "mag_std": list(self.mag_std),
            "re_mean": list(self.re_mean),
            "noise_sigma": self.noise_sigma,
        }


def downsample_mask(mask, shape):
    """Map a pixel mask onto the level-1 grid of ``shape`` by 2x2 majority.

    A coefficient is in-segment when at least two of its four pixels are.
    Odd image sizes are padded by repeating the last row/column, matching the
    transform.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape[0] % 2:
        mask = np.vstack([mask, mask[-1:]])
    if mask.shape[1] % 2:
        mask = np.hstack([mask, mask[:, -1:]])
    h, w = mask.shape[0] // 2, mask.shape[1] // 2
    if (h, w) != tuple(shape):
        raise ValueError(f"mask maps to a {h}x{w} grid, subbands are {shape}")
    counts = mask.reshape(h, 2, w, 2).sum(axis=(1, 3))
    return counts >= 2


def patch_statistics(pyr, segment_mask, grid=None, fb=None):
    """Statistics of each grid cell over in-segment level-1 coefficients.

    Parameters
    ----------
    pyr : DtcwtPyramid
        Only level 1 is used.
    segment_mask : ndarray of bool, shape (H, W)
        Pixels of the segment, at image resolution.
    grid : PatchGrid, optional

    Returns
    -------
    list of PatchStats
        One entry per cell, raster order.
    """
    grid = grid or PatchGrid()
    segment_mask = np.asarray(segment_mask, dtype=bool)
    if segment_mask.shape != tuple(pyr.original_shape):
        raise ValueError(
            f"segment mask {segment_mask.shape} does not match image {pyr.original_shape}"
        )
    bands = pyr.highpasses[0]
    inside = downsample_mask(segment_mask, bands.shape[1:])
    mags = np.abs(bands)
    g_re, g_im = noise_gain(fb)
    out = []
    for cell, (r0, r1, c0, c1) in enumerate(grid.cells(bands.shape[1:])):
        m = inside[r0:r1, c0:c1]
        count = int(m.sum())
        if count < grid.min_count:
            out.append(PatchStats(cell, (r0, r1, c0, c1), count, False))
            continue
        cm = mags[:, r0:r1, c0:c1][:, m]
        cb = bands[:, r0:r1, c0:c1][:, m]
        noise = np.concatenate([cb[NOISE_BAND].real / g_re, cb[NOISE_BAND].imag / g_im])
        out.append(
            PatchStats(
                cell,
                (r0, r1, c0, c1),
                count,
                True,
                tuple(float(v) for v in cm.mean(axis=1)),
                tuple(float(v) for v in cm.std(axis=1)),
                tuple(float(v) for v in cb.real.mean(axis=1)),
                estimate_noise_sigma(noise),
            )
        )
    return out


@dataclass(frozen=True)
class Flag:
    cell: int
    family: str
    band: object
    value: float
    median: float
    z: float

    def as_dict(self):
        return {
            "cell": self.cell,
            "family": self.family,
            "band": self.band,
            "value": self.value,
            "median": self.median,
            "z": self.z,
        }


@dataclass(frozen=True)
class FlagSet:
    """Flags raised by :func:`flag_inconsistent_patches`.

    ``inconclusive`` is true when there were too few valid cells to judge.
    """

    k: float
    flags: tuple = ()
    inconclusive: bool = False
    valid_cells: tuple = field(default=())

    @property
    def cells(self):
        return frozenset(f.cell for f in self.flags)

    def __len__(self):
        return len(self.cells)


def _families(stats):
    for b, theta in enumerate(ORIENTATIONS):
        yield "mag_mean", theta, [s.mag_mean[b] for s in stats]
    for b, theta in enumerate(ORIENTATIONS):
        yield "mag_std", theta, [s.mag_std[b] for s in stats]
    yield "noise_sigma", None, [s.noise_sigma for s in stats]


def flag_inconsistent_patches(stats, k=DEFAULT_K):
    """Flag cells whose statistics are robust-z outliers among valid cells.

    A cell is flagged when, for some family (per-band magnitude mean, per-band
    magnitude std, noise sigma), ``|x - median| > k * 1.4826 * MAD``.  When
    more than half the cells share one value the MAD is zero and the scale
    falls back to ``1.2533 * mean(|x - median|)``; families whose scale is
    numerically zero are skipped.  Fewer than three valid cells give an empty,
    inconclusive result.
    """
    valid = [s for s in stats if s.valid]
    ids = tuple(s.cell for s in valid)
    if len(valid) < 3:
        return FlagSet(k, (), True, ids)
    flags = []
    for family, band, values in _families(valid):
        x = np.asarray(values)
        med = np.median(x)
        dev = np.abs(x - med)
        mad = np.median(dev)
        scale = MAD_SCALE * mad if mad > 0 else MEANAD_SCALE * dev.mean()
        if not scale > SCALE_FLOOR:
            continue
        for s, v, d in zip(valid, x, dev):
            if d > k * scale:
                flags.append(Flag(s.cell, family, band, float(v), float(med), float(d / scale)))
    flags.sort(key=lambda f: (f.cell, f.family, -1 if f.band is None else f.band))
    return FlagSet(k, tuple(flags), False, ids)
