"""Forward and inverse 2-D dual-tree complex wavelet transform."""

from dataclasses import dataclass

import numpy as np

from .filters import build_filter_bank
from .lowlevel import coldfilt, colfilter, colifilt

# Subband orientations in degrees, in storage order along axis 0 of each level.
ORIENTATIONS = (15, 45, 75, 105, 135, 165)

# Storage slots of the three real-tree quads: each quad yields two subbands.
_HORIZONTAL = [0, 5]
_VERTICAL = [2, 3]
_DIAGONAL = [1, 4]

_SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class ComplexSubband:
    """One oriented complex subband: ``re + 1j * im`` on its coefficient grid."""

    re: np.ndarray
    im: np.ndarray
    orientation: int
    level: int

    @property
    def shape(self):
        return self.re.shape

    @property
    def height(self):
        return self.re.shape[0]

    @property
    def width(self):
        return self.re.shape[1]

    @property
    def values(self):
        return self.re + 1j * self.im


@dataclass(frozen=True)
class DtcwtPyramid:
    """Result of :func:`forward`.

    Attributes
    ----------
    highpasses : tuple of ndarray
        One complex array of shape ``(6, h_k, w_k)`` per level, finest first.
        Axis 0 follows :data:`ORIENTATIONS`.
    lowpass : ndarray
        Final real lowpass plane.  It keeps both trees interleaved, so its
        shape is twice the coarsest subband grid.
    original_shape : tuple
        Input (H, W) before any padding.
    level_pads : tuple of (int, int)
        Rows and columns added before filtering at each level: one duplicated
        edge sample at level 1 for odd sizes, one at each end at deeper levels
        when the incoming lowpass is not a multiple of 4.
    """

    highpasses: tuple
    lowpass: np.ndarray
    original_shape: tuple
    level_pads: tuple

    @property
    def levels(self):
        return len(self.highpasses)

    def subband(self, level, index):
        """Subband ``index`` (0..5) of ``level`` (1..n) as a :class:`ComplexSubband`."""
        if not 1 <= level <= self.levels:
            raise ValueError(f"level must be in 1..{self.levels}, got {level}")
        band = self.highpasses[level - 1][index]
        return ComplexSubband(band.real.copy(), band.imag.copy(), ORIENTATIONS[index], level)

    def subbands(self, level):
        return [self.subband(level, k) for k in range(len(ORIENTATIONS))]

    def zeros_like(self):
        """Pyramid of identical geometry with every coefficient zero."""
        return DtcwtPyramid(
            tuple(np.zeros_like(h) for h in self.highpasses),
            np.zeros_like(self.lowpass),
            self.original_shape,
            self.level_pads,
        )

    def with_highpasses_zeroed(self):
        return DtcwtPyramid(
            tuple(np.zeros_like(h) for h in self.highpasses),
            self.lowpass.copy(),
            self.original_shape,
            self.level_pads,
        )


def magnitude(sb):
    """Elementwise modulus of a subband (or any complex array)."""
    if isinstance(sb, ComplexSubband):
        return np.hypot(sb.re, sb.im)
    return np.abs(np.asarray(sb))


def subband_shape(shape, level):
    """Coefficient grid of ``level`` for an input of ``shape`` (H, W)."""
    dims = []
    for d in shape:
        for _ in range(level):
            d = (d + d % 2) // 2
        dims.append(d)
    return tuple(dims)


def max_levels(shape):
    """Deepest decomposition allowed for an image of ``shape``."""
    return int(np.floor(np.log2(min(shape)))) if min(shape) >= 2 else 0


def _q2c(y):
    """Split a quad of real trees into the two complex subbands it encodes."""
    a = y[0::2, 0::2]
    b = y[0::2, 1::2]
    c = y[1::2, 0::2]
    d = y[1::2, 1::2]
    p = (a + 1j * b) * _SQRT_HALF
    q = (d - 1j * c) * _SQRT_HALF
    return np.stack([p - q, p + q])


def _c2q(w):
    """Inverse of :func:`_q2c` for a pair of complex subbands."""
    h, wd = w.shape[1:]
    x = np.zeros((2 * h, 2 * wd))
    p = (w[0] + w[1]) * _SQRT_HALF
    q = (w[0] - w[1]) * _SQRT_HALF
    x[0::2, 0::2] = p.real
    x[0::2, 1::2] = p.imag
    x[1::2, 0::2] = q.imag
    x[1::2, 1::2] = -q.real
    return x


def forward(img, n=2, fb=None):
    """Decompose a single-channel image into ``n`` levels.

    Parameters
    ----------
    img : array_like, shape (H, W)
    n : int
        Number of levels, at least 1.
    fb : FilterBank, optional
        Defaults to :func:`build_filter_bank` with its default families.

    Returns
    -------
    DtcwtPyramid

    Raises
    ------
    ValueError
        If ``n < 1``, the image is not 2-D, or either side is shorter than
        ``2**n``.
    """
    fb = fb or build_filter_bank()
    x = np.asarray(img, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"forward expects a single-channel 2-D image, got shape {x.shape}")
    n = int(n)
    if n < 1:
        raise ValueError(f"number of levels must be >= 1, got {n}")
    if min(x.shape) < 2 ** n:
        raise ValueError(
            f"image {x.shape[1]}x{x.shape[0]} is too small for {n} levels; "
            f"at most {max_levels(x.shape)} level(s) fit"
        )
    original_shape = x.shape
    pad_r, pad_c = x.shape[0] % 2, x.shape[1] % 2
    if pad_r:
        x = np.vstack([x, x[-1:]])
    if pad_c:
        x = np.hstack([x, x[:, -1:]])
    pads = [(pad_r, pad_c)]

    h0o, h1o = fb.taps("h0o"), fb.taps("h1o")
    lo = colfilter(x, h0o).T
    hi = colfilter(x, h1o).T
    lolo = colfilter(lo, h0o).T
    highs = [_level_bands(colfilter(hi, h0o).T, colfilter(lo, h1o).T, colfilter(hi, h1o).T)]

    h0a, h0b, h1a, h1b = (fb.taps(k) for k in ("h0a", "h0b", "h1a", "h1b"))
    for _ in range(1, n):
        pad_r = int(lolo.shape[0] % 4 != 0)
        pad_c = int(lolo.shape[1] % 4 != 0)
        if pad_r:
            lolo = np.vstack([lolo[:1], lolo, lolo[-1:]])
        if pad_c:
            lolo = np.hstack([lolo[:, :1], lolo, lolo[:, -1:]])
        pads.append((pad_r, pad_c))
        lo = coldfilt(lolo, h0b, h0a).T
        hi = coldfilt(lolo, h1b, h1a).T
        lolo = coldfilt(lo, h0b, h0a).T
        highs.append(
            _level_bands(
                coldfilt(hi, h0b, h0a).T,
                coldfilt(lo, h1b, h1a).T,
                coldfilt(hi, h1b, h1a).T,
            )
        )
    return DtcwtPyramid(tuple(highs), lolo, original_shape, tuple(pads))


def _level_bands(horizontal, vertical, diagonal):
    h, w = horizontal.shape
    bands = np.zeros((6, h // 2, w // 2), dtype=np.complex128)
    bands[_HORIZONTAL] = _q2c(horizontal)
    bands[_VERTICAL] = _q2c(vertical)
    bands[_DIAGONAL] = _q2c(diagonal)
    return bands


def inverse(pyr, fb=None):
    """Reconstruct the image from a pyramid made by :func:`forward`.

    The result is cropped to ``pyr.original_shape``.

    Raises
    ------
    ValueError
        If the subband and lowpass dimensions are inconsistent with each other.
    """
    fb = fb or build_filter_bank()
    highs = pyr.highpasses
    n = len(highs)
    if n < 1:
        raise ValueError("pyramid has no levels")
    for k, h in enumerate(highs):
        if h.ndim != 3 or h.shape[0] != 6:
            raise ValueError(f"level {k + 1} must hold 6 subbands, got shape {h.shape}")
    z = np.asarray(pyr.lowpass, dtype=np.float64)
    if z.shape != tuple(2 * s for s in highs[-1].shape[1:]):
        raise ValueError(
            f"lowpass shape {z.shape} does not match level-{n} subbands {highs[-1].shape[1:]}"
        )

    g0a, g0b, g1a, g1b = (fb.taps(k) for k in ("g0a", "g0b", "g1a", "g1b"))
    for level in range(n, 1, -1):
        bands = highs[level - 1]
        lh = _c2q(bands[_HORIZONTAL])
        hl = _c2q(bands[_VERTICAL])
        hh = _c2q(bands[_DIAGONAL])
        y1 = colifilt(z, g0b, g0a) + colifilt(lh, g1b, g1a)
        y2 = colifilt(hl, g0b, g0a) + colifilt(hh, g1b, g1a)
        z = (colifilt(y1.T, g0b, g0a) + colifilt(y2.T, g1b, g1a)).T
        target = tuple(2 * s for s in highs[level - 2].shape[1:])
        if z.shape[0] != target[0]:
            z = z[1:-1]
        if z.shape[1] != target[1]:
            z = z[:, 1:-1]
        if z.shape != target:
            raise ValueError(
                f"level {level} reconstructs to {z.shape}, expected {target} "
                f"from the level-{level - 1} subbands"
            )

    g0o, g1o = fb.taps("g0o"), fb.taps("g1o")
    bands = highs[0]
    lh = _c2q(bands[_HORIZONTAL])
    hl = _c2q(bands[_VERTICAL])
    hh = _c2q(bands[_DIAGONAL])
    if lh.shape != z.shape:
        raise ValueError(f"level-1 subbands imply {lh.shape}, lowpass path gives {z.shape}")
    y1 = colfilter(z, g0o) + colfilter(lh, g1o)
    y2 = colfilter(hl, g0o) + colfilter(hh, g1o)
    out = (colfilter(y1.T, g0o) + colfilter(y2.T, g1o)).T
    h, w = pyr.original_shape
    if out.shape[0] < h or out.shape[1] < w or out.shape[0] - h > 1 or out.shape[1] - w > 1:
        raise ValueError(f"reconstruction {out.shape} cannot be cropped to {pyr.original_shape}")
    return out[:h, :w]
