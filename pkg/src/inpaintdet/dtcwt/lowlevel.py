"""Column filtering primitives of the dual-tree transform.

All three routines filter along axis 0 of a 2-D array and use half-sample
symmetric extension at the ends (``b a | a b c ... z | z y``).  Filters are
given as 1-D sequences or column vectors.

``colfilter`` is an undecimated filter used at level 1.  ``coldfilt`` and
``colifilt`` are the decimating and interpolating two-tree filters used at
deeper levels; they interleave the outputs of tree a and tree b along the
filtered axis.
"""

import numpy as np


def symmetric_index(idx, n):
    """Map arbitrary integer positions into ``range(n)`` by half-sample reflection."""
    idx = np.mod(np.asarray(idx), 2 * n)
    return np.where(idx >= n, 2 * n - 1 - idx, idx)


def _taps(h):
    h = np.asarray(h, dtype=np.float64).ravel()
    if h.size == 0:
        raise ValueError("filter must have at least one tap")
    return h


def _convolve_valid(x, h):
    """Valid-mode convolution of every column of ``x`` with the 1-D filter ``h``."""
    m = h.size
    out_rows = x.shape[0] - m + 1
    y = np.zeros((out_rows,) + x.shape[1:], dtype=np.result_type(x, h))
    for k in range(m):
        if h[k] != 0.0:
            y += h[k] * x[m - 1 - k : m - 1 - k + out_rows]
    return y


def colfilter(x, h):
    """Filter the columns of ``x`` with ``h`` (odd length), keeping the size."""
    x = np.asarray(x)
    h = _taps(h)
    r = x.shape[0]
    m2 = h.size // 2
    xe = symmetric_index(np.arange(-m2, r + m2), r)
    return _convolve_valid(x[xe], h)


def coldfilt(x, ha, hb):
    """Filter and decimate the columns of ``x`` by 2 with the two-tree pair.

    ``ha`` and ``hb`` are the tree-a and tree-b filters (even length).  The
    output has half the rows, with the two trees interleaved.  The row count of
    ``x`` must be a multiple of 4.
    """
    x = np.asarray(x)
    ha, hb = _taps(ha), _taps(hb)
    r = x.shape[0]
    if r % 4:
        raise ValueError(f"coldfilt needs a row count divisible by 4, got {r}")
    m = ha.size
    if m % 2 or hb.size != m:
        raise ValueError("coldfilt filters must share one even length")
    xe = symmetric_index(np.arange(-m, r + m), r)
    hao, hae = ha[0::2], ha[1::2]
    hbo, hbe = hb[0::2], hb[1::2]
    t = np.arange(5, r + 2 * m - 2, 4)
    y = np.zeros((r // 2,) + x.shape[1:], dtype=np.result_type(x, ha))
    if np.sum(ha * hb) > 0:
        s1, s2 = slice(0, None, 2), slice(1, None, 2)
    else:
        s1, s2 = slice(1, None, 2), slice(0, None, 2)
    y[s1] = _convolve_valid(x[xe[t - 1]], hao) + _convolve_valid(x[xe[t - 3]], hae)
    y[s2] = _convolve_valid(x[xe[t]], hbo) + _convolve_valid(x[xe[t - 2]], hbe)
    return y


def colifilt(x, ha, hb):
    """Interpolate the columns of ``x`` by 2 with the two-tree pair.

    Inverse companion of :func:`coldfilt`; the output has twice the rows.
    """
    x = np.asarray(x)
    ha, hb = _taps(ha), _taps(hb)
    r = x.shape[0]
    if r % 2:
        raise ValueError(f"colifilt needs an even row count, got {r}")
    m = ha.size
    if m % 2 or hb.size != m:
        raise ValueError("colifilt filters must share one even length")
    dtype = np.result_type(x, ha)
    y = np.zeros((2 * r,) + x.shape[1:], dtype=dtype)
    if not np.any(x):
        return y
    m2 = m // 2
    xe = symmetric_index(np.arange(-m2, r + m2), r)
    hao, hae = ha[0::2], ha[1::2]
    hbo, hbe = hb[0::2], hb[1::2]
    s = np.arange(0, 2 * r, 4)
    positive = np.sum(ha * hb) > 0
    if m2 % 2 == 0:
        t = np.arange(3, r + m, 2)
        ta, tb = (t, t - 1) if positive else (t - 1, t)
        y[s] = _convolve_valid(x[xe[tb - 2]], hae)
        y[s + 1] = _convolve_valid(x[xe[ta - 2]], hbe)
        y[s + 2] = _convolve_valid(x[xe[tb]], hao)
        y[s + 3] = _convolve_valid(x[xe[ta]], hbo)
    else:
        t = np.arange(2, r + m - 1, 2)
        ta, tb = (t, t - 1) if positive else (t - 1, t)
        y[s] = _convolve_valid(x[xe[tb]], hao)
        y[s + 1] = _convolve_valid(x[xe[ta]], hbo)
        y[s + 2] = _convolve_valid(x[xe[tb]], hae)
        y[s + 3] = _convolve_valid(x[xe[ta]], hbe)
    return y
