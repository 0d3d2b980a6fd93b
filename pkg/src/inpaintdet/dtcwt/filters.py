"""Embedded filter tables and filter-bank construction.

Only the lowpass taps of each family are stored.  The highpass analysis
filters and all synthesis filters follow from the usual biorthogonal and
quarter-shift relations, which removes most of the room for transcription
errors; the remainder is caught by the reconstruction check run whenever a
bank is built.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import FilterBankError

# Level-1 biorthogonal pairs: (analysis lowpass, synthesis lowpass).
LEVEL1_TABLES = {
    "near_sym_b": (
        (-0.0017578125, 0.0, 0.022265625, -0.046875, -0.0482421875, 0.296875,
         0.55546875, 0.296875, -0.0482421875, -0.046875, 0.022265625, 0.0,
         -0.0017578125),
        (7.062639508928571e-05, 0.0, -0.0013419015066964285,
         -0.0018833705357142855, 0.007156808035714285, 0.023856026785714284,
         -0.05564313616071428, -0.05168805803571428, 0.29975760323660716,
         0.5594308035714286, 0.29975760323660716, -0.05168805803571428,
         -0.05564313616071428, 0.023856026785714284, 0.007156808035714285,
         -0.0018833705357142855, -0.0013419015066964285, 0.0,
         7.062639508928571e-05),
    ),
    "near_sym_a": (
        (-0.05, 0.25, 0.6, 0.25, -0.05),
        (-0.010714285714285713, -0.05357142857142857, 0.26071428571428573,
         0.6071428571428571, 0.26071428571428573, -0.05357142857142857,
         -0.010714285714285713),
    ),
    "antonini": (
        (0.026748757410810106, -0.01686411844287467, -0.07822326652899052,
         0.2668641184428729, 0.6029490182363593, 0.2668641184428769,
         -0.0782232665289884, -0.016864118442875293, 0.026748757410809648),
        (-0.04563588155712514, -0.02877176311424934, 0.295635881557128,
         0.5575435262285023, 0.29563588155712334, -0.02877176311425308,
         -0.04563588155712608),
    ),
    "legall": (
        (-0.125, 0.25, 0.75, 0.25, -0.125),
        (0.25, 0.5, 0.25),
    ),
}

# Quarter-shift orthonormal lowpass filters for tree a; tree b is the reverse.
QSHIFT_TABLES = {
    "qshift_a": (
        0.051130405283831656, -0.013975370246888838, -0.10983605166597087,
        0.26383956105893763, 0.7666284677930372, 0.5636557101270515,
        0.0008736226952170968, -0.1002312195074762, -0.0016896812725281543,
        -0.006181881892116438,
    ),
    "qshift_b": (
        0.003253142763653182, -0.00388321199915849, 0.03466034684485349,
        -0.03887280126882779, -0.11720388769911527, 0.27529538466888204,
        0.7561456438925225, 0.5688104207121227, 0.011866092033797,
        -0.1067118046866654, 0.023825384794920298, 0.01702522388155399,
        -0.005439475937274115, -0.004556895628475491,
    ),
    "qshift_c": (
        -0.0047616119384559135, -0.00044602278926228516,
        -7.144197327965012e-05, 0.034914612306842195, -0.03727389579989796,
        -0.11591145742744076, 0.2763686431330317, 0.7563937651990367,
        0.567134484100133, 0.01463740596447335, -0.11255888425752203,
        0.02228926326692271, 0.018498682724156248, -0.0072026778782583465,
        -0.0002276522058977718, 0.002430349945148675,
    ),
    "qshift_d": (
        -0.002284127440270531, 0.0012098941630734423, -0.011834794515430786,
        0.0012834569993443994, 0.044365221606616996, -0.05327610880304726,
        -0.1133058863621428, 0.2809028632221865, 0.7528160380878561,
        0.5658080673964587, 0.024550152433666563, -0.12018854471079482,
        0.018156493945546453, 0.03152637712208465, -0.006628794612430063,
        -0.0025761743066007948, 0.0012775586538069982, 0.002411869456666278,
    ),
}

DEFAULT_LEVEL1 = "near_sym_b"
DEFAULT_QSHIFT = "qshift_b"

# Test-only level-1 bank: unit lowpass and zero highpass in both directions,
# which makes the level-1 transform an identity on the LoLo plane.
DELTA = "delta"

PR_TOLERANCE = 1e-10


@dataclass(frozen=True)
class FilterBank:
    """Immutable set of tap sequences for a DTCWT.

    The ``level1_*`` pairs are (lowpass, highpass) odd-length filters shared by
    both trees at level 1.  The ``qshift_*`` entries hold the tree-a and tree-b
    lowpass and highpass filters used at levels 2 and deeper.
    """

    level1_kind: str
    qshift_kind: str
    h0o: tuple
    h1o: tuple
    g0o: tuple
    g1o: tuple
    h0a: tuple
    h0b: tuple
    h1a: tuple
    h1b: tuple
    g0a: tuple
    g0b: tuple
    g1a: tuple
    g1b: tuple

    @property
    def level1_analysis(self):
        return self.h0o, self.h1o

    @property
    def level1_synthesis(self):
        return self.g0o, self.g1o

    @property
    def qshift_analysis(self):
        return (self.h0a, self.h0b), (self.h1a, self.h1b)

    @property
    def qshift_synthesis(self):
        return (self.g0a, self.g0b), (self.g1a, self.g1b)

    def taps(self, name):
        """Tap sequence ``name`` (e.g. ``"h0o"``) as a float64 column vector."""
        return _as_column(getattr(self, name))


def _as_column(taps):
    return np.asarray(taps, dtype=np.float64).reshape(-1, 1)


def _alternate(taps, centre):
    """Modulate by (-1)^(n - centre); maps a lowpass onto its mirror highpass."""
    taps = np.asarray(taps, dtype=np.float64)
    signs = np.where((np.arange(taps.size) - centre) % 2 == 0, 1.0, -1.0)
    return taps * signs


def _level1_filters(kind):
    if kind == DELTA:
        return (1.0,), (0.0,), (1.0,), (0.0,)
    try:
        h0, g0 = LEVEL1_TABLES[kind]
    except KeyError:
        raise ValueError(
            f"unknown level-1 filter {kind!r}; choose from {sorted(LEVEL1_TABLES)}"
        ) from None
    h1 = _alternate(g0, len(g0) // 2)
    g1 = _alternate(h0, len(h0) // 2)
    return tuple(h0), tuple(h1.tolist()), tuple(g0), tuple(g1.tolist())


def _orthonormal_residual(h):
    m = h.size
    res = [np.dot(h[: m - 2 * k], h[2 * k :]) - (1.0 if k == 0 else 0.0) for k in range(m // 2)]
    res.append(_alternate(h, 0).sum())
    return np.array(res)


def _orthonormal_jacobian(h):
    m = h.size
    rows = []
    for k in range(m // 2):
        row = np.zeros(m)
        row[: m - 2 * k] += h[2 * k :]
        row[2 * k :] += h[: m - 2 * k]
        rows.append(row)
    rows.append(_alternate(np.ones(m), 0))
    return np.array(rows)


def exact_qshift(h0a, iterations=20):
    """Nearest taps that are exactly orthonormal with a zero at the Nyquist frequency.

    Published q-shift tables satisfy orthonormality to rounding error but only
    approximate the Nyquist zero (around 1e-6 for the 14-tap design), so their
    highpass filters leak a little DC.  Minimum-norm Gauss-Newton steps remove
    both residuals while moving each tap by roughly that amount.
    """
    h = np.array(h0a, dtype=np.float64)
    for _ in range(iterations):
        res = _orthonormal_residual(h)
        if np.max(np.abs(res)) < 1e-17:
            break
        jac = _orthonormal_jacobian(h)
        h -= jac.T @ np.linalg.solve(jac @ jac.T, res)
    return h


def _qshift_filters(kind, exact=True):
    try:
        h0a = np.asarray(QSHIFT_TABLES[kind], dtype=np.float64)
    except KeyError:
        raise ValueError(
            f"unknown q-shift filter {kind!r}; choose from {sorted(QSHIFT_TABLES)}"
        ) from None
    if h0a.size % 2:
        raise FilterBankError(f"q-shift filter {kind!r} has odd length {h0a.size}")
    if exact:
        h0a = exact_qshift(h0a)
    h0b = h0a[::-1]
    h1a = _alternate(h0b, 0)
    h1b = h1a[::-1]
    # Orthonormal: synthesis filters are the time-reversed analysis filters.
    g0a, g0b, g1a, g1b = h0b, h0a, h1b, h1a
    return tuple(tuple(f.tolist()) for f in (h0a, h0b, h1a, h1b, g0a, g0b, g1a, g1b))


@lru_cache(maxsize=None)
def build_filter_bank(level1_kind=DEFAULT_LEVEL1, qshift_kind=DEFAULT_QSHIFT, exact=True):
    """Build and validate a filter bank from the embedded tables.

    Parameters
    ----------
    level1_kind : str
        Level-1 family: ``near_sym_a``, ``near_sym_b``, ``antonini``,
        ``legall``, or the test-only ``delta``.
    qshift_kind : str
        Deeper-level family: ``qshift_a`` .. ``qshift_d``.
    exact : bool
        Apply :func:`exact_qshift` to the q-shift taps (default).  With
        ``False`` the published values are used verbatim.

    Raises
    ------
    ValueError
        If either identifier is unknown.
    FilterBankError
        If the taps fail the 1-D impulse reconstruction check.
    """
    h0o, h1o, g0o, g1o = _level1_filters(level1_kind)
    qs = _qshift_filters(qshift_kind, exact)
    fb = FilterBank(level1_kind, qshift_kind, h0o, h1o, g0o, g1o, *qs)
    err = reconstruction_error(fb, include_level1=level1_kind != DELTA)
    if not err < PR_TOLERANCE:
        raise FilterBankError(
            f"filter bank ({level1_kind}, {qshift_kind}) reconstructs an impulse "
            f"with error {err:.3g}; the embedded constants are corrupt"
        )
    return fb


def reconstruction_error(fb, length=64, levels=3, include_level1=True):
    """Max abs error of a multi-level 1-D round trip over shifted impulses.

    Every impulse position in ``range(length)`` is pushed through ``levels``
    analysis stages and back.  With ``include_level1`` false the delta bank's
    level 1 is checked as a pure identity on its lowpass instead, since its
    zero highpass is not invertible on its own but is never asked to be.
    """
    from .lowlevel import coldfilt, colfilter, colifilt

    x = np.eye(length)
    h0o, h1o = fb.taps("h0o"), fb.taps("h1o")
    g0o, g1o = fb.taps("g0o"), fb.taps("g1o")
    h0a, h0b, h1a, h1b = (fb.taps(n) for n in ("h0a", "h0b", "h1a", "h1b"))
    g0a, g0b, g1a, g1b = (fb.taps(n) for n in ("g0a", "g0b", "g1a", "g1b"))

    lo = colfilter(x, h0o)
    if include_level1:
        hi = colfilter(x, h1o)
    highs = []
    for _ in range(1, levels):
        highs.append(coldfilt(lo, h1b, h1a))
        lo = coldfilt(lo, h0b, h0a)
    for hi_k in reversed(highs):
        lo = colifilt(lo, g0b, g0a) + colifilt(hi_k, g1b, g1a)
    if include_level1:
        y = colfilter(lo, g0o) + colfilter(hi, g1o)
    else:
        y = colfilter(lo, g0o)
    return float(np.max(np.abs(y - x)))
