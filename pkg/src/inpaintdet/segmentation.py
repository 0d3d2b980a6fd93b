"""SLIC superpixels, mean-colour region merging and the small-segment filter."""

import heapq
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imaging import as_image, rgb_to_lab

SLIC_ITERATIONS = 10
DEFAULT_COUNT = 32
DEFAULT_COMPACTNESS = 10.0
# Gaussian prefilter (pixels) applied to the Lab image before clustering.
DEFAULT_SLIC_SIGMA = 1.0
DEFAULT_MERGE_THRESHOLD = 12.0
DEFAULT_MIN_FRACTION = 0.1

_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class SegmentMap:
    """Partition of an image into ``k`` labelled segments.

    ``labels`` holds ids ``0..k-1`` and every id occurs at least once.  Use
    :meth:`from_labels` to build one from arbitrary integer labels.
    """

    labels: np.ndarray

    def __post_init__(self):
        if self.labels.ndim != 2:
            raise ValueError(f"labels must be 2-D, got shape {self.labels.shape}")

    @classmethod
    def from_labels(cls, labels):
        """Compact arbitrary labels to ``0..k-1`` in raster order of first appearance."""
        labels = np.asarray(labels)
        _, first, inverse = np.unique(labels.ravel(), return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int32)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size, dtype=np.int32)
        return cls(rank[inverse].reshape(labels.shape))

    @property
    def k(self):
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def shape(self):
        return self.labels.shape

    @property
    def areas(self):
        return np.bincount(self.labels.ravel(), minlength=self.k)

    def mask(self, segment_id):
        return self.labels == segment_id


# ---------------------------------------------------------------- SLIC


def _seed_grid(h, w, count):
    """Exactly ``count`` seed centres spread over rows of near-square cells."""
    rows = int(np.clip(round(np.sqrt(count * h / w)), 1, min(count, h)))
    base, extra = divmod(count, rows)
    ys, xs = [], []
    for i in range(rows):
        per_row = base + (1 if i < extra else 0)
        y = (i + 0.5) * h / rows
        for j in range(per_row):
            ys.append(y)
            xs.append((j + 0.5) * w / per_row)
    return np.array(ys), np.array(xs)


def slic_superpixels(
    img, count=DEFAULT_COUNT, compactness=DEFAULT_COMPACTNESS, seed=0, sigma=DEFAULT_SLIC_SIGMA
):
    """SLIC superpixels in CIELAB.

    Parameters
    ----------
    img : array_like
        Grayscale or RGB image in [0, 1].
    count : int
        Number of seeds.  After connectivity enforcement the number of
        segments can differ slightly.
    compactness : float
        Spatial weight ``m``; distances are ``d_lab**2 + (d_xy * m / S)**2``
        with grid step ``S = sqrt(N / count)``.
    seed : int
        Accepted for interface stability.  Initialisation is a fixed grid, so
        the result does not depend on it.
    sigma : float
        Width of the Gaussian prefilter applied per Lab channel; 0 disables it.
        Without it, sensor-level noise splits superpixels into thousands of
        fragments.

    Returns
    -------
    SegmentMap
    """
    del seed  # deterministic grid initialisation
    img = as_image(img)
    h, w = img.shape[:2]
    n_pix = h * w
    count = int(count)
    if count < 1:
        raise ValueError(f"superpixel count must be >= 1, got {count}")
    if count > n_pix:
        raise ValueError(f"superpixel count {count} exceeds the {n_pix} pixels of the image")
    lab = rgb_to_lab(img)
    if sigma > 0:
        lab = ndimage.gaussian_filter(lab, (sigma, sigma, 0), mode="reflect")
    step = np.sqrt(n_pix / count)
    spatial = (compactness / step) ** 2

    cy, cx = _seed_grid(h, w, count)
    iy = np.minimum(cy.astype(int), h - 1)
    ix = np.minimum(cx.astype(int), w - 1)
    ccol = lab[iy, ix].copy()
    yy, xx = np.mgrid[0:h, 0:w]
    radius = int(np.ceil(2 * step))

    labels = np.zeros((h, w), dtype=np.int64)
    for _ in range(SLIC_ITERATIONS):
        best = np.full((h, w), np.inf)
        for c in range(count):
            y0 = max(int(cy[c]) - radius, 0)
            y1 = min(int(cy[c]) + radius + 1, h)
            x0 = max(int(cx[c]) - radius, 0)
            x1 = min(int(cx[c]) + radius + 1, w)
            dc = np.sum((lab[y0:y1, x0:x1] - ccol[c]) ** 2, axis=2)
            ds = (yy[y0:y1, x0:x1] - cy[c]) ** 2 + (xx[y0:y1, x0:x1] - cx[c]) ** 2
            d = dc + spatial * ds
            win = best[y0:y1, x0:x1]
            closer = d < win
            win[closer] = d[closer]
            labels[y0:y1, x0:x1][closer] = c
        uncovered = ~np.isfinite(best)
        if uncovered.any():
            labels[uncovered] = _nearest_centre(
                lab[uncovered], yy[uncovered], xx[uncovered], ccol, cy, cx, spatial
            )
        flat = labels.ravel()
        area = np.bincount(flat, minlength=count)
        live = area > 0
        for arr, vals in ((cy, yy), (cx, xx)):
            sums = np.bincount(flat, weights=vals.ravel(), minlength=count)
            arr[live] = sums[live] / area[live]
        for ch in range(3):
            sums = np.bincount(flat, weights=lab[..., ch].ravel(), minlength=count)
            ccol[live, ch] = sums[live] / area[live]
    return SegmentMap.from_labels(enforce_connectivity(labels))


def _nearest_centre(col, py, px, ccol, cy, cx, spatial):
    d = ((col[:, None, :] - ccol[None]) ** 2).sum(axis=2)
    d += spatial * ((py[:, None] - cy[None]) ** 2 + (px[:, None] - cx[None]) ** 2)
    return np.argmin(d, axis=1)


def enforce_connectivity(labels):
    """Make every label 4-connected.

    Each label keeps its largest component.  The remaining (orphan) components
    are absorbed, in raster order, by the adjacent segment of largest current
    area; ties go to the smaller label.
    """
    labels = np.asarray(labels, dtype=np.int64)
    comp = np.zeros(labels.shape, dtype=np.int64)
    comp_label = []
    offset = 0
    for lab_id, sl in enumerate(ndimage.find_objects(labels + 1)):
        if sl is None:
            continue
        inside = labels[sl] == lab_id
        sub, n = ndimage.label(inside, structure=_FOUR_CONNECTED)
        comp[sl][inside] = sub[inside] + offset - 1
        comp_label.extend([lab_id] * n)
        offset += n
    comp_label = np.array(comp_label, dtype=np.int64)
    n_comp = comp_label.size
    if n_comp == labels.max() + 1:
        return labels.copy()

    flat = comp.ravel()
    size = np.bincount(flat, minlength=n_comp)
    first = np.full(n_comp, flat.size, dtype=np.int64)
    np.minimum.at(first, flat, np.arange(flat.size))
    # main component per label: largest, earliest in raster order on ties
    order = np.lexsort((first, -size, comp_label))
    is_main = np.zeros(n_comp, dtype=bool)
    is_main[order[np.r_[True, comp_label[order][1:] != comp_label[order][:-1]]]] = True

    adj = [set() for _ in range(n_comp)]
    for a, b in ((comp[:, :-1], comp[:, 1:]), (comp[:-1, :], comp[1:, :])):
        diff = a != b
        for u, v in np.unique(np.stack([a[diff], b[diff]], axis=1), axis=0):
            adj[u].add(int(v))
            adj[v].add(int(u))

    owner = np.where(is_main, comp_label, -1)
    area = np.bincount(comp_label[is_main], weights=size[is_main], minlength=labels.max() + 1)
    pending = sorted(np.flatnonzero(~is_main), key=lambda c: first[c])
    while pending:
        waiting = []
        for c in pending:
            cands = sorted({int(owner[v]) for v in adj[c] if owner[v] >= 0})
            if not cands:
                waiting.append(c)
                continue
            target = max(cands, key=lambda lab: (area[lab], -lab))
            owner[c] = target
            area[target] += size[c]
        if len(waiting) == len(pending):
            raise RuntimeError("connectivity enforcement made no progress")
        pending = waiting
    return owner[comp]


# ---------------------------------------------------------------- merging


def _adjacent_pairs(labels):
    pairs = []
    for a, b in ((labels[:, :-1], labels[:, 1:]), (labels[:-1, :], labels[1:, :])):
        diff = a != b
        lo = np.minimum(a[diff], b[diff])
        hi = np.maximum(a[diff], b[diff])
        pairs.append(np.stack([lo, hi], axis=1))
    pairs = np.concatenate(pairs)
    return np.unique(pairs, axis=0) if pairs.size else pairs.reshape(0, 2)


def merge_regions(seg, img, color_threshold=DEFAULT_MERGE_THRESHOLD):
    """Greedy hierarchical merging of adjacent segments by mean Lab colour.

    The adjacent pair with the smallest Euclidean distance between mean
    colours is merged first, the merged region takes the area-weighted mean,
    and merging stops once no adjacent pair is closer than ``color_threshold``.
    Ties are broken by the lower id pair, so the result is deterministic.
    """
    img = as_image(img)
    if img.shape[:2] != seg.shape:
        raise ValueError(f"segment map {seg.shape} does not match image {img.shape[:2]}")
    labels = seg.labels
    k = seg.k
    if k <= 1 or not color_threshold > 0:
        return SegmentMap(labels.copy())
    lab = rgb_to_lab(img).reshape(-1, 3)
    flat = labels.ravel()
    area = np.bincount(flat, minlength=k).astype(np.float64)
    mean = np.stack(
        [np.bincount(flat, weights=lab[:, c], minlength=k) for c in range(3)], axis=1
    ) / area[:, None]

    neighbours = [set() for _ in range(k)]
    for a, b in _adjacent_pairs(labels):
        neighbours[a].add(int(b))
        neighbours[b].add(int(a))
    version = [0] * k
    parent = list(range(k))
    heap = []

    def push(a, b):
        if a > b:
            a, b = b, a
        d = float(np.linalg.norm(mean[a] - mean[b]))
        if d < color_threshold:
            heapq.heappush(heap, (d, a, b, version[a], version[b]))

    for a in range(k):
        for b in neighbours[a]:
            if a < b:
                push(a, b)
    while heap:
        _, a, b, va, vb = heapq.heappop(heap)
        if parent[a] != a or parent[b] != b or version[a] != va or version[b] != vb:
            continue
        # keep the lower id; fold b into a
        mean[a] = (mean[a] * area[a] + mean[b] * area[b]) / (area[a] + area[b])
        area[a] += area[b]
        parent[b] = a
        neighbours[a] |= neighbours[b]
        neighbours[a] -= {a, b}
        for c in neighbours[b]:
            if c != a:
                neighbours[c].discard(b)
                neighbours[c].add(a)
        neighbours[b] = set()
        version[a] += 1
        for c in sorted(neighbours[a]):
            push(a, c)

    root = np.arange(k)
    for i in range(k):
        r = i
        while parent[r] != r:
            r = parent[r]
        root[i] = r
    return SegmentMap.from_labels(root[labels])


def filter_small_segments(seg, min_fraction=DEFAULT_MIN_FRACTION):
    """Mark segments with area below ``min_fraction`` of the image as discarded.

    Labels are left untouched.

    Returns
    -------
    seg : SegmentMap
        The input map (unchanged).
    discarded : frozenset of int
    """
    if not 0 <= min_fraction <= 1:
        raise ValueError(f"min_fraction must be in [0, 1], got {min_fraction}")
    limit = min_fraction * seg.labels.size
    areas = seg.areas
    return seg, frozenset(int(i) for i in np.flatnonzero(areas < limit))


def segment_image(
    img,
    count=DEFAULT_COUNT,
    compactness=DEFAULT_COMPACTNESS,
    color_threshold=DEFAULT_MERGE_THRESHOLD,
    min_fraction=DEFAULT_MIN_FRACTION,
    seed=0,
):
    """SLIC, merge and small-segment filter in one call; returns ``(seg, discarded)``."""
    seg = slic_superpixels(img, count, compactness, seed)
    seg = merge_regions(seg, img, color_threshold)
    return filter_small_segments(seg, min_fraction)
