"""Noise-aware refinement of a candidate forgery mask.

Segments are classified by how much of their area the candidate covers.
Segments covered almost entirely keep the candidate verdict, untouched
segments contribute nothing, and partially covered segments go through patch
noise analysis: only flagged cells that touch the candidate survive.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .dtcwt import forward
from .imaging import as_image, binarize, channels, to_grayscale
from .noise import PatchGrid, flag_inconsistent_patches, patch_statistics
from .segmentation import filter_small_segments, segment_image

EXPLANATION_SCHEMA = 1


class OverlapClass(enum.Enum):
    NONE = "none"
    PARTIAL = "partial"
    FULL = "full"


@dataclass(frozen=True)
class Overlap:
    cls: OverlapClass
    fraction: float


@dataclass(frozen=True)
class FusionConfig:
    t_none: float = 0.01
    t_full: float = 0.95
    k: float = 2.5
    grid: PatchGrid = field(default_factory=PatchGrid)
    min_segment_fraction: float = 0.1
    keep_full: bool = True
    keep_unsegmented: bool = True

    def __post_init__(self):
        if not 0 <= self.t_none < self.t_full <= 1:
            raise ValueError(
                f"overlap thresholds must satisfy 0 <= t_none < t_full <= 1, "
                f"got {self.t_none}, {self.t_full}"
            )

    @classmethod
    def from_run_config(cls, cfg):
        return cls(
            cfg.t_none,
            cfg.t_full,
            cfg.flag_k,
            cfg.grid(),
            cfg.min_segment_fraction,
            cfg.keep_full,
            cfg.keep_unsegmented,
        )


def _check_same_shape(a, b, what):
    if a.shape != b.shape:
        raise ValueError(f"{what}: shapes {a.shape} and {b.shape} differ")


def classify_overlap(segment, candidate, cfg=None):
    """Overlap class of one segment (boolean pixel mask) with the candidate mask."""
    cfg = cfg or FusionConfig()
    segment = np.asarray(segment, dtype=bool)
    candidate = np.asarray(candidate, dtype=bool)
    _check_same_shape(segment, candidate, "segment and candidate")
    area = int(segment.sum())
    fraction = float((segment & candidate).sum() / area) if area else 0.0
    if fraction <= cfg.t_none:
        cls = OverlapClass.NONE
    elif fraction >= cfg.t_full:
        cls = OverlapClass.FULL
    else:
        cls = OverlapClass.PARTIAL
    return Overlap(cls, fraction)


def cell_pixels(rect, shape):
    """Pixel slice covered by a level-1 grid cell ``(r0, r1, c0, c1)``."""
    r0, r1, c0, c1 = rect
    h, w = shape
    return slice(2 * r0, min(2 * r1, h)), slice(2 * c0, min(2 * c1, w))


def refine_mask(img, candidate, seg, pyr, cfg=None, discarded=None, fb=None):
    """Refine ``candidate`` using segment overlap and patch noise analysis.

    Parameters
    ----------
    img : ndarray
        Image the pyramid was computed from (used for shape checks).
    candidate : ndarray of bool, shape (H, W)
    seg : SegmentMap
    pyr : DtcwtPyramid
        Transform of the grayscale image; only level 1 is used.
    cfg : FusionConfig, optional
    discarded : set of int, optional
        Ids of segments too small to analyse.  Computed from
        ``cfg.min_segment_fraction`` when omitted.

    Returns
    -------
    mask : ndarray of bool
    explanation : dict
        JSON-ready record with one entry per segment.
    """
    cfg = cfg or FusionConfig()
    img = as_image(img)
    candidate = np.asarray(candidate, dtype=bool)
    shape = img.shape[:2]
    if candidate.shape != shape:
        raise ValueError(f"candidate {candidate.shape} does not match image {shape}")
    if seg.shape != shape:
        raise ValueError(f"segment map {seg.shape} does not match image {shape}")
    if tuple(pyr.original_shape) != shape:
        raise ValueError(f"pyramid of {pyr.original_shape} does not match image {shape}")
    if discarded is None:
        _, discarded = filter_small_segments(seg, cfg.min_segment_fraction)

    out = np.zeros(shape, dtype=bool)
    records = []
    for sid in range(seg.k):
        smask = seg.labels == sid
        area = int(smask.sum())
        rec = {"id": sid, "area": area}
        if sid in discarded:
            contrib = smask & candidate if cfg.keep_unsegmented else np.zeros(shape, bool)
            rec.update(
                overlap_fraction=float((smask & candidate).sum() / area),
                **{"class": "discarded"},
                flagged_cells=[],
                contributed_pixels=int(contrib.sum()),
            )
            out |= contrib
            records.append(rec)
            continue
        ov = classify_overlap(smask, candidate, cfg)
        flagged = []
        contrib = np.zeros(shape, dtype=bool)
        if ov.cls is OverlapClass.FULL and cfg.keep_full:
            contrib = smask & candidate
        elif ov.cls is OverlapClass.PARTIAL:
            stats = patch_statistics(pyr, smask, cfg.grid, fb)
            flags = flag_inconsistent_patches(stats, cfg.k)
            by_cell = {s.cell: s for s in stats}
            for cell in sorted(flags.cells):
                sl = cell_pixels(by_cell[cell].rect, shape)
                region = np.zeros(shape, dtype=bool)
                region[sl] = smask[sl]
                hit = bool((region & candidate).any())
                flagged.append(
                    {
                        "cell": cell,
                        "intersects_candidate": hit,
                        "reasons": [f.as_dict() for f in flags.flags if f.cell == cell],
                    }
                )
                if hit:
                    contrib |= region
            rec["inconclusive"] = flags.inconclusive
        rec.update(
            overlap_fraction=ov.fraction,
            **{"class": ov.cls.value},
            flagged_cells=flagged,
            contributed_pixels=int(contrib.sum()),
        )
        out |= contrib
        records.append(rec)
    explanation = {
        "schema_version": EXPLANATION_SCHEMA,
        "image_shape": list(shape),
        "candidate_pixels": int(candidate.sum()),
        "refined_pixels": int(out.sum()),
        "segments": records,
    }
    return out, explanation


def detect(img, candidate, cfg=None):
    """Full refinement pipeline from a probability candidate.

    ``candidate`` is binarised at ``cfg.threshold``; the image is converted to
    grayscale for the transform, segmented in colour, and refined.

    Returns
    -------
    mask : ndarray of bool
    explanation : dict
    """
    cfg = cfg or RunConfig()
    img = as_image(img)
    prob = np.asarray(candidate, dtype=np.float64)
    if prob.shape != img.shape[:2]:
        raise ValueError(f"candidate {prob.shape} does not match image {img.shape[:2]}")
    cand = binarize(prob, cfg.threshold)
    fb = cfg.filter_bank()
    gray = to_grayscale(img) if channels(img) == 3 else img
    pyr = forward(gray, 1, fb)
    seg, discarded = segment_image(
        img,
        cfg.slic_count,
        cfg.compactness,
        cfg.merge_threshold,
        cfg.min_segment_fraction,
        cfg.seed,
    )
    return refine_mask(img, cand, seg, pyr, FusionConfig.from_run_config(cfg), discarded, fb)
