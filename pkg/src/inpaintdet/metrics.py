"""Pixel-level and image-level detection metrics.

Undefined ratios (``0 / 0``) are reported as ``None`` rather than 0 or 1,
and aggregation skips them while counting how many were skipped.
"""

from dataclasses import dataclass

import numpy as np

METRIC_NAMES = ("iou", "f1", "precision", "recall", "accuracy", "balanced_accuracy")
REPORT_SCHEMA = 1


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def as_dict(self):
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def confusion(pred, truth):
    """Pixel confusion counts with forged (True) as the positive class."""
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise ValueError(f"prediction {pred.shape} and truth {truth.shape} differ in shape")
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    return Confusion(tp, fp, fn, pred.size - tp - fp - fn)


def _ratio(num, den):
    return num / den if den else None


def metric_suite(c):
    """IoU, F1, precision, recall, accuracy and balanced accuracy of ``c``.

    Balanced accuracy is undefined unless both classes occur in the truth.
    """
    recall = _ratio(c.tp, c.tp + c.fn)
    specificity = _ratio(c.tn, c.tn + c.fp)
    balanced = None if recall is None or specificity is None else (recall + specificity) / 2
    return {
        "iou": _ratio(c.tp, c.tp + c.fp + c.fn),
        "f1": _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn),
        "precision": _ratio(c.tp, c.tp + c.fp),
        "recall": recall,
        "accuracy": _ratio(c.tp + c.tn, c.total),
        "balanced_accuracy": balanced,
    }


def image_level_verdict(pred, min_area_fraction=0.001):
    """True iff the forged fraction of ``pred`` exceeds ``min_area_fraction``."""
    pred = np.asarray(pred, dtype=bool)
    return bool(np.count_nonzero(pred) > min_area_fraction * pred.size)


def image_report(name, pred, truth, min_area_fraction=0.001):
    """Per-image record: counts, the metric suite and both image-level verdicts."""
    c = confusion(pred, truth)
    return {
        "image": name,
        "confusion": c.as_dict(),
        "metrics": metric_suite(c),
        "predicted_forged": image_level_verdict(pred, min_area_fraction),
        "truly_forged": image_level_verdict(truth, min_area_fraction),
    }


def aggregate(reports, split=None):
    """Unweighted mean of each defined per-image metric.

    ``reports`` are metric dicts or per-image records holding one under
    ``"metrics"``.  Image-level balanced accuracy is added when the records
    carry verdicts.

    Raises
    ------
    ValueError
        If ``reports`` is empty.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("cannot aggregate an empty list of reports")
    metrics = [r.get("metrics", r) for r in reports]
    means, undefined = {}, {}
    for name in METRIC_NAMES:
        values = [m[name] for m in metrics if m.get(name) is not None]
        undefined[name] = len(metrics) - len(values)
        means[name] = float(np.mean(values)) if values else None
    out = {
        "split": split,
        "images": len(reports),
        "mean": means,
        "undefined_counts": undefined,
    }
    if all("predicted_forged" in r for r in reports):
        pred = np.array([r["predicted_forged"] for r in reports])
        truth = np.array([r["truly_forged"] for r in reports])
        out["image_level"] = metric_suite(confusion(pred, truth))
    return out
