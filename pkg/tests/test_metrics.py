import numpy as np
import pytest

from inpaintdet.metrics import (
    METRIC_NAMES,
    Confusion,
    aggregate,
    confusion,
    image_level_verdict,
    image_report,
    metric_suite,
)

import oracles


def test_perfect_prediction_counts():
    truth = np.zeros(100, bool)
    truth[:10] = True
    assert confusion(truth, truth) == Confusion(10, 0, 0, 90)
    assert confusion(np.zeros(100, bool), truth) == Confusion(0, 0, 10, 90)


def test_two_by_two_example():
    truth = np.array([[1, 1], [0, 0]], bool)
    pred = np.array([[1, 0], [1, 0]], bool)
    c = confusion(pred, truth)
    assert c == Confusion(1, 1, 1, 1)
    m = metric_suite(c)
    assert m["iou"] == pytest.approx(1 / 3)
    for name in ("f1", "precision", "recall", "accuracy", "balanced_accuracy"):
        assert m[name] == pytest.approx(0.5)


def test_perfect_metrics_all_one():
    m = np.zeros((4, 4), bool)
    m[1:3, 1:3] = True
    assert all(v == 1.0 for v in metric_suite(confusion(m, m)).values())


def test_empty_vs_empty_undefined():
    m = metric_suite(confusion(np.zeros((3, 3), bool), np.zeros((3, 3), bool)))
    assert m["accuracy"] == 1.0
    for name in ("iou", "f1", "precision", "recall", "balanced_accuracy"):
        assert m[name] is None


def test_shape_mismatch():
    with pytest.raises(ValueError):
        confusion(np.zeros((2, 2), bool), np.zeros((2, 3), bool))


def test_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(200):
        pred, truth = rng.random((2, 8, 8)) < rng.random(2)[:, None, None]
        c = confusion(pred, truth)
        assert (c.tp, c.fp, c.fn, c.tn) == oracles.confusion_counts(pred, truth)
        assert metric_suite(c) == oracles.metrics_from_counts(c.tp, c.fp, c.fn, c.tn)


def test_swap_exchanges_precision_and_recall():
    rng = np.random.default_rng(1)
    a, b = rng.random((2, 10, 10)) < 0.3
    ab, ba = metric_suite(confusion(a, b)), metric_suite(confusion(b, a))
    assert ab["precision"] == ba["recall"] and ab["recall"] == ba["precision"]


def test_image_level_verdict():
    assert not image_level_verdict(np.zeros((10, 10), bool))
    assert image_level_verdict(np.ones((10, 10), bool))
    m = np.zeros(10000, bool)
    m[:11] = True
    assert image_level_verdict(m.reshape(100, 100), 0.001)
    m[10] = False
    assert not image_level_verdict(m.reshape(100, 100), 0.001)


def test_aggregate_examples():
    single = image_report("a", np.eye(4, dtype=bool), np.eye(4, dtype=bool))
    agg = aggregate([single], "s")
    assert agg["mean"] == single["metrics"]
    assert agg["images"] == 1 and agg["split"] == "s"

    two = aggregate([{"iou": 0.2}, {"iou": 0.4}])
    assert two["mean"]["iou"] == pytest.approx(0.3)

    mixed = aggregate([{"iou": 0.7}, {"iou": None}])
    assert mixed["mean"]["iou"] == 0.7
    assert mixed["undefined_counts"]["iou"] == 1
    assert set(mixed["undefined_counts"]) == set(METRIC_NAMES)


def test_aggregate_image_level():
    full = np.ones((10, 10), bool)
    empty = np.zeros((10, 10), bool)
    reports = [image_report("a", full, full), image_report("b", empty, empty)]
    assert aggregate(reports)["image_level"]["accuracy"] == 1.0


def test_aggregate_empty():
    with pytest.raises(ValueError):
        aggregate([])
