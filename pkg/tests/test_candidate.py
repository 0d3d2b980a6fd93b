import numpy as np
import pytest

from inpaintdet.candidate import baseline_score, load_candidate
from inpaintdet.errors import DecodeError
from inpaintdet.imaging import encode_netpbm, write_image
from inpaintdet.synthetic import noisy_square


def test_binary_mask_probabilities(tmp_path):
    mask = np.zeros((6, 5))
    mask[2:4, 1:3] = 1
    path = tmp_path / "m.pgm"
    write_image(path, mask)
    out = load_candidate(path, (6, 5, 3))
    np.testing.assert_array_equal(out, mask)


def test_16bit_half_scale(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_bytes(encode_netpbm(np.full((2, 2), 32768, np.uint16), bit_depth=16))
    np.testing.assert_allclose(load_candidate(path, (2, 2)), 32768 / 65535)
    assert load_candidate(path, (2, 2))[0, 0] == pytest.approx(0.50001, abs=1e-5)


def test_shape_mismatch_is_loud(tmp_path):
    path = tmp_path / "m.png"
    write_image(path, np.zeros((100, 100)))
    with pytest.raises(ValueError, match="99"):
        load_candidate(path, (99, 100))


def test_rgb_candidate_rejected(tmp_path):
    path = tmp_path / "m.png"
    write_image(path, np.zeros((4, 4, 3)))
    with pytest.raises(ValueError, match="single-channel"):
        load_candidate(path, (4, 4))


def test_undecodable_candidate(tmp_path):
    path = tmp_path / "m.png"
    path.write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        load_candidate(path, (4, 4))


def test_constant_image_scores_uniformly():
    score = baseline_score(np.full((48, 40), 0.6))
    assert score.shape == (48, 40)
    assert np.unique(score).size == 1


def test_blurred_square_scores_higher():
    img, truth = noisy_square(0)
    score = baseline_score(img)
    assert np.median(score[truth]) > np.median(score[~truth])


def test_scores_are_probabilities_and_deterministic():
    img, _ = noisy_square(1)
    a = baseline_score(img)
    assert a.min() >= 0 and a.max() <= 1
    assert a.tobytes() == baseline_score(img.copy()).tobytes()


def test_ordering_invariant_under_affine_intensity():
    img = noisy_square(2)[0] * 0.8 + 0.1
    base = np.argsort(baseline_score(img), axis=None, kind="stable")
    for a, b in [(0.5, 0.2), (1.1, -0.05)]:
        moved = np.argsort(baseline_score(a * img + b), axis=None, kind="stable")
        np.testing.assert_array_equal(moved, base)
