import numpy as np
import pytest

from inpaintdet.dtcwt import forward
from inpaintdet.scattering import (
    ScatteringConfig,
    order2_paths,
    output_shape,
    scatter_image,
    scatter_order1,
    scatter_order2,
)
from inpaintdet.synthetic import shifted_pair, textured_image


@pytest.fixture(scope="module")
def texture():
    return textured_image(np.random.default_rng(0), 64)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_order1_count_and_no_lowpass(texture, n):
    smap = scatter_order1(texture, ScatteringConfig(levels=n))
    assert len(smap) == 6 * n
    assert all(p.order == 1 for p in smap.layout)
    assert [p.levels[0] for p in smap.layout] == [j for j in range(1, n + 1) for _ in range(6)]
    assert smap.shape == output_shape(texture.shape, n)


def test_order1_is_pooled_subband_modulus(texture):
    # with a tiny sigma the order-1 channel is the block mean of the modulus
    cfg = ScatteringConfig(levels=1, smoothing=1e-3)
    smap = scatter_order1(texture, cfg)
    np.testing.assert_allclose(smap.channels, np.abs(forward(texture, 1).highpasses[0]), atol=1e-12)


def test_order2_count():
    assert order2_paths(1) == []
    assert order2_paths(3) == [(1, 2), (2, 3)]
    img = np.random.default_rng(1).random((32, 32))
    smap = scatter_order2(img, ScatteringConfig(levels=2))
    assert len(smap) == 36
    assert {p.levels for p in smap.layout} == {(1, 2)}


def test_order2_disabled_raises():
    with pytest.raises(ValueError):
        scatter_order2(np.zeros((16, 16)), ScatteringConfig(include_order2=False))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_constant_image_vanishes(n):
    smap = scatter_image(np.full((48, 40), 0.42), ScatteringConfig(levels=n))
    assert smap.channels.max() <= 1e-9


def test_nonnegative(texture):
    assert scatter_image(texture).channels.min() >= 0


def test_rgb_layout():
    rng = np.random.default_rng(2)
    img = rng.random((32, 32, 3))
    smap = scatter_image(img, ScatteringConfig(levels=2, include_order2=False))
    assert len(smap) == 36
    assert [p.color for p in smap.layout] == [c for c in range(3) for _ in range(12)]
    np.testing.assert_array_equal(
        smap.select(color=1).channels, scatter_order1(img[..., 1], ScatteringConfig(levels=2)).channels
    )


def test_gray_equals_order1_then_order2(texture):
    cfg = ScatteringConfig(levels=2)
    full = scatter_image(texture, cfg)
    np.testing.assert_array_equal(full.select(order=1).channels, scatter_order1(texture, cfg).channels)
    np.testing.assert_array_equal(full.select(order=2).channels, scatter_order2(texture, cfg).channels)


def test_deterministic(texture):
    a = scatter_image(texture).channels
    b = scatter_image(texture.copy()).channels
    assert a.tobytes() == b.tobytes()


def test_config_validation():
    with pytest.raises(ValueError):
        ScatteringConfig(levels=0)
    with pytest.raises(ValueError):
        ScatteringConfig(smoothing=-1)
    assert ScatteringConfig(levels=3).sigma == 4.0


def test_translation_tolerance_single_case():
    a, b = shifted_pair(np.random.default_rng(3), 64, (1, 1))
    sa, sb = scatter_image(a).channels, scatter_image(b).channels
    assert np.linalg.norm(sa - sb) / np.linalg.norm(sa) <= 0.10


def test_wavelet_modulus_beats_raw_pixels_under_shift():
    # the same shift changes raw pixels far more than the scattering map
    a, b = shifted_pair(np.random.default_rng(4), 64, (0, 1))
    raw = np.linalg.norm(a - b) / np.linalg.norm(a)
    sa, sb = scatter_image(a).channels, scatter_image(b).channels
    assert np.linalg.norm(sa - sb) / np.linalg.norm(sa) < raw / 2
