"""Phantom, sensitivity, DFT and crop tests against direct-sum oracles."""

import numpy as np
import pytest

from txlr.metrics import singular_spectrum
from txlr.phantom import (
    crop_kspace,
    dft2_centered,
    generate_phantom,
    generate_sensitivities,
    idft2_centered,
    simulate_kspace,
)


def _oracle_dft2(a):
    """Direct O(N^2) centered orthonormal DFT over the first two axes."""
    nx, ny = a.shape[:2]
    x = np.arange(nx) - nx // 2
    y = np.arange(ny) - ny // 2
    ex = np.exp(-2j * np.pi * np.outer(x, x) / nx) / np.sqrt(nx)
    ey = np.exp(-2j * np.pi * np.outer(y, y) / ny) / np.sqrt(ny)
    return np.einsum("ki,lj,ij...->kl...", ex, ey, a)


def test_dft_matches_direct_sum():
    rng = np.random.default_rng(0)
    for shape in [(8, 8), (7, 9), (16, 16, 2, 2)]:
        a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        np.testing.assert_allclose(
            dft2_centered(a), _oracle_dft2(a), rtol=0, atol=1e-12
        )


def test_dft_roundtrip_and_parseval():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((12, 10, 2, 3)) + 1j * rng.standard_normal((12, 10, 2, 3))
    k = dft2_centered(a)
    np.testing.assert_allclose(idft2_centered(k), a, atol=1e-13)
    assert np.isclose(np.linalg.norm(k), np.linalg.norm(a))


def test_dft_constant_image_is_centered_delta():
    nx, ny = 16, 16
    k = dft2_centered(np.full((nx, ny), 3.0))
    assert np.isclose(k[nx // 2, ny // 2], 3.0 * np.sqrt(nx * ny))
    off = k.copy()
    off[nx // 2, ny // 2] = 0
    assert np.abs(off).max() < 1e-12


@pytest.mark.parametrize("kind", ["disc", "shepp_like", "body_ellipses"])
def test_phantom_nonnegative_with_interior_support(kind):
    img = generate_phantom((32, 32), kind, seed=3)
    assert img.shape == (32, 32)
    assert (img >= 0).all()
    frac = (img > 0).mean()
    assert 0.1 <= frac <= 0.7
    # support stays inside the FOV: the border ring is empty
    assert not img[0].any() and not img[-1].any()
    assert not img[:, 0].any() and not img[:, -1].any()


def test_body_phantom_support_fraction_over_seeds():
    for seed in range(10):
        img = generate_phantom((48, 48), "body_ellipses", seed=seed)
        assert 0.3 <= (img > 0).mean() <= 0.7


def test_disc_phantom_is_analytic_circle():
    img = generate_phantom((32, 32), "disc")
    x = (np.arange(32) - 16) / 32
    xx, yy = np.meshgrid(x, x, indexing="ij")
    np.testing.assert_array_equal(img > 0, xx**2 + yy**2 <= 0.4**2)


def test_phantom_validation():
    with pytest.raises(ValueError):
        generate_phantom((8, 32), "disc")
    with pytest.raises(ValueError):
        generate_phantom((32, 32), "nope")


def test_sensitivities_shapes_and_determinism():
    a = generate_sensitivities((24, 24), 4, 3, 2, seed=6)
    assert a.tx_maps.shape == (24, 24, 3) and a.rx_maps.shape == (24, 24, 4)
    b = generate_sensitivities((24, 24), 4, 3, 2, seed=6)
    np.testing.assert_array_equal(a.tx_maps, b.tx_maps)
    np.testing.assert_array_equal(a.rx_maps, b.rx_maps)


def test_sensitivities_linearly_independent_channels():
    sens = generate_sensitivities((32, 32), 8, 8, 3, seed=0)
    for maps in (sens.rx_maps, sens.tx_maps):
        flat = maps.reshape(-1, maps.shape[-1])
        gram = flat.conj().T @ flat
        assert np.linalg.matrix_rank(gram) == maps.shape[-1]
        # channels are weakly correlated, not near-copies of each other
        corr = gram / np.sqrt(np.outer(np.diag(gram).real, np.diag(gram).real))
        np.fill_diagonal(corr, 0)
        assert np.abs(corr).max() < 0.9


def test_order_one_without_envelope_is_constant():
    sens = generate_sensitivities((24, 24), 2, 2, 1, seed=1, envelope=False)
    for maps in (sens.rx_maps, sens.tx_maps):
        spread = np.abs(maps - maps[0, 0]).max()
        assert spread < 1e-12


def test_sensitivity_order_validation():
    with pytest.raises(ValueError):
        generate_sensitivities((24, 24), 2, 2, 0)


def test_lifted_spectrum_has_rank_gap():
    """Band-limited maps give an exactly low-rank lifted unfolding.

    With per-axis harmonic width w (= 2*order - 1, no envelope) and an m-by-n
    kernel, the transmit-vertical unfolding has rank at most
    (m + w - 1) * (n + w - 1); singular values beyond it vanish.
    """
    phantom = generate_phantom((24, 24), "disc")
    sens = generate_sensitivities((24, 24), 4, 4, 2, seed=2, envelope=False)
    d = simulate_kspace(phantom, sens)
    spec = singular_spectrum(d, (5, 5), "tc")
    bound = (5 + 3 - 1) * (5 + 3 - 1)  # 49
    assert spec.values[bound] / spec.values[0] < 0.05
    assert spec.values[bound] / spec.values[0] < 1e-8


def test_simulate_kspace_linear_and_parseval():
    rng = np.random.default_rng(4)
    p1 = generate_phantom((24, 24), "body_ellipses", seed=0)
    p2 = generate_phantom((24, 24), "body_ellipses", seed=1)
    sens = generate_sensitivities((24, 24), 3, 2, 2, seed=0)
    d1 = simulate_kspace(p1, sens)
    d2 = simulate_kspace(p2, sens)
    a, b = rng.standard_normal(2)
    np.testing.assert_allclose(
        simulate_kspace(a * p1 + b * p2, sens), a * d1 + b * d2, atol=1e-12
    )
    img = (
        p1[:, :, None, None]
        * sens.rx_maps[:, :, :, None]
        * sens.tx_maps[:, :, None, :]
    )
    assert np.isclose(np.linalg.norm(d1), np.linalg.norm(img))


def test_simulate_kspace_constant_everything_is_delta():
    phantom = np.ones((16, 16))
    phantom[0, 0] = 1.0
    sens = generate_sensitivities((16, 16), 2, 2, 1, seed=0, envelope=False)
    d = simulate_kspace(np.ones((16, 16)), sens)
    off = d.copy()
    off[8, 8] = 0
    assert np.abs(off).max() < 1e-10 * np.abs(d[8, 8, 0, 0])


def test_simulate_kspace_shape_mismatch():
    sens = generate_sensitivities((24, 24), 2, 2, 2, seed=0)
    with pytest.raises(ValueError):
        simulate_kspace(np.ones((16, 16)), sens)


def test_crop_kspace_index_arithmetic():
    rng = np.random.default_rng(5)
    d = rng.standard_normal((48, 48, 2, 2)) + 0j
    np.testing.assert_array_equal(crop_kspace(d, (24, 24)), d[12:36, 12:36])
    np.testing.assert_array_equal(crop_kspace(d, (48, 48)), d)
    # odd crop of odd grid keeps the same center index
    e = rng.standard_normal((9, 9, 1, 1)) + 0j
    np.testing.assert_array_equal(crop_kspace(e, (5, 5)), e[2:7, 2:7])


def test_crop_kspace_keeps_dc_and_validates():
    d = dft2_centered(np.ones((32, 32)))[:, :, None, None]
    c = crop_kspace(d, (16, 16))
    assert np.argmax(np.abs(c)) == np.ravel_multi_index((8, 8, 0, 0), c.shape)
    with pytest.raises(ValueError):
        crop_kspace(d, (64, 16))
