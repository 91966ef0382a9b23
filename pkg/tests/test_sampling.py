"""Poisson-disc mask and noise-injection tests."""

import numpy as np
import pytest

from txlr.sampling import (
    EstimationError,
    NoiseModel,
    NoiseSpec,
    SamplingMask,
    add_noise,
    apply_mask,
    estimate_sigma,
    mask_variants_per_tx,
    poisson_disc_mask,
)


def test_full_mask_at_r_one():
    mask = poisson_disc_mask((16, 16), 1.0, seed=0)
    assert mask.bits.all()
    assert mask.R_achieved == 1.0


def test_mask_determinism():
    a = poisson_disc_mask((24, 24), 4.0, seed=42)
    b = poisson_disc_mask((24, 24), 4.0, seed=42)
    np.testing.assert_array_equal(a.bits, b.bits)
    assert a.R_achieved == b.R_achieved and a.radius == b.radius
    c = poisson_disc_mask((24, 24), 4.0, seed=43)
    assert (a.bits != c.bits).any()


@pytest.mark.parametrize("dims", [(24, 24), (48, 48)])
@pytest.mark.parametrize("R", [2.0, 4.0, 6.0, 8.0, 12.0])
def test_achieved_acceleration_within_tolerance(dims, R):
    mask = poisson_disc_mask(dims, R, seed=1)
    assert abs(mask.R_achieved - R) / R <= 0.05
    assert np.isclose(mask.R_achieved, mask.bits.size / mask.bits.sum())


def test_min_pairwise_distance():
    mask = poisson_disc_mask((32, 32), 6.0, seed=3)
    pts = np.argwhere(mask.bits).astype(float)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    np.fill_diagonal(dist, np.inf)
    assert dist.min() >= mask.radius - 1e-12
    assert mask.radius > 1.0  # genuinely spread out, not i.i.d. uniform


def test_dc_inclusion_flag():
    with_dc = poisson_disc_mask((24, 24), 8.0, seed=5, include_dc=True)
    assert with_dc.bits[12, 12]
    # without the DC force the center is sampled only by chance
    masks = [
        poisson_disc_mask((24, 24), 8.0, seed=s, include_dc=False)
        for s in range(20)
    ]
    assert not all(m.bits[12, 12] for m in masks)


def test_unreachable_acceleration_raises():
    with pytest.raises(ValueError):
        poisson_disc_mask((16, 16), 0.5, seed=0)
    with pytest.raises(ValueError):
        poisson_disc_mask((16, 16), 1e6, seed=0)


def test_per_tx_variants_distinct_and_3d():
    mask = mask_variants_per_tx((24, 24), 4.0, 4, seed=9)
    assert mask.bits.shape == (24, 24, 4)
    for a in range(4):
        for b in range(a + 1, 4):
            assert (mask.bits[:, :, a] != mask.bits[:, :, b]).any()
    assert abs(mask.R_achieved - 4.0) / 4.0 <= 0.05


def test_per_tx_union_covers_more_than_one_pattern():
    mask = mask_variants_per_tx((24, 24), 8.0, 8, seed=2)
    union = mask.bits.any(axis=2)
    single = mask.bits[:, :, 0]
    assert union.sum() > 3 * single.sum()


def test_shared_variant_repeats_one_pattern():
    mask = mask_variants_per_tx((24, 24), 4.0, 3, seed=11, shared=True)
    np.testing.assert_array_equal(mask.bits[:, :, 0], mask.bits[:, :, 1])
    np.testing.assert_array_equal(mask.bits[:, :, 0], mask.bits[:, :, 2])


def test_empty_mask_rejected():
    with pytest.raises(ValueError):
        SamplingMask(
            bits=np.zeros((4, 4), dtype=bool), R_target=4, R_achieved=4, seed=0
        )


def test_apply_mask_exact_passthrough_and_energy():
    rng = np.random.default_rng(0)
    d = rng.standard_normal((24, 24, 2, 3)) + 1j * rng.standard_normal((24, 24, 2, 3))
    mask = mask_variants_per_tx((24, 24), 4.0, 3, seed=0)
    kept = apply_mask(d, mask)
    bits = mask.bits[:, :, None, :]
    np.testing.assert_array_equal(kept[np.broadcast_to(bits, d.shape)],
                                  d[np.broadcast_to(bits, d.shape)])
    assert not kept[~np.broadcast_to(bits, d.shape)].any()
    # energies satisfy ||d||^2 = ||kept||^2 + ||dropped||^2
    dropped = d - kept
    assert np.isclose(
        np.linalg.norm(d) ** 2,
        np.linalg.norm(kept) ** 2 + np.linalg.norm(dropped) ** 2,
    )


def test_apply_mask_shape_mismatch():
    d = np.zeros((8, 8, 2, 2), dtype=complex)
    with pytest.raises(ValueError):
        apply_mask(d, np.ones((9, 8), dtype=bool))


def test_add_noise_sigma_formula():
    d = np.zeros((8, 8, 3, 2), dtype=complex)
    d[4, 4, 0, 0] = 10.0
    noisy, model = add_noise(d, NoiseSpec(psnr_db=40.0, seed=0))
    expected = 10.0 / 10 ** (40.0 / 20)
    np.testing.assert_allclose(model.sigma, expected)
    assert noisy.shape == d.shape and model.sigma.shape == (3,)


def test_add_noise_infinite_psnr_is_noiseless():
    d = np.ones((8, 8, 2, 2), dtype=complex)
    noisy, model = add_noise(d, NoiseSpec(psnr_db=np.inf, seed=0))
    np.testing.assert_array_equal(noisy, d)
    assert model is None


def test_add_noise_statistics():
    d = np.ones((64, 64, 2, 2), dtype=complex)
    noisy, model = add_noise(d, NoiseSpec(psnr_db=20.0, seed=7))
    noise = noisy - d
    measured = np.sqrt(np.mean(np.abs(noise) ** 2))
    assert abs(measured - model.sigma[0]) / model.sigma[0] < 0.02
    n = noise.size
    assert abs(noise.mean()) < 4 * model.sigma[0] / np.sqrt(n)
    # real and imaginary parts carry equal halves of the variance
    assert abs(noise.real.var() - noise.imag.var()) < 0.1 * noise.real.var()


def test_add_noise_determinism_and_zero_input():
    d = np.ones((8, 8, 1, 1), dtype=complex)
    a, _ = add_noise(d, NoiseSpec(psnr_db=30.0, seed=5))
    b, _ = add_noise(d, NoiseSpec(psnr_db=30.0, seed=5))
    np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError):
        add_noise(np.zeros((8, 8, 1, 1), dtype=complex), NoiseSpec(psnr_db=30.0))


def test_estimate_sigma_accuracy():
    rng = np.random.default_rng(0)
    true = np.array([0.5, 2.0])
    samples = (
        rng.standard_normal((2, 10000)) + 1j * rng.standard_normal((2, 10000))
    ) * (true[:, None] / np.sqrt(2))
    model = estimate_sigma(samples)
    np.testing.assert_allclose(model.sigma, true, rtol=0.05)


def test_estimate_sigma_rejects_bad_input():
    with pytest.raises(EstimationError):
        estimate_sigma(np.zeros((2, 50), dtype=complex))
    with pytest.raises(EstimationError):
        estimate_sigma(np.ones((1, 200), dtype=complex))


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(sigma=np.array([0.1, 0.0]))
