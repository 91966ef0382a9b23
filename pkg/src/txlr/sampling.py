"""Poisson-disc undersampling masks and PSNR-calibrated noise injection."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import NUMBA_ENABLED, njit

__all__ = [
    "SamplingMask",
    "NoiseSpec",
    "NoiseModel",
    "EstimationError",
    "poisson_disc_mask",
    "mask_variants_per_tx",
    "apply_mask",
    "add_noise",
    "estimate_sigma",
]

#: achieved acceleration must be within this fraction of the target
R_TOLERANCE = 0.05


@dataclass(frozen=True)
class SamplingMask:
    """Binary sampling pattern over (kx, ky), optionally per transmit mode.

    ``bits`` is boolean, shape (Nkx, Nky) or (Nkx, Nky, NTx).  ``radius`` is
    the tuned minimum pairwise distance of the sampled locations (per
    pattern).
    """

    bits: np.ndarray
    R_target: float
    R_achieved: float
    seed: int
    radius: float = 0.0

    def __post_init__(self):
        if not self.bits.any():
            raise ValueError("sampling mask contains no sampled points")


@dataclass(frozen=True)
class NoiseSpec:
    """Peak-SNR noise level in amplitude dB: sigma = max|D| / 10^(psnr/20)."""

    psnr_db: float
    seed: int = 0


@dataclass(frozen=True)
class NoiseModel:
    """Per-receive-channel complex noise standard deviation, length NRx."""

    sigma: np.ndarray = field()

    def __post_init__(self):
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=np.float64))
        if np.any(sigma <= 0):
            raise ValueError("all noise standard deviations must be > 0")
        object.__setattr__(self, "sigma", sigma)


class EstimationError(ValueError):
    """Noise estimation failed (too few samples or degenerate data)."""


@njit(cache=True)
def _dart_throw_loops(xs, ys, nkx, nky, radius, n_target, occ):
    # greedy acceptance over a pre-shuffled candidate order; occupancy grid
    # keeps the neighborhood scan local
    rad2 = radius * radius
    w = int(radius) + 1
    count = 0
    for idx in range(xs.size):
        x = xs[idx]
        y = ys[idx]
        ok = True
        for u in range(max(0, x - w), min(nkx, x + w + 1)):
            for v in range(max(0, y - w), min(nky, y + w + 1)):
                if occ[u, v] and (u - x) ** 2 + (v - y) ** 2 < rad2:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            occ[x, y] = True
            count += 1
            if count == n_target:
                break
    return count


def _dart_throw_python(xs, ys, nkx, nky, radius, n_target, occ):
    rad2 = radius * radius
    w = int(radius) + 1
    count = 0
    for x, y in zip(xs, ys):
        x0, x1 = max(0, x - w), min(nkx, x + w + 1)
        y0, y1 = max(0, y - w), min(nky, y + w + 1)
        window = occ[x0:x1, y0:y1]
        if window.any():
            u, v = np.nonzero(window)
            if np.any((u + x0 - x) ** 2 + (v + y0 - y) ** 2 < rad2):
                continue
        occ[x, y] = True
        count += 1
        if count == n_target:
            break
    return count


def _dart_throw(xs, ys, nkx, nky, radius, n_target):
    occ = np.zeros((nkx, nky), dtype=np.bool_)
    if NUMBA_ENABLED:
        count = _dart_throw_loops(xs, ys, nkx, nky, radius, n_target, occ)
    else:
        count = _dart_throw_python(xs, ys, nkx, nky, radius, n_target, occ)
    return occ, count


def poisson_disc_mask(dims, R, seed=0, include_dc=True):
    """Poisson-disc sampling pattern at acceleration factor ``R``.

    Dart throwing over a seeded random ordering of the grid, accepting points
    that keep a minimum pairwise distance, until ``round(total / R)`` points
    are placed.  The exclusion radius is tuned by bisection to the largest
    value at which that count is still reachable, so the pattern is as
    spread-out as the target density allows.  Deterministic for a fixed seed.

    ``include_dc`` forces the k-space center into the pattern (on by
    default; disable for ablations).
    """
    nkx, nky = int(dims[0]), int(dims[1])
    total = nkx * nky
    if not (1.0 <= R <= total):
        raise ValueError(f"acceleration factor R={R} outside [1, {total}]")
    n_target = max(1, round(total / R))

    rng = np.random.default_rng(seed)
    order = rng.permutation(total)
    xs = (order // nky).astype(np.int64)
    ys = (order % nky).astype(np.int64)
    if include_dc:
        dc = np.flatnonzero((xs == nkx // 2) & (ys == nky // 2))[0]
        xs[[0, dc]] = xs[[dc, 0]]
        ys[[0, dc]] = ys[[dc, 0]]

    lo, hi = 0.0, math.hypot(nkx, nky)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        _, count = _dart_throw(xs, ys, nkx, nky, mid, n_target)
        if count >= n_target:
            lo = mid
        else:
            hi = mid
    occ, count = _dart_throw(xs, ys, nkx, nky, lo, n_target)

    achieved = total / count
    if abs(achieved - R) / R > R_TOLERANCE:
        raise ValueError(
            f"could not reach acceleration R={R}: achieved {achieved:.3f}"
        )
    return SamplingMask(
        bits=occ, R_target=float(R), R_achieved=achieved, seed=int(seed), radius=lo
    )


def mask_variants_per_tx(dims, R, ntx, seed=0, include_dc=True, shared=False):
    """Independent Poisson-disc patterns per transmit mode, as a 3-D mask.

    Per-mode seeds derive deterministically from ``(seed, tx)``.  With
    ``shared=True`` all modes use one identical pattern instead.
    """
    if ntx < 1:
        raise ValueError("ntx must be >= 1")
    if shared:
        base = poisson_disc_mask(dims, R, seed=seed, include_dc=include_dc)
        bits = np.repeat(base.bits[:, :, None], ntx, axis=2)
        return SamplingMask(
            bits=bits,
            R_target=base.R_target,
            R_achieved=base.R_achieved,
            seed=int(seed),
            radius=base.radius,
        )
    masks = []
    for tx in range(ntx):
        sub = int(np.random.SeedSequence([int(seed), tx]).generate_state(1)[0])
        masks.append(poisson_disc_mask(dims, R, seed=sub, include_dc=include_dc))
    bits = np.stack([m.bits for m in masks], axis=2)
    achieved = bits.size / bits.sum()
    return SamplingMask(
        bits=bits,
        R_target=float(R),
        R_achieved=float(achieved),
        seed=int(seed),
        radius=min(m.radius for m in masks),
    )


def _broadcast_bits(bits, shape):
    if bits.ndim == 2:
        if bits.shape != shape[:2]:
            raise ValueError(f"mask shape {bits.shape} does not match data {shape}")
        return bits[:, :, None, None]
    if bits.ndim == 3:
        if bits.shape[:2] != shape[:2] or bits.shape[2] != shape[3]:
            raise ValueError(f"mask shape {bits.shape} does not match data {shape}")
        return bits[:, :, None, :]
    raise ValueError(f"mask must be 2-D or 3-D, got ndim={bits.ndim}")


def apply_mask(d, mask):
    """Zero unsampled entries; sampled entries pass through bit-identically."""
    d = np.asarray(d)
    bits = mask.bits if isinstance(mask, SamplingMask) else np.asarray(mask)
    return np.where(_broadcast_bits(bits, d.shape), d, 0)


def add_noise(d, spec):
    """Add circular complex Gaussian noise at the spec's peak SNR.

    ``sigma`` is the total complex standard deviation (each of real and
    imaginary parts gets ``sigma / sqrt(2)``).  Returns the noisy tensor and
    the realized :class:`NoiseModel` (``None`` at infinite PSNR).
    """
    d = np.asarray(d, dtype=np.complex128)
    peak = np.abs(d).max()
    if peak == 0:
        raise ValueError("cannot scale noise against an all-zero tensor")
    if np.isinf(spec.psnr_db):
        return d.copy(), None
    sigma = peak / 10 ** (spec.psnr_db / 20)
    rng = np.random.default_rng(spec.seed)
    noise = (rng.standard_normal(d.shape) + 1j * rng.standard_normal(d.shape)) * (
        sigma / math.sqrt(2)
    )
    nrx = d.shape[2] if d.ndim == 4 else 1
    return d + noise, NoiseModel(sigma=np.full(nrx, sigma))


def estimate_sigma(noise_samples):
    """Per-channel complex standard deviation from reference noise samples.

    ``noise_samples`` is (NRx, Nsamples) with at least 100 samples per
    channel; channels are estimated independently.
    """
    samples = np.atleast_2d(np.asarray(noise_samples))
    if samples.shape[1] < 100:
        raise EstimationError(
            f"need at least 100 samples per channel, got {samples.shape[1]}"
        )
    centered = samples - samples.mean(axis=1, keepdims=True)
    sigma = np.sqrt(np.mean(np.abs(centered) ** 2, axis=1))
    if np.any(sigma == 0):
        raise EstimationError("constant noise samples give zero standard deviation")
    return NoiseModel(sigma=sigma)
