"""Synthetic ground truth: phantoms, smooth coil sensitivities, centered DFTs.

Everything here is seed-deterministic and pure, so multi-slice datasets can
be generated independently per slice.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SensitivitySet",
    "generate_phantom",
    "generate_sensitivities",
    "simulate_kspace",
    "dft2_centered",
    "idft2_centered",
    "crop_kspace",
]


@dataclass(frozen=True)
class SensitivitySet:
    """Complex transmit and receive sensitivity maps over the field of view.

    ``tx_maps`` has shape (Nx, Ny, NTx), ``rx_maps`` (Nx, Ny, NRx).  ``order``
    is the per-axis harmonic budget each map was built from: every map is a
    sum of spatial harmonics with integer frequencies in
    ``[-(order-1), order-1]``, optionally times a raised-cosine envelope
    (which adds one more harmonic per axis).
    """

    tx_maps: np.ndarray
    rx_maps: np.ndarray
    order: int


def dft2_centered(a):
    """Orthonormal 2-D DFT over the first two axes with DC at ``N // 2``."""
    a = np.asarray(a)
    return np.fft.fftshift(
        np.fft.fft2(np.fft.ifftshift(a, axes=(0, 1)), axes=(0, 1), norm="ortho"),
        axes=(0, 1),
    )


def idft2_centered(a):
    """Inverse of :func:`dft2_centered`."""
    a = np.asarray(a)
    return np.fft.fftshift(
        np.fft.ifft2(np.fft.ifftshift(a, axes=(0, 1)), axes=(0, 1), norm="ortho"),
        axes=(0, 1),
    )


def _grid(dims):
    nx, ny = dims
    # normalized coordinates with 0 at the centering index floor(N/2)
    x = (np.arange(nx) - nx // 2) / nx
    y = (np.arange(ny) - ny // 2) / ny
    return np.meshgrid(x, y, indexing="ij")


def _ellipse(xx, yy, cx, cy, a, b, theta):
    ct, st = np.cos(theta), np.sin(theta)
    u = (xx - cx) * ct + (yy - cy) * st
    v = -(xx - cx) * st + (yy - cy) * ct
    return (u / a) ** 2 + (v / b) ** 2 <= 1.0


def generate_phantom(dims, kind="body_ellipses", seed=0):
    """Non-negative piecewise-smooth image with support inside the FOV.

    kind:
      * ``disc``: uniform disc of radius 0.4 FOV (analytic support),
      * ``shepp_like``: a fixed nest of ellipses,
      * ``body_ellipses``: seeded random torso-like ellipse arrangement with
        support fraction between 30% and 70% of the FOV.
    """
    nx, ny = int(dims[0]), int(dims[1])
    if nx < 16 or ny < 16:
        raise ValueError(f"phantom dims must be at least 16x16, got {(nx, ny)}")
    xx, yy = _grid((nx, ny))
    img = np.zeros((nx, ny), dtype=np.float64)

    if kind == "disc":
        img[xx**2 + yy**2 <= 0.4**2] = 1.0
    elif kind == "shepp_like":
        img[_ellipse(xx, yy, 0.0, 0.0, 0.42, 0.34, 0.0)] = 1.0
        img[_ellipse(xx, yy, 0.0, 0.0, 0.38, 0.30, 0.0)] = 0.4
        img[_ellipse(xx, yy, -0.08, 0.10, 0.10, 0.06, 0.5)] += 0.3
        img[_ellipse(xx, yy, 0.10, -0.08, 0.08, 0.12, -0.4)] += 0.25
        img[_ellipse(xx, yy, 0.16, 0.12, 0.05, 0.05, 0.0)] -= 0.2
        img = np.clip(img, 0.0, None)
    elif kind == "body_ellipses":
        rng = np.random.default_rng(seed)
        # torso outline sized so the support fraction lands in [0.3, 0.7]
        a = rng.uniform(0.36, 0.44)
        b = rng.uniform(0.30, 0.40)
        theta = rng.uniform(-0.15, 0.15)
        body = _ellipse(xx, yy, 0.0, 0.0, a, b, theta)
        img[body] = 0.8
        for _ in range(rng.integers(3, 7)):
            ca = rng.uniform(-0.15, 0.15)
            cb = rng.uniform(-0.12, 0.12)
            ea = rng.uniform(0.04, 0.14)
            eb = rng.uniform(0.04, 0.14)
            val = rng.uniform(-0.4, 0.6)
            img[_ellipse(xx, yy, ca, cb, ea, eb, rng.uniform(0, np.pi)) & body] += val
        img = np.clip(img, 0.0, None)
    else:
        raise ValueError(f"unknown phantom kind {kind!r}")
    return img


def generate_sensitivities(dims, nrx, ntx, order, seed=0, envelope=True):
    """Random band-limited complex coil maps, linearly independent by channel.

    Each map is a sum of spatial harmonics with per-axis integer frequencies
    in ``[-(order-1), order-1]``, drawn with independent complex Gaussian
    coefficients per channel so the channels stay mutually weakly correlated
    (the diversity that makes joint completion work).  ``order=1`` with the
    envelope disabled gives spatially constant maps.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    nx, ny = int(dims[0]), int(dims[1])
    rng = np.random.default_rng(seed)
    xx, yy = _grid((nx, ny))

    freqs = np.arange(-(order - 1), order)
    basis = np.stack(
        [
            np.exp(2j * np.pi * (fx * xx + fy * yy))
            for fx in freqs
            for fy in freqs
        ],
        axis=-1,
    )  # (nx, ny, nf); integer-frequency harmonics, periodic over the FOV

    def _draw(nch):
        nf = basis.shape[-1]
        decay = np.array(
            [0.9 ** (abs(fx) + abs(fy)) for fx in freqs for fy in freqs]
        )
        coeffs = (rng.standard_normal((nf, nch)) + 1j * rng.standard_normal((nf, nch)))
        coeffs *= decay[:, None]
        maps = basis @ coeffs  # (nx, ny, nch)
        # unit RMS per channel so products with the phantom keep its scale
        rms = np.sqrt(np.mean(np.abs(maps) ** 2, axis=(0, 1)))
        maps = maps / rms[None, None, :]
        if envelope:
            env = (0.6 + 0.4 * np.cos(2 * np.pi * xx)) * (
                0.6 + 0.4 * np.cos(2 * np.pi * yy)
            )
            maps = maps * env[:, :, None]
        return maps

    return SensitivitySet(tx_maps=_draw(ntx), rx_maps=_draw(nrx), order=order)


def simulate_kspace(phantom, sens):
    """Modulate the phantom by every Tx/Rx map pair and Fourier transform.

    Returns a complex tensor ``D[kx, ky, rx, tx]``; linear in the phantom,
    and Parseval-exact under the orthonormal DFT convention.
    """
    phantom = np.asarray(phantom, dtype=np.float64)
    if phantom.shape != sens.rx_maps.shape[:2] or phantom.shape != sens.tx_maps.shape[:2]:
        raise ValueError(
            f"phantom shape {phantom.shape} does not match sensitivity grids "
            f"{sens.rx_maps.shape[:2]} / {sens.tx_maps.shape[:2]}"
        )
    img = (
        phantom[:, :, None, None]
        * sens.rx_maps[:, :, :, None]
        * sens.tx_maps[:, :, None, :]
    )
    return dft2_centered(img)


def crop_kspace(d, size):
    """Retain the central ``size`` region of k-space (center index N // 2)."""
    d = np.asarray(d)
    cx, cy = int(size[0]), int(size[1])
    nkx, nky = d.shape[0], d.shape[1]
    if cx > nkx or cy > nky:
        raise ValueError(f"crop {size} larger than k-space extent {(nkx, nky)}")
    sx = nkx // 2 - cx // 2
    sy = nky // 2 - cy // 2
    return d[sx : sx + cx, sy : sy + cy].copy()
