"""Error metrics, singular spectra, and relative transmit-map estimation."""

from dataclasses import dataclass

import numpy as np

from .hankel import hankel_transform, unfold_rx, unfold_tx, unfold_vc
from .phantom import idft2_centered

__all__ = [
    "SingularSpectrum",
    "RelativeTxMaps",
    "rmse",
    "singular_spectrum",
    "random_spectrum",
    "relative_tx_maps",
    "map_rmse",
]

_UNFOLD_BY_LABEL = {"vc": unfold_vc, "rc": unfold_rx, "tc": unfold_tx}


@dataclass(frozen=True)
class SingularSpectrum:
    """Descending singular values of one unfolding, with its provenance."""

    values: np.ndarray
    label: str  # "vc" | "rc" | "tc"
    shape: tuple


@dataclass(frozen=True)
class RelativeTxMaps:
    """Unit-normalized relative transmit maps with a validity support mask.

    ``maps`` is complex (Nx, Ny, NTx); entries off ``support`` are zeroed.
    """

    maps: np.ndarray
    support: np.ndarray


def rmse(z_hat, z_true):
    """Normalized root-mean-square error ||z_hat - z_true|| / ||z_true||."""
    z_hat = np.asarray(z_hat)
    z_true = np.asarray(z_true)
    if z_hat.shape != z_true.shape:
        raise ValueError(f"shape mismatch: {z_hat.shape} vs {z_true.shape}")
    denom = np.linalg.norm(z_true)
    if denom == 0:
        raise ValueError("RMSE undefined for an all-zero reference")
    return float(np.linalg.norm(z_hat - z_true) / denom)


def singular_spectrum(d, kernel, unfolding):
    """Singular values of the chosen unfolding of the lifted tensor.

    ``unfolding`` is one of ``"vc"``, ``"rc"`` (receive-vertical) or ``"tc"``
    (transmit-vertical).
    """
    label = unfolding.lower()
    if label not in _UNFOLD_BY_LABEL:
        raise ValueError(f"unknown unfolding {unfolding!r}")
    mat = _UNFOLD_BY_LABEL[label](hankel_transform(d, kernel))
    values = np.linalg.svd(mat, compute_uv=False)
    return SingularSpectrum(values=values, label=label, shape=mat.shape)


def random_spectrum(dims, channels, kernel, unfolding, seed=0):
    """Spectrum of an i.i.d. complex Gaussian tensor of the same geometry.

    Serves as the slowly-decaying baseline against which measured spectra
    show their low-rank gap.
    """
    nrx, ntx = channels
    rng = np.random.default_rng(seed)
    shape = (dims[0], dims[1], nrx, ntx)
    d = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return singular_spectrum(d, kernel, unfolding)


def relative_tx_maps(z, threshold=0.1):
    """Relative transmit maps from a completed k-space tensor.

    Per pixel the receive channels are combined against a reference formed
    by summing all transmit modes, and the resulting per-mode signals are
    normalized to unit root-sum-of-squares.  Pixels whose combined magnitude
    falls below ``threshold`` times its maximum are masked out.
    """
    x = idft2_centered(np.asarray(z, dtype=np.complex128))  # (Nx, Ny, NRx, NTx)
    ref = x.sum(axis=3)  # (Nx, Ny, NRx)
    s = np.einsum("xyrt,xyr->xyt", x, ref.conj())
    rss = np.sqrt(np.sum(np.abs(s) ** 2, axis=2))
    support = rss >= threshold * rss.max()
    maps = np.where(support[:, :, None], s / np.where(rss == 0, 1, rss)[:, :, None], 0)
    return RelativeTxMaps(maps=maps, support=support)


def map_rmse(m_hat, m_true):
    """Complex RMSE between relative maps, restricted to the shared support."""
    support = m_hat.support & m_true.support
    if not support.any():
        raise ValueError("empty shared support")
    diff = (m_hat.maps - m_true.maps)[support]
    denom = np.linalg.norm(m_true.maps[support])
    if denom == 0:
        raise ValueError("reference maps vanish on the shared support")
    return float(np.linalg.norm(diff) / denom)
