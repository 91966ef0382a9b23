"""Block-Hankel lifting of multi-channel k-space and its tensor unfoldings.

The central object is a complex 4-D k-space tensor ``d`` indexed
``(kx, ky, rx, tx)``.  Sliding an ``m x n`` kernel over the ``(kx, ky)``
plane of every receive/transmit pair lifts ``d`` to a 4-D tensor ``h`` of
shape ``(N1, N2, NRx, NTx)`` whose frontal slices are block-Hankel matrices,
with ``N1 = m * n`` and ``N2 = (Nkx - m + 1) * (Nky - n + 1)``.

Ordering conventions (fixed so that files and spectra are reproducible):

* kernel positions are raster-scanned with kx varying fastest;
* within a patch, elements are vectorized with kx varying fastest;
* in stacked unfoldings the lower-numbered axis varies fastest.

The three unfoldings turn ``h`` into the matrices used by the solver:

* ``unfold_vc``: every (rx, tx) pair stacked vertically, ``(N1*NRx*NTx, N2)``;
* ``unfold_rx``: rx vertical, tx horizontal, ``(N1*NRx, N2*NTx)``;
* ``unfold_tx``: tx vertical, rx horizontal, ``(N1*NTx, N2*NRx)``.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._accel import NUMBA_ENABLED, njit

__all__ = [
    "hankel_transform",
    "hankel_adjoint",
    "hankel_pinv",
    "multiplicity",
    "unfold_vc",
    "unfold_rx",
    "unfold_tx",
    "refold_vc",
    "refold_rx",
    "refold_tx",
    "swap_rx_tx",
    "hankel_shape",
]


def _check_kernel(dims, kernel):
    nkx, nky = int(dims[0]), int(dims[1])
    m, n = int(kernel[0]), int(kernel[1])
    if m < 1 or n < 1:
        raise ValueError(f"kernel extents must be >= 1, got {(m, n)}")
    if m > nkx or n > nky:
        raise ValueError(
            f"kernel {(m, n)} does not fit inside k-space extent {(nkx, nky)}"
        )
    return nkx, nky, m, n


def hankel_shape(dims, kernel):
    """(N1, N2) of the lifted tensor for a k-space extent and kernel."""
    nkx, nky, m, n = _check_kernel(dims, kernel)
    return m * n, (nkx - m + 1) * (nky - n + 1)


def _forward_windows(d, m, n):
    # numpy path: one strided window view + axis permutation
    w = sliding_window_view(d, (m, n), axis=(0, 1))  # (I, J, rx, tx, m, n)
    i, j = w.shape[0], w.shape[1]
    return np.ascontiguousarray(w.transpose(5, 4, 1, 0, 2, 3)).reshape(
        m * n, i * j, d.shape[2], d.shape[3]
    )


@njit(cache=True)
def _forward_loops(d, m, n, out):  # pragma: no cover - exercised via dispatch
    nkx, nky, nrx, ntx = d.shape
    ni = nkx - m + 1
    nj = nky - n + 1
    for j in range(nj):
        for i in range(ni):
            col = j * ni + i
            for q in range(n):
                for p in range(m):
                    row = q * m + p
                    for r in range(nrx):
                        for t in range(ntx):
                            out[row, col, r, t] = d[i + p, j + q, r, t]


def hankel_transform(d, kernel):
    """Lift a k-space tensor to its block-Hankel tensor.

    Parameters
    ----------
    d : complex ndarray, shape (Nkx, Nky, NRx, NTx)
    kernel : (m, n)

    Returns
    -------
    complex ndarray, shape (N1, N2, NRx, NTx)
    """
    d = np.asarray(d)
    if d.ndim != 4:
        raise ValueError(f"expected a 4-D (kx, ky, rx, tx) tensor, got ndim={d.ndim}")
    nkx, nky, m, n = _check_kernel(d.shape[:2], kernel)
    if NUMBA_ENABLED:
        dd = np.ascontiguousarray(d, dtype=np.complex128)
        out = np.empty(
            (m * n, (nkx - m + 1) * (nky - n + 1), d.shape[2], d.shape[3]),
            dtype=np.complex128,
        )
        _forward_loops(dd, m, n, out)
        return out
    return _forward_windows(d.astype(np.complex128, copy=False), m, n)


def _adjoint_slices(h, dims, m, n):
    nkx, nky = dims
    ni = nkx - m + 1
    nj = nky - n + 1
    nrx, ntx = h.shape[2], h.shape[3]
    hv = h.reshape(n, m, nj, ni, nrx, ntx)
    out = np.zeros((nkx, nky, nrx, ntx), dtype=np.complex128)
    for q in range(n):
        for p in range(m):
            out[p : p + ni, q : q + nj] += hv[q, p].transpose(1, 0, 2, 3)
    return out


@njit(cache=True)
def _adjoint_loops(h, m, n, out):  # pragma: no cover - exercised via dispatch
    nkx, nky, nrx, ntx = out.shape
    ni = nkx - m + 1
    nj = nky - n + 1
    for j in range(nj):
        for i in range(ni):
            col = j * ni + i
            for q in range(n):
                for p in range(m):
                    row = q * m + p
                    for r in range(nrx):
                        for t in range(ntx):
                            out[i + p, j + q, r, t] += h[row, col, r, t]


def _check_hankel_dims(h, dims, kernel):
    h = np.asarray(h)
    if h.ndim != 4:
        raise ValueError(f"expected a 4-D Hankel tensor, got ndim={h.ndim}")
    nkx, nky, m, n = _check_kernel(dims, kernel)
    n1, n2 = hankel_shape((nkx, nky), (m, n))
    if h.shape[0] != n1 or h.shape[1] != n2:
        raise ValueError(
            f"Hankel tensor shape {h.shape[:2]} inconsistent with "
            f"dims {(nkx, nky)} and kernel {(m, n)}: expected {(n1, n2)}"
        )
    return h, nkx, nky, m, n


def hankel_adjoint(h, dims, kernel):
    """Adjoint of :func:`hankel_transform`: overlapping entries sum in place."""
    h, nkx, nky, m, n = _check_hankel_dims(h, dims, kernel)
    if NUMBA_ENABLED:
        hh = np.ascontiguousarray(h, dtype=np.complex128)
        out = np.zeros((nkx, nky, h.shape[2], h.shape[3]), dtype=np.complex128)
        _adjoint_loops(hh, m, n, out)
        return out
    return _adjoint_slices(h.astype(np.complex128, copy=False), (nkx, nky), m, n)


def hankel_pinv(h, dims, kernel):
    """Pseudo-inverse of the lifting: overlapping entries are averaged.

    Left-inverts :func:`hankel_transform` exactly (up to rounding).
    """
    out = hankel_adjoint(h, dims, kernel)
    counts = multiplicity(dims, kernel)
    return out / counts[:, :, None, None]


def multiplicity(dims, kernel):
    """Per-location count of kernel placements covering each k-space point.

    Equals the diagonal of T*T; every entry is in [1, m*n].
    """
    nkx, nky, m, n = _check_kernel(dims, kernel)
    ix = np.arange(nkx)
    iy = np.arange(nky)
    cx = np.minimum(ix, nkx - m) - np.maximum(0, ix - m + 1) + 1
    cy = np.minimum(iy, nky - n) - np.maximum(0, iy - n + 1) + 1
    return np.outer(cx, cy)


def unfold_vc(h):
    """Stack every (rx, tx) frontal slice vertically: (N1*NRx*NTx, N2)."""
    h = np.asarray(h)
    n1, n2, nrx, ntx = h.shape
    return np.ascontiguousarray(h.transpose(3, 2, 0, 1)).reshape(n1 * nrx * ntx, n2)


def unfold_rx(h):
    """Receive channels vertical, transmit channels horizontal: (N1*NRx, N2*NTx)."""
    h = np.asarray(h)
    n1, n2, nrx, ntx = h.shape
    return np.ascontiguousarray(h.transpose(2, 0, 3, 1)).reshape(n1 * nrx, n2 * ntx)


def unfold_tx(h):
    """Transmit channels vertical, receive channels horizontal: (N1*NTx, N2*NRx)."""
    h = np.asarray(h)
    n1, n2, nrx, ntx = h.shape
    return np.ascontiguousarray(h.transpose(3, 0, 2, 1)).reshape(n1 * ntx, n2 * nrx)


def _check_refold(mat, shape, rows, cols):
    mat = np.asarray(mat)
    if mat.shape != (rows, cols):
        raise ValueError(
            f"matrix shape {mat.shape} inconsistent with tensor shape {tuple(shape)}: "
            f"expected {(rows, cols)}"
        )
    return mat


def refold_vc(mat, shape):
    """Inverse of :func:`unfold_vc` for a Hankel tensor of the given shape."""
    n1, n2, nrx, ntx = shape
    mat = _check_refold(mat, shape, n1 * nrx * ntx, n2)
    return np.ascontiguousarray(mat.reshape(ntx, nrx, n1, n2).transpose(2, 3, 1, 0))


def refold_rx(mat, shape):
    """Inverse of :func:`unfold_rx`."""
    n1, n2, nrx, ntx = shape
    mat = _check_refold(mat, shape, n1 * nrx, n2 * ntx)
    return np.ascontiguousarray(mat.reshape(nrx, n1, ntx, n2).transpose(1, 3, 0, 2))


def refold_tx(mat, shape):
    """Inverse of :func:`unfold_tx`."""
    n1, n2, nrx, ntx = shape
    mat = _check_refold(mat, shape, n1 * ntx, n2 * nrx)
    return np.ascontiguousarray(mat.reshape(ntx, n1, nrx, n2).transpose(1, 3, 2, 0))


def swap_rx_tx(h):
    """Swap the receive and transmit axes of a 4-D tensor."""
    return np.ascontiguousarray(np.asarray(h).transpose(0, 1, 3, 2))
