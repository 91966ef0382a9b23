"""KTEN: a minimal bit-exact container for complex 4-D k-space tensors.

Layout (all multi-byte values little-endian)::

    bytes 0..7    magic "KTEN0001"
    bytes 8..11   header length L (uint32)
    bytes 12..12+L  UTF-8 JSON header:
                    {"dims": [Nkx, Nky, NRx, NTx],
                     "dtype": "c64" | "c128",
                     "order": "kx-fastest",
                     "meta": {...}}
    remainder     payload: interleaved (real, imag) pairs, kx varying
                  fastest, then ky, rx, tx

Write-then-read round trips are bit-exact.
"""

import json
import struct

import numpy as np

__all__ = [
    "KtenError",
    "BadMagicError",
    "UnknownDtypeError",
    "PayloadLengthError",
    "read_kten",
    "write_kten",
]

MAGIC = b"KTEN0001"

_DTYPES = {"c64": np.dtype("<c8"), "c128": np.dtype("<c16")}


class KtenError(ValueError):
    """Malformed KTEN file."""


class BadMagicError(KtenError):
    pass


class UnknownDtypeError(KtenError):
    pass


class PayloadLengthError(KtenError):
    pass


def write_kten(tensor, path, meta=None, dtype="c128"):
    """Write a complex 4-D tensor to ``path``; ``meta`` goes into the header."""
    if dtype not in _DTYPES:
        raise UnknownDtypeError(f"unknown dtype {dtype!r}")
    tensor = np.asarray(tensor)
    if tensor.ndim != 4:
        raise ValueError(f"expected a 4-D tensor, got ndim={tensor.ndim}")
    header = {
        "dims": [int(n) for n in tensor.shape],
        "dtype": dtype,
        "order": "kx-fastest",
        "meta": dict(meta or {}),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    payload = np.asarray(tensor, dtype=_DTYPES[dtype]).ravel(order="F").tobytes()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(payload)


def read_kten(path):
    """Read a KTEN file; returns ``(tensor, meta)``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != MAGIC:
        raise BadMagicError(f"{path}: not a KTEN file (magic {raw[:8]!r})")
    if len(raw) < 12:
        raise PayloadLengthError(f"{path}: truncated header")
    (hlen,) = struct.unpack("<I", raw[8:12])
    if len(raw) < 12 + hlen:
        raise PayloadLengthError(f"{path}: truncated header JSON")
    try:
        header = json.loads(raw[12 : 12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise KtenError(f"{path}: unreadable header: {err}") from err
    dims = header.get("dims")
    dtype = header.get("dtype")
    if dtype not in _DTYPES:
        raise UnknownDtypeError(f"{path}: unknown dtype {dtype!r}")
    if not isinstance(dims, list) or len(dims) != 4:
        raise KtenError(f"{path}: bad dims {dims!r}")
    np_dtype = _DTYPES[dtype]
    expected = int(np.prod(dims)) * np_dtype.itemsize
    payload = raw[12 + hlen :]
    if len(payload) != expected:
        raise PayloadLengthError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    tensor = np.frombuffer(payload, dtype=np_dtype).reshape(dims, order="F")
    return tensor.copy(), header.get("meta", {})
