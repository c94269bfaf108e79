# -*- coding: utf-8 -*-
"""Msgpack codec for numpy arrays.

Arrays are packed as ``{__ndarray__, dtype, shape, data}`` with ``data`` the
C-order (row-major) bytes, so a container of named arrays is self-describing
and repacks byte-identically after a load.
"""

import functools

import msgpack
import numpy as np


def pack_array(obj):
    """Pack numpy array."""
    if isinstance(obj, (np.ndarray, np.generic)) and obj.dtype.kind in ("V", "O", "c"):
        raise ValueError(f"Unsupported dtype: {obj.dtype}")

    if isinstance(obj, np.ndarray):
        return {
            b"__ndarray__": True,
            b"data": np.ascontiguousarray(obj).tobytes(),
            b"dtype": obj.dtype.str,
            b"shape": list(obj.shape),
        }

    if isinstance(obj, np.generic):
        return {
            b"__npgeneric__": True,
            b"data": obj.item(),
            b"dtype": obj.dtype.str,
        }

    return obj


def unpack_array(obj):
    """Unpack numpy array."""
    if b"__ndarray__" in obj:
        # copy: frombuffer views are read-only
        return np.frombuffer(obj[b"data"], dtype=np.dtype(obj[b"dtype"])).reshape(
            obj[b"shape"]
        ).copy()

    if b"__npgeneric__" in obj:
        return np.dtype(obj[b"dtype"]).type(obj[b"data"])

    return obj


packb = functools.partial(msgpack.packb, default=pack_array)

unpackb = functools.partial(msgpack.unpackb, object_hook=unpack_array)
