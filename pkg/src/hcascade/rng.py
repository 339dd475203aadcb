"""Deterministic, addressable random streams.

Every random draw in the package comes from a Philox counter-based
generator whose 128-bit key is a hash of a key tuple such as
``(seed, "glue", generation, block)``.  Identical key tuples give
bit-identical output arrays, independent of which worker (or how many
workers) evaluates them.  Coupled comparisons (common random numbers)
are realized by simply reusing a key tuple.

Long sample arrays are produced in fixed-size blocks, one sub-stream per
block, so a partially parallel evaluation of one array is still
bit-identical to the serial one.
"""

from __future__ import annotations

import hashlib

import numpy as np

#: block length for per-block sub-streams inside a single logical array
BLOCK = 1 << 16

Key = tuple


def _encode(part) -> bytes:
    if isinstance(part, (tuple, list)):
        return b"(" + b",".join(_encode(p) for p in part) + b")"
    if isinstance(part, (int, np.integer)):
        return b"i" + str(int(part)).encode()
    if isinstance(part, str):
        return b"s" + part.encode()
    if isinstance(part, (float, np.floating)):
        return b"f" + repr(float(part)).encode()
    if isinstance(part, bytes):
        return b"b" + part
    raise TypeError(f"unsupported key component {part!r}")


def derive(*parts) -> int:
    """Hash a key tuple to a 128-bit integer Philox key."""
    h = hashlib.blake2b(_encode(parts), digest_size=16)
    return int.from_bytes(h.digest(), "little")


def generator(*parts) -> np.random.Generator:
    """Generator for the stream addressed by the given key tuple."""
    return np.random.Generator(np.random.Philox(key=derive(*parts)))


def blocked(n: int, draw, *parts) -> np.ndarray:
    """Assemble an n-vector from fixed BLOCK-sized keyed sub-streams.

    ``draw(gen, m)`` must return m values from the generator.  Block j of
    the result only depends on the key tuple extended by j, so the split
    into blocks (not the scheduling) defines the output.
    """
    out = None
    for j in range((n + BLOCK - 1) // BLOCK):
        lo, hi = j * BLOCK, min((j + 1) * BLOCK, n)
        vals = draw(generator(*parts, j), hi - lo)
        if out is None:
            out = np.empty((n,) + np.shape(vals)[1:], dtype=np.asarray(vals).dtype)
        out[lo:hi] = vals
    if out is None:
        out = np.empty(0)
    return out
