"""GF(2) linear algebra on bit-packed rows.

Rows are packed little-endian into uint64 words so that a row operation is a
single vectorised XOR; column ``j`` lives in word ``j // 64``, bit ``j % 64``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def pack(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-d 0/1 array into an (rows, words) uint64 array."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8) & 1)
    rows, cols = bits.shape
    words = max(1, -(-cols // 64))
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False).reshape(rows, words)


def unpack(packed: np.ndarray, cols: int) -> np.ndarray:
    packed = np.atleast_2d(np.ascontiguousarray(packed, dtype=np.uint64))
    as_bytes = packed.astype("<u8", copy=False).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


def _column(packed: np.ndarray, col: int) -> np.ndarray:
    word, bit = divmod(col, 64)
    return (packed[:, word] >> np.uint64(bit)) & np.uint64(1)


@dataclass(frozen=True)
class Echelon:
    """Reduced row-echelon form of a binary matrix.

    ``rows`` holds the ``rank`` nonzero reduced rows (packed) and ``pivots``
    their pivot columns, in increasing order.
    """

    rows: np.ndarray
    pivots: np.ndarray
    cols: int

    @property
    def rank(self) -> int:
        return int(self.pivots.size)

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """Reduce packed vectors modulo the row space (returns a new array)."""
        out = np.atleast_2d(np.array(vectors, dtype=np.uint64, copy=True))
        for i, col in enumerate(self.pivots):
            hits = _column(out, int(col)).astype(bool)
            if hits.any():
                out[hits] ^= self.rows[i]
        return out

    def contains(self, bits: np.ndarray) -> np.ndarray:
        """Row-space membership for each row of a 0/1 array."""
        reduced = self.reduce(pack(bits))
        return ~reduced.any(axis=1)


def echelon(bits: np.ndarray) -> Echelon:
    """Gauss-Jordan elimination over GF(2)."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    n_rows, cols = bits.shape
    work = pack(bits) if n_rows else np.zeros((0, max(1, -(-cols // 64))), dtype=np.uint64)
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == n_rows:
            break
        below = np.flatnonzero(_column(work[row:], col))
        if below.size == 0:
            continue
        p = row + int(below[0])
        if p != row:
            work[[row, p]] = work[[p, row]]
        hits = np.flatnonzero(_column(work, col))
        hits = hits[hits != row]
        if hits.size:
            work[hits] ^= work[row]
        pivots.append(col)
        row += 1
    return Echelon(rows=work[:row].copy(), pivots=np.array(pivots, dtype=np.int64), cols=cols)


def rank(bits: np.ndarray) -> int:
    return echelon(bits).rank


def nullspace(bits: np.ndarray) -> np.ndarray:
    """Basis (as rows of a 0/1 array) of {v : bits @ v = 0 mod 2}."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    cols = bits.shape[1]
    ech = echelon(bits)
    free = np.setdiff1d(np.arange(cols), ech.pivots)
    basis = np.zeros((free.size, cols), dtype=np.uint8)
    basis[np.arange(free.size), free] = 1
    if ech.rank:
        reduced = unpack(ech.rows, cols)
        basis[:, ech.pivots] = reduced[:, free].T
    return basis
