"""Phase-free N-qubit Pauli operators.

Single-qubit Paulis are stored as small integers ``I=0, X=1, Y=2, Z=3``; that
order is also the tie-breaking order used everywhere else in the package.
Internally products and commutation go through the symplectic (x, z) bits.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from enum import IntEnum

import numpy as np


class Pauli1(IntEnum):
    I = 0
    X = 1
    Y = 2
    Z = 3

    def __str__(self) -> str:
        return self.name


PAULI_CHARS = "IXYZ"

# (x, z) bits per Pauli code
X_BIT = np.array([0, 1, 1, 0], dtype=np.uint8)
Z_BIT = np.array([0, 0, 1, 1], dtype=np.uint8)

# COMMUTE[a, b] = <a, b>: 0 if they commute, 1 if they anticommute
COMMUTE = np.array(
    [
        [0, 0, 0, 0],
        [0, 0, 1, 1],
        [0, 1, 0, 1],
        [0, 1, 1, 0],
    ],
    dtype=np.uint8,
)

# phase-dropped product table
PRODUCT = np.array(
    [
        [0, 1, 2, 3],
        [1, 0, 3, 2],
        [2, 3, 0, 1],
        [3, 2, 1, 0],
    ],
    dtype=np.uint8,
)


def commutes1(a: int, b: int) -> int:
    """Symplectic form of two single-qubit Paulis (0 = commute)."""
    return int(COMMUTE[int(a), int(b)])


def _as_codes(values: Iterable[int] | str) -> np.ndarray:
    if isinstance(values, str):
        try:
            return np.array([PAULI_CHARS.index(c) for c in values.upper()], dtype=np.uint8)
        except ValueError:
            raise ValueError(f"not a Pauli string: {values!r}") from None
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    arr = arr.astype(np.int64, copy=False)
    if arr.ndim != 1 or (arr.size and (arr.min() < 0 or arr.max() > 3)):
        raise ValueError("Pauli codes must be a 1-d sequence over {0, 1, 2, 3}")
    return arr.astype(np.uint8)


class PauliString:
    """Immutable length-N word over {I, X, Y, Z}.

    >>> P = PauliString("IXYZI")
    >>> P.weight
    3
    >>> str(P * PauliString("IXXII"))
    'IIZZI'
    """

    __slots__ = ("_codes",)

    def __init__(self, values: Iterable[int] | str):
        codes = _as_codes(values)
        if codes.size == 0:
            raise ValueError("a PauliString needs at least one qubit")
        codes.setflags(write=False)
        self._codes = codes

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_symplectic(cls, x: np.ndarray, z: np.ndarray) -> PauliString:
        x = np.asarray(x, dtype=np.uint8) & 1
        z = np.asarray(z, dtype=np.uint8) & 1
        # I=(0,0) X=(1,0) Y=(1,1) Z=(0,1)
        codes = np.where(x == 1, np.where(z == 1, 2, 1), np.where(z == 1, 3, 0))
        return cls(codes.astype(np.uint8))

    @classmethod
    def from_sparse(cls, text: str, n: int) -> PauliString:
        """Parse subscript notation such as ``"X4 Z15 Z16 Y23"`` (qubits numbered from 1).

        Separators (spaces, commas, underscores) are optional: ``"X3Z22X23"`` also parses.
        """
        codes = np.zeros(n, dtype=np.uint8)
        body = re.sub(r"[\s,_*]+", "", text)
        if not body or body.upper() in {"I", "ID"}:
            return cls(codes)
        pos = 0
        for match in re.finditer(r"([IXYZixyz])(\d+)", body):
            if match.start() != pos:
                raise ValueError(f"cannot parse sparse Pauli {text!r}")
            pos = match.end()
            q = int(match.group(2))
            if not 1 <= q <= n:
                raise ValueError(f"qubit index {q} outside 1..{n}")
            p = PAULI_CHARS.index(match.group(1).upper())
            codes[q - 1] = PRODUCT[codes[q - 1], p]
        if pos != len(body):
            raise ValueError(f"cannot parse sparse Pauli {text!r}")
        return cls(codes)

    @property
    def codes(self) -> np.ndarray:
        """Read-only uint8 array of Pauli codes."""
        return self._codes

    @property
    def x(self) -> np.ndarray:
        return X_BIT[self._codes]

    @property
    def z(self) -> np.ndarray:
        return Z_BIT[self._codes]

    def symplectic(self) -> np.ndarray:
        """Concatenated (x | z) bit vector of length 2N."""
        return np.concatenate([self.x, self.z])

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self._codes))

    def support(self) -> np.ndarray:
        return np.flatnonzero(self._codes)

    def commutes(self, other: PauliString) -> int:
        return commutes(self, other)

    def __mul__(self, other: PauliString) -> PauliString:
        return mul(self, other)

    def __len__(self) -> int:
        return int(self._codes.size)

    def __getitem__(self, idx: int) -> Pauli1:
        return Pauli1(int(self._codes[idx]))

    def __iter__(self):
        return (Pauli1(int(c)) for c in self._codes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return self._codes.shape == other._codes.shape and bool(np.array_equal(self._codes, other._codes))

    def __hash__(self) -> int:
        return hash(self._codes.tobytes())

    def __str__(self) -> str:
        return "".join(PAULI_CHARS[c] for c in self._codes)

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def sparse_str(self) -> str:
        """Subscript notation, e.g. ``X3 Z22``; ``I`` for the identity."""
        terms = [f"{PAULI_CHARS[c]}{i + 1}" for i, c in enumerate(self._codes) if c]
        return " ".join(terms) if terms else "I"


def _check_lengths(P: PauliString, Q: PauliString) -> None:
    if len(P) != len(Q):
        raise ValueError(f"length mismatch: {len(P)} vs {len(Q)}")


def commutes(P: PauliString, Q: PauliString) -> int:
    """Sum of the single-qubit symplectic forms mod 2 (0 = commute)."""
    _check_lengths(P, Q)
    return int(COMMUTE[P.codes, Q.codes].sum() & 1)


def mul(P: PauliString, Q: PauliString) -> PauliString:
    _check_lengths(P, Q)
    return PauliString(PRODUCT[P.codes, Q.codes])


def weight(P: PauliString) -> int:
    return P.weight


def as_pauli(value: PauliString | str | Sequence[int], n: int | None = None) -> PauliString:
    """Coerce dense strings, sparse subscript strings or code sequences."""
    if isinstance(value, PauliString):
        return value
    if isinstance(value, str):
        stripped = value.strip()
        if n is not None and re.search(r"\d", stripped):
            return PauliString.from_sparse(stripped, n)
        return PauliString(stripped)
    return PauliString(value)
