"""Outcome classification that treats stabilizer-equivalent estimates as successes."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .codes import Code
from .pauli import PRODUCT, PauliString, as_pauli

COSET_ENUM_LIMIT = 20


class Outcome(str, Enum):
    EXACT = "exact"
    DEGENERATE = "degenerate"
    DETECTED_FAILURE = "detected_failure"
    UNDETECTED_LOGICAL = "undetected_logical"

    def __str__(self) -> str:
        return self.value


def in_stabilizer_group(p: PauliString, code: Code) -> bool:
    """Is ``p`` (up to phase) a product of check rows?"""
    p = as_pauli(p)
    if len(p) != code.n:
        raise ValueError(f"operator has length {len(p)}, code has N={code.n}")
    return bool(code.checks.echelon.contains(p.symplectic()[None, :])[0])


def in_stabilizer_group_many(codes: np.ndarray, code: Code) -> np.ndarray:
    """Vectorised membership for an (R, N) array of Pauli codes."""
    codes = np.asarray(codes, dtype=np.uint8)
    sym = np.hstack([(codes == 1) | (codes == 2), (codes == 2) | (codes == 3)]).astype(np.uint8)
    return code.checks.echelon.contains(sym)


def stabilizer_group_elements(code: Code) -> np.ndarray:
    """Every element of the stabilizer group as rows of Pauli codes.

    Built by closure: each check row not already present doubles the set.
    Guarded to groups of at most 2^20 elements.
    """
    rank = code.rank
    if rank > COSET_ENUM_LIMIT:
        raise ValueError(f"stabilizer group too large to enumerate (rank {rank} > {COSET_ENUM_LIMIT})")
    group = np.zeros((1, code.n), dtype=np.uint8)
    seen = {group[0].tobytes()}
    for row in code.checks.paulis:
        if row.tobytes() in seen:
            continue
        products = PRODUCT[group, row[None, :]]
        group = np.vstack([group, products])
        seen.update(r.tobytes() for r in products)
    return group


def brute_force_coset(p: PauliString, code: Code, elements: np.ndarray | None = None) -> bool:
    """Membership in the stabilizer group by explicit enumeration (independent check)."""
    p = as_pauli(p)
    if len(p) != code.n:
        raise ValueError(f"operator has length {len(p)}, code has N={code.n}")
    group = stabilizer_group_elements(code) if elements is None else elements
    return bool(np.any(np.all(group == p.codes[None, :], axis=1)))


def classify(error: PauliString, result, z, code: Code) -> Outcome:
    """Sort a decoder outcome into exact / degenerate / detected failure / undetected logical."""
    error = as_pauli(error)
    if not result.converged:
        return Outcome.DETECTED_FAILURE
    estimate = result.estimate
    if estimate == error:
        return Outcome.EXACT
    residual = estimate * error
    if in_stabilizer_group(residual, code):
        return Outcome.DEGENERATE
    z = np.asarray(z, dtype=np.uint8).reshape(-1)
    matched = np.array_equal(code.syndrome(estimate), z)
    if matched and not code.syndrome(residual).any():
        return Outcome.UNDETECTED_LOGICAL
    return Outcome.DETECTED_FAILURE
