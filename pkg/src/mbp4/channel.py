"""Depolarizing channel: error sampling and decoder priors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString


@dataclass(frozen=True)
class ChannelPrior:
    """Per-qubit prior over (I, X, Y, Z) and its LLR vector Lambda_n.

    ``llr[n, w-1] = ln(p_I / p_W)`` for W = X, Y, Z.
    """

    probs: np.ndarray  # (N, 4)

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    @property
    def llr(self) -> np.ndarray:
        p = self.probs
        return np.log(p[:, :1]) - np.log(p[:, 1:])


def depolarizing_prior(n: int, eps: float) -> ChannelPrior:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"depolarizing rate must lie in (0, 1), got {eps}")
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    row = np.array([1.0 - eps, eps / 3, eps / 3, eps / 3])
    return ChannelPrior(np.tile(row, (n, 1)))


def sample_error(prior: ChannelPrior, rng: np.random.Generator) -> PauliString:
    """Each qubit drawn independently from its own (I, X, Y, Z) quadruple."""
    cdf = np.cumsum(prior.probs, axis=1)
    u = rng.random(prior.n)[:, None]
    codes = np.minimum((u >= cdf[:, :3]).sum(axis=1), 3)
    return PauliString(codes.astype(np.uint8))


def sample_error_codes(n: int, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform depolarizing draw: I with probability 1 - eps, else X/Y/Z uniformly."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"depolarizing rate must lie in [0, 1], got {eps}")
    hit = rng.random(n) < eps
    codes = np.zeros(n, dtype=np.uint8)
    codes[hit] = rng.integers(1, 4, size=int(hit.sum()), dtype=np.uint8)
    return codes
