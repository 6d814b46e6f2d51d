"""Energy landscape of syndrome decoding.

J(Gamma) = J_D + eta * J_S, where J_D = 0.5 * ||Gamma - Lambda||^2 keeps the
beliefs close to the channel prior and J_S rewards satisfied checks. The
cheaper surrogates (bounded, truncated series, negative-only, mismatch
count) are used for tracing decoder runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._kernels import DELTA_BOUND
from .channel import ChannelPrior
from .codes import Code
from .decoder import lambda_all
from .pauli import PauliString


@dataclass(frozen=True)
class EnergyParams:
    eta: float = 1e6
    bound: float = 6.0
    taylor_order: int = 1

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.bound > 0:
            raise ValueError("bound must be positive")
        if self.taylor_order < 1 or self.taylor_order % 2 == 0:
            raise ValueError("taylor_order must be an odd integer >= 1")


def _llr(prior) -> np.ndarray:
    return prior.llr if isinstance(prior, ChannelPrior) else np.asarray(prior, dtype=float)


def _signs(code: Code, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.int64).reshape(-1)
    if z.size != code.m:
        raise ValueError(f"syndrome has length {z.size}, code has M={code.m}")
    return np.where(z == 1, -1.0, 1.0)


def _as_gamma(gamma, code: Code) -> np.ndarray:
    g = np.asarray(gamma, dtype=float).reshape(-1, 3)
    if g.shape[0] != code.n:
        raise ValueError(f"gamma covers {g.shape[0]} qubits, code has N={code.n}")
    return g


def edge_tanh(gamma, code: Code) -> np.ndarray:
    """tanh(lambda_{S_mn}(Gamma_n) / 2) for every Tanner edge."""
    t = code.checks.tanner
    g = _as_gamma(gamma, code)
    return np.tanh(0.5 * lambda_all(g[t.edge_var], t.edge_pauli))


def check_products(gamma, code: Code, z) -> np.ndarray:
    """Signed product over each check of the edge tanh values."""
    t = code.checks.tanner
    th = edge_tanh(gamma, code)
    prods = np.multiply.reduceat(th, t.check_ptr[:-1]) if th.size else np.ones(code.m)
    return _signs(code, z) * prods


def check_llrs(gamma, code: Code, z) -> np.ndarray:
    """Per-check log ratio Delta_m = 2 atanh(signed product)."""
    p = np.clip(check_products(gamma, code, z), -DELTA_BOUND, DELTA_BOUND)
    return 2.0 * np.arctanh(p)


def j_d(gamma, prior) -> float:
    diff = np.asarray(gamma, dtype=float).reshape(-1, 3) - _llr(prior).reshape(-1, 3)
    return 0.5 * float(np.sum(diff * diff))


def j_s(gamma, code: Code, z) -> float:
    return -float(np.sum(check_llrs(gamma, code, z)))


def total_energy(gamma, prior, code: Code, z, eta: float = 1.0) -> float:
    return j_d(gamma, prior) + eta * j_s(gamma, code, z)


def j_s_bounded(gamma, code: Code, z, bound: float = 6.0) -> float:
    if not bound > 0:
        raise ValueError("bound must be positive")
    return -float(np.sum(np.clip(check_llrs(gamma, code, z), -bound, bound)))


def j_s_negative(gamma, code: Code, z) -> float:
    return float(np.sum(np.minimum(0.0, check_llrs(gamma, code, z))))


def j_s_mismatch(estimate: PauliString, code: Code, z) -> int:
    z = np.asarray(z, dtype=np.int64).reshape(-1)
    return -int(np.count_nonzero(code.syndrome(estimate) != z))


def taylor_deltas(beliefs, code: Code, z) -> np.ndarray:
    """Signed per-check delta_m from (N, 4) probability beliefs.

    Each factor is P(commute with S_mn) - P(anticommute) for that qubit.
    """
    q = np.asarray(beliefs, dtype=float)
    if q.shape != (code.n, 4):
        raise ValueError(f"beliefs must have shape ({code.n}, 4)")
    t = code.checks.tanner
    qe = q[t.edge_var]
    keep = qe[:, 0] + qe[np.arange(t.n_edges), t.edge_pauli]
    factors = 2.0 * keep - qe.sum(axis=1)
    return _signs(code, z) * np.multiply.reduceat(factors, t.check_ptr[:-1])


def j_s_taylor(deltas, order: int) -> float:
    """-2 * sum_m (delta_m + delta_m^3/3 + ... + delta_m^order/order)."""
    if order < 1 or order % 2 == 0:
        raise ValueError("order must be odd and >= 1")
    d = np.asarray(deltas, dtype=float)
    if np.any(np.abs(d) > 1):
        raise ValueError("deltas must lie in [-1, 1]")
    powers = np.arange(1, order + 1, 2)
    return -2.0 * float(np.sum(d[:, None] ** powers / powers))


def _grad_parts(gamma, code: Code, z):
    """Per-edge g_mn, tilde-Delta and the partials of lambda_{S_mn} wrt Gamma_n."""
    t = code.checks.tanner
    g = _as_gamma(gamma, code)
    th = edge_tanh(g, code)
    signs = _signs(code, z)
    counts = np.diff(t.check_ptr)
    # product over the other edges of the same check, without dividing by th
    excl = np.empty_like(th)
    for m in range(code.m):
        lo, hi = t.check_ptr[m], t.check_ptr[m + 1]
        seg = th[lo:hi]
        left = np.concatenate([[1.0], np.cumprod(seg)[:-1]])
        right = np.concatenate([np.cumprod(seg[::-1])[:-1][::-1], [1.0]])
        excl[lo:hi] = left * right
    full = np.repeat(np.multiply.reduceat(th, t.check_ptr[:-1]), counts)
    g_mn = (1.0 - th**2) / (1.0 - full**2)
    tilde = np.repeat(signs, counts) * excl

    ge = g[t.edge_var]
    s_idx = t.edge_pauli - 1
    rows = np.arange(t.n_edges)
    dlam = np.empty((t.n_edges, 3))
    # d lambda_S / d Gamma^S = -e^{-g_S} / (1 + e^{-g_S})
    # d lambda_S / d Gamma^W = e^{-g_W} / sum_{W' != S} e^{-g_W'} for W != S
    masked = np.where(np.arange(3)[None, :] == s_idx[:, None], np.inf, ge)
    shifted = -masked - np.max(-masked, axis=1, keepdims=True)
    weights = np.exp(shifted)
    dlam[:] = weights / weights.sum(axis=1, keepdims=True)
    dlam[rows, s_idx] = -expit(-ge[rows, s_idx])
    return g_mn, tilde, dlam


def grad_j_s(gamma, code: Code, z) -> np.ndarray:
    """Gradient of J_S as an (N, 3) array."""
    t = code.checks.tanner
    g_mn, tilde, dlam = _grad_parts(gamma, code, z)
    contrib = -(g_mn * tilde)[:, None] * dlam
    out = np.zeros((code.n, 3))
    np.add.at(out, t.edge_var, contrib)
    return out


def grad_j(gamma, prior, code: Code, z, eta: float = 1.0) -> np.ndarray:
    g = _as_gamma(gamma, code)
    return (g - _llr(prior).reshape(-1, 3)) + eta * grad_j_s(g, code, z)


def gd_step(gamma, prior, code: Code, z, eta: float = 1.0) -> np.ndarray:
    """One unit-step gradient update written around the prior.

    Lambda minus the weighted tilde-Delta terms on the S_mn = W edges plus
    the weighted terms on the anticommuting edges; the weights are positive.
    """
    t = code.checks.tanner
    g_mn, tilde, dlam = _grad_parts(gamma, code, z)
    s_idx = t.edge_pauli - 1
    rows = np.arange(t.n_edges)
    omega = eta * g_mn[:, None] * np.abs(dlam)
    signed = omega * tilde[:, None]
    upd = signed.copy()
    upd[rows, s_idx] = -signed[rows, s_idx]
    out = np.array(_llr(prior).reshape(-1, 3), dtype=float, copy=True)
    np.add.at(out, t.edge_var, upd)
    return out


def g_mn_at(gamma, code: Code, m: int, n: int) -> float:
    t = code.checks.tanner
    lo, hi = t.check_ptr[m], t.check_ptr[m + 1]
    hit = np.flatnonzero(t.edge_var[lo:hi] == n)
    if hit.size == 0:
        raise ValueError(f"qubit {n} is not in check {m}")
    th = edge_tanh(gamma, code)[lo:hi]
    return float((1.0 - th[hit[0]] ** 2) / (1.0 - np.prod(th) ** 2))


def inv_g_channel(eps: float, k: int) -> float:
    """1/g_mn at the depolarizing prior for a weight-k check.

    Every edge then has tanh(lambda / 2) = 1 - 4 eps / 3 =: t, and
    1/g = (1 - t^(2k)) / (1 - t^2) = sum_{i<k} t^(2i).
    """
    if not 0 < eps < 0.75:
        raise ValueError("eps must lie in (0, 3/4)")
    if k < 2:
        raise ValueError("k must be at least 2")
    t2 = (1.0 - 4.0 * eps / 3.0) ** 2
    return float(np.polynomial.polynomial.polyval(t2, np.ones(k)))


def trace_rows(result, code: Code, z, bound: float = 6.0) -> list[tuple[int, float, int]]:
    """(iteration, bounded J_S, mismatch count) for each recorded iteration."""
    if result.gamma_history is None or result.decision_history is None:
        raise ValueError("decoder result carries no history; decode with record=True")
    rows = []
    for it, (g, d) in enumerate(zip(result.gamma_history, result.decision_history), start=1):
        rows.append((it, j_s_bounded(g, code, z, bound), j_s_mismatch(PauliString(d), code, z)))
    return rows
