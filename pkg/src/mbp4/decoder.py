"""MBP4 decoders: log domain, probability domain, and adaptive step size.

``decode`` covers conventional BP4 (alpha=1, beta=0), MBP4 (any alpha,
beta) and normalized BP4 (``mode="normalized"``, where the inhibition term
is scaled by 1/alpha as well). Check and qubit messages are clipped to
``cfg.clip``. The beliefs Gamma stay finite without clipping because every
check message is bounded; ``cfg.gamma_clip`` can cap them as well.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .channel import ChannelPrior, depolarizing_prior
from .codes import Code, block_groups
from .pauli import PauliString

SCHEDULES = ("parallel", "serial", "grouped-serial")
MODES = ("mbp", "normalized")


@dataclass(frozen=True)
class DecoderConfig:
    alpha: float = 1.0
    beta: float = 0.0
    mode: str = "mbp"
    schedule: str = "parallel"
    t_max: int = 100
    clip: float = 30.0
    gamma_clip: float = math.inf
    alpha_grid: tuple[float, ...] | None = None
    fixed_eps0: float | None = None
    groups: tuple[tuple[int, ...], ...] | None = None
    order: tuple[int, ...] | None = None
    record: bool = False
    trace: bool = False
    direct_inhibition: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "normalized" and self.beta != 0:
            raise ValueError("normalized mode has no beta term; use beta=0")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise ValueError(f"t_max must be a positive integer, got {self.t_max}")
        if not self.clip > 0 or not self.gamma_clip > 0:
            raise ValueError("clip bounds must be positive")
        if self.alpha_grid is not None:
            grid = tuple(float(a) for a in self.alpha_grid)
            if not grid:
                raise ValueError("alpha_grid must be nonempty")
            if any(a <= 0 for a in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
                raise ValueError("alpha_grid must be strictly decreasing and positive")
            object.__setattr__(self, "alpha_grid", grid)
        if self.fixed_eps0 is not None and not 0 < self.fixed_eps0 < 1:
            raise ValueError("fixed_eps0 must lie in (0, 1)")

    @property
    def inhibition(self) -> float:
        return 1.0 / self.alpha if self.mode == "normalized" else 1.0


@dataclass
class DecodeResult:
    status: str
    estimate: PauliString
    iterations: int
    alpha_used: float
    gamma: np.ndarray = field(repr=False)
    var_to_check: np.ndarray | None = field(default=None, repr=False)
    check_to_var: np.ndarray | None = field(default=None, repr=False)
    gamma_history: np.ndarray | None = field(default=None, repr=False)
    decision_history: np.ndarray | None = field(default=None, repr=False)
    energy_trace: list[tuple[int, float, int]] | None = field(default=None, repr=False)
    beliefs: np.ndarray | None = field(default=None, repr=False)
    iterations_total: int | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converge"

    @property
    def valid(self) -> bool:
        return self.converged


def lambda_w(gamma: Sequence[float], w: int, clip: float | None = None) -> float:
    """Log ratio of commuting vs anticommuting with Pauli ``w`` (1..3) under belief ``gamma``."""
    w = int(w)
    if w not in (1, 2, 3):
        raise ValueError("w must be X=1, Y=2 or Z=3")
    g = [float(v) for v in gamma]
    val = _kernels.lambda_s(g[0], g[1], g[2], w)
    return val if clip is None else max(-clip, min(clip, val))


def lambda_all(gamma: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Vectorised ``lambda_w`` over rows of an (E, 3) array."""
    gamma = np.asarray(gamma, dtype=float)
    w = np.asarray(w, dtype=np.int64)
    idx = np.arange(gamma.shape[0])
    gs = gamma[idx, w - 1]
    rest = np.where(np.arange(3)[None, :] == (w - 1)[:, None], np.inf, gamma)
    return np.logaddexp(0.0, -gs) - np.logaddexp.reduce(-rest, axis=1)


def boxplus(values: Sequence[float]) -> float:
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        raise ValueError("boxplus needs at least one value")
    if vals.size == 1:
        return float(vals[0])
    prod = float(np.prod(np.tanh(vals / 2.0)))
    prod = max(-_kernels.DELTA_BOUND, min(_kernels.DELTA_BOUND, prod))
    return 2.0 * math.atanh(prod)


def build_schedule(
    n: int, schedule: str, groups: Sequence[Sequence[int]] | None = None, order: Sequence[int] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """CSR (step_ptr, step_vars) for a schedule over ``n`` qubits."""
    if schedule == "parallel":
        return np.array([0, n], dtype=np.int64), np.arange(n, dtype=np.int64)
    if schedule == "serial":
        seq = np.arange(n, dtype=np.int64) if order is None else np.asarray(order, dtype=np.int64)
        if sorted(seq.tolist()) != list(range(n)):
            raise ValueError("serial order must be a permutation of the qubits")
        return np.arange(n + 1, dtype=np.int64), seq
    if schedule == "grouped-serial":
        if groups is None:
            side = math.isqrt(n)
            if side * side != n:
                raise ValueError("grouped-serial needs explicit groups unless N is a perfect square")
            groups = block_groups(side)
        flat = sorted(q for g in groups for q in g)
        if flat != list(range(n)):
            raise ValueError("groups must partition the qubits")
        depth = max(len(g) for g in groups)
        steps = [[g[j] for g in groups if j < len(g)] for j in range(depth)]
        ptr = np.zeros(depth + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(s) for s in steps])
        return ptr, np.array([q for s in steps for q in s], dtype=np.int64)
    raise ValueError(f"unknown schedule {schedule!r}")


def _signs(code: Code, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.int64).reshape(-1)
    if z.size != code.m:
        raise ValueError(f"syndrome has length {z.size}, code has M={code.m}")
    if ((z != 0) & (z != 1)).any():
        raise ValueError("syndrome entries must be 0 or 1")
    return np.where(z == 1, -1.0, 1.0)


def _resolve_prior(code: Code, prior: ChannelPrior | None, cfg: DecoderConfig) -> ChannelPrior:
    if cfg.fixed_eps0 is not None:
        return depolarizing_prior(code.n, cfg.fixed_eps0)
    if prior is None:
        raise ValueError("a channel prior is required unless fixed_eps0 is set")
    if prior.n != code.n:
        raise ValueError(f"prior covers {prior.n} qubits, code has N={code.n}")
    return prior


def _attach_trace(result: DecodeResult, code: Code, z, cfg: DecoderConfig) -> None:
    from .energy import trace_rows

    result.energy_trace = trace_rows(result, code, z)


def decode(code: Code, z, prior: ChannelPrior | None, cfg: DecoderConfig) -> DecodeResult:
    """Run MBP4 on syndrome ``z``; see ``DecoderConfig`` for the knobs."""
    signs = _signs(code, z)
    prior = _resolve_prior(code, prior, cfg)
    t = code.checks.tanner
    step_ptr, step_vars = build_schedule(code.n, cfg.schedule, cfg.groups, cfg.order)
    n, e = code.n, t.n_edges
    keep = cfg.record or cfg.trace
    gamma = np.empty((n, 3))
    lam = np.empty(e)
    delta = np.empty(e)
    decision = np.empty(n, dtype=np.uint8)
    gh = np.empty((cfg.t_max if keep else 0, n, 3))
    dh = np.zeros((cfg.t_max if keep else 0, n), dtype=np.uint8)
    ok, iters = _kernels.run_log(
        t.edge_check, t.edge_var, t.edge_pauli, t.check_ptr, t.var_ptr, t.var_edges,
        step_ptr, step_vars, signs, np.ascontiguousarray(prior.llr, dtype=float),
        1.0 / cfg.alpha, float(cfg.beta), cfg.inhibition, float(cfg.clip), float(cfg.gamma_clip), int(cfg.t_max),
        bool(cfg.direct_inhibition), gamma, lam, delta, decision, gh, dh,
    )  # fmt: skip
    result = DecodeResult(
        status="converge" if ok else "fail",
        estimate=PauliString(decision),
        iterations=int(iters),
        alpha_used=cfg.alpha,
        gamma=gamma,
        var_to_check=lam,
        check_to_var=delta,
        gamma_history=gh[:iters] if keep else None,
        decision_history=dh[:iters] if keep else None,
    )
    if cfg.trace:
        _attach_trace(result, code, z, cfg)
    return result


def decode_linear(code: Code, z, prior: ChannelPrior | None, cfg: DecoderConfig) -> DecodeResult:
    """Probability-domain MBP4 (beta must be 0).

    ``gamma`` in the result holds ln(q_I / q_W) of the final beliefs, so it is
    directly comparable with the log-domain decoder.
    """
    if cfg.beta != 0 or cfg.mode != "mbp":
        raise ValueError("the probability-domain decoder supports mode='mbp' with beta=0 only")
    signs = _signs(code, z)
    prior = _resolve_prior(code, prior, cfg)
    t = code.checks.tanner
    step_ptr, step_vars = build_schedule(code.n, cfg.schedule, cfg.groups, cfg.order)
    n = code.n
    keep = cfg.record or cfg.trace
    q = np.empty((n, 4))
    dmsg = np.empty(t.n_edges)
    decision = np.empty(n, dtype=np.uint8)
    gh = np.empty((cfg.t_max if keep else 0, n, 3))
    dh = np.zeros((cfg.t_max if keep else 0, n), dtype=np.uint8)
    ok, iters = _kernels.run_linear(
        t.edge_check, t.edge_var, t.edge_pauli, t.check_ptr, t.var_ptr, t.var_edges,
        step_ptr, step_vars, signs, np.ascontiguousarray(prior.probs, dtype=float),
        float(cfg.alpha), int(cfg.t_max), q, dmsg, decision, gh, dh,
    )  # fmt: skip
    result = DecodeResult(
        status="converge" if ok else "fail",
        estimate=PauliString(decision),
        iterations=int(iters),
        alpha_used=cfg.alpha,
        gamma=np.log(q[:, :1]) - np.log(q[:, 1:]),
        var_to_check=dmsg,
        gamma_history=gh[:iters] if keep else None,
        decision_history=dh[:iters] if keep else None,
        beliefs=q,
    )
    if cfg.trace:
        _attach_trace(result, code, z, cfg)
    return result


def decode_adaptive(code: Code, z, prior: ChannelPrior | None, cfg: DecoderConfig, domain: str = "log") -> DecodeResult:
    """Try each alpha of ``cfg.alpha_grid`` in order (beta = 0) and keep the first success.

    ``alpha_used`` is the alpha of the converging run. On failure the last
    run's estimate is returned with status ``fail``. ``iterations_total``
    counts iterations over every run tried.
    """
    if not cfg.alpha_grid:
        raise ValueError("adaptive decoding needs a nonempty alpha_grid")
    run = decode if domain == "log" else decode_linear
    total = 0
    result = None
    for a in cfg.alpha_grid:
        result = run(code, z, prior, replace(cfg, alpha=a, beta=0.0, alpha_grid=None))
        total += result.iterations
        if result.converged:
            break
    result.iterations_total = total
    return result


def run_decoder(code: Code, z, prior: ChannelPrior | None, cfg: DecoderConfig, domain: str = "log") -> DecodeResult:
    """Dispatch on ``alpha_grid`` and ``domain``."""
    if domain not in ("log", "linear"):
        raise ValueError(f"domain must be 'log' or 'linear', got {domain!r}")
    if cfg.alpha_grid:
        return decode_adaptive(code, z, prior, cfg, domain)
    result = (decode if domain == "log" else decode_linear)(code, z, prior, cfg)
    result.iterations_total = result.iterations
    return result
