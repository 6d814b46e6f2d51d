"""Monte-Carlo harness: trials, stopping rule, statistics and result files."""

from __future__ import annotations

import csv
import json
import math
import os
import time
from collections import Counter
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import binom, binomtest

from .channel import depolarizing_prior
from .codes import Code, code_from_spec
from .decoder import DecoderConfig, run_decoder
from .pauli import COMMUTE, PRODUCT

BLOCK_SIZE = 256
CACHE_LIMIT = 200_000

EXACT, DEGENERATE, DETECTED, UNDETECTED = 0, 1, 2, 3

CSV_FIELDS = (
    "code", "L_or_N", "eps", "alpha", "beta", "schedule", "n_tot", "n0", "n_e", "n_u",
    "rate", "ci_lo", "ci_hi", "tau_conv", "tau_all",
)  # fmt: skip


@dataclass(frozen=True)
class StopRule:
    min_events: int = 100
    max_trials: int = 10_000_000

    def __post_init__(self):
        if self.min_events < 1 or self.max_trials < 1:
            raise ValueError("stop rule limits must be positive")


@dataclass
class TrialStats:
    """Event counters for one (code, decoder, eps) point.

    n0 counts estimates that differ from the actual error, n_e the genuine
    failures (detected failures plus undetected logical errors) and n_u the
    undetected logical errors alone.
    """

    n_tot: int = 0
    n0: int = 0
    n_e: int = 0
    n_u: int = 0
    n_conv: int = 0
    iter_sum: int = 0
    iter_sum_all: int = 0
    work_sum: int = 0
    alpha_hist: dict[float, int] = field(default_factory=dict)
    elapsed: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not (0 <= self.n_u <= self.n_e <= self.n0 <= self.n_tot):
            raise ValueError("counters must satisfy n_u <= n_e <= n0 <= n_tot")

    @property
    def block_rate(self) -> float:
        return self.n0 / self.n_tot if self.n_tot else math.nan

    @property
    def logical_rate(self) -> float:
        return self.n_e / self.n_tot if self.n_tot else math.nan

    @property
    def undetected_rate(self) -> float:
        return self.n_u / self.n_tot if self.n_tot else math.nan

    @property
    def tau_conv(self) -> float:
        return self.iter_sum / self.n_conv if self.n_conv else math.nan

    @property
    def tau_all(self) -> float:
        return self.iter_sum_all / self.n_tot if self.n_tot else math.nan

    def logical_ci(self, level: float = 0.95) -> tuple[float, float]:
        return confidence_interval(self.n_e, self.n_tot, level)

    def block_ci(self, level: float = 0.95) -> tuple[float, float]:
        return confidence_interval(self.n0, self.n_tot, level)


def bdd_tail(n: int, t: int, eps: float) -> float:
    """P(weight > t) for i.i.d. errors of rate eps on n qubits."""
    if not 0 <= t <= n:
        raise ValueError("need 0 <= t <= N")
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    return float(binom.sf(t, n, eps))


def rbdd_tail(n: int, d: int, r: float, eps: float) -> float:
    """Failure rate of r x BDD, which corrects up to floor((r d - 1) / 2) errors."""
    t = max(0, min(n, int(math.floor((r * d - 1) / 2))))
    return bdd_tail(n, t, eps)


def confidence_interval(events: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Two-sided Clopper-Pearson interval."""
    if trials < 1 or not 0 <= events <= trials:
        raise ValueError("need 0 <= events <= trials and trials >= 1")
    ci = binomtest(int(events), int(trials)).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


def degeneracy_split(stats: TrialStats) -> tuple[float, float | None]:
    """(n0 / n_tot, n_e / n0); the ratio is None when there are no non-exact estimates."""
    if stats.n0 == 0:
        return 0.0, None
    return stats.n0 / stats.n_tot, stats.n_e / stats.n0


# ---------------------------------------------------------------------------
# trial loop


def sample_block(code: Code, eps: float, seed: int, block: int, size: int = BLOCK_SIZE) -> np.ndarray:
    """Errors for trials ``block*size .. block*size+size-1`` as a (size, N) code array."""
    rng = np.random.default_rng([int(seed), int(block)])
    hit = rng.random((size, code.n)) < eps
    kinds = rng.integers(1, 4, size=(size, code.n), dtype=np.uint8)
    return np.where(hit, kinds, 0).astype(np.uint8)


def syndromes(code: Code, errors: np.ndarray) -> np.ndarray:
    t = code.checks.tanner
    flips = COMMUTE[t.edge_pauli[None, :], errors[:, t.edge_var]]
    return (np.add.reduceat(flips, t.check_ptr[:-1], axis=1) & 1).astype(np.uint8)


class _Trials:
    def __init__(self, code: Code, cfg: DecoderConfig, eps: float, seed: int, domain: str):
        self.code = code
        self.cfg = cfg
        self.eps = eps
        self.seed = seed
        self.domain = domain
        self.prior = None if cfg.fixed_eps0 is not None else depolarizing_prior(code.n, eps)
        self.cache: dict[bytes, tuple] = {}
        t = code.checks.tanner
        self._edge_pauli = t.edge_pauli
        self._edge_var = t.edge_var
        self._check_ptr = t.check_ptr

    def _decode(self, z: np.ndarray) -> tuple:
        key = z.tobytes()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        r = run_decoder(self.code, z, self.prior, self.cfg, self.domain)
        out = (r.converged, r.estimate.codes, r.iterations, r.iterations_total, r.alpha_used)
        if len(self.cache) < CACHE_LIMIT:
            self.cache[key] = out
        return out

    def _kind(self, err: np.ndarray, conv: bool, est: np.ndarray) -> int:
        if not conv:
            return DETECTED
        if np.array_equal(est, err):
            return EXACT
        residual = PRODUCT[est, err]
        sym = np.concatenate([(residual == 1) | (residual == 2), (residual == 2) | (residual == 3)])
        if self.code.checks.echelon.contains(sym[None, :].astype(np.uint8))[0]:
            return DEGENERATE
        flips = COMMUTE[self._edge_pauli, residual[self._edge_var]]
        if not (np.add.reduceat(flips, self._check_ptr[:-1]) & 1).any():
            return UNDETECTED
        return DETECTED

    def block(self, b: int) -> np.ndarray:
        """Per-trial records: kind, converged, iterations, work, alpha."""
        errs = sample_block(self.code, self.eps, self.seed, b)
        zs = syndromes(self.code, errs)
        rec = np.zeros((errs.shape[0], 5))
        for i in range(errs.shape[0]):
            conv, est, iters, work, alpha = self._decode(zs[i])
            rec[i] = (self._kind(errs[i], conv, est), conv, iters, work, alpha)
        return rec


def run_point(
    code: Code,
    cfg: DecoderConfig,
    eps: float,
    stop: StopRule = StopRule(),
    seed: int = 0,
    domain: str = "log",
    threads: int = 1,
) -> TrialStats:
    """Sample, decode and classify until ``stop`` triggers.

    Trial ``i`` always sees the same error for a given seed, and blocks are
    merged in order, so the result does not depend on ``threads``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    trials = _Trials(code, cfg, eps, seed, domain)
    stats = TrialStats()
    alphas: Counter = Counter()
    start = time.perf_counter()
    n_blocks = -(-stop.max_trials // BLOCK_SIZE)
    threads = max(1, int(threads))

    def consume(rec: np.ndarray) -> bool:
        rec = rec[: stop.max_trials - stats.n_tot]
        failures = np.isin(rec[:, 0], (DETECTED, UNDETECTED))
        need = stop.min_events - stats.n_e
        cum = np.cumsum(failures)
        done = cum.size and cum[-1] >= need
        if done:
            rec = rec[: int(np.argmax(cum >= need)) + 1]
        kind = rec[:, 0].astype(int)
        conv = rec[:, 1].astype(bool)
        stats.n_tot += rec.shape[0]
        stats.n0 += int(np.count_nonzero(kind != EXACT))
        stats.n_e += int(np.count_nonzero((kind == DETECTED) | (kind == UNDETECTED)))
        stats.n_u += int(np.count_nonzero(kind == UNDETECTED))
        stats.n_conv += int(conv.sum())
        stats.iter_sum += int(rec[conv, 2].sum())
        stats.iter_sum_all += int(rec[:, 2].sum())
        stats.work_sum += int(rec[:, 3].sum())
        if cfg.alpha_grid:
            alphas.update(float(a) for a in rec[conv, 4])
        return bool(done) or stats.n_tot >= stop.max_trials

    if threads == 1:
        for b in range(n_blocks):
            if consume(trials.block(b)):
                break
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            b = 0
            finished = False
            while b < n_blocks and not finished:
                window = range(b, min(n_blocks, b + 2 * threads))
                for rec in pool.map(trials.block, window):
                    if consume(rec):
                        finished = True
                        break
                b = window.stop
    stats.alpha_hist = dict(sorted(alphas.items(), reverse=True))
    stats.elapsed = time.perf_counter() - start
    return stats


# ---------------------------------------------------------------------------
# sweeps and serialization


@dataclass(frozen=True)
class SweepSpec:
    code: str
    cfg: DecoderConfig
    eps_list: tuple[float, ...]
    stop: StopRule = StopRule()
    seed: int = 0
    domain: str = "log"

    def __post_init__(self):
        if not self.eps_list:
            raise ValueError("eps_list must be nonempty")


def size_label(code: Code) -> int:
    family, _, arg = code.name.partition(":")
    if family in ("surface", "toric") and arg.isdigit():
        return int(arg)
    return code.n


def point_record(code: Code, cfg: DecoderConfig, eps: float, stats: TrialStats) -> dict:
    lo, hi = stats.logical_ci()
    alpha = "adaptive" if cfg.alpha_grid else cfg.alpha
    return {
        "code": code.name,
        "L_or_N": size_label(code),
        "eps": eps,
        "alpha": alpha,
        "beta": cfg.beta,
        "schedule": cfg.schedule,
        "n_tot": stats.n_tot,
        "n0": stats.n0,
        "n_e": stats.n_e,
        "n_u": stats.n_u,
        "rate": stats.logical_rate,
        "ci_lo": lo,
        "ci_hi": hi,
        "tau_conv": stats.tau_conv,
        "tau_all": stats.tau_all,
    }


def run_sweep(spec: SweepSpec, threads: int = 1, code: Code | None = None) -> list[tuple[dict, TrialStats]]:
    code = code_from_spec(spec.code) if code is None else code
    out = []
    for eps in spec.eps_list:
        stats = run_point(code, spec.cfg, eps, spec.stop, spec.seed, spec.domain, threads)
        out.append((point_record(code, spec.cfg, eps, stats), stats))
    return out


def write_csv(records: Iterable[dict], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for rec in records:
            writer.writerow({k: rec[k] for k in CSV_FIELDS})


def write_json(records: Sequence[dict], path: str | os.PathLike, metadata: dict | None = None) -> None:
    payload = {"metadata": metadata or {}, "points": [{k: rec[k] for k in CSV_FIELDS} for rec in records]}
    Path(path).write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return asdict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
