"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import math

import numpy as np
import pytest

from mbp4.channel import depolarizing_prior, sample_error_codes
from mbp4.cli import parse_range
from mbp4.codes import gen_bicycle, gen_five_qubit, gen_surface, gen_toric
from mbp4.decoder import DecoderConfig, decode, decode_linear
from mbp4.energy import grad_j, inv_g_channel, total_energy
from mbp4.pauli import PauliString
from mbp4.sim import StopRule, bdd_tail, run_point
from mbp4.verify import (
    Outcome,
    brute_force_coset,
    classify,
    in_stabilizer_group,
    in_stabilizer_group_many,
    stabilizer_group_elements,
)

from .conftest import ACCEPTANCE, PATTERN_A, PATTERN_D

# eps used to build the prior for the L=7 golden patterns
GOLDEN_EPS = 0.014


def report(num: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num:>2}: {detail}"
    ACCEPTANCE[num] = line
    print(line)
    assert ok, line


def test_01_five_qubit_single_errors():
    code = gen_five_qubit()
    prior = depolarizing_prior(5, 0.003)
    cfg = DecoderConfig(alpha=1.5, t_max=30)
    outcomes = {}
    for q, p in itertools.product(range(5), "XYZ"):
        E = PauliString("".join(p if i == q else "I" for i in range(5)))
        z = code.syndrome(E)
        res = decode(code, z, prior, cfg)
        outcomes[str(E)] = classify(E, res, z, code)
    good = all(o in (Outcome.EXACT, Outcome.DEGENERATE) for o in outcomes.values())

    z = code.syndrome(PauliString("IIIYI"))
    bp = decode(code, z, prior, DecoderConfig(alpha=1.0, t_max=30, record=True))
    seen = [str(PauliString(d)) for d in bp.decision_history]
    oscillates = (not bp.converged) and set(seen) == {"IIIII", "YYYYY"} and seen[0] != seen[1]
    report(1, good and oscillates and len(outcomes) == 15,
           f"MBP4(1.5) corrects {sum(o is not Outcome.DETECTED_FAILURE for o in outcomes.values())}/15; "
           f"BP4 on IIIYI {bp.status} cycling {sorted(set(seen))}")  # fmt: skip


@pytest.mark.slow
def test_02_five_qubit_bdd_match():
    code = gen_five_qubit()
    cfg = DecoderConfig(alpha=1.5, t_max=30, fixed_eps0=0.003)
    rows, ok = [], True
    for eps in (0.005, 0.01, 0.02):
        stats = run_point(code, cfg, eps, StopRule(100), seed=2)
        lo, hi = stats.block_ci()
        ref = bdd_tail(5, 1, eps)
        ok &= lo <= ref <= hi
        rows.append(f"eps={eps}: {stats.block_rate:.3g} in [{lo:.3g}, {hi:.3g}] vs {ref:.3g}")
    report(2, ok, "; ".join(rows))


def test_03_golden_surface_traces():
    code = gen_surface(7)
    prior = depolarizing_prior(49, GOLDEN_EPS)
    ok, parts = True, []
    for label, pattern in (("a", PATTERN_A), ("d", PATTERN_D)):
        E = PauliString.from_sparse(pattern, 49)
        z = code.syndrome(E)
        for alpha, bound in ((0.65, 12), (0.5, 2)):
            res = decode(code, z, prior, DecoderConfig(alpha=alpha, schedule="serial", t_max=150))
            out = classify(E, res, z, code)
            ok &= out is Outcome.DEGENERATE and res.iterations <= bound
            parts.append(f"{label}/a{alpha}: {out.value} in {res.iterations}")
        bp = decode(code, z, prior, DecoderConfig(alpha=1.0, t_max=150))
        ok &= not bp.converged
        parts.append(f"{label}/BP4: {bp.status}")
    report(3, ok, ", ".join(parts))


def tie_tolerant_match(a, b, tol=1e-9):
    """Decisions agree except where the two competing candidates of ``a`` are within ``tol``."""
    steps = min(a.iterations, b.iterations)
    for t in range(steps):
        da, db = a.decision_history[t], b.decision_history[t]
        diff = np.flatnonzero(da != db)
        if diff.size == 0:
            continue
        cand = np.hstack([np.zeros((da.size, 1)), a.gamma_history[t]])
        if np.any(np.abs(cand[diff, da[diff]] - cand[diff, db[diff]]) >= tol):
            return False
        # a genuine tie may end one run a step early; nothing after it is comparable
        return True
    return a.iterations == b.iterations


def test_04_log_linear_equivalence():
    bad, total = 0, 0
    for code in (gen_five_qubit(), gen_surface(5)):
        for alpha, schedule in itertools.product((0.65, 1.0, 1.5), ("parallel", "serial")):
            rng = np.random.default_rng(4)
            cfg = DecoderConfig(alpha=alpha, schedule=schedule, t_max=50, clip=1e3, record=True)
            for _ in range(1000):
                eps = rng.uniform(0.01, 0.2)
                E = PauliString(sample_error_codes(code.n, eps, rng))
                z = code.syndrome(E)
                prior = depolarizing_prior(code.n, eps)
                a = decode(code, z, prior, cfg)
                b = decode_linear(code, z, prior, cfg)
                bad += not tie_tolerant_match(a, b)
                total += 1
    report(4, bad == 0, f"{total - bad}/{total} instances agree on every per-iteration decision")


def test_05_gradient_check():
    code = gen_five_qubit()
    rng = np.random.default_rng(5)
    prior = depolarizing_prior(5, 0.05)
    h, worst = 1e-5, 0.0
    for _ in range(100):
        g = rng.normal(2.0, 1.5, size=(5, 3))
        z = rng.integers(0, 2, code.m)
        grad = grad_j(g, prior, code, z, eta=1.0)
        fd = np.zeros_like(g)
        for idx in np.ndindex(g.shape):
            up, dn = g.copy(), g.copy()
            up[idx] += h
            dn[idx] -= h
            fd[idx] = (total_energy(up, prior, code, z, 1.0) - total_energy(dn, prior, code, z, 1.0)) / (2 * h)
        worst = max(worst, float(np.max(np.abs(grad - fd) / np.maximum(np.abs(fd), 1e-3))))
    report(5, worst < 1e-4, f"max relative error {worst:.2e} over 100 states")


def test_06_coset_oracle():
    five = gen_five_qubit()
    words = np.array(list(itertools.product(range(4), repeat=5)), dtype=np.uint8)
    group = stabilizer_group_elements(five)
    fast = in_stabilizer_group_many(words, five)
    slow = np.array([brute_force_coset(PauliString(w), five, group) for w in words])
    ok5 = np.array_equal(fast, slow) and all(in_stabilizer_group(PauliString(w), five) == s for w, s in zip(words, slow))

    surf3 = gen_surface(3)
    rng = np.random.default_rng(6)
    group3 = stabilizer_group_elements(surf3)
    rand = rng.integers(0, 4, size=(10_000, 9)).astype(np.uint8)
    rand[::20] = group3[rng.integers(0, len(group3), size=500)]
    fast3 = in_stabilizer_group_many(rand, surf3)
    slow3 = np.array([brute_force_coset(PauliString(w), surf3, group3) for w in rand])
    ok3 = np.array_equal(fast3, slow3)
    report(6, ok5 and ok3, f"1024 five-qubit strings ({int(slow.sum())} members), "
                           f"10^4 surface-3 strings ({int(slow3.sum())} members)")  # fmt: skip


@pytest.mark.slow
def test_07_degeneracy_suppression():
    mbp = DecoderConfig(alpha=0.65, schedule="serial", t_max=150)
    bp4 = DecoderConfig(alpha=1.0, t_max=150)
    ok, parts = True, []
    for L in (5, 7):
        code = gen_surface(L)
        for name, cfg, passes in (("MBP4", mbp, lambda r: r < 0.9), ("BP4", bp4, lambda r: r > 0.97)):
            stats = run_point(code, cfg, 0.05, StopRule(1000), seed=7)
            ratio = stats.n_e / stats.n0
            ok &= stats.n_e >= 100 and passes(ratio)
            parts.append(f"L={L} {name} n_e/n0={stats.n_e}/{stats.n0}={ratio:.3f}")
    report(7, ok, ", ".join(parts))


@pytest.mark.slow
def test_08_iteration_counts():
    code = gen_toric(8)
    stop = StopRule(10**9, 2048)
    mbp = run_point(code, DecoderConfig(alpha=0.75, schedule="serial", t_max=150), 0.03, stop, seed=8)
    bp4 = run_point(code, DecoderConfig(alpha=1.0, t_max=150), 0.03, stop, seed=8)
    ok = mbp.tau_all < bp4.tau_all and mbp.tau_conv < bp4.tau_conv
    report(8, ok, f"tau_all {mbp.tau_all:.3f} vs {bp4.tau_all:.3f}, tau_conv {mbp.tau_conv:.3f} vs {bp4.tau_conv:.3f}")


@pytest.mark.slow
def test_09_threshold_neighbourhood():
    cfg = DecoderConfig(alpha_grid=tuple(parse_range("1.0:0.5:0.01")), schedule="serial", t_max=150, fixed_eps0=0.001)
    rates = {}
    for L in (4, 6, 8):
        code = gen_toric(L)
        for eps in (0.10, 0.20):
            rates[L, eps] = run_point(code, cfg, eps, StopRule(1000), seed=9).logical_rate
    below = rates[4, 0.10] > rates[6, 0.10] > rates[8, 0.10]
    above = rates[4, 0.20] < rates[6, 0.20] < rates[8, 0.20]
    detail = "; ".join(f"eps={e}: " + " ".join(f"L{L}={rates[L, e]:.4f}" for L in (4, 6, 8)) for e in (0.10, 0.20))
    report(9, below and above, detail)


# alpha tuned at eps=0.03 on an independent seed (scan over 1.0..1.3)
BICYCLE_ALPHA = 1.15


@pytest.mark.slow
def test_10_bicycle_improvement():
    code = gen_bicycle(256, 32, 16, seed=1)
    stop = StopRule(10**9, 150_000)
    bp4 = run_point(code, DecoderConfig(alpha=1.0, t_max=90), 0.03, stop, seed=2026)
    mbp = run_point(code, DecoderConfig(alpha=BICYCLE_ALPHA, t_max=90), 0.03, stop, seed=2026)
    (blo, bhi), (mlo, mhi) = bp4.logical_ci(), mbp.logical_ci()
    ok = mbp.logical_rate < bp4.logical_rate and mhi < blo
    report(10, ok, f"[[{code.n},{code.k}]] BP4 {bp4.logical_rate:.2e} [{blo:.2e}, {bhi:.2e}] vs "
                   f"MBP4({BICYCLE_ALPHA}) {mbp.logical_rate:.2e} [{mlo:.2e}, {mhi:.2e}]")  # fmt: skip


def direct_inv_g(eps: float, k: int) -> float:
    # each edge: P(commute) = 1 - 2 eps / 3, so lambda = log((1 - 2eps/3) / (2eps/3))
    lam = math.log((1 - 2 * eps / 3) / (2 * eps / 3))
    th = math.tanh(lam / 2)
    return (1 - th ** (2 * k)) / (1 - th**2)


def test_11_inverse_gain_curves():
    eps_grid = np.geomspace(1e-3, 0.5, 200)
    ks = range(2, 11)
    table = np.array([[inv_g_channel(e, k) for e in eps_grid] for k in ks])
    dec_eps = bool(np.all(np.diff(table, axis=1) < 0))
    inc_k = bool(np.all(np.diff(table, axis=0) > 0))
    err = max(abs(table[i, j] - direct_inv_g(e, k)) for i, k in enumerate(ks) for j, e in enumerate(eps_grid))
    report(11, dec_eps and inc_k and err < 1e-10, f"monotone in eps and k, max deviation {err:.1e}")
