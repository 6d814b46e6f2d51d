"""Compiled message-passing loops.

Both kernels walk a schedule given in CSR form (``step_ptr``, ``step_vars``):
each step recomputes the check-to-qubit messages into its qubits from the
current qubit-to-check messages, then updates those qubits. A parallel
schedule is one step holding every qubit; a serial schedule is one qubit per
step.

Pauli codes: I=0, X=1, Y=2, Z=3. LLR triples are stored as (N, 3) arrays with
column ``w - 1`` for Pauli ``w``.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

DELTA_BOUND = 1.0 - 1e-12


@njit(cache=True, nogil=True)
def _logaddexp(a, b):
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@njit(cache=True, nogil=True)
def lambda_s(g1, g2, g3, s):
    """ln[(1 + e^-g_s) / sum_{w != s} e^-g_w] for s in {1, 2, 3}, unclipped."""
    if s == 1:
        gs, ga, gb = g1, g2, g3
    elif s == 2:
        gs, ga, gb = g2, g1, g3
    else:
        gs, ga, gb = g3, g1, g2
    return _logaddexp(0.0, -gs) - _logaddexp(-ga, -gb)


@njit(cache=True, nogil=True)
def _clip(x, c):
    if x > c:
        return c
    if x < -c:
        return -c
    return x


@njit(cache=True, nogil=True)
def _anticommutes(a, b):
    return a != 0 and b != 0 and a != b


@njit(cache=True, nogil=True)
def syndrome_matches(edge_pauli, check_ptr, edge_var, decision, signs):
    m_count = check_ptr.size - 1
    for m in range(m_count):
        parity = 0
        for e in range(check_ptr[m], check_ptr[m + 1]):
            if _anticommutes(edge_pauli[e], decision[edge_var[e]]):
                parity ^= 1
        if (parity == 1) != (signs[m] < 0):
            return False
    return True


@njit(cache=True, nogil=True)
def _check_message(e, m, check_ptr, th, signs):
    prod = 1.0
    for f in range(check_ptr[m], check_ptr[m + 1]):
        if f != e:
            prod *= th[f]
    prod *= signs[m]
    if prod > DELTA_BOUND:
        prod = DELTA_BOUND
    elif prod < -DELTA_BOUND:
        prod = -DELTA_BOUND
    return prod


@njit(cache=True, nogil=True)
def _hard_decision_llr(g1, g2, g3):
    # I unless some component is negative; ties resolve toward X < Y < Z
    best = 0
    lowest = 0.0
    if g1 < lowest:
        best, lowest = 1, g1
    if g2 < lowest:
        best, lowest = 2, g2
    if g3 < lowest:
        best, lowest = 3, g3
    return best


@njit(cache=True, nogil=True)
def run_log(
    edge_check,
    edge_var,
    edge_pauli,
    check_ptr,
    var_ptr,
    var_edges,
    step_ptr,
    step_vars,
    signs,
    llr,
    alpha_inv,
    beta,
    inhib,
    clip,
    gamma_clip,
    t_max,
    direct,
    gamma,
    lam,
    delta,
    decision,
    gamma_hist,
    decision_hist,
):
    """Log-domain MBP. Returns (converged, iterations); state arrays are filled in place."""
    n_edges = edge_var.size
    n_vars = llr.shape[0]
    record = gamma_hist.shape[0] > 0
    th = np.empty(n_edges)
    for e in range(n_edges):
        n = edge_var[e]
        lam[e] = _clip(lambda_s(llr[n, 0], llr[n, 1], llr[n, 2], edge_pauli[e]), clip)
        th[e] = math.tanh(0.5 * lam[e])
        delta[e] = 0.0
    for n in range(n_vars):
        for w in range(3):
            gamma[n, w] = llr[n, w]
        decision[n] = 0

    n_steps = step_ptr.size - 1
    g = np.empty(3)
    for it in range(1, t_max + 1):
        for st in range(n_steps):
            lo, hi = step_ptr[st], step_ptr[st + 1]
            # check-to-qubit messages into every qubit of this step
            for k in range(lo, hi):
                n = step_vars[k]
                for j in range(var_ptr[n], var_ptr[n + 1]):
                    e = var_edges[j]
                    prod = _check_message(e, edge_check[e], check_ptr, th, signs)
                    delta[e] = _clip(2.0 * math.atanh(prod), clip)
            # qubit beliefs and outgoing messages
            for k in range(lo, hi):
                n = step_vars[k]
                for w in range(3):
                    g[w] = llr[n, w]
                for j in range(var_ptr[n], var_ptr[n + 1]):
                    e = var_edges[j]
                    s = edge_pauli[e]
                    d = delta[e]
                    for w in range(3):
                        if w + 1 == s:
                            g[w] -= beta * d
                        else:
                            g[w] += alpha_inv * d
                for w in range(3):
                    g[w] = _clip(g[w], gamma_clip)
                    gamma[n, w] = g[w]
                for j in range(var_ptr[n], var_ptr[n + 1]):
                    e = var_edges[j]
                    s = edge_pauli[e]
                    d = inhib * delta[e]
                    if direct:
                        g1 = g[0] - (d if s != 1 else 0.0)
                        g2 = g[1] - (d if s != 2 else 0.0)
                        g3 = g[2] - (d if s != 3 else 0.0)
                        val = lambda_s(g1, g2, g3, s)
                    else:
                        val = lambda_s(g[0], g[1], g[2], s) - d
                    lam[e] = _clip(val, clip)
                    th[e] = math.tanh(0.5 * lam[e])
        for n in range(n_vars):
            decision[n] = _hard_decision_llr(gamma[n, 0], gamma[n, 1], gamma[n, 2])
        if record:
            for n in range(n_vars):
                decision_hist[it - 1, n] = decision[n]
                for w in range(3):
                    gamma_hist[it - 1, n, w] = gamma[n, w]
        if syndrome_matches(edge_pauli, check_ptr, edge_var, decision, signs):
            return True, it
    return False, t_max


@njit(cache=True, nogil=True)
def run_linear(
    edge_check,
    edge_var,
    edge_pauli,
    check_ptr,
    var_ptr,
    var_edges,
    step_ptr,
    step_vars,
    signs,
    probs,
    alpha,
    t_max,
    q,
    dmsg,
    decision,
    gamma_hist,
    decision_hist,
):
    """Probability-domain MBP (beta = 0). ``q`` receives the normalized (N, 4) beliefs."""
    n_edges = edge_var.size
    n_vars = probs.shape[0]
    record = gamma_hist.shape[0] > 0
    inv_alpha = 1.0 / alpha
    rest = 1.0 - inv_alpha
    r0 = np.empty(n_edges)
    r1 = np.empty(n_edges)
    dl = np.empty(n_edges)
    for e in range(n_edges):
        n = edge_var[e]
        q0 = probs[n, 0] + probs[n, edge_pauli[e]]
        dmsg[e] = q0 - (1.0 - q0)
    for n in range(n_vars):
        for w in range(4):
            q[n, w] = probs[n, w]
        decision[n] = 0

    n_steps = step_ptr.size - 1
    qw = np.empty(4)
    for it in range(1, t_max + 1):
        for st in range(n_steps):
            lo, hi = step_ptr[st], step_ptr[st + 1]
            for k in range(lo, hi):
                n = step_vars[k]
                for j in range(var_ptr[n], var_ptr[n + 1]):
                    e = var_edges[j]
                    dv = _check_message(e, edge_check[e], check_ptr, dmsg, signs)
                    dl[e] = dv
                    a = (0.5 * (1.0 + dv)) ** inv_alpha
                    b = (0.5 * (1.0 - dv)) ** inv_alpha
                    top = a if a > b else b
                    r0[e] = a / top
                    r1[e] = b / top
            for k in range(lo, hi):
                n = step_vars[k]
                jlo, jhi = var_ptr[n], var_ptr[n + 1]
                for j in range(jlo, jhi):
                    e = var_edges[j]
                    s = edge_pauli[e]
                    for w in range(4):
                        acc = probs[n, w]
                        for jj in range(jlo, jhi):
                            if jj != j:
                                f = var_edges[jj]
                                acc *= r1[f] if _anticommutes(w, edge_pauli[f]) else r0[f]
                        qw[w] = acc
                    keep = qw[0] + qw[s]
                    flip = qw[1] + qw[2] + qw[3] - qw[s]
                    keep /= (0.5 * (1.0 + dl[e])) ** rest
                    flip /= (0.5 * (1.0 - dl[e])) ** rest
                    tot = keep + flip
                    dmsg[e] = (keep - flip) / tot
                tot = 0.0
                for w in range(4):
                    acc = probs[n, w]
                    for j in range(jlo, jhi):
                        f = var_edges[j]
                        acc *= r1[f] if _anticommutes(w, edge_pauli[f]) else r0[f]
                    q[n, w] = acc
                    tot += acc
                for w in range(4):
                    q[n, w] /= tot
        for n in range(n_vars):
            best = 0
            for w in range(1, 4):
                if q[n, w] > q[n, best]:
                    best = w
            decision[n] = best
        if record:
            for n in range(n_vars):
                decision_hist[it - 1, n] = decision[n]
                for w in range(3):
                    gamma_hist[it - 1, n, w] = math.log(q[n, 0]) - math.log(q[n, w + 1])
        if syndrome_matches(edge_pauli, check_ptr, edge_var, decision, signs):
            return True, it
    return False, t_max
