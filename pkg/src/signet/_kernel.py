"""Compiled step loop for the Monte Carlo engine.

Kept deliberately close to the pure-Python path in ``engine.step``: both
consume the same splitmix64 stream in the same order, so a kernel run and
a step-by-step Python run from identical seeds agree bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0

GATE_TOTAL = 0
GATE_TRIAD = 1
GATE_NONE = 2

# counter slots
C_SP = 0
C_ST = 1
C_NINF = 2
C_NALERT = 3
C_POS = 4

N_COLS = 10  # step, s, a, rho, r, e_p, e_t, e, bal, e_min


@njit(cache=True, inline="always")
def _next_u(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return state, (z >> U64(11)) * _INV_2_53


@njit(cache=True, nogil=True)
def run_steps(
    signs,
    states,
    ei,
    ej,
    cum,
    tgt,
    alpha,
    inv_n2,
    inv_n3,
    wt,
    wp,
    gate_mode,
    gate_recovery,
    t_steps,
    sample_every,
    stop_stuck,
    seed,
    counters,
    n_triads,
    e_min0,
    out,
):
    n = signs.shape[0]
    m = ei.shape[0]
    rng = U64(seed)
    one_m_alpha = 1.0 - alpha

    s_p = counters[C_SP]
    s_t = counters[C_ST]
    n_inf = counters[C_NINF]
    n_alert = counters[C_NALERT]
    pos = counters[C_POS]

    e_min = e_min0
    e_cur = alpha * (s_t * inv_n3) + one_m_alpha * (s_p * inv_n2)
    e_prev = e_cur
    since_change = 0
    row = 0
    n_rows = out.shape[0]
    steps_done = 0

    for step in range(1, t_steps + 1):
        rng, u = _next_u(rng)
        e = int(u * m)
        if e >= m:
            e = m - 1
        i = ei[e]
        j = ej[e]
        xi = states[i]
        xj = states[j]
        s = signs[i, j]
        cfg = ((xi + 1) * 3 + (xj + 1)) * 2 + (1 if s > 0 else 0)

        rng, u = _next_u(rng)
        k_out = 0
        while u >= cum[cfg, k_out]:
            k_out += 1
        nxi = tgt[cfg, k_out, 0]
        nxj = tgt[cfg, k_out, 1]
        ns = tgt[cfg, k_out, 2]

        if ns != s:
            # sign flip proposal: exact triad and pair deltas for this edge
            cs = 0
            for kk in range(n):
                cs += signs[i, kk] * signs[j, kk]
            d_t = -2 * int(ns) * cs
            f = 1 if (xi == -1) != (xj == -1) else 0
            d_p = (int(ns) - int(s)) * f
            if gate_mode == GATE_NONE:
                accept = True
            else:
                if gate_mode == GATE_TRIAD:
                    gd = float(d_t)
                else:
                    gd = wt * d_t + wp * d_p
                if gd < 0.0:
                    accept = True
                elif gd == 0.0:
                    rng, u = _next_u(rng)
                    accept = u < 0.5
                else:
                    accept = False
            if accept:
                signs[i, j] = ns
                signs[j, i] = ns
                s_t += d_t
                s_p += d_p
                pos += 1 if ns > 0 else -1
        else:
            # epidemic proposal: one endpoint changes state
            if nxi != xi:
                v = i
                old = xi
                new = nxi
            else:
                v = j
                old = xj
                new = nxj
            inf_old = 1 if old == -1 else 0
            inf_new = 1 if new == -1 else 0
            d_p = 0
            if inf_old != inf_new:
                # exact pair-sum change over every edge incident to v
                for kk in range(n):
                    svk = signs[v, kk]
                    if svk != 0:
                        ik = 1 if states[kk] == -1 else 0
                        f_o = inf_old ^ ik
                        d_p += int(svk) * (1 - 2 * f_o)
            accept = True
            if gate_mode == GATE_TOTAL and gate_recovery and inf_old == 1:
                accept = wp * d_p <= 0.0
            if accept:
                if inf_old != inf_new:
                    s_p += d_p
                    n_inf += inf_new - inf_old
                if old == 0:
                    n_alert -= 1
                if new == 0:
                    n_alert += 1
                states[v] = new

        e_cur = alpha * (s_t * inv_n3) + one_m_alpha * (s_p * inv_n2)
        if e_cur == e_min:
            rng, u = _next_u(rng)
            if u < 0.5:
                e_min = e_cur
        elif e_cur < e_min:
            e_min = e_cur

        steps_done = step
        if e_cur != e_prev:
            since_change = 0
            e_prev = e_cur
        else:
            since_change += 1

        if step % sample_every == 0 and row < n_rows:
            out[row, 0] = step
            out[row, 1] = (n - n_inf - n_alert) / n
            out[row, 2] = n_alert / n
            out[row, 3] = n_inf / n
            out[row, 4] = pos / m
            out[row, 5] = s_p * inv_n2
            out[row, 6] = s_t * inv_n3
            out[row, 7] = e_cur
            out[row, 8] = (n_triads - s_t) / 2.0 / n_triads if n_triads > 0 else np.nan
            out[row, 9] = e_min
            row += 1

        if stop_stuck > 0 and since_change >= stop_stuck:
            break

    # pad remaining sample rows with the frozen values
    while row < n_rows:
        step_at = (row + 1) * sample_every
        out[row, 0] = step_at
        out[row, 1] = (n - n_inf - n_alert) / n
        out[row, 2] = n_alert / n
        out[row, 3] = n_inf / n
        out[row, 4] = pos / m
        out[row, 5] = s_p * inv_n2
        out[row, 6] = s_t * inv_n3
        out[row, 7] = e_cur
        out[row, 8] = (n_triads - s_t) / 2.0 / n_triads if n_triads > 0 else np.nan
        out[row, 9] = e_min
        row += 1

    counters[C_SP] = s_p
    counters[C_ST] = s_t
    counters[C_NINF] = n_inf
    counters[C_NALERT] = n_alert
    counters[C_POS] = pos
    return e_min, rng, steps_done
