"""Tri-variate pair process (x, y, z) over 27 states and its steady state.

The pair chain treats one user pair in isolation: both endpoint states and
the link sign evolve by the same per-step menu the simulator uses.  States
with z = 0 (no link) are absorbing self-loops and are excluded from the
stationary solve.  Because the chain has several recurrent classes for
generic rates (an isolated pair cannot be re-infected), the stationary
distribution is computed per recurrent class and mixed by the absorption
probabilities from the chosen initial distribution.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .dynamics import Params, ordered_outcomes

_VALS = (-1, 0, 1)
_SYMBOL = {1: "S", 0: "A", -1: "I"}
_ZSYM = {1: "+", -1: "-", 0: "0"}

PAIR_STATES: list[tuple[int, int, int]] = [
    (x, y, z) for x in _VALS for y in _VALS for z in _VALS
]


def state_index(x: int, y: int, z: int) -> int:
    return 9 * (x + 1) + 3 * (y + 1) + (z + 1)


def state_label(x: int, y: int, z: int) -> str:
    return f"{_SYMBOL[x]}{_ZSYM[z]}{_SYMBOL[y]}"


@dataclass
class PairTransitionMatrix:
    matrix: np.ndarray  # 27 x 27, row-stochastic
    states: list[tuple[int, int, int]]
    labels: list[str]
    params: Params


def build_pair_chain(p: Params) -> PairTransitionMatrix:
    """One-step transition matrix over the 27 ordered pair states."""
    mat = np.zeros((27, 27), dtype=np.float64)
    for x, y, z in PAIR_STATES:
        row = state_index(x, y, z)
        if z == 0:
            mat[row, row] = 1.0
            continue
        total = 0.0
        outs = ordered_outcomes(x, y, z, p)
        for (tx, ty, tz), prob, _changed in outs:
            mat[row, state_index(tx, ty, tz)] += prob
            total += prob
    labels = [state_label(*s) for s in PAIR_STATES]
    return PairTransitionMatrix(mat, list(PAIR_STATES), labels, p)


@dataclass
class StationaryDistribution:
    pi: np.ndarray  # over the 18 z != 0 states
    states: list[tuple[int, int, int]]
    labels: list[str]
    residual: float
    n_recurrent_classes: int
    class_weights: np.ndarray


def _recurrent_classes(block: np.ndarray) -> list[np.ndarray]:
    """Indices of each recurrent class (sink SCCs of the support graph)."""
    support = block > 0.0
    n_comp, member = connected_components(
        support, directed=True, connection="strong"
    )
    classes = []
    for c in range(n_comp):
        inside = np.nonzero(member == c)[0]
        outgoing = support[np.ix_(inside, np.setdiff1d(np.arange(block.shape[0]), inside))]
        if not outgoing.any():
            classes.append(inside)
    return classes


def _solve_single(block: np.ndarray) -> np.ndarray:
    """Solve pi (P - I) = 0 with sum(pi) = 1 by replacing one equation."""
    k = block.shape[0]
    a = (block - np.eye(k)).T
    a[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    return pi / pi.sum()


def stationary_distribution(
    P: PairTransitionMatrix | np.ndarray, init: np.ndarray | None = None
) -> StationaryDistribution:
    """Stationary distribution of the pair chain (z != 0 block).

    For a chain with several recurrent classes the result is the exact
    long-run average started from ``init`` (uniform by default): each
    class's stationary vector weighted by the absorption probability of
    reaching it.  Raw row-stochastic matrices are accepted for testing.
    """
    if isinstance(P, PairTransitionMatrix):
        keep = [state_index(x, y, z) for (x, y, z) in PAIR_STATES if z != 0]
        block = P.matrix[np.ix_(keep, keep)]
        states = [PAIR_STATES[i] for i in keep]
        labels = [P.labels[i] for i in keep]
        leak = np.abs(block.sum(axis=1) - 1.0).max()
        if leak > 1e-12:
            raise ValueError(f"z != 0 block is not closed (leak {leak:.2e})")
    else:
        block = np.asarray(P, dtype=np.float64)
        states = [(0, 0, 0)] * block.shape[0]
        labels = [f"s{i}" for i in range(block.shape[0])]

    k = block.shape[0]
    if init is None:
        init = np.full(k, 1.0 / k)
    else:
        init = np.asarray(init, dtype=np.float64)
        init = init / init.sum()

    classes = _recurrent_classes(block)
    if len(classes) == 1 and len(classes[0]) == k:
        pi = _solve_single(block)
        weights = np.array([1.0])
    else:
        recurrent = np.concatenate(classes)
        transient = np.setdiff1d(np.arange(k), recurrent)
        # absorption probability into each class from every transient state
        weights = np.empty(len(classes))
        absorb = np.zeros((len(transient), len(classes)))
        if len(transient):
            t_block = block[np.ix_(transient, transient)]
            lhs = np.eye(len(transient)) - t_block
            for ci, cls in enumerate(classes):
                rhs = block[np.ix_(transient, cls)].sum(axis=1)
                absorb[:, ci] = np.linalg.solve(lhs, rhs)
        pi = np.zeros(k)
        for ci, cls in enumerate(classes):
            w = init[cls].sum()
            if len(transient):
                w += float(init[transient] @ absorb[:, ci])
            weights[ci] = w
            if w > 0:
                pi[cls] += w * _solve_single(block[np.ix_(cls, cls)])
        pi = pi / pi.sum()

    residual = float(np.abs(pi @ block - pi).max())
    return StationaryDistribution(
        pi=pi,
        states=states,
        labels=labels,
        residual=residual,
        n_recurrent_classes=len(classes),
        class_weights=weights,
    )


def theorem1_marginals(dist: StationaryDistribution) -> dict[str, float]:
    """Aggregate the pair-state probabilities into node/link fractions."""
    xs = np.array([s[0] for s in dist.states])
    zs = np.array([s[2] for s in dist.states])
    s_inf = float(dist.pi[xs == 1].sum())
    rho_inf = float(dist.pi[xs == -1].sum())
    a_inf = float(dist.pi[xs == 0].sum())
    total = s_inf + a_inf + rho_inf
    s_inf, a_inf, rho_inf = s_inf / total, a_inf / total, rho_inf / total
    a_inf = 1.0 - s_inf - rho_inf
    r_inf = float(dist.pi[zs == 1].sum()) / total
    return {"s_inf": s_inf, "rho_inf": rho_inf, "a_inf": a_inf, "r_inf": r_inf}


# -- the limit object of the printed generator definition -------------------


@dataclass
class GeneratorReport:
    """Literal small-step limit of the printed generator definition.

    ``literal`` takes the off-diagonal entries as lim P(dt) (order-one sign
    flips survive as 1, rate terms vanish) and the diagonal as
    lim (P_cc(dt) - 1)/dt, which diverges for rows without self mass.
    ``standard_rates`` divides off-diagonals by dt before the limit, the
    conventional CTMC construction; entries that stay order-one diverge
    there instead.  Rows flagged non-conservative admit no finite
    conservative rate interpretation.
    """

    literal: np.ndarray
    standard_rates: np.ndarray
    labels: list[str]
    non_conservative_rows: list[int]
    notes: list[str]


def generator_matrix(p: Params) -> GeneratorReport:
    # transition probabilities are polynomials in dt of degree <= 2, so
    # three evaluations recover the coefficients exactly
    h = p.dt / 16.0
    mats = []
    for dt_val in (h, 2 * h):
        q = Params(
            beta=p.beta, kappa=p.kappa, delta=p.delta, beta_a=p.beta_a,
            dt=dt_val, alpha=p.alpha, gate=p.gate, gate_scope=p.gate_scope,
        )
        mats.append(build_pair_chain(q).matrix)
    p1, p2 = mats
    eye = np.eye(27)
    # P(dt) = c0 + c1*dt + c2*dt^2
    c0 = 2.0 * p1 - p2
    c0[np.abs(c0) < 1e-12] = 0.0
    c0[np.abs(c0 - 1.0) < 1e-12] = 1.0
    c1 = (4.0 * p1 - p2 - 3.0 * c0) / (2.0 * h)

    literal = c0.copy()
    standard = np.full((27, 27), 0.0)
    non_conservative = []
    notes = []
    labels = [state_label(*s) for s in PAIR_STATES]
    for i in range(27):
        for j in range(27):
            if i == j:
                continue
            if c0[i, j] > 0:
                standard[i, j] = np.inf
            else:
                standard[i, j] = c1[i, j]
        literal[i, i] = 0.0 if c0[i, i] == 1.0 else -np.inf
        off = np.delete(standard[i], i)
        standard[i, i] = -off.sum() if np.isfinite(off).all() else -np.inf
        order_one = [j for j in range(27) if j != i and c0[i, j] > 0]
        if order_one:
            non_conservative.append(i)
            targets = ", ".join(labels[j] for j in order_one)
            notes.append(
                f"row {labels[i]}: probability-one sign flip toward {targets} "
                "stays order one as dt -> 0, so no finite rate exists"
            )
    return GeneratorReport(literal, standard, labels, non_conservative, notes)


# -- CSV export --------------------------------------------------------------


def write_matrix_csv(P: PairTransitionMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["state", "x", "y", "z"] + P.labels)
        for (x, y, z), label, row in zip(P.states, P.labels, P.matrix):
            w.writerow([label, x, y, z] + [repr(float(v)) for v in row])


def write_stationary_csv(dist: StationaryDistribution, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["state", "x", "y", "z", "pi"])
        for (x, y, z), label, v in zip(dist.states, dist.labels, dist.pi):
            w.writerow([label, x, y, z, repr(float(v))])
