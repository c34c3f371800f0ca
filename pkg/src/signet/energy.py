"""Pairwise spreading energy, triad balance energy, and their increments.

The node state encoding is S=1, A=0, I=-1.  A signed pair contributes
pairwise energy -1 (balanced: hostile link blocking spread), +1
(unbalanced: friendly link that can transmit) or 0 (neutral).  A closed
triad contributes minus the product of its three signs.  The weighted
network energy mixes the two normalized totals with weight ``alpha`` on
the triad part.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .graph import SignedGraph


class NodeState(enum.IntEnum):
    SUSCEPTIBLE = 1
    ALERT = 0
    INFECTED = -1


class EdgeClass(enum.Enum):
    BALANCED = "balanced"
    UNBALANCED = "unbalanced"
    NEUTRAL = "neutral"


class NormalizationMode(enum.Enum):
    """How pair/triad sums are turned into densities.

    PAPER_BINOMIAL divides by C(n,2) and C(n,3) regardless of how many
    links or closed triads actually exist; PRESENT_COUNT divides by the
    present edge and triad counts so sparse graphs still report values
    in [-1, 1].
    """

    PAPER_BINOMIAL = "binomial"
    PRESENT_COUNT = "present"


def pair_normalizer(g: SignedGraph, norm: NormalizationMode) -> int:
    if norm is NormalizationMode.PAPER_BINOMIAL:
        return math.comb(g.n, 2)
    return g.m


def triad_normalizer(g: SignedGraph, norm: NormalizationMode) -> int:
    if norm is NormalizationMode.PAPER_BINOMIAL:
        return math.comb(g.n, 3)
    return g.count_triads()


def pairwise_energy(xi: int, xj: int, sign: int) -> int:
    """Energy of one user pair: even-sum branch uses (xi-xj)^2/4, odd uses
    (1-xi-xj)/2, both scaled by the link sign.  A zero sign yields 0."""
    if sign == 0:
        return 0
    if abs(xi + xj) % 2 == 0:
        return sign * ((xi - xj) ** 2) // 4
    return sign * (1 - xi - xj) // 2


def classify_edge(xi: int, xj: int, sign: int) -> EdgeClass:
    e = pairwise_energy(xi, xj, sign)
    if e == -1:
        return EdgeClass.BALANCED
    if e == 1:
        return EdgeClass.UNBALANCED
    return EdgeClass.NEUTRAL


def triad_energy(a_ij: int, a_jk: int, a_ki: int) -> int:
    """Minus the sign product: -1 for a balanced triad, +1 for unbalanced."""
    if a_ij == 0 or a_jk == 0 or a_ki == 0:
        raise ValueError("triad energy requires three nonzero signs")
    return -a_ij * a_jk * a_ki


def total_pairwise_energy(
    g: SignedGraph, states, norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL
) -> float:
    total = 0
    for i, j, s in g.edges():
        total += pairwise_energy(states[i], states[j], s)
    denom = pair_normalizer(g, norm)
    return total / denom if denom else 0.0


def total_triad_energy(
    g: SignedGraph, norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL
) -> float:
    total = 0
    for i, j, k in g.enumerate_triads():
        total += triad_energy(g.get_sign(i, j), g.get_sign(j, k), g.get_sign(k, i))
    denom = triad_normalizer(g, norm)
    return total / denom if denom else 0.0


@dataclass(frozen=True)
class EnergyBreakdown:
    e_pair: float
    e_triad: float
    e_total: float
    alpha: float


def total_energy(
    g: SignedGraph,
    states,
    alpha: float,
    norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL,
) -> EnergyBreakdown:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    e_p = total_pairwise_energy(g, states, norm)
    e_t = total_triad_energy(g, norm)
    return EnergyBreakdown(e_p, e_t, alpha * e_t + (1.0 - alpha) * e_p, alpha)


# -- incremental updates --------------------------------------------------


def delta_triad_energy(
    g: SignedGraph,
    i: int,
    j: int,
    old_sign: int,
    new_sign: int,
    norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL,
) -> float:
    """Normalized triad-energy change if edge (i,j) goes old_sign -> new_sign.

    ``g`` must still hold old_sign at (i,j); the update itself is
    -2 * new_sign * sum_k sign(i,k)*sign(j,k) when the sign flips, 0 when
    it does not.
    """
    if old_sign == 0 or new_sign == 0:
        raise ValueError("sign creation/deletion is outside the dynamics")
    if g.get_sign(i, j) != old_sign:
        raise ValueError("graph does not hold old_sign at (i, j)")
    if new_sign == old_sign:
        return 0.0
    if new_sign != -old_sign:
        raise ValueError("new_sign must equal old_sign or -old_sign")
    unnorm = -2 * new_sign * g.common_sign_product_sum(i, j)
    denom = triad_normalizer(g, norm)
    return unnorm / denom if denom else 0.0


def delta_pairwise_energy(
    xi_before: int,
    xj_before: int,
    sign_before: int,
    xi_after: int,
    xj_after: int,
    sign_after: int,
    g: SignedGraph,
    norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL,
) -> float:
    """Normalized single-pair energy difference between two configurations."""
    unnorm = pairwise_energy(xi_after, xj_after, sign_after) - pairwise_energy(
        xi_before, xj_before, sign_before
    )
    denom = pair_normalizer(g, norm)
    return unnorm / denom if denom else 0.0


def delta_pairwise_sum_for_state_change(
    g: SignedGraph, states, node: int, new_state: int
) -> int:
    """Unnormalized pair-sum change when one node changes epidemic state.

    Unlike a sign flip, a state change touches every edge incident to the
    node, so the exact bookkeeping sums the single-pair differences over
    the node's neighborhood.
    """
    old = states[node]
    if old == new_state:
        return 0
    total = 0
    for k in g.neighbors(node):
        s = g.get_sign(node, k)
        total += pairwise_energy(new_state, states[k], s) - pairwise_energy(
            old, states[k], s
        )
    return total


def delta_total_energy(dtriad: float, dpair: float, alpha: float) -> float:
    return alpha * dtriad + (1.0 - alpha) * dpair
