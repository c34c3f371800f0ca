"""Per-edge transition distributions and rate parameters.

Each of the 12 unordered (state, state, sign) edge configurations has a
fixed menu of outcomes; every outcome changes exactly one aspect of the
pair: one endpoint's epidemic state, or the link sign.  Probabilities are
per simulation step of width ``dt``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

_STATES = (-1, 0, 1)


class GateMode(enum.Enum):
    """Energy gate applied when a proposal is evaluated.

    TOTAL gates on the weighted pair+triad delta, TRIAD on the triad delta
    alone (relationship changes only), NONE accepts everything.
    """

    TOTAL = "total"
    TRIAD = "triad"
    NONE = "none"


class GateScope(enum.Enum):
    """Which proposal kinds the energy gate examines.

    RECOVERY gates sign flips and recovery transitions (an infected user
    returns to susceptible only if that does not raise the energy across
    its links); infections and alerting stay purely rate-driven.  FLIP
    gates sign flips only and applies every epidemic change
    unconditionally.
    """

    RECOVERY = "recovery"
    FLIP = "flip"


@dataclass(frozen=True)
class Params:
    """Model rates and step width.

    beta / beta_a are the susceptible / alert infection rates, kappa the
    alerting rate, delta the recovery rate, dt the step width, and alpha
    the triad-vs-pair weight of the network energy.
    """

    beta: float
    kappa: float
    delta: float
    beta_a: float = 0.0
    dt: float = 0.001
    alpha: float = 0.5
    gate: GateMode = GateMode.TOTAL
    gate_scope: GateScope = GateScope.RECOVERY

    def __post_init__(self):
        if self.beta < 0 or self.kappa < 0:
            raise ValueError("beta and kappa must be >= 0")
        if self.delta <= 0:
            raise ValueError("delta must be > 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.beta > 0:
            if not 0 <= self.beta_a < self.beta:
                raise ValueError("need 0 <= beta_a < beta when beta > 0")
        elif self.beta_a != 0:
            raise ValueError("beta_a must be 0 when beta is 0")
        for (xi, xj, s), outcomes in _expand_table(self).items():
            for target, prob, changed, expr in outcomes:
                if prob < -1e-12 or prob > 1.0 + 1e-12:
                    raise ValueError(
                        f"transition probability {expr!r} = {prob} out of [0, 1] "
                        f"for source ({xi}, {xj}, {s:+d}); reduce dt or the rates"
                    )


class TransitionKind(enum.Enum):
    EPIDEMIC_CHANGE = "epidemic"
    SIGN_FLIP = "sign_flip"


@dataclass(frozen=True)
class EdgeConfig:
    """One of the 12 unordered pair configurations, stored canonically.

    Canonical order puts the larger state encoding first (S=1, A=0, I=-1),
    so e.g. (A, S, +) and (S, A, +) are the same configuration.
    """

    xi: int
    xj: int
    sign: int

    def __post_init__(self):
        if self.xi not in _STATES or self.xj not in _STATES:
            raise ValueError("states must be in {-1, 0, 1}")
        if self.sign not in (-1, 1):
            raise ValueError("edge sign must be -1 or +1")
        if self.xi < self.xj:
            lo, hi = self.xi, self.xj
            object.__setattr__(self, "xi", hi)
            object.__setattr__(self, "xj", lo)


@dataclass(frozen=True)
class TransitionOutcome:
    target: EdgeConfig
    probability: float
    kind: TransitionKind
    # 0 = the sign flipped; 1 / 2 = first / second canonical endpoint changed
    changed: int = field(compare=False, default=0)


def _table_spec():
    """Canonical-source transition menu.

    Values are lists of (target aligned with source positions, changed,
    expression label, probability function of (b, k, d, a)) where
    b = beta*dt, k = kappa*dt, d = delta*dt, a = beta_a*dt.
    """
    one = ("1", lambda b, k, d, a: 1.0)
    return {
        (1, 1, 1): [((1, 1, -1), 0, *one)],
        (1, 1, -1): [((1, 1, 1), 0, *one)],
        (1, 0, 1): [
            ((1, 0, -1), 0, "1 - k*dt*(1 - ba*dt)", lambda b, k, d, a: 1.0 - k * (1.0 - a)),
            ((0, 0, 1), 1, "k*dt*(1 - ba*dt)", lambda b, k, d, a: k * (1.0 - a)),
        ],
        (1, 0, -1): [((1, 0, 1), 0, *one)],
        (1, -1, 1): [
            (
                (1, -1, -1),
                0,
                "1 - d*dt - (b + k)*dt*(1 - 2*d*dt)",
                lambda b, k, d, a: 1.0 - d - (b + k) * (1.0 - 2.0 * d),
            ),
            ((0, -1, 1), 1, "k*dt*(1 - d*dt)", lambda b, k, d, a: k * (1.0 - d)),
            ((-1, -1, 1), 1, "b*dt*(1 - d*dt)", lambda b, k, d, a: b * (1.0 - d)),
            (
                (1, 1, 1),
                2,
                "d*dt*(1 - (b + k)*dt)",
                lambda b, k, d, a: d * (1.0 - (b + k)),
            ),
        ],
        (1, -1, -1): [
            ((1, 1, -1), 2, "d*dt", lambda b, k, d, a: d),
            ((1, -1, 1), 0, "1 - d*dt", lambda b, k, d, a: 1.0 - d),
        ],
        (0, 0, 1): [((0, 0, -1), 0, *one)],
        (0, 0, -1): [((0, 0, 1), 0, *one)],
        (0, -1, 1): [
            (
                (0, -1, -1),
                0,
                "1 - d*dt - ba*dt*(1 - 2*d*dt)",
                lambda b, k, d, a: 1.0 - d - a * (1.0 - 2.0 * d),
            ),
            ((-1, -1, 1), 1, "ba*dt*(1 - d*dt)", lambda b, k, d, a: a * (1.0 - d)),
            ((0, 1, 1), 2, "d*dt*(1 - ba*dt)", lambda b, k, d, a: d * (1.0 - a)),
        ],
        (0, -1, -1): [
            ((0, 1, -1), 2, "d*dt", lambda b, k, d, a: d),
            ((0, -1, 1), 0, "1 - d*dt", lambda b, k, d, a: 1.0 - d),
        ],
        (-1, -1, 1): [
            (
                (-1, -1, -1),
                0,
                "1 - 2*d*dt*(1 - d*dt)",
                lambda b, k, d, a: 1.0 - 2.0 * d * (1.0 - d),
            ),
            ((1, -1, 1), 1, "d*dt*(1 - d*dt)", lambda b, k, d, a: d * (1.0 - d)),
            ((-1, 1, 1), 2, "d*dt*(1 - d*dt)", lambda b, k, d, a: d * (1.0 - d)),
        ],
        (-1, -1, -1): [
            ((-1, -1, 1), 0, "1 - 2*d*dt", lambda b, k, d, a: 1.0 - 2.0 * d),
            ((1, -1, -1), 1, "d*dt", lambda b, k, d, a: d),
            ((-1, 1, -1), 2, "d*dt", lambda b, k, d, a: d),
        ],
    }


_SPEC = _table_spec()


def _expand_table(p: Params) -> dict:
    """Evaluate every probability expression at the given parameters."""
    b, k, d, a = p.beta * p.dt, p.kappa * p.dt, p.delta * p.dt, p.beta_a * p.dt
    table = {}
    for source, outcomes in _SPEC.items():
        table[source] = [
            (target, fn(b, k, d, a), changed, expr)
            for target, changed, expr, fn in outcomes
        ]
    return table


def transition_distribution(c: EdgeConfig, p: Params) -> list[TransitionOutcome]:
    """All outcomes reachable from configuration ``c`` in one step."""
    rows = _expand_table(p)[(c.xi, c.xj, c.sign)]
    result = []
    for (tx, ty, ts), prob, changed, _expr in rows:
        kind = TransitionKind.SIGN_FLIP if changed == 0 else TransitionKind.EPIDEMIC_CHANGE
        result.append(TransitionOutcome(EdgeConfig(tx, ty, ts), prob, kind, changed))
    return result


def sample_transition(c: EdgeConfig, p: Params, rng) -> TransitionOutcome:
    """Inverse-CDF draw over the outcome list, in its fixed order."""
    outcomes = transition_distribution(c, p)
    u = rng.random()
    acc = 0.0
    for outcome in outcomes:
        acc += outcome.probability
        if u < acc:
            return outcome
    return outcomes[-1]


def ordered_outcomes(x: int, y: int, z: int, p: Params):
    """Outcome menu for the ordered pair state (x, y, z).

    Returns a list of ((x', y', z'), probability, changed) where changed
    is 0 for a sign flip, 1 if node holding ``x`` changes, 2 for ``y``.
    States with z = 0 have no dynamics and return an empty list.
    """
    if z == 0:
        return []
    swapped = x < y
    key = (y, x, z) if swapped else (x, y, z)
    rows = _expand_table(p)[key]
    result = []
    for (tx, ty, ts), prob, changed, _expr in rows:
        if swapped:
            tx, ty = ty, tx
            changed = {0: 0, 1: 2, 2: 1}[changed]
        result.append(((tx, ty, ts), prob, changed))
    return result


_N_CFG = 18
_MAX_OUT = 4


def config_index(x: int, y: int, z: int) -> int:
    """Row index of an ordered nonzero-sign pair state in the step table."""
    return ((x + 1) * 3 + (y + 1)) * 2 + (1 if z > 0 else 0)


@lru_cache(maxsize=32)
def build_step_table(p: Params):
    """Compiled outcome table consumed by the simulation step loop.

    Returns (cumulative probabilities [18, 4], targets [18, 4, 3] as
    (x', y', z'), outcome counts [18]) indexed by ``config_index``.
    """
    cum = np.ones((_N_CFG, _MAX_OUT), dtype=np.float64)
    tgt = np.zeros((_N_CFG, _MAX_OUT, 3), dtype=np.int8)
    nout = np.zeros(_N_CFG, dtype=np.int8)
    for x in _STATES:
        for y in _STATES:
            for z in (-1, 1):
                row = config_index(x, y, z)
                outcomes = ordered_outcomes(x, y, z, p)
                nout[row] = len(outcomes)
                acc = 0.0
                for idx, ((tx, ty, ts), prob, _changed) in enumerate(outcomes):
                    acc += prob
                    cum[row, idx] = acc
                    tgt[row, idx, 0] = tx
                    tgt[row, idx, 1] = ty
                    tgt[row, idx, 2] = ts
                cum[row, len(outcomes) - 1] = 1.0
    return cum, tgt, nout
