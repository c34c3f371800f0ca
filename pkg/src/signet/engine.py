"""Monte Carlo engine: run initialization, stepping, ensembles, clusters.

The engine keeps the pair and triad energy sums as exact integers and
normalizes only on read, so a run of millions of steps cannot drift from
the full recomputation.  The hot loop lives in ``_kernel`` (numba); the
pure-Python ``step`` consumes the identical random stream and is used for
oracle tests and as a fallback.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .dynamics import (
    EdgeConfig,
    GateMode,
    GateScope,
    Params,
    TransitionKind,
    TransitionOutcome,
    build_step_table,
    config_index,
)
from .energy import EnergyBreakdown, NormalizationMode
from .graph import SignedGraph
from .rng import SplitMix64

SERIES_KEYS = ("s", "a", "rho", "r", "e_pair", "e_triad", "e_total", "balanced", "e_min")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def pair_sum_from_arrays(signs: np.ndarray, states: np.ndarray) -> int:
    """Exact unnormalized pairwise-energy sum over unordered pairs."""
    infected = states == -1
    transmissible = infected[:, None] ^ infected[None, :]
    return int((signs * transmissible).sum()) // 2


def triad_sums_from_arrays(signs: np.ndarray) -> tuple[int, int]:
    """Exact (unnormalized triad-energy sum, closed-triad count).

    Uses trace(A^3)/6 over the sign matrix; float64 products are exact for
    the graph sizes this engine targets (n well below 2^17).
    """
    a = signs.astype(np.float64)
    signed = int(round(np.trace(a @ a @ a)))
    absolute = int(round(np.trace(np.abs(a) @ np.abs(a) @ np.abs(a))))
    return -(signed // 6), absolute // 6


@dataclass(frozen=True)
class InitialConditions:
    """Initial infected/friendly fractions and the base RNG seed."""

    rho0: float
    r0: float
    a0: float = 0.0
    seed: int = 0
    use_native_signs: bool = False

    def __post_init__(self):
        for name in ("rho0", "r0", "a0"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.rho0 + self.a0 > 1.0 + 1e-12:
            raise ValueError("rho0 + a0 must not exceed 1")


class NetworkState:
    """Joint (graph signs, node states) state with cached energy sums."""

    def __init__(self, signs, states, ei, ej, norm: NormalizationMode):
        self.signs = signs
        self.states = states
        self.ei = ei
        self.ej = ej
        self.norm = norm
        self.n = signs.shape[0]
        self.m = len(ei)
        self.s_p = pair_sum_from_arrays(signs, states)
        self.s_t, self.triad_count = triad_sums_from_arrays(signs)
        if norm is NormalizationMode.PAPER_BINOMIAL:
            self.n2 = math.comb(self.n, 2)
            self.n3 = math.comb(self.n, 3)
        else:
            self.n2 = self.m
            self.n3 = self.triad_count
        self.inv_n2 = 1.0 / self.n2 if self.n2 else 0.0
        self.inv_n3 = 1.0 / self.n3 if self.n3 else 0.0
        self.n_inf = int((states == -1).sum())
        self.n_alert = int((states == 0).sum())
        self.pos_edges = int((signs[ei, ej] > 0).sum()) if self.m else 0
        self.step_count = 0
        self.e_min: float | None = None

    # densities and energies -------------------------------------------

    @property
    def frac_susceptible(self) -> float:
        return (self.n - self.n_inf - self.n_alert) / self.n

    @property
    def frac_alert(self) -> float:
        return self.n_alert / self.n

    @property
    def frac_infected(self) -> float:
        return self.n_inf / self.n

    @property
    def frac_friendly(self) -> float:
        return self.pos_edges / self.m if self.m else 0.0

    @property
    def balanced_fraction(self) -> float:
        if self.triad_count == 0:
            return float("nan")
        return (self.triad_count - self.s_t) / 2.0 / self.triad_count

    def energy(self, alpha: float) -> EnergyBreakdown:
        e_p = self.s_p * self.inv_n2
        e_t = self.s_t * self.inv_n3
        return EnergyBreakdown(e_p, e_t, alpha * e_t + (1.0 - alpha) * e_p, alpha)

    def graph_view(self) -> SignedGraph:
        return SignedGraph.from_matrix(self.signs)

    def copy(self) -> "NetworkState":
        dup = object.__new__(NetworkState)
        dup.__dict__.update(self.__dict__)
        dup.signs = self.signs.copy()
        dup.states = self.states.copy()
        return dup

    def validate(self) -> None:
        """Check the cached sums against full recomputation."""
        s_p = pair_sum_from_arrays(self.signs, self.states)
        s_t, triads = triad_sums_from_arrays(self.signs)
        if (s_p, s_t, triads) != (self.s_p, self.s_t, self.triad_count):
            raise AssertionError(
                f"cache drift: pair {self.s_p} vs {s_p}, "
                f"triad {self.s_t} vs {s_t}, count {self.triad_count} vs {triads}"
            )
        if self.n_inf != int((self.states == -1).sum()):
            raise AssertionError("infected counter drift")
        if self.m and self.pos_edges != int((self.signs[self.ei, self.ej] > 0).sum()):
            raise AssertionError("positive-edge counter drift")


def initialize(
    g: SignedGraph,
    ic: InitialConditions,
    rng: np.random.Generator | None = None,
    norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL,
) -> NetworkState:
    """Materialize node states and edge signs on the given topology.

    Exactly round(rho0*n) nodes become infected and round(a0*n) alert
    (floored if the two round past n); exactly round(r0*m) edges become
    friendly unless ``use_native_signs`` keeps the loaded polarity.
    Rounding is half-up.
    """
    if rng is None:
        rng = np.random.default_rng(ic.seed)
    signs, ei, ej = g.to_arrays()
    n, m = g.n, len(ei)
    n_inf = _round_half_up(ic.rho0 * n)
    n_alert = _round_half_up(ic.a0 * n)
    if n_inf + n_alert > n:
        n_alert = n - n_inf
    perm = rng.permutation(n)
    states = np.ones(n, dtype=np.int8)
    states[perm[:n_inf]] = -1
    states[perm[n_inf : n_inf + n_alert]] = 0
    if not ic.use_native_signs and m:
        n_pos = _round_half_up(ic.r0 * m)
        order = rng.permutation(m)
        edge_signs = np.full(m, -1, dtype=np.int8)
        edge_signs[order[:n_pos]] = 1
        signs[ei, ej] = edge_signs
        signs[ej, ei] = edge_signs
    return NetworkState(signs, states, ei, ej, norm)


# -- proposal application ---------------------------------------------------


@dataclass(frozen=True)
class AcceptanceDecision:
    applied: bool
    kind: TransitionKind
    gate_value: float | None
    dpair_unnorm: int
    dtriad_unnorm: int


def _gate_weights(state: NetworkState, p: Params) -> tuple[float, float]:
    # scaled so wt*d_t + wp*d_p has the sign of the normalized total delta
    if state.n3 > 0:
        return p.alpha * state.n2, (1.0 - p.alpha) * state.n3
    return 0.0, 1.0 - p.alpha


def _apply_proposal(
    state: NetworkState,
    p: Params,
    i: int,
    j: int,
    xi: int,
    xj: int,
    s: int,
    nxi: int,
    nxj: int,
    ns: int,
    rng,
) -> AcceptanceDecision:
    """Gate and (maybe) apply one proposal; mirrors the compiled kernel."""
    wt, wp = _gate_weights(state, p)
    if ns != s:
        cs = int(
            state.signs[i].astype(np.int64) @ state.signs[j].astype(np.int64)
        )
        d_t = -2 * ns * cs
        f = 1 if (xi == -1) != (xj == -1) else 0
        d_p = (ns - s) * f
        gate_value: float | None = None
        if p.gate is GateMode.NONE:
            accept = True
        else:
            gd = float(d_t) if p.gate is GateMode.TRIAD else wt * d_t + wp * d_p
            gate_value = gd
            if gd < 0.0:
                accept = True
            elif gd == 0.0:
                accept = rng.random() < 0.5
            else:
                accept = False
        if accept:
            state.signs[i, j] = ns
            state.signs[j, i] = ns
            state.s_t += d_t
            state.s_p += d_p
            state.pos_edges += 1 if ns > 0 else -1
        return AcceptanceDecision(
            accept, TransitionKind.SIGN_FLIP, gate_value, d_p if accept else 0, d_t if accept else 0
        )

    # epidemic change: exactly one endpoint differs
    if nxi != xi:
        v, old, new = i, xi, nxi
    else:
        v, old, new = j, xj, nxj
    inf_old = 1 if old == -1 else 0
    inf_new = 1 if new == -1 else 0
    d_p = 0
    if inf_old != inf_new:
        # exact pair-sum change over every edge incident to v
        row = state.signs[v].astype(np.int64)
        infected = state.states == -1
        f_o = np.logical_xor(bool(inf_old), infected)
        d_p = int((row * (1 - 2 * f_o.astype(np.int64))).sum())
    accept = True
    gate_value = None
    if p.gate is GateMode.TOTAL and p.gate_scope is GateScope.RECOVERY and inf_old == 1:
        gd = wp * d_p
        gate_value = gd
        accept = gd <= 0.0
    if accept:
        if inf_old != inf_new:
            state.s_p += d_p
            state.n_inf += inf_new - inf_old
        if old == 0:
            state.n_alert -= 1
        if new == 0:
            state.n_alert += 1
        state.states[v] = new
    return AcceptanceDecision(
        accept, TransitionKind.EPIDEMIC_CHANGE, gate_value, d_p if accept else 0, 0
    )


def apply_with_acceptance(
    state: NetworkState,
    i: int,
    j: int,
    outcome: TransitionOutcome,
    p: Params,
    rng,
) -> AcceptanceDecision:
    """Apply one drawn outcome to edge (i, j) under the energy gate."""
    xi = int(state.states[i])
    xj = int(state.states[j])
    s = int(state.signs[i, j])
    if s == 0:
        raise ValueError(f"({i}, {j}) holds no link")
    if outcome.kind is TransitionKind.SIGN_FLIP:
        return _apply_proposal(state, p, i, j, xi, xj, s, xi, xj, -s, rng)
    swapped = xi < xj
    v_is_i = (outcome.changed == 1) != swapped
    # the changed endpoint takes whichever target state is left after
    # matching the unchanged endpoint's state
    tstates = [outcome.target.xi, outcome.target.xj]
    unchanged = (
        EdgeConfig(xi, xj, s).xj if outcome.changed == 1 else EdgeConfig(xi, xj, s).xi
    )
    tstates.remove(unchanged)
    new_state = tstates[0]
    if v_is_i:
        return _apply_proposal(state, p, i, j, xi, xj, s, new_state, xj, s, rng)
    return _apply_proposal(state, p, i, j, xi, xj, s, xi, new_state, s, rng)


def step(state: NetworkState, p: Params, rng: SplitMix64) -> AcceptanceDecision:
    """One engine step: pick an edge, draw a proposal, gate it, track e_min.

    Consumes the random stream exactly like the compiled kernel, so T
    calls of this function reproduce one kernel invocation of T steps.
    """
    if state.e_min is None:
        state.e_min = state.energy(p.alpha).e_total
    cum, tgt, _nout = build_step_table(p)
    u = rng.random()
    e = int(u * state.m)
    if e >= state.m:
        e = state.m - 1
    i = int(state.ei[e])
    j = int(state.ej[e])
    xi = int(state.states[i])
    xj = int(state.states[j])
    s = int(state.signs[i, j])
    cfg = config_index(xi, xj, s)
    u = rng.random()
    k = 0
    while u >= cum[cfg, k]:
        k += 1
    nxi = int(tgt[cfg, k, 0])
    nxj = int(tgt[cfg, k, 1])
    ns = int(tgt[cfg, k, 2])
    decision = _apply_proposal(state, p, i, j, xi, xj, s, nxi, nxj, ns, rng)
    e_cur = state.energy(p.alpha).e_total
    if e_cur == state.e_min:
        if rng.random() < 0.5:
            state.e_min = e_cur
    elif e_cur < state.e_min:
        state.e_min = e_cur
    state.step_count += 1
    return decision


# -- full runs ---------------------------------------------------------------


@dataclass
class RunRecord:
    """Sampled time series plus end-of-run summary for one run."""

    steps: np.ndarray
    t: np.ndarray
    series: dict[str, np.ndarray]
    e_min: float
    seed: int
    steps_executed: int
    final: dict
    clusters: "ClusterReport | None" = None


def _sample_row(state: NetworkState, alpha: float) -> list[float]:
    e = state.energy(alpha)
    return [
        state.frac_susceptible,
        state.frac_alert,
        state.frac_infected,
        state.frac_friendly,
        e.e_pair,
        e.e_triad,
        e.e_total,
        state.balanced_fraction,
        state.e_min if state.e_min is not None else e.e_total,
    ]


def run(
    g: SignedGraph,
    ic: InitialConditions,
    p: Params,
    t_steps: int,
    sample_every: int = 100,
    rng: SplitMix64 | None = None,
    *,
    norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL,
    stop_stuck: int | None = None,
    use_kernel: bool = True,
    record_clusters: bool = True,
) -> RunRecord:
    """Execute one seeded run of ``t_steps`` steps and record samples.

    When ``stop_stuck`` is set, the run ends early once the weighted
    energy has not changed for that many consecutive steps; the remaining
    sample rows repeat the frozen values so ensembles stay aligned.
    """
    if t_steps < 1:
        raise ValueError("t_steps must be >= 1")
    if g.m == 0:
        raise ValueError("graph has no edges to evolve")
    state = initialize(g, ic, norm=norm)
    if rng is None:
        rng = SplitMix64(ic.seed)
    state.e_min = state.energy(p.alpha).e_total
    n_rows = t_steps // sample_every
    out = np.empty((n_rows, 10), dtype=np.float64)
    row0 = _sample_row(state, p.alpha)

    if use_kernel:
        from . import _kernel

        cum, tgt, _nout = build_step_table(p)
        counters = np.array(
            [state.s_p, state.s_t, state.n_inf, state.n_alert, state.pos_edges],
            dtype=np.int64,
        )
        wt, wp = _gate_weights(state, p)
        gate_mode = {GateMode.TOTAL: 0, GateMode.TRIAD: 1, GateMode.NONE: 2}[p.gate]
        e_min, rng_state, steps_done = _kernel.run_steps(
            state.signs,
            state.states,
            state.ei,
            state.ej,
            cum,
            tgt,
            p.alpha,
            state.inv_n2,
            state.inv_n3,
            wt,
            wp,
            gate_mode,
            p.gate_scope is GateScope.RECOVERY,
            t_steps,
            sample_every,
            stop_stuck or 0,
            np.uint64(rng.state),
            counters,
            state.triad_count,
            state.e_min,
            out,
        )
        state.s_p = int(counters[0])
        state.s_t = int(counters[1])
        state.n_inf = int(counters[2])
        state.n_alert = int(counters[3])
        state.pos_edges = int(counters[4])
        state.e_min = float(e_min)
        state.step_count += int(steps_done)
        rng.state = int(rng_state)
        steps_executed = int(steps_done)
    else:
        row = 0
        e_prev = state.e_min
        since = 0
        steps_executed = 0
        for s_idx in range(1, t_steps + 1):
            step(state, p, rng)
            steps_executed = s_idx
            e_cur = state.energy(p.alpha).e_total
            if e_cur != e_prev:
                since = 0
                e_prev = e_cur
            else:
                since += 1
            if s_idx % sample_every == 0 and row < n_rows:
                out[row] = [float(s_idx)] + _sample_row(state, p.alpha)
                row += 1
            if stop_stuck and since >= stop_stuck:
                break
        while row < n_rows:
            out[row] = [float((row + 1) * sample_every)] + _sample_row(state, p.alpha)
            row += 1

    steps = np.concatenate(([0], out[:, 0])).astype(np.int64)
    series = {}
    for idx, key in enumerate(SERIES_KEYS):
        series[key] = np.concatenate(([row0[idx]], out[:, idx + 1]))
    final_energy = state.energy(p.alpha)
    record = RunRecord(
        steps=steps,
        t=steps * p.dt,
        series=series,
        e_min=float(state.e_min),
        seed=ic.seed,
        steps_executed=steps_executed,
        final={
            "n_susceptible": state.n - state.n_inf - state.n_alert,
            "n_alert": state.n_alert,
            "n_infected": state.n_inf,
            "positive_edges": state.pos_edges,
            "e_pair": final_energy.e_pair,
            "e_triad": final_energy.e_triad,
            "e_total": final_energy.e_total,
            "balanced_fraction": state.balanced_fraction,
        },
        clusters=detect_clusters(state) if record_clusters else None,
    )
    return record


# -- ensembles ---------------------------------------------------------------


@dataclass
class RunSpec:
    """Everything needed to launch one run (or one ensemble of runs)."""

    ic: InitialConditions
    params: Params
    t_steps: int
    sample_every: int = 100
    graph: SignedGraph | None = None
    graph_factory: Callable[[int], SignedGraph] | None = None
    norm: NormalizationMode = NormalizationMode.PAPER_BINOMIAL
    stop_stuck: int | None = None
    record_clusters: bool = False

    def graph_for(self, seed: int) -> SignedGraph:
        if self.graph is not None:
            return self.graph
        if self.graph_factory is None:
            raise ValueError("RunSpec needs a graph or a graph_factory")
        return self.graph_factory(seed)


@dataclass
class EnsembleStats:
    """Pointwise mean/std across runs, plus the per-run records."""

    steps: np.ndarray
    t: np.ndarray
    mean: dict[str, np.ndarray]
    std: dict[str, np.ndarray]
    runs: int
    records: list[RunRecord] = field(repr=False, default_factory=list)

    def summary(self, tail: float = 0.1) -> dict[str, tuple[float, float]]:
        """Steady-state scalars: per-run mean over the final ``tail`` of
        samples, then mean/std across runs.  e_min summarizes as-is."""
        k = max(1, int(math.ceil(tail * len(self.steps))))
        result = {}
        for key in SERIES_KEYS:
            if key == "e_min":
                vals = np.array([rec.e_min for rec in self.records])
            else:
                vals = np.array(
                    [float(np.mean(rec.series[key][-k:])) for rec in self.records]
                )
            result[key] = (float(np.mean(vals)), float(np.std(vals)))
        return result


def _run_one(spec: RunSpec, index: int) -> RunRecord:
    seed = spec.ic.seed + index
    ic = replace(spec.ic, seed=seed)
    g = spec.graph_for(seed)
    return run(
        g,
        ic,
        spec.params,
        spec.t_steps,
        spec.sample_every,
        norm=spec.norm,
        stop_stuck=spec.stop_stuck,
        record_clusters=spec.record_clusters,
    )


def run_ensemble(spec: RunSpec, runs: int, jobs: int = 1) -> EnsembleStats:
    """Independent seeded runs (seed_i = base + i), aggregated pointwise."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, [spec] * runs, range(runs)))
    else:
        records = [_run_one(spec, idx) for idx in range(runs)]
    mean: dict[str, np.ndarray] = {}
    std: dict[str, np.ndarray] = {}
    for key in SERIES_KEYS:
        stack = np.stack([rec.series[key] for rec in records])
        mean[key] = stack.mean(axis=0)
        std[key] = stack.std(axis=0)
    return EnsembleStats(
        steps=records[0].steps.copy(),
        t=records[0].t.copy(),
        mean=mean,
        std=std,
        runs=runs,
        records=records,
    )


# -- cluster analysis ---------------------------------------------------------


@dataclass(frozen=True)
class ClusterComponent:
    size: int
    n_susceptible: int
    n_alert: int
    n_infected: int


@dataclass(frozen=True)
class ClusterReport:
    n_components: int
    components: tuple[ClusterComponent, ...]
    neg_cross_fraction: float
    pos_internal_fraction: float


def detect_clusters(state: NetworkState) -> ClusterReport:
    """Connected components over positive edges, with composition and the
    consistency of negative links as between-cluster separators."""
    n = state.n
    comp = np.full(n, -1, dtype=np.int64)
    current = 0
    for start in range(n):
        if comp[start] >= 0:
            continue
        stack = [start]
        comp[start] = current
        while stack:
            v = stack.pop()
            for w in np.nonzero(state.signs[v] > 0)[0]:
                if comp[w] < 0:
                    comp[w] = current
                    stack.append(int(w))
        current += 1

    components = []
    for c in range(current):
        members = comp == c
        st = state.states[members]
        components.append(
            ClusterComponent(
                size=int(members.sum()),
                n_susceptible=int((st == 1).sum()),
                n_alert=int((st == 0).sum()),
                n_infected=int((st == -1).sum()),
            )
        )
    components.sort(key=lambda comp_info: -comp_info.size)

    if state.m:
        edge_signs = state.signs[state.ei, state.ej]
        cross = comp[state.ei] != comp[state.ej]
        neg = edge_signs < 0
        pos = edge_signs > 0
        n_neg = int(neg.sum())
        n_pos = int(pos.sum())
        neg_cross = float((neg & cross).sum() / n_neg) if n_neg else 0.0
        pos_internal = float((pos & ~cross).sum() / n_pos) if n_pos else 0.0
    else:
        neg_cross = 0.0
        pos_internal = 0.0
    return ClusterReport(
        n_components=current,
        components=tuple(components),
        neg_cross_fraction=neg_cross,
        pos_internal_fraction=pos_internal,
    )
