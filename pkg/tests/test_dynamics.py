import numpy as np
import pytest

from signet.dynamics import (
    EdgeConfig,
    GateMode,
    Params,
    TransitionKind,
    build_step_table,
    config_index,
    ordered_outcomes,
    sample_transition,
    transition_distribution,
)
from signet.rng import SplitMix64

P_REF = dict(beta=6.0, kappa=4.0, delta=9.0, beta_a=1.8, dt=0.001)


def params(**kw):
    base = dict(P_REF)
    base.update(kw)
    return Params(**base)


ALL_CONFIGS = [
    EdgeConfig(x, y, s)
    for x in (1, 0, -1)
    for y in (1, 0, -1)
    if x >= y
    for s in (1, -1)
]


class TestParamsValidation:
    def test_valid(self):
        params()

    def test_negative_rates(self):
        with pytest.raises(ValueError):
            params(beta=-1)
        with pytest.raises(ValueError):
            params(delta=0)
        with pytest.raises(ValueError):
            params(dt=0)

    def test_beta_a_ordering(self):
        with pytest.raises(ValueError):
            params(beta_a=6.0)
        with pytest.raises(ValueError):
            params(beta=0.0, beta_a=1.0)
        params(beta=0.0, beta_a=0.0)

    def test_probability_overflow_names_expression(self):
        with pytest.raises(ValueError, match="d\\*dt"):
            params(delta=9.0, dt=0.2)

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            params(alpha=1.5)


class TestEdgeConfig:
    def test_canonical_ordering(self):
        assert EdgeConfig(0, 1, 1) == EdgeConfig(1, 0, 1)
        assert EdgeConfig(-1, 1, -1).xi == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            EdgeConfig(2, 0, 1)
        with pytest.raises(ValueError):
            EdgeConfig(1, 0, 0)


class TestTransitionDistribution:
    def test_si_positive_row(self):
        # direct evaluation of the per-step expressions at the reference rates
        outs = transition_distribution(EdgeConfig(1, -1, 1), params())
        probs = {(o.target.xi, o.target.xj, o.target.sign): o.probability for o in outs}
        assert probs[(1, -1, -1)] == pytest.approx(0.98118)
        assert probs[(0, -1, 1)] == pytest.approx(0.003964)
        assert probs[(-1, -1, 1)] == pytest.approx(0.005946)
        assert probs[(1, 1, 1)] == pytest.approx(0.00891)

    def test_ai_positive_row(self):
        outs = transition_distribution(EdgeConfig(0, -1, 1), params())
        probs = {(o.target.xi, o.target.xj, o.target.sign): o.probability for o in outs}
        assert probs[(0, -1, -1)] == pytest.approx(0.9892324)
        assert probs[(-1, -1, 1)] == pytest.approx(0.0017838)
        assert probs[(1, 0, 1)] == pytest.approx(0.0089838)

    def test_neutral_flips_probability_one(self):
        for cfg in (EdgeConfig(1, 1, -1), EdgeConfig(1, 1, 1), EdgeConfig(0, 0, 1),
                    EdgeConfig(0, 0, -1), EdgeConfig(1, 0, -1)):
            outs = transition_distribution(cfg, params())
            assert len(outs) == 1
            assert outs[0].probability == 1.0
            assert outs[0].kind is TransitionKind.SIGN_FLIP

    def test_infected_pair_rows(self):
        outs = transition_distribution(EdgeConfig(-1, -1, 1), params())
        d = 0.009
        assert [o.probability for o in outs] == pytest.approx(
            [1 - 2 * d * (1 - d), d * (1 - d), d * (1 - d)]
        )
        outs = transition_distribution(EdgeConfig(-1, -1, -1), params())
        assert [o.probability for o in outs] == pytest.approx([1 - 2 * d, d, d])

    def test_rows_sum_to_one(self):
        for beta in (0.5, 4.0, 10.0):
            p = params(beta=beta, beta_a=0.3 * beta)
            for cfg in ALL_CONFIGS:
                total = sum(o.probability for o in transition_distribution(cfg, p))
                assert abs(total - 1.0) <= 1e-15

    def test_probabilities_nonnegative(self):
        p = params()
        for cfg in ALL_CONFIGS:
            for o in transition_distribution(cfg, p):
                assert 0.0 <= o.probability <= 1.0

    def test_exactly_one_aspect_changes(self):
        p = params()
        for cfg in ALL_CONFIGS:
            for o in transition_distribution(cfg, p):
                state_changes = (o.changed != 0)
                sign_changed = o.target.sign != cfg.sign
                assert state_changes != sign_changed
                if o.kind is TransitionKind.SIGN_FLIP:
                    assert (o.target.xi, o.target.xj) == (cfg.xi, cfg.xj)

    def test_no_alert_reachable_without_kappa(self):
        # SIS restriction: S/I-only configurations never produce an alert state
        p = params(kappa=0.0)
        for cfg in ALL_CONFIGS:
            if 0 in (cfg.xi, cfg.xj):
                continue
            for o in transition_distribution(cfg, p):
                if o.probability > 0:
                    assert 0 not in (o.target.xi, o.target.xj)


class TestOrderedOutcomes:
    def test_no_link_no_dynamics(self):
        assert ordered_outcomes(1, -1, 0, params()) == []

    def test_mirror_symmetry(self):
        p = params()
        for x in (1, 0, -1):
            for y in (1, 0, -1):
                for z in (1, -1):
                    fwd = {(t, prob) for t, prob, _c in ordered_outcomes(x, y, z, p)}
                    mirrored = {
                        ((ty, tx, tz), prob)
                        for (tx, ty, tz), prob, _c in ordered_outcomes(y, x, z, p)
                    }
                    assert fwd == mirrored

    def test_step_table_matches_ordered_outcomes(self):
        p = params()
        cum, tgt, nout = build_step_table(p)
        for x in (1, 0, -1):
            for y in (1, 0, -1):
                for z in (1, -1):
                    row = config_index(x, y, z)
                    outs = ordered_outcomes(x, y, z, p)
                    assert nout[row] == len(outs)
                    acc = 0.0
                    for k, ((tx, ty, tz), prob, _c) in enumerate(outs):
                        acc += prob
                        assert tuple(tgt[row, k]) == (tx, ty, tz)
                        if k < len(outs) - 1:
                            assert cum[row, k] == pytest.approx(acc)
                    assert cum[row, len(outs) - 1] == 1.0


class TestSampling:
    def test_deterministic_under_fixed_seed(self):
        p = params()
        c = EdgeConfig(1, -1, 1)
        a = sample_transition(c, p, SplitMix64(99))
        b = sample_transition(c, p, SplitMix64(99))
        assert a == b

    def test_probability_one_flip_always_drawn(self):
        p = params()
        rng = SplitMix64(5)
        c = EdgeConfig(1, 0, -1)
        for _ in range(50):
            o = sample_transition(c, p, rng)
            assert o.kind is TransitionKind.SIGN_FLIP

    def test_empirical_frequency_matches(self):
        # binomial check on the infection outcome of the S+I configuration
        p = params()
        c = EdgeConfig(1, -1, 1)
        rng = SplitMix64(1234)
        n = 1_000_000
        target = EdgeConfig(-1, -1, 1)
        hits = sum(
            1 for _ in range(n)
            if sample_transition(c, p, rng).target == target
        )
        p_true = 0.005946
        sigma = (n * p_true * (1 - p_true)) ** 0.5
        assert abs(hits - n * p_true) <= 3 * sigma

    def test_nonincreasing_infection_without_rates(self):
        # with beta = beta_a = 0 no outcome ever adds an infected endpoint
        p = params(beta=0.0, beta_a=0.0)
        for cfg in ALL_CONFIGS:
            n_inf_src = (cfg.xi == -1) + (cfg.xj == -1)
            for o in transition_distribution(cfg, p):
                if o.probability > 0:
                    n_inf_tgt = (o.target.xi == -1) + (o.target.xj == -1)
                    assert n_inf_tgt <= n_inf_src
