import numpy as np
import pytest

from signet.dynamics import EdgeConfig, Params, transition_distribution
from signet.pairchain import (
    PAIR_STATES,
    build_pair_chain,
    generator_matrix,
    state_index,
    stationary_distribution,
    theorem1_marginals,
    write_matrix_csv,
    write_stationary_csv,
)

P_REF = Params(beta=6.0, kappa=4.0, delta=9.0, beta_a=1.8, dt=0.001)


class TestBuildPairChain:
    def test_rows_stochastic(self):
        P = build_pair_chain(P_REF).matrix
        assert np.abs(P.sum(axis=1) - 1.0).max() <= 1e-15
        assert P.min() >= 0.0

    def test_no_link_states_absorbing(self):
        P = build_pair_chain(P_REF).matrix
        for x in (-1, 0, 1):
            for y in (-1, 0, 1):
                idx = state_index(x, y, 0)
                assert P[idx, idx] == 1.0
                assert P[idx].sum() == 1.0

    def test_infection_entry(self):
        P = build_pair_chain(P_REF).matrix
        assert P[state_index(1, -1, 1), state_index(-1, -1, 1)] == pytest.approx(0.005946)

    def test_matches_transition_distribution(self):
        # the chain restricted to one source configuration reproduces the
        # per-edge outcome menu entry for entry
        P = build_pair_chain(P_REF).matrix
        for x in (1, 0, -1):
            for y in (1, 0, -1):
                if x < y:
                    continue
                for z in (1, -1):
                    outs = transition_distribution(EdgeConfig(x, y, z), P_REF)
                    row = P[state_index(x, y, z)]
                    by_target = {}
                    for o in outs:
                        key = (o.target.xi, o.target.xj, o.target.sign, o.changed)
                        # expand the canonical target to the ordered state
                        if o.changed == 0:
                            tgt = (x, y, o.target.sign)
                        elif o.changed == 1:
                            other = y
                            new = [s for s in (o.target.xi, o.target.xj)]
                            new.remove(other)
                            tgt = (new[0], y, z)
                        else:
                            other = x
                            new = [s for s in (o.target.xi, o.target.xj)]
                            new.remove(other)
                            tgt = (x, new[0], z)
                        by_target[tgt] = by_target.get(tgt, 0.0) + o.probability
                    for tgt, prob in by_target.items():
                        assert row[state_index(*tgt)] == pytest.approx(prob)


class TestStationary:
    def test_residual_small(self):
        dist = stationary_distribution(build_pair_chain(P_REF))
        assert dist.residual <= 1e-10
        assert dist.pi.min() >= 0.0
        assert dist.pi.sum() == pytest.approx(1.0, abs=1e-14)

    def test_doubly_stochastic_uniform(self):
        P = np.array([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]])
        dist = stationary_distribution(P)
        assert dist.pi == pytest.approx(np.full(3, 1 / 3))
        assert dist.n_recurrent_classes == 1

    def test_period_two_chain(self):
        P = np.array([[0.0, 1.0], [1.0, 0.0]])
        dist = stationary_distribution(P)
        assert dist.pi == pytest.approx([0.5, 0.5])

    def test_class_weights_sum_to_one(self):
        dist = stationary_distribution(build_pair_chain(P_REF))
        assert dist.class_weights.sum() == pytest.approx(1.0)
        assert dist.n_recurrent_classes >= 1


class TestMarginals:
    def test_uniform_pi(self):
        dist = stationary_distribution(build_pair_chain(P_REF))
        dist.pi[:] = 1.0 / 18.0
        marg = theorem1_marginals(dist)
        assert marg["s_inf"] == pytest.approx(1 / 3)
        assert marg["a_inf"] == pytest.approx(1 / 3)
        assert marg["rho_inf"] == pytest.approx(1 / 3)
        assert marg["r_inf"] == pytest.approx(0.5)

    def test_partition_identity_exact(self):
        marg = theorem1_marginals(stationary_distribution(build_pair_chain(P_REF)))
        assert marg["s_inf"] + marg["a_inf"] + marg["rho_inf"] == 1.0

    def test_no_alert_class_without_kappa(self):
        p = Params(beta=6.0, kappa=0.0, delta=9.0, beta_a=1.8, dt=0.001)
        chain = build_pair_chain(p)
        keep = [s for s in PAIR_STATES if s[2] != 0]
        init = np.array([1.0 if (s[0] != 0 and s[1] != 0) else 0.0 for s in keep])
        marg = theorem1_marginals(stationary_distribution(chain, init=init))
        assert marg["a_inf"] == 0.0

    def test_dt_refinement_stability(self):
        m1 = theorem1_marginals(stationary_distribution(build_pair_chain(P_REF)))
        p10 = Params(beta=6.0, kappa=4.0, delta=9.0, beta_a=1.8, dt=0.0001)
        m2 = theorem1_marginals(stationary_distribution(build_pair_chain(p10)))
        for key in m1:
            assert abs(m1[key] - m2[key]) < 1e-3


class TestGenerator:
    def test_delta_rate_under_standard_convention(self):
        rep = generator_matrix(P_REF)
        i = state_index(1, -1, -1)
        j = state_index(1, 1, -1)
        assert rep.standard_rates[i, j] == pytest.approx(9.0)

    def test_probability_one_flips_flagged(self):
        rep = generator_matrix(P_REF)
        i = state_index(1, -1, -1)
        assert rep.literal[i, state_index(1, -1, 1)] == 1.0
        assert rep.literal[i, i] == -np.inf
        assert i in rep.non_conservative_rows
        # every linked state keeps an order-one flip, no-link rows stay conservative
        assert len(rep.non_conservative_rows) == 18
        for x in (-1, 0, 1):
            for y in (-1, 0, 1):
                idx = state_index(x, y, 0)
                assert idx not in rep.non_conservative_rows
                assert rep.literal[idx, idx] == 0.0

    def test_notes_describe_rows(self):
        rep = generator_matrix(P_REF)
        assert len(rep.notes) == len(rep.non_conservative_rows)


class TestCsvExport:
    def test_matrix_and_pi_files(self, tmp_path):
        chain = build_pair_chain(P_REF)
        dist = stationary_distribution(chain)
        write_matrix_csv(chain, tmp_path / "P.csv")
        write_stationary_csv(dist, tmp_path / "pi.csv")
        lines = (tmp_path / "P.csv").read_text().strip().splitlines()
        assert len(lines) == 28  # header + 27 labeled rows
        lines = (tmp_path / "pi.csv").read_text().strip().splitlines()
        assert len(lines) == 19  # header + 18 z != 0 rows
