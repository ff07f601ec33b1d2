import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrolab.discrete import (
    DISCRETE_CHECK_IDS,
    DiscreteJoint,
    DiscretePmf,
    check_covering_lemma,
    check_discrete_registry,
    check_functional_submodularity,
    difference_pmf,
    discrete_arity,
    discrete_entropy,
    random_pmf,
    reflect_pmf,
    sum_pmf,
)

LN2 = math.log(2.0)


def pmf(*probs):
    return DiscretePmf(len(probs), np.array(probs, dtype=float))


probs_strategy = st.lists(st.floats(0.01, 1.0), min_size=5, max_size=5).map(
    lambda ws: DiscretePmf(5, np.array(ws) / np.sum(ws))
)


class TestEntropy:
    def test_uniform_z2(self):
        assert pmf(0.5, 0.5).entropy() == pytest.approx(LN2, abs=1e-15)

    def test_point_mass(self):
        assert pmf(1.0, 0.0, 0.0).entropy() == 0.0

    def test_half_quarter_quarter(self):
        assert pmf(0.5, 0.25, 0.25).entropy() == pytest.approx(1.5 * LN2, abs=1e-14)

    def test_joint_marginal_entropy(self):
        table = np.array([[0.25, 0.25], [0.25, 0.25]])
        j = DiscreteJoint((2, 2), table)
        assert discrete_entropy(j) == pytest.approx(2 * LN2, abs=1e-14)
        assert discrete_entropy(j, [0]) == pytest.approx(LN2, abs=1e-14)


class TestSumPmf:
    def test_hand_convolution_z3(self):
        a = pmf(0.5, 0.5, 0.0)
        out = sum_pmf(a, a)
        assert np.allclose(out.probs, [0.25, 0.5, 0.25], atol=1e-15)

    def test_uniform_absorbs(self):
        u = DiscretePmf(5, np.ones(5) / 5)
        p = random_pmf(np.random.default_rng(0), 5)
        assert np.allclose(sum_pmf(u, p).probs, 0.2, atol=1e-15)

    def test_identity_element(self):
        d0 = pmf(1.0, 0.0, 0.0, 0.0)
        p = random_pmf(np.random.default_rng(1), 4)
        assert np.allclose(sum_pmf(d0, p).probs, p.probs, atol=1e-15)

    def test_reflect_then_sum_is_difference(self):
        rng = np.random.default_rng(2)
        p, q = random_pmf(rng, 6), random_pmf(rng, 6)
        direct = difference_pmf(p, q)
        manual = sum_pmf(p, reflect_pmf(q))
        assert np.allclose(direct.probs, manual.probs, atol=1e-15)

    def test_mismatched_orders_rejected(self):
        with pytest.raises(ValueError):
            sum_pmf(pmf(0.5, 0.5), pmf(0.5, 0.25, 0.25))


class TestFunctionalSubmodularity:
    def test_equal_variables_identity_maps(self):
        p = random_pmf(np.random.default_rng(3), 4)
        joint = DiscreteJoint((4, 4), np.diag(p.probs))
        r_map = np.arange(4)[:, None] * np.ones(4, dtype=int)
        rep = check_functional_submodularity(joint, np.arange(4), np.arange(4), r_map)
        assert rep.slack == pytest.approx(0.0, abs=1e-12)
        assert rep.verdict in ("holds", "inconclusive")

    def test_constant_maps_reduce_to_subadditivity(self):
        rng = np.random.default_rng(4)
        table = rng.random((4, 4))
        joint = DiscreteJoint((4, 4), table / table.sum())
        # F, G constant => H(X0) = 0; R = pair index => H(X12) = H(X1, X2)
        r_map = (np.arange(4)[:, None] * 4 + np.arange(4)[None, :])
        rep = check_functional_submodularity(
            joint, np.zeros(4, dtype=int), np.zeros(4, dtype=int), r_map % 16)
        h12 = discrete_entropy(joint)
        h1 = discrete_entropy(joint, [0])
        h2 = discrete_entropy(joint, [1])
        assert rep.lhs == pytest.approx(h12, abs=1e-12)
        assert rep.slack == pytest.approx(h1 + h2 - h12, abs=1e-12)
        assert rep.slack >= -1e-12

    def test_inconsistent_maps_rejected(self):
        joint = DiscreteJoint((2, 2), np.full((2, 2), 0.25))
        with pytest.raises(ValueError):
            check_functional_submodularity(joint, [0, 1], [0, 0], np.zeros((2, 2), int))

    def test_random_instances_never_violate(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            f_map = rng.integers(0, 2, 4)
            g_map = rng.integers(0, 2, 4)
            table = rng.random((4, 4)) * (f_map[:, None] == g_map[None, :])
            if table.sum() <= 0:
                continue
            joint = DiscreteJoint((4, 4), table / table.sum())
            rep = check_functional_submodularity(joint, f_map, g_map,
                                                 rng.integers(0, 4, (4, 4)))
            assert rep.slack >= -1e-12


class TestCoveringLemma:
    def test_uniform_z2_both_sides(self):
        u = pmf(0.5, 0.5)
        rep = check_covering_lemma(u, u)
        assert rep.lhs == pytest.approx(2 * LN2, abs=1e-12)
        assert rep.rhs == pytest.approx(2 * LN2, abs=1e-12)
        assert rep.verdict == "holds"

    def test_degenerate_x_collapses_both_sides(self):
        # X a point mass makes Y1 = Y2 = X + Y, so both sides vanish
        d0 = pmf(1.0, 0.0, 0.0, 0.0)
        q = random_pmf(np.random.default_rng(1), 4)
        rep = check_covering_lemma(d0, q)
        assert rep.lhs == pytest.approx(0.0, abs=1e-12)
        assert rep.rhs == pytest.approx(0.0, abs=1e-12)

    def test_hundred_random_pairs_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            rep = check_covering_lemma(random_pmf(rng, 5), random_pmf(rng, 5))
            assert abs(rep.slack) <= 1e-12

    @given(probs_strategy, probs_strategy)
    @settings(max_examples=30, deadline=None)
    def test_identity_property(self, p, q):
        assert abs(check_covering_lemma(p, q).slack) <= 1e-12


class TestDiscreteRegistry:
    def test_uniform_equalities(self):
        u = DiscretePmf(6, np.ones(6) / 6)
        rep = check_discrete_registry("sum_upper", [u, u])
        assert rep.slack == pytest.approx(math.log(6), abs=1e-12)
        rep = check_discrete_registry("sum_difference", [u, u])
        assert abs(rep.slack) <= 1e-12
        assert rep.verdict != "violated"

    def test_uniform_doubling_difference_degenerate(self):
        u = DiscretePmf(6, np.ones(6) / 6)
        rep = check_discrete_registry("doubling_difference", [u])
        assert rep.verdict == "inconclusive"
        assert "degenerate" in rep.note

    def test_half_support_z4_sum_difference(self):
        h = pmf(0.5, 0.5, 0.0, 0.0)
        rep = check_discrete_registry("sum_difference", [h, h])
        # sums spread over three residues, differences concentrate at zero
        assert rep.lhs == pytest.approx(1.5 * LN2, abs=1e-12)
        assert rep.slack >= -1e-12

    def test_ratio_bound_when_denominator_alive(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            p = random_pmf(rng, 6)
            rep = check_discrete_registry("doubling_difference", [p])
            if rep.note and "degenerate" in rep.note:
                continue
            ratio = float(rep.note.split("ratio=")[1].split()[0])
            assert 0.5 - 1e-9 <= ratio <= 2.0 + 1e-9

    def test_five_hundred_random_pmfs_zero_violations(self):
        rng = np.random.default_rng(42)
        for _ in range(500):
            pool = [random_pmf(rng, 6) for _ in range(5)]
            for cid in DISCRETE_CHECK_IDS:
                params = {}
                if cid == "sum_difference_mi":
                    params = {"alpha": float(rng.choice([0, 0.25, 0.5, 0.75, 1.0]))}
                if cid in ("plunnecke_ruzsa", "iterated_sum"):
                    params = {"n": int(rng.integers(1, 4))}
                k = discrete_arity(cid, params)
                rep = check_discrete_registry(cid, pool[:k], params)
                assert rep.verdict != "violated", (cid, params, rep.slack)

    def test_unknown_check_rejected(self):
        with pytest.raises(KeyError):
            check_discrete_registry("frobnicate", [])

    def test_mixed_group_orders_rejected(self):
        with pytest.raises(ValueError):
            check_discrete_registry("sum_upper",
                                    [pmf(0.5, 0.5), pmf(0.5, 0.25, 0.25)])

    @given(probs_strategy)
    @settings(max_examples=25, deadline=None)
    def test_sigma_delta_property(self, p):
        rep = check_discrete_registry("sigma_delta", [p])
        assert rep.slack >= -1e-12
