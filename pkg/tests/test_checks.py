import math

import numpy as np
import pytest

from entrolab.checks import (
    CHECKS,
    default_corpus,
    doubling_and_difference,
    inverse_theorem_check,
    sum_minus_difference_gap,
    sum_dominant_gap,
    ruzsa_distance,
    run_check,
)
from entrolab.distributions import Exponential, Gaussian, Laplace, Uniform
from entrolab.estimators import estimate_functional
from entrolab.distributions import Mixture

LN2 = math.log(2.0)
EULER_GAMMA = float(np.euler_gamma)


def cluster_entropy(weights):
    w = np.asarray([x for x in weights if x > 0])
    return float(-(w * np.log(w)).sum())


class TestRuzsaDistance:
    def test_gaussian_self_distance(self, ctx):
        d, err = ruzsa_distance(ctx, Gaussian(0, 1), Gaussian(0, 1))
        assert d == pytest.approx(0.5 * LN2, abs=1e-4)

    def test_uniform_self_distance(self, ctx):
        d, _ = ruzsa_distance(ctx, Uniform(0, 1), Uniform(0, 1))
        assert d == pytest.approx(0.5, abs=1e-4)

    def test_nonnegative_for_wildly_different_scales(self, ctx):
        d, err = ruzsa_distance(ctx, Gaussian(0, 1), Gaussian(0, 1e6))
        assert d >= -err

    def test_symmetry(self, ctx):
        a, b = Gaussian(0, 1), Exponential(1.0)
        d1, e1 = ruzsa_distance(ctx, a, b)
        d2, e2 = ruzsa_distance(ctx, b, a)
        assert abs(d1 - d2) <= e1 + e2


class TestDoublingDifference:
    def test_gaussian_constants(self, ctx):
        f = doubling_and_difference(ctx, Gaussian(0, 1))
        assert f.sigma == pytest.approx(math.sqrt(2), abs=1e-4)
        assert f.delta == pytest.approx(math.sqrt(2), abs=1e-4)

    def test_uniform_constant(self, ctx):
        f = doubling_and_difference(ctx, Uniform(0, 1))
        assert f.sigma == pytest.approx(math.exp(0.5), abs=1e-4)
        assert f.delta == pytest.approx(math.exp(0.5), abs=1e-4)

    def test_exponential_constants(self, ctx):
        f = doubling_and_difference(ctx, Exponential(1.0))
        assert f.sigma == pytest.approx(math.exp(EULER_GAMMA), abs=1e-3)
        assert f.delta == pytest.approx(2.0, abs=1e-3)

    def test_symmetric_law_ratio_one(self, ctx):
        f = doubling_and_difference(ctx, Laplace(0.0, 1.0))
        assert f.delta_plus == pytest.approx(f.delta_minus,
                                             abs=f.err_plus + f.err_minus)

    def test_constants_at_least_one(self, ctx):
        for m in (Gaussian(1, 2), Uniform(-1, 3), Exponential(0.5)):
            f = doubling_and_difference(ctx, m)
            assert f.sigma >= 1.0 - 1e-6 and f.delta >= 1.0 - 1e-6
            assert f.dist_r >= -f.err_minus


class TestRegistryGoldenCases:
    def test_ruzsa_triangle_gaussian_slack(self, ctx):
        rep = run_check(CHECKS["ruzsa_triangle"], [Gaussian(0, 1)] * 3, ctx)
        assert rep.verdict == "holds"
        assert rep.slack == pytest.approx(0.5 * LN2, abs=1e-4)

    def test_triangle_metric_self_consistency(self, ctx):
        x, z = Gaussian(0, 1), Uniform(0, 2)
        rep = run_check(CHECKS["triangle_metric"], [x, x, z], ctx)
        # with Y = X the slack reduces to dist(X, X) >= 0
        d_xx, _ = ruzsa_distance(ctx, x, x)
        assert rep.slack == pytest.approx(d_xx, abs=2 * rep.err + 1e-9)

    def test_doubling_difference_gaussian_ratio_one(self, ctx):
        rep = run_check(CHECKS["doubling_difference"], [Gaussian(0, 1)], ctx)
        assert rep.verdict == "holds"
        assert "ratio=1.0000" in rep.note

    def test_sum_difference_exponential_closed_forms(self, ctx):
        rep = run_check(CHECKS["sum_difference"], [Exponential(1.0)] * 2, ctx)
        assert rep.verdict == "holds"
        assert rep.lhs == pytest.approx(1 + EULER_GAMMA, abs=1e-4)
        assert rep.rhs == pytest.approx(3 * (1 + LN2) - 2, abs=1e-3)

    def test_plunnecke_all_gaussian_closed_form(self, ctx):
        tau2 = 2.0
        for n in (1, 2, 3):
            ys = [Gaussian(0, tau2) for _ in range(n)]
            rep = run_check(CHECKS["plunnecke_ruzsa"], [Gaussian(0, 1)] + ys,
                            ctx, {"n": n})
            lhs_minus_rhs = 0.5 * math.log(1 + n * tau2) - (n / 2) * math.log(1 + tau2)
            assert rep.slack == pytest.approx(-lhs_minus_rhs, abs=2 * rep.err)
            assert rep.verdict in ("holds", "inconclusive")

    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_sum_difference_mi_alpha_sweep(self, ctx, alpha):
        rep = run_check(CHECKS["sum_difference_mi"],
                        [Exponential(1.0), Uniform(0, 1)], ctx, {"alpha": alpha})
        assert rep.verdict in ("holds", "inconclusive")

    def test_iterated_sum_gaussian(self, ctx):
        rep = run_check(CHECKS["iterated_sum"], [Gaussian(0, 1), Gaussian(0, 1)],
                        ctx, {"n": 2})
        # lhs = h(N(0, 6)), rhs = 5 h(N(0,2)) - 4 h(N(0,1))
        assert rep.lhs == pytest.approx(
            0.5 * math.log(2 * math.pi * math.e * 6), abs=1e-3)
        assert rep.verdict == "holds"

    def test_epi_doubling_gaussian_equality_is_inconclusive(self, ctx):
        rep = run_check(CHECKS["epi_doubling"], [Gaussian(0, 1)], ctx)
        assert rep.verdict in ("holds", "inconclusive")
        assert abs(rep.slack) <= 1e-3

    def test_arity_mismatch_rejected(self, ctx):
        with pytest.raises(ValueError):
            run_check(CHECKS["ruzsa_triangle"], [Gaussian(0, 1)], ctx)


class TestRandomizedCorpus:
    def test_small_corpus_no_violations(self, ctx):
        models = default_corpus(seed=1234, size=12)
        rng = np.random.default_rng(0)
        for check in CHECKS.values():
            for params in check.variants:
                arity = check.arity_for(params)
                picks = [models[int(i)] for i in rng.integers(0, len(models), arity)]
                rep = run_check(check, picks, ctx, dict(params))
                assert rep.verdict != "violated", (check.id, params, rep)

    def test_corpus_is_seeded(self):
        a = [m.to_dict() for m in default_corpus(seed=5, size=10)]
        b = [m.to_dict() for m in default_corpus(seed=5, size=10)]
        assert a == b


class TestGapDemos:
    def test_collapsed_mixture_has_zero_gap(self, ctx):
        gap, err = sum_minus_difference_gap(0.5, 0.0, ctx)
        assert abs(gap) <= 2 * err

    def test_two_cluster_gap_matches_weight_entropy(self, ctx):
        p = 0.1
        gap, err = sum_minus_difference_gap(p, 100.0, ctx)
        q = 1 - p
        asymptote = (cluster_entropy([p * p, 2 * p * q, q * q])
                     - cluster_entropy([p * q, p * p + q * q, p * q]))
        assert gap == pytest.approx(asymptote, abs=1e-3)
        assert gap < 0  # this family's sums carry less weight entropy

    def test_two_cluster_gap_sign_checked_by_knn_oracle(self, ctx):
        p, a = 0.1, 100.0
        gap, _ = sum_minus_difference_gap(p, a, ctx)
        m = Mixture((p, 1 - p), (Uniform(0, 1), Uniform(a, a + 1)))
        est_sum = estimate_functional([(1, m), (1, m)], 10 ** 5, 5, seed=21)
        est_diff = estimate_functional([(1, m), (-1, m)], 10 ** 5, 5, seed=22)
        oracle_gap = est_sum.value - est_diff.value
        tol = 3 * (est_sum.stderr + est_diff.stderr) + 0.02
        assert gap == pytest.approx(oracle_gap, abs=tol)
        assert oracle_gap < 0

    def test_gap_magnitude_grows_with_separation(self, ctx):
        gaps = [abs(sum_minus_difference_gap(0.1, a, ctx)[0]) for a in (3.0, 6.0, 30.0)]
        assert gaps[0] <= gaps[1] <= gaps[2] + 1e-6

    def test_gap_consistent_with_two_sided_ratio_bound(self, ctx):
        p = 0.1
        m = Mixture((p, 1 - p), (Uniform(0, 1), Uniform(100.0, 101.0)))
        f = doubling_and_difference(ctx, m)
        ratio = f.delta_plus / f.delta_minus
        assert 0.5 - 1e-3 <= ratio <= 2.0 + 1e-3

    def test_sum_dominant_support_gives_positive_gap(self, ctx):
        gap, _ = sum_dominant_gap(3.0, ctx)
        # exact cluster-weight entropies of the scaled sum-dominant set
        base = np.zeros(15)
        base[[0, 2, 3, 4, 7, 11, 12, 14]] = 1 / 8
        s = np.convolve(base, base)
        d = np.convolve(base, base[::-1])
        target = cluster_entropy(s) - cluster_entropy(d)
        assert target > 0
        assert gap == pytest.approx(target, abs=2e-4)
        assert gap > 0

    def test_bad_parameters_rejected(self, ctx):
        with pytest.raises(ValueError):
            sum_minus_difference_gap(0.0, 1.0, ctx)
        with pytest.raises(ValueError):
            sum_minus_difference_gap(0.5, -1.0, ctx)
        with pytest.raises(ValueError):
            sum_dominant_gap(1.0, ctx)


class TestInverseBundle:
    def test_uniform_bundle_values(self, ctx):
        reps = {r.check_id: r for r in inverse_theorem_check(Uniform(0, 1), ctx)}
        d = reps["inverse_fgr_sigma"].lhs
        assert d == pytest.approx(0.5 * math.log(2 * math.pi * math.e / 12), abs=1e-3)
        assert reps["inverse_fgr_sigma"].rhs == pytest.approx(0.5265, abs=2e-3)
        assert reps["inverse_fgr_sigma"].verdict == "holds"
        assert all(r.verdict in ("holds", "inconclusive") for r in reps.values())

    def test_exponential_bundle_values(self, ctx):
        reps = {r.check_id: r for r in inverse_theorem_check(Exponential(1.0), ctx)}
        assert reps["inverse_fgr_sigma"].lhs == pytest.approx(
            0.5 * math.log(2 * math.pi * math.e) - 1, abs=1e-3)
        assert reps["inverse_fgr_sigma"].rhs == pytest.approx(2.075, abs=5e-3)
        assert reps["inverse_fgr_sigma"].verdict == "holds"

    def test_gaussian_bundle_is_equality_cases(self, ctx):
        reps = inverse_theorem_check(Gaussian(0, 1), ctx)
        for r in reps:
            assert r.verdict in ("holds", "inconclusive")
            if r.check_id in ("inverse_epi_sigma", "inverse_reverse_sigma"):
                assert abs(r.slack) <= max(r.err, 1e-3)

    def test_contraction_holds_for_canonical_models(self, ctx):
        for m in (Gaussian(0, 1), Uniform(0, 1), Exponential(1.0)):
            reps = {r.check_id: r for r in inverse_theorem_check(m, ctx)}
            assert reps["inverse_contraction"].verdict in ("holds", "inconclusive")
            assert reps["inverse_contraction"].slack >= -reps["inverse_contraction"].err

    def test_pinsker_on_mixture(self, ctx):
        m = Mixture((0.4, 0.6), (Gaussian(-2, 0.5), Gaussian(1, 2.0)))
        reps = {r.check_id: r for r in inverse_theorem_check(m, ctx)}
        assert reps["inverse_pinsker"].verdict in ("holds", "inconclusive")
