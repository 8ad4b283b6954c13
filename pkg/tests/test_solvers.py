"""Tests for the LS and weighted-LASSO estimators against independent oracles."""

import numpy as np
import pytest

from coopchan.afsim import Measurement, gen_training, simulate_two_slot, to_frequency_model
from coopchan.channel import ChannelSpec, cascade, compose, gen_channel
from coopchan.solvers import (
    EstimatorSpec,
    Estimate,
    iel_estimate,
    kkt_residual,
    lambda_default,
    ls_estimate,
    pel_estimate,
    penalty_weights,
    sel_estimate,
    weighted_lasso,
)

L, N = 32, 36


def make_instance(seed, noise_var=0.1, k=2):
    rng = np.random.default_rng(seed)
    h_sd = gen_channel(ChannelSpec(L, k, "sparse"), rng)
    h_sr = gen_channel(ChannelSpec(L // 2, L // 2, "dense"), rng)
    h_rd = gen_channel(ChannelSpec(L // 2, L // 2, "dense"), rng)
    x = gen_training(N, 1.0, rng, "qpsk_flat")
    obs = simulate_two_slot(h_sd, h_sr, h_rd, x, noise_var, 1.0, rng)
    m = to_frequency_model(obs, x, L)
    h = compose(h_sd, cascade(h_sr, h_rd)).stacked
    return m, h


def orthonormal_instance(seed, p=20, rows=30):
    """Thin-QR orthonormalized design plus random observation."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((rows, p)) + 1j * rng.standard_normal((rows, p))
    q, _ = np.linalg.qr(a)
    y = rng.standard_normal(rows) + 1j * rng.standard_normal(rows)
    return Measurement(y=y, X=q, noise_var=0.0)


def soft_threshold(z, t):
    mag = np.abs(z)
    return np.where(mag > t, z * (1 - t / np.maximum(mag, 1e-300)), 0.0)


class TestEstimatorSpec:
    def test_valid(self):
        spec = EstimatorSpec("iel", lambda_sel=0.1, lambda_pel=0.2)
        assert spec.kind == "iel"

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kind="omp"),
            dict(kind="sel", lambda_sel=-1.0),
            dict(kind="sel", tol=0.0),
            dict(kind="sel", max_iter=0),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            EstimatorSpec(**kwargs)


class TestPenaltyWeights:
    def test_sel_is_uniform(self):
        np.testing.assert_array_equal(penalty_weights("sel", 4, lambda_sel=0.3), 0.3 * np.ones(7))

    def test_pel_masks_cascade(self):
        w = penalty_weights("pel", 4, lambda_pel=0.5)
        np.testing.assert_array_equal(w, [0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0])

    def test_iel_sums(self):
        w = penalty_weights("iel", 4, lambda_sel=0.1, lambda_pel=0.5)
        np.testing.assert_allclose(w, [0.6, 0.6, 0.6, 0.6, 0.1, 0.1, 0.1])


class TestLsEstimate:
    def test_noiseless_exact(self):
        m, h = make_instance(0, noise_var=0.0)
        est = ls_estimate(m)
        assert np.linalg.norm(est.h_hat - h) / np.linalg.norm(h) < 1e-8

    def test_zero_observation(self):
        m, _ = make_instance(1, noise_var=0.0)
        m0 = Measurement(y=np.zeros_like(m.y), X=m.X, noise_var=0.0)
        np.testing.assert_allclose(ls_estimate(m0).h_hat, 0.0, atol=1e-12)

    def test_normal_equation_oracle(self):
        m, _ = make_instance(2, noise_var=0.5)
        gram = m.X.conj().T @ m.X
        want = np.linalg.solve(gram, m.X.conj().T @ m.y)
        np.testing.assert_allclose(ls_estimate(m).h_hat, want, atol=1e-8)

    def test_rank_deficient_raises(self):
        m, _ = make_instance(3)
        X = m.X.copy()
        X[:, 5] = X[:, 7]  # duplicate column
        with pytest.raises(np.linalg.LinAlgError, match="rank"):
            ls_estimate(Measurement(y=m.y, X=X, noise_var=m.noise_var))


class TestWeightedLasso:
    def test_zero_lambda_equals_ls(self):
        m, _ = make_instance(4, noise_var=0.3)
        est = weighted_lasso(m, np.zeros(63))
        np.testing.assert_allclose(est.h_hat, ls_estimate(m).h_hat, atol=1e-6)

    def test_orthonormal_closed_form(self):
        m = orthonormal_instance(5)
        rng = np.random.default_rng(55)
        lam = rng.uniform(0.0, 0.5, size=20)
        est = weighted_lasso(m, lam)
        want = soft_threshold(m.X.conj().T @ m.y, lam)
        np.testing.assert_allclose(est.h_hat, want, atol=1e-10)

    def test_all_weights_dominate(self):
        m, _ = make_instance(6, noise_var=0.2)
        lam = np.full(63, 1.01 * np.abs(m.X.conj().T @ m.y).max())
        est = weighted_lasso(m, lam)
        np.testing.assert_array_equal(est.h_hat, 0.0)

    def test_negative_weight_rejected(self):
        m, _ = make_instance(7)
        lam = np.zeros(63)
        lam[0] = -0.1
        with pytest.raises(ValueError):
            weighted_lasso(m, lam)

    def test_zero_column_stays_zero(self):
        m, _ = make_instance(8)
        X = m.X.copy()
        X[:, 10] = 0.0
        est = weighted_lasso(Measurement(y=m.y, X=X, noise_var=0.0), np.full(63, 0.1))
        assert est.h_hat[10] == 0.0

    def test_objective_recomputable(self):
        m, _ = make_instance(9, noise_var=0.2)
        lam = np.full(63, 0.3)
        est = weighted_lasso(m, lam)
        r = m.y - m.X @ est.h_hat
        want = 0.5 * np.linalg.norm(r) ** 2 + lam @ np.abs(est.h_hat)
        assert abs(est.objective - want) < 1e-9

    def test_objective_monotone_in_sweeps(self):
        m, _ = make_instance(10, noise_var=0.2)
        lam = np.full(63, 0.3)
        objs = [weighted_lasso(m, lam, max_iter=k).objective for k in range(1, 8)]
        assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))

    def test_scaling_covariance(self):
        # scale y and lambda by a>0 -> minimizer scales by a
        m, _ = make_instance(11, noise_var=0.2)
        lam = np.full(63, 0.4)
        a = 3.0
        base = weighted_lasso(m, lam)
        scaled = weighted_lasso(
            Measurement(y=a * m.y, X=m.X, noise_var=m.noise_var), a * lam
        )
        np.testing.assert_allclose(scaled.h_hat, a * base.h_hat, atol=1e-6)


class TestNamedEstimators:
    def test_sel_zero_lambda_is_ls(self):
        m, _ = make_instance(12, noise_var=0.3)
        np.testing.assert_allclose(
            sel_estimate(m, 0.0).h_hat, ls_estimate(m).h_hat, atol=1e-6
        )

    def test_sel_noiseless_recovery(self):
        m, h = make_instance(13, noise_var=0.0)
        est = sel_estimate(m, 1e-4)
        assert np.linalg.norm(est.h_hat - h) / np.linalg.norm(h) < 1e-3

    def test_pel_zero_lambda_is_ls(self):
        m, _ = make_instance(14, noise_var=0.3)
        np.testing.assert_allclose(
            pel_estimate(m, 0.0).h_hat, ls_estimate(m).h_hat, atol=1e-6
        )

    def test_pel_large_lambda_restricted_ls(self):
        # direct block -> 0; cascade block -> LS over the lower columns only
        m, _ = make_instance(15, noise_var=0.0)
        est = pel_estimate(m, 1e6)
        np.testing.assert_allclose(est.h_hat[:L], 0.0, atol=1e-10)
        want, _, _, _ = np.linalg.lstsq(m.X[:, L:], m.y, rcond=None)
        np.testing.assert_allclose(est.h_hat[L:], want, atol=1e-6)

    def test_pel_kkt(self):
        m, _ = make_instance(16, noise_var=0.2)
        lam = penalty_weights("pel", L, lambda_pel=0.5)
        est = pel_estimate(m, 0.5)
        assert kkt_residual(m, est, lam) < 1e-6

    def test_pel_cascade_never_thresholded(self):
        m, _ = make_instance(17, noise_var=0.2)
        est = pel_estimate(m, 0.8)
        assert np.all(np.abs(est.h_hat[L:]) > 0)

    def test_iel_degenerates_to_sel(self):
        m, _ = make_instance(18, noise_var=0.2)
        np.testing.assert_allclose(
            iel_estimate(m, 0.7, 0.0).h_hat, sel_estimate(m, 0.7).h_hat, atol=1e-6
        )

    def test_iel_degenerates_to_pel(self):
        m, _ = make_instance(19, noise_var=0.2)
        np.testing.assert_allclose(
            iel_estimate(m, 0.0, 0.7).h_hat, pel_estimate(m, 0.7).h_hat, atol=1e-6
        )

    def test_iel_objective_dominates_reference_points(self):
        m, _ = make_instance(20, noise_var=0.2)
        lam = penalty_weights("iel", L, lambda_sel=0.3, lambda_pel=0.4)
        est = iel_estimate(m, 0.3, 0.4)
        h_ls = ls_estimate(m).h_hat

        def obj(h):
            return 0.5 * np.linalg.norm(m.y - m.X @ h) ** 2 + lam @ np.abs(h)

        assert est.objective <= obj(h_ls) + 1e-9
        assert est.objective <= obj(np.zeros(63)) + 1e-9


class TestLambdaDefault:
    def test_noiseless_gives_zero(self):
        assert lambda_default(0.0, 36, 1.0) == 0.0

    def test_ln_e(self):
        assert np.isclose(lambda_default(1.0, round(np.e), 1.0), np.log(round(np.e)))

    def test_direct_evaluation(self):
        assert np.isclose(lambda_default(0.5, 36, 1.0), 0.5 * np.log(36), atol=1e-4)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            lambda_default(-1.0, 36, 1.0)
        with pytest.raises(ValueError):
            lambda_default(1.0, 1, 1.0)
        with pytest.raises(ValueError):
            lambda_default(1.0, 36, 0.0)


class TestKktResidual:
    def test_closed_form_optimum(self):
        m = orthonormal_instance(21)
        lam = np.full(20, 0.3)
        h = soft_threshold(m.X.conj().T @ m.y, lam)
        assert kkt_residual(m, h, lam) < 1e-10

    def test_global_zero(self):
        m, _ = make_instance(22, noise_var=0.2)
        lam = np.full(63, 2.0 * np.abs(m.X.conj().T @ m.y).max())
        assert kkt_residual(m, np.zeros(63, dtype=complex), lam) == 0.0

    def test_ls_solution(self):
        m, _ = make_instance(23, noise_var=0.2)
        assert kkt_residual(m, ls_estimate(m).h_hat, np.zeros(63)) < 1e-8

    def test_accepts_estimate_object(self):
        m, _ = make_instance(24, noise_var=0.2)
        est = sel_estimate(m, 0.5)
        lam = penalty_weights("sel", L, lambda_sel=0.5)
        assert kkt_residual(m, est, lam) == kkt_residual(m, est.h_hat, lam)


class TestOptimalityInvariants:
    def test_kkt_scale_aware_bound_100_instances(self):
        tol = 1e-8
        for seed in range(100):
            m, _ = make_instance(seed, noise_var=0.1)
            bound = 10 * tol * np.abs(m.X.conj().T @ m.y).max()
            for kind, lam_kw in [
                ("sel", dict(lambda_sel=0.5)),
                ("pel", dict(lambda_pel=0.5)),
                ("iel", dict(lambda_sel=0.2, lambda_pel=0.5)),
            ]:
                lam = penalty_weights(kind, L, **lam_kw)
                est = weighted_lasso(m, lam, tol=tol)
                assert est.converged
                assert kkt_residual(m, est, lam) < bound

    def test_objective_monotone_100_instances(self):
        for seed in range(100):
            m, _ = make_instance(seed + 200, noise_var=0.3)
            lam = penalty_weights("iel", L, lambda_sel=0.2, lambda_pel=0.4)
            o1 = weighted_lasso(m, lam, max_iter=1).objective
            o2 = weighted_lasso(m, lam, max_iter=2).objective
            o3 = weighted_lasso(m, lam, max_iter=3).objective
            assert o3 <= o2 + 1e-12 <= o1 + 2e-12
