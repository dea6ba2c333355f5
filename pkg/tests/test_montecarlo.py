"""Sampling determinism and the Monte Carlo estimators with their bounds."""

import math

import numpy as np
import pytest

from tropfit.core import trop_distance_rows
from tropfit.errors import BadParams, BadWeights
from tropfit.montecarlo import (
    McSpaceParams,
    MixtureComponent,
    MixtureSpec,
    Noise,
    make_generator,
    mc_center_bias,
    mc_mean_distance_to_h0,
    mc_projection_residual,
    sample_mixture,
    standard_normals,
    two_center_closed_form,
)

TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)          # 1.128379...
THREE_OVER_TWO_SQRT_PI = 1.5 / math.sqrt(math.pi)    # 0.846284...


def spec_two_centers(d, sigma, seed=0, weight=0.5):
    return MixtureSpec(
        components=(
            MixtureComponent(mean=(5.0, -5.0) + (0.0,) * (d - 2), noise=Noise("iid", sigma), weight=weight),
            MixtureComponent(mean=(-5.0, 5.0) + (0.0,) * (d - 2), noise=Noise("iid", sigma), weight=1 - weight),
        ),
        seed=seed,
    )


class TestSampler:
    def test_bit_identical_for_seed(self):
        a = sample_mixture(spec_two_centers(4, 0.3, seed=9), 500).coords
        b = sample_mixture(spec_two_centers(4, 0.3, seed=9), 500).coords
        assert np.array_equal(a, b)

    def test_seed_changes_draws(self):
        a = sample_mixture(spec_two_centers(4, 0.3, seed=9), 500).coords
        b = sample_mixture(spec_two_centers(4, 0.3, seed=10), 500).coords
        assert not np.array_equal(a, b)

    def test_vanishing_noise_recovers_means(self):
        spec = spec_two_centers(5, 1e-12, seed=3)
        sample = sample_mixture(spec, 200)
        means = np.stack([
            np.asarray(spec.components[0].mean) - spec.components[0].mean[0],
            np.asarray(spec.components[1].mean) - spec.components[1].mean[0],
        ])
        for row in sample.coords:
            dists = trop_distance_rows(np.tile(row, (2, 1)), means)
            assert dists.min() <= 1e-9

    def test_difference_variance(self):
        sigma = 0.7
        spec = MixtureSpec(
            components=(MixtureComponent(mean=(0.0, 0.0, 0.0), noise=Noise("iid", sigma), weight=1.0),),
            seed=5,
        )
        coords = sample_mixture(spec, 100_000).coords
        # the canonical second coordinate is X2 - X1, variance 2 sigma^2
        var = coords[:, 1].var(ddof=1)
        assert var == pytest.approx(2 * sigma**2, rel=0.05)

    def test_component_fractions(self):
        spec = spec_two_centers(4, 0.1, seed=21, weight=0.3)
        coords = sample_mixture(spec, 20_000).coords
        frac_first = float((coords[:, 1] < 0).mean())  # first center has X2 - X1 = -10
        se = math.sqrt(0.3 * 0.7 / 20_000)
        assert abs(frac_first - 0.3) <= 3 * se

    def test_block_correlated_shares_noise(self):
        spec = MixtureSpec(
            components=(
                MixtureComponent(mean=(1.0, -1.0, 0.0, 0.0),
                                 noise=Noise("block_correlated", 0.5, m=2), weight=1.0),
            ),
            seed=2,
        )
        coords = sample_mixture(spec, 1000).coords
        # first two coordinates carry identical noise: their difference is constant
        assert np.allclose(coords[:, 1] - coords[:, 0], -2.0, atol=1e-12)

    def test_bad_weights(self):
        with pytest.raises(BadWeights):
            MixtureSpec(
                components=(
                    MixtureComponent(mean=(0.0, 0.0), noise=Noise("iid", 1.0), weight=0.6),
                    MixtureComponent(mean=(0.0, 0.0), noise=Noise("iid", 1.0), weight=0.6),
                ),
                seed=0,
            )

    def test_bad_noise(self):
        with pytest.raises(BadParams):
            Noise("iid", 0.0)
        with pytest.raises(BadParams):
            Noise("weird", 1.0)


class TestDistanceToH0:
    def test_gaussian_pair_constant(self):
        rep = mc_mean_distance_to_h0(k=2, sigma=1.0, n=400_000, seed=123)
        assert abs(rep.estimate - TWO_OVER_SQRT_PI) <= max(0.005, 3 * rep.std_error)

    def test_gaussian_triple_constant(self):
        rep = mc_mean_distance_to_h0(k=3, sigma=1.0, n=400_000, seed=123)
        assert abs(rep.estimate - THREE_OVER_TWO_SQRT_PI) <= max(0.005, 3 * rep.std_error)

    def test_degenerate_sigma(self):
        rep = mc_mean_distance_to_h0(k=4, sigma=0.0, n=1000, seed=0)
        assert rep.estimate == 0.0 and rep.std_error == 0.0

    def test_scale_linearity(self):
        r1 = mc_mean_distance_to_h0(k=3, sigma=1.0, n=50_000, seed=7)
        r2 = mc_mean_distance_to_h0(k=3, sigma=2.5, n=50_000, seed=7)
        assert r2.estimate == pytest.approx(2.5 * r1.estimate, abs=1e-12)

    def test_contract(self):
        with pytest.raises(BadParams):
            mc_mean_distance_to_h0(k=1, sigma=1.0, n=100)

    def test_deterministic(self):
        r1 = mc_mean_distance_to_h0(k=5, sigma=1.0, n=300_000, seed=77)
        r2 = mc_mean_distance_to_h0(k=5, sigma=1.0, n=300_000, seed=77)
        assert r1.estimate == r2.estimate and r1.std_error == r2.std_error


class TestProjectionResidual:
    def test_axis_aligned_bound_small_sigma(self):
        rep = mc_projection_residual("A1", McSpaceParams(d=4), sigma=0.1, n=50_000, seed=1)
        assert rep.estimate <= rep.extras["bound"]
        assert rep.extras["crosscheck_max_dev"] <= 1e-12

    def test_vanishing_sigma_vanishing_residual(self):
        rep = mc_projection_residual("Am", McSpaceParams(d=6, m=3), sigma=1e-12, n=5_000, seed=2)
        assert rep.estimate <= 1e-10

    def test_correlated_bound(self):
        rep = mc_projection_residual(
            "Am", McSpaceParams(d=8, m=3, correlated=True), sigma=0.1, n=50_000, seed=3
        )
        assert rep.extras["bound"] == pytest.approx(2 * 3 * 0.1 * math.sqrt(2 * math.log(8)))
        assert rep.estimate <= rep.extras["bound"]
        assert rep.extras["crosscheck_max_dev"] <= 1e-12

    def test_two_center_bound_and_closed_form(self):
        rep = mc_projection_residual("two_gaussian_A0", McSpaceParams(d=10), sigma=0.1, n=50_000, seed=4)
        assert rep.estimate <= 2 * 0.1 * math.sqrt(2 * math.log(9))
        assert rep.extras["exclusion_rate"] == 0.0
        assert rep.extras["crosscheck_max_dev"] <= 1e-12

    def test_two_center_exclusions_counted(self):
        # sigma large enough that offsets beyond 5 occur
        rep = mc_projection_residual("two_gaussian_A0", McSpaceParams(d=4), sigma=3.0, n=20_000, seed=5)
        assert 0.0 < rep.extras["exclusion_rate"] < 1.0
        assert rep.n < 20_000

    def test_closed_form_matches_metric(self):
        rng = make_generator(11)
        eps = 0.5 * standard_normals(rng, (200, 6))
        comp = make_generator(12).random(200) < 0.5
        points, proj, dists, excluded = two_center_closed_form(comp, eps)
        keep = ~excluded
        assert np.allclose(dists[keep], trop_distance_rows(points[keep], proj[keep]), atol=1e-12)

    def test_contract(self):
        with pytest.raises(BadParams):
            mc_projection_residual("nope", McSpaceParams(d=4), sigma=1.0, n=100)


class TestCenterBias:
    def test_bound(self):
        rep = mc_center_bias(d=3, sigma=1.0, n_inner=10, n_outer=20_000, seed=6)
        assert rep.estimate <= rep.extras["bound"]
        assert rep.extras["bound"] == pytest.approx(math.sqrt(0.9) * 2 * math.sqrt(2 * math.log(3)))

    def test_degenerate_sigma(self):
        rep = mc_center_bias(d=4, sigma=0.0, n_inner=5, n_outer=100, seed=0)
        assert rep.estimate == 0.0

    def test_large_inner_approaches_direct_distance(self):
        # with many draws the sample mean pins the center, so the bias
        # estimate approaches E[d_tr(X, center)] estimated directly
        d, sigma = 4, 1.0
        biased = mc_center_bias(d=d, sigma=sigma, n_inner=800, n_outer=800, seed=8)
        rng = make_generator(9)
        eps = sigma * standard_normals(rng, (200_000, d))
        direct = float((eps.max(axis=1) - eps.min(axis=1)).mean())
        assert biased.estimate == pytest.approx(direct, rel=0.02)

    def test_contract(self):
        with pytest.raises(BadParams):
            mc_center_bias(d=3, sigma=1.0, n_inner=1, n_outer=100)
