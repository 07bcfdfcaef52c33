"""Rate terms: density, 1-D integral, entropy pipeline, closed-form bound."""

import math

import numpy as np
import pytest

from isac_rates import (ChannelParams, FadingParams, McConfig,
                        QuadratureConfig, compute_rates, density_f_s,
                        entropy_h_s2, entropy_joint_given_x, joint_pdf,
                        joint_pdf_y1_s2, marginal_pdf_s1, marginal_pdf_s2,
                        mc_rate_part_a, quad_part_b_ub, rate_part_a,
                        rate_part_b, rate_part_b_ub, rate_part_c, sample_pair)
from isac_rates.errors import DomainError
from isac_rates.oracle import brute_force_f_s
from isac_rates.quadrature import integrate_semi_infinite
from isac_rates.rates import (PartAParams, entropy_joint_given_x_full,
                              part_b_ub_params, rate_part_b_full)

TABLE1_EXAMPLE = dict(ss1=1.0, ss2=10.0, rho2=0.5, sn1=1.0, sn2=0.1)


def make_channel(power=1.0, **overrides):
    kw = {**TABLE1_EXAMPLE, **overrides}
    return ChannelParams.from_values(power=power, **kw)


class TestDensityFS:
    @pytest.mark.parametrize("power", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("rho2", [0.01, 0.5, 0.9])
    def test_normalization(self, power, rho2):
        c = make_channel(power=power, rho2=rho2)
        total = integrate_semi_infinite(lambda s: density_f_s(c, s))
        assert abs(total - 1.0) < 1e-6

    def test_nonnegative_on_log_grid(self):
        for rho2 in (0.01, 0.5, 0.9):
            c = make_channel(rho2=rho2)
            vals = density_f_s(c, np.logspace(-4, 3, 120))
            assert np.all(vals >= 0.0)

    def test_matches_brute_force_ratio_integral(self):
        for rho2 in (0.01, 0.5, 0.9):
            c = make_channel(rho2=rho2)
            for s in (0.1, 1.0, 10.0):
                closed = density_f_s(c, s)
                brute = brute_force_f_s(c, s)
                assert abs(closed - brute) <= 1e-5 * max(closed, brute) + 1e-12

    def test_vectorized_matches_scalar(self):
        c = make_channel()
        ss = np.array([-1.0, 0.0, 0.3, 2.0, 40.0])
        vec = density_f_s(c, ss)
        for s, v in zip(ss, vec):
            assert v == density_f_s(c, float(s))

    def test_no_overflow_small_power_high_correlation(self):
        c = make_channel(power=0.01, rho2=0.9, ss1=0.1, ss2=0.02, sn2=0.5)
        vals = density_f_s(c, np.logspace(-3, 2, 50))
        assert np.all(np.isfinite(vals))

    def test_part_a_params(self):
        q = PartAParams.from_channel(make_channel())
        assert q.sigma1_sq == 1.0 and q.sigma2_sq == 0.1 / 10.0


class TestRatePartA:
    def test_nonnegative(self):
        for rho2 in (0.01, 0.9):
            assert rate_part_a(make_channel(rho2=rho2)) >= 0.0

    def test_vanishing_snr_limit(self):
        assert rate_part_a(make_channel(power=1e-4)) < 0.01

    def test_depends_only_on_ratios(self):
        c_base = make_channel()
        scale = 7.3
        c_scaled = ChannelParams.from_values(
            ss1=TABLE1_EXAMPLE["ss1"] * scale, ss2=TABLE1_EXAMPLE["ss2"] * scale,
            rho2=0.5, sn1=TABLE1_EXAMPLE["sn1"] * scale,
            sn2=TABLE1_EXAMPLE["sn2"] * scale, power=1.0)
        assert abs(rate_part_a(c_base) - rate_part_a(c_scaled)) < 1e-9

    def test_against_monte_carlo(self):
        c = make_channel()
        est = mc_rate_part_a(c, McConfig(sample_count=1_000_000, seed=5))
        assert est.agrees_with(rate_part_a(c), n_sigma=3.0)

    def test_frozen_value(self):
        # mpmath quadrature of the closed-form density at the example config
        assert math.isclose(rate_part_a(make_channel()),
                            0.016829949148081946751, rel_tol=1e-8)


class TestEntropyHS2:
    def test_frozen_values(self):
        assert math.isclose(entropy_h_s2(FadingParams(1.0, 4.0, 0.0)),
                            1.8590681295273969827, rel_tol=1e-14)
        assert math.isclose(entropy_h_s2(FadingParams(1.0, 1.0, 0.0)),
                            0.85906812952739698268, rel_tol=1e-13)

    def test_scaling_law_exact(self):
        for scale in (0.3, 2.0, 11.0):
            lo = entropy_h_s2(FadingParams(1.0, 1.7, 0.2))
            hi = entropy_h_s2(FadingParams(1.0, 1.7 * scale, 0.2))
            assert abs((hi - lo) - 0.5 * math.log2(scale)) < 1e-12


class TestJointPdfY1S2:
    def test_requires_positive_x(self):
        c = make_channel()
        with pytest.raises(DomainError):
            joint_pdf_y1_s2(c, 0.0, 0.5, 1.0)

    def test_marginalizes_to_s2(self):
        c = make_channel()
        for s2 in (0.8, 2.5):
            got = integrate_semi_infinite(
                lambda y1: joint_pdf_y1_s2(c, 1.0, y1, s2), lower=-20.0)
            assert abs(got - marginal_pdf_s2(c.fading, s2)) < 1e-5

    def test_uncorrelated_factorizes(self):
        c = make_channel(rho2=0.0)
        x = 1.3
        sd = math.sqrt(c.sigma_n1_sq)

        def f_y1(y1):
            return integrate_semi_infinite(
                lambda t: marginal_pdf_s1(c.fading, t / x) / x
                * math.exp(-0.5 * ((y1 - t) / sd) ** 2)
                / (sd * math.sqrt(2 * math.pi)))

        for y1, s2 in ((0.5, 1.0), (2.0, 3.0), (-0.7, 0.4)):
            prod = f_y1(y1) * marginal_pdf_s2(c.fading, s2)
            got = joint_pdf_y1_s2(c, x, y1, s2)
            assert abs(got - prod) < 1e-6


class TestEntropyJointGivenX:
    def test_x_zero_exact(self):
        c = make_channel()
        got = entropy_joint_given_x(c, 0.0)
        exact = 0.5 * math.log2(2 * math.pi * math.e * c.sigma_n1_sq) \
            + entropy_h_s2(c.fading)
        assert got == exact

    def test_splice_continuity(self):
        c = make_channel()
        x_min = 1e-3 * math.sqrt(c.power)
        below = entropy_joint_given_x(c, x_min * 0.999)
        above = entropy_joint_given_x(c, x_min * 1.001)
        assert abs(above - below) < 1e-5

    @pytest.mark.parametrize("x", [0.3, 1.0, 4.0])
    def test_gaussian_max_entropy_bound_per_x(self, x):
        c = make_channel()
        c_t, s1_t = part_b_ub_params(c)
        a = 0.5 * math.log2((2 * math.pi * math.e) ** 2
                            * c.fading.sigma_s1_sq * c.fading.sigma_s2_sq)
        bound = a + 0.5 * math.log2(c_t * x * x + s1_t)
        assert entropy_joint_given_x(c, x) <= bound

    def test_matches_resubstitution_estimate(self):
        # independent oracle: Gauss-Legendre convolution density evaluated at
        # sampled points (different discretization from the FFT pipeline)
        c = make_channel()
        x = 1.0
        h_grid, err, mass, _ = entropy_joint_given_x_full(c, x)
        assert abs(mass - 1.0) < 1e-5

        rng = np.random.default_rng(2718)
        n = 200_000
        s1, s2 = sample_pair(c.fading, rng, size=n)
        y1 = x * s1 + rng.normal(0.0, math.sqrt(c.sigma_n1_sq), size=n)
        t_max = x * math.sqrt(c.fading.sigma_s1_sq * math.log(1e12))
        nodes, weights = np.polynomial.legendre.leggauss(160)
        t_q = 0.5 * t_max * (nodes + 1.0)
        w_q = 0.5 * t_max * weights
        sd = math.sqrt(c.sigma_n1_sq)
        logs = np.empty(n)
        for lo in range(0, n, 20_000):
            hi = min(lo + 20_000, n)
            g = joint_pdf(c.fading, t_q[:, None] / x, s2[None, lo:hi]) / x
            kern = np.exp(-0.5 * ((y1[None, lo:hi] - t_q[:, None]) / sd) ** 2) \
                / (sd * math.sqrt(2 * math.pi))
            dens = np.einsum("q,qi,qi->i", w_q, g, kern)
            logs[lo:hi] = -np.log2(dens)
        est = float(np.mean(logs))
        se = float(np.std(logs, ddof=1)) / math.sqrt(n)
        assert abs(est - h_grid) < 3 * se


class TestRatePartB:
    def test_below_upper_bound(self):
        c = make_channel()
        assert rate_part_b(c) <= rate_part_b_ub(c)

    def test_independent_of_s2_and_n2_scales(self):
        pb_base, _ = rate_part_b_full(make_channel())
        pb_s2, _ = rate_part_b_full(make_channel(ss2=1.0))
        pb_n2, _ = rate_part_b_full(make_channel(sn2=0.5))
        assert abs(pb_base - pb_s2) < 2e-4
        assert pb_base == pb_n2  # sn2 never enters the pipeline


class TestRatePartBUb:
    def test_matches_direct_quadrature(self, rng):
        count = 0
        while count < 3:
            c = ChannelParams.from_values(
                ss1=float(rng.uniform(0.1, 2.0)), ss2=1.0,
                rho2=float(rng.uniform(0.0, 0.95)), sn1=float(rng.uniform(0.5, 2.0)),
                sn2=0.1, power=float(rng.uniform(0.05, 50.0)))
            c_t, s1_t = part_b_ub_params(c)
            if s1_t / (2 * c_t * c.power) > 30.0:
                continue
            count += 1
            closed = rate_part_b_ub(c)
            direct = quad_part_b_ub(c)
            assert abs(closed - direct) <= 1e-7 * max(abs(closed), abs(direct))

    def test_fallback_is_shared_quadrature_path(self):
        # z > z_switch: the closed form delegates to the oracle's integral
        c = make_channel(power=0.001, rho2=0.9, ss1=0.1, ss2=0.02, sn2=0.5)
        c_t, s1_t = part_b_ub_params(c)
        assert s1_t / (2 * c_t * c.power) > 30.0
        assert rate_part_b_ub(c) == quad_part_b_ub(c)

    def test_gap_to_part_b_slowly_varying(self):
        c0 = make_channel()
        gaps = []
        for power in (0.1, 1.0, 10.0, 100.0):
            c = ChannelParams(c0.fading, c0.sigma_n1_sq, c0.sigma_n2_sq, power)
            gaps.append(rate_part_b_ub(c) - rate_part_b(c))
        assert all(g > 0 for g in gaps)
        assert max(gaps) - min(gaps) < 0.5


class TestRatePartC:
    def test_low_power_limit(self):
        assert rate_part_c(make_channel(power=1e-4)) < 2e-4

    def test_frozen_value(self):
        assert math.isclose(rate_part_c(make_channel(power=1.0)),
                            0.4301736911354429756, rel_tol=1e-12)

    def test_literal_mode_ignores_fading_and_noise(self):
        vals = {rate_part_c(make_channel(ss1=s, sn2=n))
                for s, n in ((1.0, 0.1), (0.1, 0.01), (0.5, 0.05))}
        assert len(vals) == 1

    def test_general_snr_rescales_power(self):
        c = make_channel(ss1=0.5, ss2=0.05, power=2.0)
        lit_at_eff = rate_part_c(make_channel(power=2.0 * 0.5 / 1.0))
        assert math.isclose(rate_part_c(c, "general_snr"), lit_at_eff,
                            rel_tol=1e-14)

    def test_increasing_and_concave_in_power(self):
        powers = np.linspace(0.05, 20.0, 40)
        vals = np.array([rate_part_c(make_channel(power=float(p)))
                         for p in powers])
        first = np.diff(vals)
        assert np.all(first > 0.0)
        assert np.all(np.diff(first) < 0.0)

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            rate_part_c(make_channel(), "something_else")


class TestComputeRates:
    def test_breakdown_invariants(self):
        c = make_channel()
        b = compute_rates(c, with_part_b=True)
        assert b.r_alpha == b.part_a + b.part_b
        assert b.r_alpha_ub == b.part_a + b.part_b_ub
        assert b.r_beta == b.part_c
        assert b.r_alpha <= b.r_alpha_ub
        assert b.r_beta >= 0.0
        assert b.achievable == min(b.r_alpha, b.r_beta)
        assert b.achievable_ub == min(b.r_alpha_ub, b.r_beta)
        assert b.achievable <= b.achievable_ub
        for name in ("part_a", "part_b", "part_b_ub", "part_c"):
            assert math.isfinite(getattr(b, name))
        assert math.isfinite(b.err_est)

    def test_fast_mode_skips_part_b(self):
        b = compute_rates(make_channel(), with_part_b=False)
        assert b.part_b is None and b.r_alpha is None and b.achievable is None
        assert math.isfinite(b.achievable_ub)

    def test_degradedness_gate(self):
        bad = ChannelParams.from_values(ss1=0.1, ss2=10.0, rho2=0.5,
                                        sn1=1.0, sn2=0.5, power=1.0)
        with pytest.raises(DomainError):
            compute_rates(bad, with_part_b=False)
        b = compute_rates(bad, with_part_b=False, allow_nondegraded=True)
        assert math.isfinite(b.part_a)

    def test_low_power_achievable_is_r_beta(self):
        b = compute_rates(make_channel(power=0.05), with_part_b=False)
        assert b.achievable_ub == b.r_beta
