"""Monte Carlo and brute-force verifier machinery."""

import math

import numpy as np
import pytest

from isac_rates import (ChannelParams, FadingParams, McConfig, McEstimate,
                        brute_force_f_s, density_f_s, marginal_pdf_s2,
                        mc_entropy, mc_rate_part_a, mc_rate_part_c,
                        quad_part_b_ub, rate_part_b, rate_part_c, sample_pair)
from isac_rates.errors import DomainError, NumericalError
from isac_rates.oracle import f_s_uncorrelated_closed
from isac_rates.quadrature import integrate_semi_infinite


def make_channel(power=1.0, **overrides):
    kw = dict(ss1=1.0, ss2=10.0, rho2=0.5, sn1=1.0, sn2=0.1)
    kw.update(overrides)
    return ChannelParams.from_values(power=power, **kw)


class TestBruteForceDensity:
    def test_uncorrelated_three_way_agreement(self):
        c = make_channel(rho2=0.0)
        for s in (0.05, 0.7, 3.0, 12.0):
            quad_val = brute_force_f_s(c, s)
            closed_rho0 = f_s_uncorrelated_closed(c, s)
            main_closed = density_f_s(c, s)
            assert math.isclose(quad_val, closed_rho0, rel_tol=1e-6)
            assert math.isclose(main_closed, closed_rho0, rel_tol=1e-6)

    def test_normalization(self):
        c = make_channel(rho2=0.5)
        total = integrate_semi_infinite(lambda s: brute_force_f_s(c, s))
        assert abs(total - 1.0) < 1e-5

    def test_rho0_guard(self):
        with pytest.raises(DomainError):
            f_s_uncorrelated_closed(make_channel(rho2=0.5), 1.0)

    def test_negative_s_rejected(self):
        with pytest.raises(DomainError):
            brute_force_f_s(make_channel(), -0.5)


class TestMcMachinery:
    def test_bit_exact_reproducibility(self):
        c = make_channel()
        mc = McConfig(sample_count=200_000, seed=77)
        a = mc_rate_part_a(c, mc)
        b = mc_rate_part_a(c, mc)
        assert a.mean == b.mean and a.std_error == b.std_error
        assert a.sample_count == 200_000

    def test_std_error_scaling(self):
        c = make_channel()
        small = mc_rate_part_a(c, McConfig(sample_count=250_000, seed=3))
        large = mc_rate_part_a(c, McConfig(sample_count=1_000_000, seed=3))
        ratio = small.std_error / large.std_error
        assert abs(ratio - 2.0) < 0.4  # 4x samples halves the error within 20%

    def test_config_validation(self):
        with pytest.raises(DomainError):
            McConfig(sample_count=0)

    def test_agrees_with_helper(self):
        est = McEstimate(mean=1.0, std_error=0.01, sample_count=10)
        assert est.agrees_with(1.02, n_sigma=3)
        assert not est.agrees_with(1.05, n_sigma=3)


class TestMcEntropy:
    def test_gaussian_known_entropy(self):
        var = 2.5
        est = mc_entropy(
            lambda rng, n: rng.normal(0.0, math.sqrt(var), size=n),
            lambda x: np.exp(-0.5 * x * x / var) / math.sqrt(2 * math.pi * var),
            McConfig(sample_count=400_000, seed=11))
        exact = 0.5 * math.log2(2 * math.pi * math.e * var)
        assert est.agrees_with(exact, n_sigma=3)

    def test_rayleigh_matches_closed_form(self):
        from isac_rates import entropy_h_s2
        p = FadingParams(1.0, 4.0, 0.0)
        est = mc_entropy(
            lambda rng, n: sample_pair(p, rng, size=n)[1],
            lambda s: marginal_pdf_s2(p, s),
            McConfig(sample_count=400_000, seed=13))
        assert est.agrees_with(entropy_h_s2(p), n_sigma=3)

    def test_zero_density_is_estimator_failure(self):
        with pytest.raises(NumericalError, match="sampled point"):
            mc_entropy(lambda rng, n: rng.uniform(-1.0, 1.0, size=n),
                       lambda x: np.where(x > 0.0, 0.5, 0.0),
                       McConfig(sample_count=1000, seed=1))


class TestMcRateParts:
    def test_part_a_low_power(self):
        est = mc_rate_part_a(make_channel(power=1e-4),
                             McConfig(sample_count=200_000, seed=2))
        assert est.mean < 0.01

    def test_part_a_decreases_with_correlation(self):
        lo = mc_rate_part_a(make_channel(rho2=0.01),
                            McConfig(sample_count=1_000_000, seed=21))
        hi = mc_rate_part_a(make_channel(rho2=0.90),
                            McConfig(sample_count=1_000_000, seed=21))
        assert lo.mean > hi.mean + 3 * (lo.std_error + hi.std_error)

    def test_part_c_literal_ignores_fading(self):
        mc = McConfig(sample_count=100_000, seed=9)
        a = mc_rate_part_c(make_channel(ss1=0.1, ss2=0.01), mc)
        b = mc_rate_part_c(make_channel(ss1=1.0), mc)
        assert a.mean == b.mean  # identical stream, identical transform

    def test_part_c_general_snr_agrees_with_closed_form(self):
        c = make_channel(ss1=0.5, ss2=0.05, power=2.0)
        est = mc_rate_part_c(c, McConfig(sample_count=1_000_000, seed=4),
                             mode="general_snr")
        assert est.agrees_with(rate_part_c(c, "general_snr"), n_sigma=3)

    def test_part_c_low_power(self):
        est = mc_rate_part_c(make_channel(power=1e-4),
                             McConfig(sample_count=200_000, seed=6))
        assert est.mean < 2e-4


class TestQuadPartBUb:
    def test_exceeds_part_b(self):
        c = make_channel()
        assert quad_part_b_ub(c) > rate_part_b(c)

    def test_deterministic(self):
        c = make_channel()
        assert quad_part_b_ub(c) == quad_part_b_ub(c)
