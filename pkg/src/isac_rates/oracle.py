"""Independent brute-force and Monte Carlo verifiers for the closed forms.

Every closed form in :mod:`isac_rates.rates` has a check here that shares no
code with it beyond the special-function primitives (which carry their own
oracles in the test suite).  Estimates are reproducible bit-exactly for a
fixed seed, sample count and batch size: samples are drawn from one PCG64
stream in batch order and batch partial sums are combined with exact
(compensated) summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .fading import ChannelParams, sample_pair
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig,
                         expect_half_gaussian, integrate_semi_infinite_full)
from .rates import PART_C_MODES, entropy_h_s2, part_b_ub_params
from .specfun import bessel_i0_scaled

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class McConfig:
    """Sample budget and seeding for the Monte Carlo verifiers."""

    sample_count: int = 10_000_000
    seed: int = 0
    batch_size: int = 1_000_000

    def __post_init__(self):
        if self.sample_count < 1 or self.batch_size < 1:
            raise DomainError("sample_count and batch_size must be positive")


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error, independent of closed forms."""

    mean: float
    std_error: float
    sample_count: int

    def agrees_with(self, value: float, n_sigma: float = 3.0) -> bool:
        return abs(self.mean - value) <= n_sigma * self.std_error


def _batches(mc: McConfig):
    remaining = mc.sample_count
    while remaining > 0:
        n = min(mc.batch_size, remaining)
        remaining -= n
        yield n


def _reduce(partial_sums, partial_sq_sums, n: int) -> McEstimate:
    total = math.fsum(partial_sums)
    total_sq = math.fsum(partial_sq_sums)
    mean = total / n
    var = max(total_sq - total * total / n, 0.0) / max(n - 1, 1)
    return McEstimate(mean=mean, std_error=math.sqrt(var / n), sample_count=n)


def mc_rate_part_a(c: ChannelParams, mc: McConfig) -> McEstimate:
    """MC check of part_a from the per-realization conditional-entropy form.

    Averages 0.5 log2(1 + (S1^2/sn1) / (S2^2/sn2 + 1/P)) over sampled fading
    pairs; no density or quadrature involved.
    """
    rng = np.random.default_rng(mc.seed)
    inv_p = 1.0 / c.power
    sums, sqs = [], []
    for n in _batches(mc):
        s1, s2 = sample_pair(c.fading, rng, size=n)
        vals = 0.5 * np.log2(1.0 + (s1 * s1 / c.sigma_n1_sq)
                             / (s2 * s2 / c.sigma_n2_sq + inv_p))
        sums.append(float(np.sum(vals)))
        sqs.append(float(np.sum(vals * vals)))
    return _reduce(sums, sqs, mc.sample_count)


def mc_entropy(sampler, pdf_evaluator, mc: McConfig) -> McEstimate:
    """Resubstitution entropy estimate, in bits: mean of -log2 f(X_i).

    ``sampler(rng, n)`` must return a batch of n points (an array, or a tuple
    of coordinate arrays) distributed with density f, and ``pdf_evaluator``
    must evaluate f on such a batch.  A zero density at any sampled point is
    an estimator failure and raises NumericalError naming the point.
    """
    rng = np.random.default_rng(mc.seed)
    sums, sqs = [], []
    for n in _batches(mc):
        batch = sampler(rng, n)
        dens = np.asarray(pdf_evaluator(batch), dtype=float)
        if np.any(dens <= 0.0):
            idx = int(np.argmax(dens <= 0.0))
            point = (tuple(np.asarray(a)[idx] for a in batch)
                     if isinstance(batch, tuple) else np.asarray(batch)[idx])
            raise NumericalError(
                f"pdf evaluated to {dens[idx]} at sampled point {point}")
        vals = -np.log2(dens)
        sums.append(float(np.sum(vals)))
        sqs.append(float(np.sum(vals * vals)))
    return _reduce(sums, sqs, mc.sample_count)


def mc_rate_part_c(c: ChannelParams, mc: McConfig,
                   mode: str = "paper_literal") -> McEstimate:
    """MC check of part_c: mean of 0.5 log2(1 + T P) over exponential T.

    ``paper_literal`` draws T ~ Exp(1); ``general_snr`` keeps the exact law
    T ~ Exp(rate sn1/ss1) of the scaled squared amplitude.
    """
    if mode not in PART_C_MODES:
        raise DomainError(f"unknown part_c mode {mode!r}; use one of {PART_C_MODES}")
    scale = 1.0
    if mode == "general_snr":
        scale = c.fading.sigma_s1_sq / c.sigma_n1_sq
    rng = np.random.default_rng(mc.seed)
    sums, sqs = [], []
    for n in _batches(mc):
        t = rng.exponential(scale=scale, size=n)
        vals = 0.5 * np.log2(1.0 + t * c.power)
        sums.append(float(np.sum(vals)))
        sqs.append(float(np.sum(vals * vals)))
    return _reduce(sums, sqs, mc.sample_count)


def _scaled_pair_density(c: ChannelParams, t1, t2):
    """Joint density of (S1^2/sn1, S2^2/sn2); factorizes when rho_sq = 0."""
    rho2 = c.fading.rho_sq
    one_m = 1.0 - rho2
    s1sq = c.sigma_n1_sq / c.fading.sigma_s1_sq
    s2sq = c.sigma_n2_sq / c.fading.sigma_s2_sq
    u = s1sq * t1
    v = s2sq * t2
    arg = 2.0 * np.sqrt(rho2 * u * v) / one_m
    return (s1sq * s2sq / one_m) * np.exp(-(u + v) / one_m + arg) \
        * bessel_i0_scaled(arg)


def brute_force_f_s(c: ChannelParams, s: float,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Ratio-density integral for f_S(s), bypassing the closed-form reduction.

    f_S(s) = int_{1/P}^inf u f_{T1,T2}(s u, u - 1/P) du, integrated directly
    (after shifting the origin to 1/P) with adaptive quadrature.
    """
    if s < 0.0:
        raise DomainError("brute_force_f_s requires s >= 0")
    inv_p = 1.0 / c.power

    def integrand(u_shift: float) -> float:
        u = u_shift + inv_p
        return u * _scaled_pair_density(c, s * u, u_shift)

    return integrate_semi_infinite_full(integrand, cfg)[0]


def f_s_uncorrelated_closed(c: ChannelParams, s: float) -> float:
    """Series-free closed form of f_S(s) valid only for rho_sq = 0.

    With independent amplitudes the ratio integral is elementary:
    s1sq s2sq e^{-s1sq s / P} [ (s1sq s + s2sq)^{-2} + (1/P)(s1sq s + s2sq)^{-1} ].
    Used as a third, independent route in the tests.
    """
    if c.fading.rho_sq != 0.0:
        raise DomainError("f_s_uncorrelated_closed requires rho_sq = 0")
    s1sq = c.sigma_n1_sq / c.fading.sigma_s1_sq
    s2sq = c.sigma_n2_sq / c.fading.sigma_s2_sq
    lin = s1sq * s + s2sq
    return s1sq * s2sq * math.exp(-s1sq * s / c.power) \
        * (1.0 / (lin * lin) + 1.0 / (c.power * lin))


def quad_part_b_ub(c: ChannelParams,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """part_b upper bound by direct quadrature of the Gaussian-bound integral.

    Integrates a + 0.5 log2(c~ x^2 + sigma1~^2) against the half-Gaussian
    weight and subtracts h(S2); no erfi or 2F2 involved.  This is also the
    fallback path of :func:`isac_rates.rates.rate_part_b_ub` beyond its
    cancellation switch (shared deliberately, asserted in the tests).
    """
    c_tilde, s1_tilde = part_b_ub_params(c)
    a = 0.5 * math.log2((2.0 * math.pi * math.e) ** 2
                        * c.fading.sigma_s1_sq * c.fading.sigma_s2_sq)

    def g(x: float) -> float:
        return a + 0.5 * math.log2(c_tilde * x * x + s1_tilde)

    return expect_half_gaussian(g, c.power, cfg) - entropy_h_s2(c.fading)
