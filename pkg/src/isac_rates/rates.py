"""The rate terms of the achievable secrecy-rate bound for a Gaussian input.

Terminology used throughout: for a channel with fading second moments
(ss1, ss2), power correlation rho2, noise variances (sn1, sn2) and transmit
power P,

* ``part_a``    - conditional-entropy term, the 1-D integral of
                  0.5 log2(1+s) against the effective-SNR-ratio density f_S;
* ``part_b``    - expected joint-entropy term E_X[h(X S1 + N1, S2)] - h(S2),
                  computed through a gridded 2-D entropy pipeline;
* ``part_b_ub`` - its Gaussian max-entropy closed-form upper bound;
* ``part_c``    - the eavesdropper-free term (1/(2 ln 2)) e^{1/P} E1(1/P),
                  a function of transmit power only in its literal form.

r_alpha = part_a + part_b, r_alpha_ub = part_a + part_b_ub, r_beta = part_c,
and the achievable rate is min(r_alpha, r_beta).  All rates are in bits per
channel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError, NumericalError
from .fading import ChannelParams, FadingParams, is_stochastically_degraded
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig,
                         expect_half_gaussian, gaussian_tail_halfwidth,
                         integrate_semi_infinite_full)
from .specfun import EULER_GAMMA, bessel_i0_scaled, erfi_hyp2f2_comb, \
    exp_integral_e1_scaled

_LN2 = math.log(2.0)

# Fraction of sqrt(P) below which the x -> 0 independent-pair entropy is used
# instead of the convolution grid (the grid integrand degenerates there).
_X_MIN_FRACTION = 1e-3

# Grid-convergence target for one 2-D entropy tabulation, in bits.
_GRID_TOL_BITS = 3e-5

# Node-ladder convergence target for the part_b expectation, in bits.
_NODE_TOL_BITS = 5e-5

_LEGGAUSS_CACHE: dict[int, tuple] = {}


def _leggauss(n: int):
    if n not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEGGAUSS_CACHE[n]

PART_C_MODES = ("paper_literal", "general_snr")


@dataclass(frozen=True)
class PartAParams:
    """Noise-to-signal ratios entering the effective-SNR density."""

    sigma1_sq: float
    sigma2_sq: float

    @classmethod
    def from_channel(cls, c: ChannelParams) -> "PartAParams":
        return cls(c.sigma_n1_sq / c.fading.sigma_s1_sq,
                   c.sigma_n2_sq / c.fading.sigma_s2_sq)


@dataclass(frozen=True)
class RateBreakdown:
    """All rate terms (bits/channel use) for one parameter point."""

    part_a: float
    part_b: float | None
    part_b_ub: float
    part_c: float
    r_alpha: float | None
    r_alpha_ub: float
    r_beta: float
    achievable: float | None
    achievable_ub: float
    err_est: float = float("nan")

    @classmethod
    def from_parts(cls, part_a, part_b, part_b_ub, part_c, err_est=float("nan")):
        r_alpha_ub = part_a + part_b_ub
        r_beta = part_c
        if part_b is None:
            r_alpha = None
            achievable = None
        else:
            r_alpha = part_a + part_b
            achievable = min(r_alpha, r_beta)
        return cls(part_a=part_a, part_b=part_b, part_b_ub=part_b_ub,
                   part_c=part_c, r_alpha=r_alpha, r_alpha_ub=r_alpha_ub,
                   r_beta=r_beta, achievable=achievable,
                   achievable_ub=min(r_alpha_ub, r_beta), err_est=err_est)


# ---------------------------------------------------------------------------
# part_a: effective-SNR-ratio density and its log integral
# ---------------------------------------------------------------------------

def density_f_s(c: ChannelParams, s):
    """Closed-form density of S = T1 / (T2 + 1/P) at s >= 0.

    T1, T2 are the squared fading amplitudes scaled by their noise variances.
    The two exponential factors are combined in log space (their sum is
    always <= 0), so the value never overflows even for small P or rho2
    near 1.  Vectorized over ``s``.
    """
    q = PartAParams.from_channel(c)
    rho2 = c.fading.rho_sq
    two_p = 2.0 * c.power * (1.0 - rho2)
    s_arr = np.asarray(s, dtype=float)
    a = (q.sigma1_sq * s_arr) ** 2 \
        + (2.0 - 4.0 * rho2) * q.sigma1_sq * q.sigma2_sq * s_arr \
        + q.sigma2_sq ** 2
    # A(s) has negative discriminant for 0 < rho2 < 1, so this cannot fire on
    # the support; it guards against silent parameter corruption.
    assert np.all(np.atleast_1d(a)[np.atleast_1d(s_arr) >= 0.0] > 0.0), \
        "A(s) must be positive for rho_sq < 1"
    sqrt_a = np.sqrt(a)
    lin = q.sigma1_sq * s_arr + q.sigma2_sq
    expo = (q.sigma2_sq - q.sigma1_sq * s_arr - sqrt_a) / two_p
    bracket = 1.0 / (2.0 * c.power * sqrt_a) \
        + lin / (2.0 * c.power * a) \
        + (1.0 - rho2) * lin / (a * sqrt_a)
    val = q.sigma1_sq * q.sigma2_sq * np.exp(expo) * bracket
    val = np.where(s_arr < 0.0, 0.0, val)
    return float(val) if val.ndim == 0 else val


def rate_part_a_full(c: ChannelParams, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """part_a with its quadrature error bound and truncation point."""

    def integrand(s: float) -> float:
        return 0.5 * math.log2(1.0 + s) * density_f_s(c, s)

    return integrate_semi_infinite_full(integrand, cfg)


def rate_part_a(c: ChannelParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """0.5 * int_0^inf log2(1+s) f_S(s) ds, in bits."""
    return rate_part_a_full(c, cfg)[0]


# ---------------------------------------------------------------------------
# part_b: joint-entropy pipeline
# ---------------------------------------------------------------------------

def entropy_h_s2(p: FadingParams) -> float:
    """Differential entropy (bits) of the Rayleigh amplitude S2.

    h(S2) = (1 + gamma/2)/ln 2 + 0.5 log2(sigma_s2_sq / 4).
    """
    return (1.0 + 0.5 * EULER_GAMMA) / _LN2 \
        + 0.5 * math.log2(p.sigma_s2_sq / 4.0)


def _entropy_h_n1(c: ChannelParams) -> float:
    return 0.5 * math.log2(2.0 * math.pi * math.e * c.sigma_n1_sq)


def _joint_density_sq(p: FadingParams, s1, v):
    """Joint density of (S1, S2^2) at (s1, v); analytic in v down to v = 0."""
    one_m = 1.0 - p.rho_sq
    a = s1 * s1 / p.sigma_s1_sq
    b = v / p.sigma_s2_sq
    arg = 2.0 * np.sqrt(p.rho_sq * a * b) / one_m
    pref = 2.0 * s1 / (p.sigma_s1_sq * p.sigma_s2_sq * one_m)
    return pref * np.exp(-(a + b) / one_m + arg) * bessel_i0_scaled(arg)


def joint_pdf_y1_s2(c: ChannelParams, x: float, y1: float, s2: float,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Pointwise joint density of (x S1 + N1, S2) via the convolution integral.

    Requires x > 0; the x = 0 limit factorizes and is handled analytically by
    the entropy pipeline.  Truncation follows both the Rayleigh and Gaussian
    envelopes.
    """
    if not (x > 0.0):
        raise DomainError("joint_pdf_y1_s2 requires x > 0")
    if s2 < 0.0:
        return 0.0
    from .fading import joint_pdf  # local alias for the amplitude density
    p = c.fading
    sd = math.sqrt(c.sigma_n1_sq)
    tau = cfg.tail_mass_tol
    w = gaussian_tail_halfwidth(tau) * sd
    s1_max = math.sqrt(p.sigma_s1_sq * math.log(1.0 / tau)) * 1.5
    lo = max(0.0, y1 - w)
    hi = min(x * s1_max, y1 + w)
    if hi <= lo:
        return 0.0
    norm = 1.0 / (sd * math.sqrt(2.0 * math.pi))

    def integrand(t: float) -> float:
        gauss = norm * math.exp(-0.5 * ((y1 - t) / sd) ** 2)
        return joint_pdf(p, t / x, s2) / x * gauss

    from .quadrature import _quad
    return _quad(integrand, lo, hi, cfg)[0]


def _entropy_grid_once(c: ChannelParams, x: float, cfg: QuadratureConfig,
                       n_v: int, refine: float):
    """One tabulation of the (y1, S2^2) density and its entropy (nats -> bits).

    Works in v = s2^2 coordinates, where the tabulated density is analytic on
    [0, v_max] (no square-root edge), and restores the s2-coordinate entropy
    through the exact exponential marginal of S2^2:

        h(Y1, S2) = -II f~ ln f~  -  ln 2 * mass  -  (ln ss2 - gamma)/2.

    Returns (h_bits, mass, meta).
    """
    p = c.fading
    sd = math.sqrt(c.sigma_n1_sq)
    tau = cfg.tail_mass_tol
    log_inv_tau = math.log(1.0 / tau)
    kg = gaussian_tail_halfwidth(tau)
    s1_max = math.sqrt(p.sigma_s1_sq * log_inv_tau)
    t_max = x * s1_max
    w = kg * sd
    v_max = p.sigma_s2_sq * log_inv_tau
    # the conditional ridge of S2^2 given S1 narrows like (1 - rho2), so the
    # v axis needs proportionally more nodes at high correlation
    n_v = int(n_v * min(4.0, 1.0 / (1.0 - p.rho_sq)))
    if n_v % 2 == 0:
        n_v += 1
    v = np.linspace(0.0, v_max, n_v)
    w_v = _simpson_weights(n_v, v[1] - v[0])

    if t_max >= sd:
        # wide support: uniform-step trapezoid in t, FFT against the noise kernel
        dt = min(sd, 0.35 * x * math.sqrt(p.sigma_s1_sq)) / (6.0 * refine)
        n_t = max(33, int(math.ceil(t_max / dt)) + 1)
        t = np.linspace(0.0, t_max, n_t)
        dt = t[1] - t[0]
        m = int(math.ceil(w / dt))
        g = _joint_density_sq(p, t[:, None] / x, v[None, :]) / x
        g[0, :] *= 0.5
        g[-1, :] *= 0.5
        kern = np.exp(-0.5 * ((np.arange(-m, m + 1) * dt) / sd) ** 2) \
            / (sd * math.sqrt(2.0 * math.pi))
        f = fftconvolve(g, kern[:, None], mode="full", axes=0) * dt
        # first Euler-Maclaurin endpoint term: the integrand has a corner at
        # t = 0 (density ramps from zero with slope g'(0, v)), which caps the
        # plain trapezoid at O(dt^2); the correction restores O(dt^4)
        one_m = 1.0 - p.rho_sq
        gprime0 = (2.0 / (x * x * p.sigma_s1_sq * p.sigma_s2_sq * one_m)) \
            * np.exp(-v / (p.sigma_s2_sq * one_m))
        y = (np.arange(f.shape[0]) - m) * dt
        phi_y = np.exp(-0.5 * (y / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))
        f += (dt * dt / 12.0) * phi_y[:, None] * gprime0[None, :]
        np.maximum(f, 0.0, out=f)
        n_y = f.shape[0]
        w_y = np.full(n_y, dt)
        w_y[0] = w_y[-1] = 0.5 * dt
        meta = {"path": "fft", "t_max": t_max, "dt": dt, "n_t": n_t,
                "n_v": n_v, "v_max": v_max,
                "y_range": (-m * dt, t_max + m * dt)}
    else:
        # narrow support: Gauss-Legendre in t, explicit kernel matrix in y
        n_q = max(24, int(48 * refine))
        nodes, weights = _leggauss(n_q)
        t_q = 0.5 * t_max * (nodes + 1.0)
        w_q = 0.5 * t_max * weights
        dy = sd / (8.0 * refine)
        y = np.arange(-w, t_max + w + dy, dy)
        g = _joint_density_sq(p, t_q[:, None] / x, v[None, :]) / x
        kern = np.exp(-0.5 * ((y[:, None] - t_q[None, :]) / sd) ** 2) \
            / (sd * math.sqrt(2.0 * math.pi))
        f = kern @ (w_q[:, None] * g)
        np.maximum(f, 0.0, out=f)
        w_y = np.full(y.size, dy)
        w_y[0] = w_y[-1] = 0.5 * dy
        meta = {"path": "gauss", "t_max": t_max, "n_q": n_q, "dy": dy,
                "n_v": n_v, "v_max": v_max, "y_range": (float(y[0]), float(y[-1]))}

    mass = float(w_y @ f @ w_v)
    flnf = np.zeros_like(f)
    pos = f > 1e-300
    flnf[pos] = f[pos] * np.log(f[pos])
    ent_nats = -float(w_y @ flnf @ w_v)
    h_nats = ent_nats - _LN2 * mass \
        - 0.5 * (math.log(p.sigma_s2_sq) - EULER_GAMMA)
    return h_nats / _LN2, mass, meta


def _simpson_weights(n: int, h: float) -> np.ndarray:
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def entropy_joint_given_x_full(c: ChannelParams, x: float,
                               cfg: QuadratureConfig = DEFAULT_CONFIG):
    """h(x S1 + N1, S2) in bits, plus (error_estimate, mass, meta).

    x below 1e-3 sqrt(P) (including 0) returns the exact independent-pair
    value h(N1) + h(S2); the splice is continuous well below grid tolerance.
    Otherwise the density is tabulated at the configured resolution plus a
    coarse companion pass; disagreement beyond the grid tolerance triggers
    one refinement, and failure after that raises NumericalError with the
    achieved estimate.
    """
    if x < 0.0:
        raise DomainError("entropy_joint_given_x requires x >= 0")
    if x < _X_MIN_FRACTION * math.sqrt(c.power):
        h = _entropy_h_n1(c) + entropy_h_s2(c.fading)
        return h, 0.0, 1.0, {"path": "independent-pair"}
    n_v = cfg.grid_points_per_axis + 1
    for refine in (1.0, 2.0):
        h_fine, mass, meta = _entropy_grid_once(c, x, cfg, int(n_v * refine), refine)
        h_coarse, _, _ = _entropy_grid_once(c, x, cfg, int(n_v * refine) // 2 + 1,
                                            refine * 0.5)
        err = abs(h_fine - h_coarse) / 3.0
        if err <= _GRID_TOL_BITS:
            return h_fine, err, mass, meta
    raise NumericalError(
        f"entropy grid did not converge at x={x:.6g} (err~{err:.2e} bits)",
        estimate=h_fine, error_bound=err)


def entropy_joint_given_x(c: ChannelParams, x: float,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Joint differential entropy h(x S1 + N1, S2) in bits, for x >= 0."""
    return entropy_joint_given_x_full(c, x, cfg)[0]


def rate_part_b_full(c: ChannelParams, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """part_b = E_X[h(S1 X + N1, S2)] - h(S2) with an error estimate.

    Evaluates the joint entropy on a nested ladder of x nodes over
    [0, k sqrt(P)], interpolates x -> h monotone-cubically, integrates the
    interpolant against the half-Gaussian weight, and doubles the node count
    until the expectation is stable.
    """
    x_max = gaussian_tail_halfwidth(cfg.tail_mass_tol) * math.sqrt(c.power)
    cache: dict[float, tuple] = {}

    def h_at(xv: float):
        if xv not in cache:
            cache[xv] = entropy_joint_given_x_full(c, xv, cfg)
        return cache[xv]

    from .quadrature import Grid1D, interpolate

    prev = None
    delta = float("inf")
    for level in (3, 4, 5, 6):  # 9, 17, 33, 65 nodes; dyadic so levels nest exactly
        n_nodes = 2 ** level + 1
        # quadratic clustering: the entropy bends like log(1 + c x^2) near
        # x = 0, where the Gaussian weight also concentrates
        nodes = x_max * (np.arange(n_nodes) / float(2 ** level)) ** 2
        vals = np.array([h_at(float(xv))[0] for xv in nodes])
        grid = Grid1D(nodes, vals, meta={"x_max": x_max})
        expected = expect_half_gaussian(
            lambda xv: interpolate(grid, min(xv, x_max)), c.power, cfg)
        if prev is not None:
            delta = abs(expected - prev)
            if delta < _NODE_TOL_BITS:
                prev = expected
                break
        prev = expected
    grid_err = max(rec[1] for rec in cache.values())
    err = delta if math.isfinite(delta) else grid_err
    if delta > 10.0 * _NODE_TOL_BITS:
        raise NumericalError(
            f"part_b node ladder did not converge (delta={delta:.2e} bits)",
            estimate=prev - entropy_h_s2(c.fading), error_bound=delta)
    return prev - entropy_h_s2(c.fading), err + grid_err


def rate_part_b(c: ChannelParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """E_X[h(S1 X + N1 | S2)] in bits via the gridded entropy pipeline."""
    return rate_part_b_full(c, cfg)[0]


# ---------------------------------------------------------------------------
# part_b upper bound (closed form) and part_c
# ---------------------------------------------------------------------------

def part_b_ub_params(c: ChannelParams):
    """(c_tilde, sigma1_tilde_sq) of the Gaussian max-entropy bound.

    c_tilde = (1 - pi/4)^2 (1 - cor(S1, S2)^2) and
    sigma1_tilde_sq = (1 - pi/4) sn1/ss1; both strictly positive for
    rho_sq < 1.
    """
    from .fading import amplitude_correlation
    one_m_pi4 = 1.0 - math.pi / 4.0
    cor = amplitude_correlation(c.fading)
    c_tilde = one_m_pi4 ** 2 * (1.0 - cor * cor)
    sigma1_tilde_sq = one_m_pi4 * c.sigma_n1_sq / c.fading.sigma_s1_sq
    if c_tilde <= 0.0:
        raise DomainError("part_b bound degenerates as rho_sq -> 1 (c_tilde <= 0)")
    return c_tilde, sigma1_tilde_sq


def rate_part_b_ub(c: ChannelParams, z_switch: float = 30.0,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Closed-form upper bound on part_b, in bits.

    0.5 log2(2 (pi e)^2 ss1 c~ P) + 1 - (1 + gamma)/ln 2
        + [ (pi/2) erfi(sqrt(z)) - z 2F2(1,1;3/2,2;z) ] / ln 2,
    z = sigma1~^2 / (2 c~ P).

    The bracketed combination is evaluated through the cancellation-free
    kernel in specfun; beyond ``z_switch`` the whole expression falls back to
    direct quadrature of the underlying Gaussian-bound integral (the same
    code path as the oracle's independent check).
    """
    c_tilde, s1_tilde = part_b_ub_params(c)
    z = s1_tilde / (2.0 * c_tilde * c.power)
    if z > z_switch:
        from .oracle import quad_part_b_ub
        return quad_part_b_ub(c, cfg)
    return 0.5 * math.log2(2.0 * (math.pi * math.e) ** 2
                           * c.fading.sigma_s1_sq * c_tilde * c.power) \
        + 1.0 - (1.0 + EULER_GAMMA) / _LN2 \
        + erfi_hyp2f2_comb(z) / _LN2


def rate_part_c(c: ChannelParams, mode: str = "paper_literal") -> float:
    """Eavesdropper-free rate term, in bits.

    ``paper_literal``: (1/(2 ln 2)) e^{1/P} E1(1/P), a function of the
    transmit power only.  ``general_snr``: the same expression with P
    replaced by P ss1 / sn1, i.e. with the exponential law of S1^2/sn1 kept
    exact when ss1 != sn1.
    """
    if mode not in PART_C_MODES:
        raise DomainError(f"unknown part_c mode {mode!r}; use one of {PART_C_MODES}")
    p_eff = c.power
    if mode == "general_snr":
        p_eff = c.power * c.fading.sigma_s1_sq / c.sigma_n1_sq
    return exp_integral_e1_scaled(1.0 / p_eff) / (2.0 * _LN2)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def compute_rates(c: ChannelParams, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  mode: str = "paper_literal", with_part_b: bool = True,
                  allow_nondegraded: bool = False) -> RateBreakdown:
    """Evaluate every rate term for one channel configuration.

    Raises DomainError when the channel is not stochastically degraded unless
    ``allow_nondegraded`` is set (exploration only; the bound is stated for
    the degraded model).  ``with_part_b=False`` skips the slow entropy
    pipeline, leaving the closed-form upper bound.
    """
    if not allow_nondegraded and not is_stochastically_degraded(c):
        raise DomainError(
            "channel is not stochastically degraded: "
            f"sn2/sn1 = {c.sigma_n2_sq / c.sigma_n1_sq:.6g} exceeds "
            f"ss1/ss2 = {c.fading.sigma_s1_sq / c.fading.sigma_s2_sq:.6g}; "
            "pass allow_nondegraded=True to evaluate anyway")
    part_a, err_a, _ = rate_part_a_full(c, cfg)
    part_b_ub = rate_part_b_ub(c, cfg=cfg)
    part_c = rate_part_c(c, mode)
    err = err_a
    part_b = None
    if with_part_b:
        try:
            part_b, err_b = rate_part_b_full(c, cfg)
            err += err_b
        except NumericalError as exc:
            partial = RateBreakdown.from_parts(part_a, None, part_b_ub,
                                               part_c, err_est=err)
            raise NumericalError(f"part_b failed: {exc}", estimate=partial,
                                 error_bound=exc.error_bound) from exc
    return RateBreakdown.from_parts(part_a, part_b, part_b_ub, part_c,
                                    err_est=err)
