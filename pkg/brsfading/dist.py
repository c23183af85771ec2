"""Joint PDF, joint CDF, MGF and power moments of the bivariate Rician shadowed law

The densities and distribution functions are single integrals over the envelope
x = |sigma sqrt(rho) X_0 + Z| of the shared component, computed with
:func:`brsfading.specfun.log_integrate_semi_infinite`. All functions accept numpy
arrays for the envelope arguments and return floats for scalar input.

Correlation coefficients closer to the edges than the thresholds of
:mod:`brsfading.model` are evaluated by dedicated formulas: for rho < 1e-3 the law
is computed by conditioning on |Z| directly (rho treated as 0), for rho > 0.999 the
two envelopes are equal and the joint law lives on the diagonal r1 = r2.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import AccuracyError, DegenerateBranchError, DomainError
from .model import RhoClass, derive, validate
from .specfun import (
    QuadratureSpec,
    log_bessel_i0,
    log_integrate_semi_infinite,
    log_kummer_1f1_row1_scaled,
    log_marcum_p1,
)

logger = logging.getLogger(__name__)

#: densities below this are reported as 0
DENSITY_FLOOR = 1e-300
#: slack allowed on probabilities before clamping to [0, 1]
PROBABILITY_SLACK = 1e-9
#: largest integer m accepted by joint_pdf_int_m
MAX_INTEGER_M = 50
#: points evaluated together in one quadrature
BLOCK_SIZE = 256


def _out(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr


def _envelopes(*args):
    arrays = [np.asarray(a, dtype=float) for a in args]
    for name, a in zip(("r1", "r2"), arrays):
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise DomainError(f"{name} must be finite and non-negative, got {a}")
    return np.broadcast_arrays(*arrays)


def _blockwise(function, out, live, *arrays):
    """Fill ``out[live]`` by calling function on blocks of the live points"""
    index = np.flatnonzero(live)
    flat = [a.ravel() for a in arrays]
    result = out.ravel()
    for start in range(0, index.size, BLOCK_SIZE):
        chosen = index[start : start + BLOCK_SIZE]
        result[chosen] = function(*(a[chosen] for a in flat))
    return result.reshape(out.shape)


def _bulk(params):
    """RMS of the shared envelope |sigma sqrt(rho) X_0 + Z|"""
    return math.sqrt(params.sigma2 * (params.rho + params.k_factor))


def _log_los_kernel(params, beta, x):
    """ln 1F1(m; 1; beta x^2) - beta x^2"""
    if beta == 0.0:
        return np.zeros(np.shape(x))
    return log_kummer_1f1_row1_scaled(params.m, beta * x * x)


def _log_rician_pair_kernel(x, a1, a2, decay):
    return (
        np.log(x)
        - decay * x * x
        + log_bessel_i0(a1[:, None] * x)
        + log_bessel_i0(a2[:, None] * x)
    )


def _pdf_quadrature(params, constants, r1, r2):
    s = params.sigma2 * (1.0 - params.rho)
    decay = constants.net_decay_pdf
    # ln I0(y) <= y, so the integrand is bounded by exp(-decay x^2 + a x)
    shift = _bulk(params) + (r1.max() + r2.max()) / (s * decay)
    return QuadratureSpec.for_decay(decay, shift)


def _log_pdf_prefactor(params, constants, r1, r2):
    s2, rho = params.sigma2, params.rho
    s = s2 * (1.0 - rho)
    return (
        math.log(8.0)
        + constants.log_shadow_factor
        - 3.0 * math.log(s2)
        - math.log(rho)
        - 2.0 * math.log1p(-rho)
        + np.log(r1)
        + np.log(r2)
        - (r1 * r1 + r2 * r2) / s
    )


def _log_pdf_regular(params, r1, r2):
    constants = derive(params)
    s = params.sigma2 * (1.0 - params.rho)

    def block(r1, r2):
        a1, a2 = 2.0 * r1 / s, 2.0 * r2 / s

        def log_integrand(x):
            return _log_rician_pair_kernel(
                x, a1, a2, constants.net_decay_pdf
            ) + _log_los_kernel(params, constants.beta, x)

        spec = _pdf_quadrature(params, constants, r1, r2)
        integral = log_integrate_semi_infinite(log_integrand, spec)
        return _log_pdf_prefactor(params, constants, r1, r2) + integral

    out = np.full(r1.shape, -np.inf)
    return _blockwise(block, out, (r1 > 0) & (r2 > 0), r1, r2)


def _log_pdf_rho0(params, r1, r2):
    s2, k, m = params.sigma2, params.k_factor, params.m
    live = (r1 > 0) & (r2 > 0)
    out = np.full(r1.shape, -np.inf)
    if k == 0.0:
        # Z = 0: two independent Rayleigh envelopes
        with np.errstate(divide="ignore"):
            return (
                2.0 * math.log(2.0 / s2)
                + np.log(r1)
                + np.log(r2)
                - (r1 * r1 + r2 * r2) / s2
            )
    omega_n = k * s2
    decay = 2.0 / s2 + m / omega_n
    log_nakagami = (
        math.log(2.0) + m * math.log(m) - special.gammaln(m) - m * math.log(omega_n)
    )

    def block(r1, r2):
        a1, a2 = 2.0 * r1 / s2, 2.0 * r2 / s2

        def log_integrand(x):
            return _log_rician_pair_kernel(x, a1, a2, decay) + (2.0 * m - 2.0) * np.log(
                x
            )

        shift = math.sqrt(omega_n) + (r1.max() + r2.max()) / (s2 * decay)
        spec = QuadratureSpec.for_decay(decay, shift)
        integral = log_integrate_semi_infinite(log_integrand, spec)
        return (
            2.0 * math.log(2.0 / s2)
            + np.log(r1)
            + np.log(r2)
            - (r1 * r1 + r2 * r2) / s2
            + log_nakagami
            + integral
        )

    return _blockwise(block, out, live, r1, r2)


@dataclass(frozen=True)
class DiagonalCollapse:
    """Returned instead of a density when rho > 0.999

    The two envelopes are then equal, so the joint law has no density on the plane:
    it is concentrated on r1 = r2 with the univariate Rician shadowed law.
    """

    params: object
    r1: object
    r2: object

    @property
    def on_diagonal(self):
        same = np.asarray(self.r1) == np.asarray(self.r2)
        return bool(same) if same.ndim == 0 else same

    @property
    def marginal_density(self):
        """Density along the diagonal at r1 (zero off the diagonal)"""
        density = np.asarray(marginal_pdf(self.params, self.r1))
        return _out(np.where(np.asarray(self.on_diagonal), density, 0.0))


def log_joint_pdf(params, r1, r2):
    """ln f(r1, r2), -inf where the density vanishes

    Raises
    ------
    DegenerateBranchError
        for rho > 0.999, where no density exists (see :func:`joint_pdf_rho1`)
    """
    validate(params)
    r1, r2 = _envelopes(r1, r2)
    rho_class = params.rho_class
    if rho_class is RhoClass.DEGENERATE_HIGH:
        raise DegenerateBranchError(
            f"rho={params.rho} > 0.999: the joint law collapses onto r1 = r2"
        )
    if rho_class is RhoClass.DEGENERATE_LOW:
        return _out(_log_pdf_rho0(params, r1, r2))
    return _out(_log_pdf_regular(params, r1, r2))


def _density(log_density):
    log_density = np.asarray(log_density)
    with np.errstate(under="ignore"):
        density = np.exp(log_density)
    return _out(np.where(density < DENSITY_FLOOR, 0.0, density))


def joint_pdf(params, r1, r2):
    """Joint density of (|H_1|, |H_2|)

    f(r1, r2) = 8 (m rho/(m rho + K))^m / (sigma^6 rho (1 - rho)^2) r1 r2
                exp(-(r1^2 + r2^2)/(sigma^2 (1 - rho)))
                int_0^inf x exp(-(1 + rho) x^2 / (sigma^2 rho (1 - rho)))
                    I0(2 r1 x/(sigma^2 (1 - rho))) I0(2 r2 x/(sigma^2 (1 - rho)))
                    1F1(m; 1; K x^2 / (sigma^2 rho (rho m + K))) dx

    For rho < 1e-3 the value of :func:`joint_pdf_rho0` is returned; for
    rho > 0.999 a :class:`DiagonalCollapse` is returned instead of a number.
    """
    validate(params)
    if params.rho_class is RhoClass.DEGENERATE_HIGH:
        logger.warning("rho=%g > 0.999, reporting a diagonal collapse", params.rho)
        return joint_pdf_rho1(params, r1, r2)
    if params.rho_class is RhoClass.DEGENERATE_LOW:
        logger.debug("rho=%g < 1e-3 evaluated with rho = 0", params.rho)
    return _density(log_joint_pdf(params, r1, r2))


def joint_pdf_int_m(params, r1, r2):
    """Joint density for integer m from the Laguerre expansion of 1F1

    1F1(m; 1; z) = exp(z) L_{m-1}(-z) = exp(z) sum_l C(m-1, l) z^l / l!, so the
    integral of :func:`joint_pdf` splits into m integrals of
    x^(2l+1) exp(-net_decay_pdf x^2) I0(.) I0(.)
    """
    validate(params)
    m = params.m
    if not float(m).is_integer():
        raise DomainError(f"m={m} must be an integer for the Laguerre expansion")
    if m > MAX_INTEGER_M:
        raise DomainError(
            f"m={m} exceeds {MAX_INTEGER_M}, use joint_pdf for large m"
        )
    if params.rho_class is not RhoClass.REGULAR:
        raise DegenerateBranchError(
            f"rho={params.rho} is outside the regular range [1e-3, 0.999]"
        )
    n = int(m) - 1
    r1, r2 = _envelopes(r1, r2)
    constants = derive(params)
    s = params.sigma2 * (1.0 - params.rho)
    beta = constants.beta

    def block(r1, r2):
        a1, a2 = 2.0 * r1 / s, 2.0 * r2 / s
        spec = _pdf_quadrature(params, constants, r1, r2)
        terms = []
        for l in range(n + 1 if beta > 0 else 1):

            def log_integrand(x, l=l):
                return _log_rician_pair_kernel(
                    x, a1, a2, constants.net_decay_pdf
                ) + 2.0 * l * np.log(x)

            log_coefficient = (
                special.gammaln(n + 1)
                - special.gammaln(l + 1)
                - special.gammaln(n - l + 1)
                - special.gammaln(l + 1)
                + (l * math.log(beta) if l > 0 else 0.0)
            )
            integral = log_integrate_semi_infinite(log_integrand, spec)
            terms.append(log_coefficient + integral)
        return _log_pdf_prefactor(params, constants, r1, r2) + special.logsumexp(
            np.asarray(terms), axis=0
        )

    out = np.full(r1.shape, -np.inf)
    return _density(_blockwise(block, out, (r1 > 0) & (r2 > 0), r1, r2))


def joint_pdf_rho0(params, r1, r2):
    """Joint density for rho < 1e-3, evaluated at rho = 0

    Given |Z| = x the envelopes are independent Rician with Omega^2 = sigma^2/2:
    f(r1, r2) = int_0^inf f_Rice(r1 | x) f_Rice(r2 | x) f_Nakagami(x; m, K sigma^2) dx
    """
    validate(params)
    if params.rho_class is not RhoClass.DEGENERATE_LOW:
        raise DegenerateBranchError(f"rho={params.rho} is not below 1e-3")
    r1, r2 = _envelopes(r1, r2)
    return _density(_log_pdf_rho0(params, r1, r2))


def joint_pdf_rho1(params, r1, r2):
    """The rho > 0.999 limit: a :class:`DiagonalCollapse` marker"""
    validate(params)
    if params.rho_class is not RhoClass.DEGENERATE_HIGH:
        raise DegenerateBranchError(f"rho={params.rho} is not above 0.999")
    r1, r2 = _envelopes(r1, r2)
    return DiagonalCollapse(params, _out(r1), _out(r2))


def marginal_pdf(params, r):
    """Univariate Rician shadowed density of |H_k|

    f(r) = (2 r / sigma^2) (m/(m + K))^m exp(-r^2/sigma^2)
           1F1(m; 1; K r^2 / (sigma^2 (m + K)))
    """
    validate(params)
    (r,) = _envelopes(r)
    s2, k, m = params.sigma2, params.k_factor, params.m
    z = k * r * r / (s2 * (m + k))
    with np.errstate(divide="ignore"):
        log_density = (
            math.log(2.0 / s2)
            + np.log(r)
            + m * (math.log(m) - math.log(m + k))
            - r * r / s2
            + z
            + np.asarray(log_kummer_1f1_row1_scaled(m, z))
        )
    return _density(log_density)


def _probability(log_p):
    p = np.exp(np.asarray(log_p))
    if np.any(p > 1.0 + PROBABILITY_SLACK):
        raise AccuracyError(f"probability {p.max()} exceeds 1 beyond numerical slack")
    return _out(np.clip(p, 0.0, 1.0))


def _log_cdf_regular(params, r1, r2):
    constants = derive(params)
    s2, rho = params.sigma2, params.rho
    omega = math.sqrt(constants.omega2)
    decay = constants.net_decay_cdf
    log_prefactor = (
        math.log(2.0) + constants.log_shadow_factor - math.log(s2) - math.log(rho)
    )

    def block(*radii):
        def log_integrand(x):
            los = _log_los_kernel(params, constants.beta, x)
            value = (np.log(x) - decay * x * x + los)[None, :]
            for r in radii:
                value = value + log_marcum_p1(x[None, :] / omega, r[:, None] / omega)
            return value

        spec = QuadratureSpec.for_decay(decay, _bulk(params))
        return log_prefactor + log_integrate_semi_infinite(log_integrand, spec)

    arrays = (r1,) if r2 is None else (r1, r2)
    live = np.logical_and.reduce([a > 0 for a in arrays])
    out = np.full(r1.shape, -np.inf)
    return _blockwise(block, out, live, *arrays)


def _log_cdf_rho0(params, r1, r2):
    s2, k, m = params.sigma2, params.k_factor, params.m
    arrays = (r1,) if r2 is None else (r1, r2)
    if k == 0.0:
        with np.errstate(divide="ignore"):
            return sum(np.log(-np.expm1(-a * a / s2)) for a in arrays)
    omega_n = k * s2
    decay = m / omega_n
    scale = math.sqrt(2.0 / s2)
    log_nakagami = (
        math.log(2.0) + m * math.log(m) - special.gammaln(m) - m * math.log(omega_n)
    )

    def block(*radii):
        def log_integrand(x):
            value = ((2.0 * m - 1.0) * np.log(x) - decay * x * x)[None, :]
            for r in radii:
                value = value + log_marcum_p1(scale * x[None, :], scale * r[:, None])
            return value

        spec = QuadratureSpec.for_decay(decay, math.sqrt(omega_n))
        return log_nakagami + log_integrate_semi_infinite(log_integrand, spec)

    live = np.logical_and.reduce([a > 0 for a in arrays])
    out = np.full(r1.shape, -np.inf)
    return _blockwise(block, out, live, *arrays)


def joint_cdf(params, r1, r2):
    """Joint CDF P(|H_1| <= r1, |H_2| <= r2)

    F(r1, r2) = 2 (m rho/(m rho + K))^m / (sigma^2 rho)
                int_0^inf x exp(-x^2/(sigma^2 rho))
                    [1 - Q1(x/Omega, r1/Omega)] [1 - Q1(x/Omega, r2/Omega)]
                    1F1(m; 1; K x^2/(sigma^2 rho (rho m + K))) dx,
    Omega^2 = sigma^2 (1 - rho)/2. For rho > 0.999 the envelopes are equal and
    F(r1, r2) = F(min(r1, r2)); for rho < 1e-3 the CDF is evaluated at rho = 0.
    """
    validate(params)
    r1, r2 = _envelopes(r1, r2)
    rho_class = params.rho_class
    if rho_class is RhoClass.DEGENERATE_HIGH:
        return marginal_cdf(params, np.minimum(r1, r2))
    if rho_class is RhoClass.DEGENERATE_LOW:
        return _probability(_log_cdf_rho0(params, r1, r2))
    return _probability(_log_cdf_regular(params, r1, r2))


def joint_cdf_rho0(params, r1, r2):
    """Joint CDF for rho < 1e-3, evaluated at rho = 0"""
    validate(params)
    if params.rho_class is not RhoClass.DEGENERATE_LOW:
        raise DegenerateBranchError(f"rho={params.rho} is not below 1e-3")
    r1, r2 = _envelopes(r1, r2)
    return _probability(_log_cdf_rho0(params, r1, r2))


def marginal_cdf(params, r):
    """CDF of one envelope, the r2 -> infinity limit of :func:`joint_cdf`

    The marginal law does not depend on rho; outside the regular range of rho it is
    evaluated from the rho = 0 representation.
    """
    validate(params)
    (r,) = _envelopes(r)
    if params.rho_class is RhoClass.REGULAR:
        return _probability(_log_cdf_regular(params, r, None))
    return _probability(_log_cdf_rho0(params, r, None))


@dataclass(frozen=True)
class MgfPoint:
    """Arguments (theta1, theta2) of E[exp(theta1 P1 + theta2 P2)]"""

    theta1: float
    theta2: float


def _mgf_terms(params, point):
    """(u_sum, log of the diffuse factor) with u_sum = sum theta/(1 - s theta)"""
    s = params.sigma2 * (1.0 - params.rho)
    u_sum = 0.0
    log_diffuse = 0.0
    for name in ("theta1", "theta2"):
        theta = getattr(point, name)
        if not math.isfinite(theta):
            raise DomainError(f"{name}={theta} must be finite")
        gap = 1.0 - s * theta
        if not gap > 0:
            raise DomainError(
                f"{name}={theta} violates 1 - sigma^2 (1 - rho) {name} > 0"
            )
        u_sum += theta / gap
        log_diffuse -= math.log(gap)
    return u_sum, log_diffuse


def mgf(params, point):
    """Joint MGF E[exp(theta1 P1 + theta2 P2)] of the powers P_k = |H_k|^2

    Evaluates (rho m/(rho m + K))^m / (sigma^2 rho d1) (1 - beta/d1)^(-m)
    prod_k 1/(1 - sigma^2 (1 - rho) theta_k) with
    d1 = 1/(sigma^2 rho) - sum_k theta_k/(1 - sigma^2 (1 - rho) theta_k), written as
    (1 - sigma^2 rho u)^(m-1) (1 - sigma^2 (rho + K/m) u)^(-m) prod_k (...), u the
    sum above, which is the same expression after multiplying through by
    sigma^2 rho and holds for every rho in [0, 1].

    Raises
    ------
    DomainError
        if the point lies outside the region of convergence (d1 > beta)
    """
    validate(params)
    u_sum, log_diffuse = _mgf_terms(params, point)
    s2, k, m, rho = params.sigma2, params.k_factor, params.m, params.rho
    shared = 1.0 - s2 * rho * u_sum
    los = 1.0 - s2 * (rho + k / m) * u_sum
    if not (los > 0 and shared > 0):
        raise DomainError(
            f"(theta1, theta2)=({point.theta1}, {point.theta2}) violates d1 > beta"
        )
    return math.exp(log_diffuse + (m - 1.0) * math.log(shared) - m * math.log(los))


def mgf_prefinal(params, point):
    """The MGF written literally with d1 and beta (regular rho only)"""
    constants = derive(params)
    u_sum, log_diffuse = _mgf_terms(params, point)
    d1 = 1.0 / (params.sigma2 * params.rho) - u_sum
    if not d1 > constants.beta:
        raise DomainError(f"d1={d1} must exceed beta={constants.beta}")
    return math.exp(
        constants.log_shadow_factor
        - math.log(params.sigma2 * params.rho * d1)
        + log_diffuse
        - params.m * math.log1p(-constants.beta / d1)
    )


@dataclass(frozen=True)
class MgfCoefficients:
    """M = prefactor (a1 t1 t2 + a2 t1 + a3 t2 + a4)^(m-1)
    / (b1 t1 t2 + b2 t1 + b3 t2 + b4)^m"""

    prefactor: float
    a: tuple
    b: tuple


def mgf_coefficients(params):
    """Bilinear form of the MGF, normalised so that a4 = b4 = 1 and M(0, 0) = 1

    The common denominator (1 - s theta1)(1 - s theta2), s = sigma^2 (1 - rho),
    cancels between the three factors of :func:`mgf`.
    """
    validate(params)
    s2, k, m, rho = params.sigma2, params.k_factor, params.m, params.rho
    s = s2 * (1.0 - rho)
    q = s2 * rho
    g = s2 * (rho + k / m)
    a = (s * s + 2.0 * s * q, -(s + q), -(s + q), 1.0)
    b = (s * s + 2.0 * s * g, -(s + g), -(s + g), 1.0)
    return MgfCoefficients(prefactor=1.0, a=a, b=b)


def mgf_bilinear(params, point):
    c = mgf_coefficients(params)
    t1, t2 = point.theta1, point.theta2
    numerator = c.a[0] * t1 * t2 + c.a[1] * t1 + c.a[2] * t2 + c.a[3]
    denominator = c.b[0] * t1 * t2 + c.b[1] * t1 + c.b[2] * t2 + c.b[3]
    return c.prefactor * numerator ** (params.m - 1.0) / denominator**params.m


def marginal_mgf(params, theta):
    """E[exp(theta P_k)]

    Equals (1 - sigma^2 theta)^(m-1) / (1 - sigma^2 (1 + K/m) theta)^m for every rho.
    """
    return mgf(params, MgfPoint(theta, 0.0))


@dataclass(frozen=True)
class PowerMoments:
    """First and second moments of the powers P_k = |H_k|^2"""

    m10: float
    m01: float
    m20: float
    m02: float
    m11: float

    @property
    def variance(self):
        return self.m20 - self.m10**2

    @property
    def covariance(self):
        return self.m11 - self.m10 * self.m01


def power_moments(params):
    """Moments from the derivatives of ln M at the origin

    ln M = -sum_k ln(1 - s theta_k) + phi(u),
    phi(u) = (m - 1) ln(1 - q u) - m ln(1 - g u), u = sum_k theta_k/(1 - s theta_k),
    s = sigma^2 (1 - rho), q = sigma^2 rho, g = sigma^2 (rho + K/m). At the origin
    du/dtheta_k = 1 and d2u/dtheta_k2 = 2 s.
    """
    validate(params)
    s2, k, m, rho = params.sigma2, params.k_factor, params.m, params.rho
    s = s2 * (1.0 - rho)
    q = s2 * rho
    g = s2 * (rho + k / m)
    dphi = -(m - 1.0) * q + m * g
    d2phi = -(m - 1.0) * q * q + m * g * g

    mean = s + dphi
    variance = s * s + d2phi + 2.0 * s * dphi
    covariance = d2phi
    return PowerMoments(
        m10=mean,
        m01=mean,
        m20=variance + mean * mean,
        m02=variance + mean * mean,
        m11=covariance + mean * mean,
    )


def rho_bs(params):
    """Correlation coefficient of the powers P_1 and P_2"""
    moments = power_moments(params)
    var1 = moments.m20 - moments.m10**2
    var2 = moments.m02 - moments.m01**2
    if not (var1 > 0 and var2 > 0):
        raise DegenerateBranchError("power variance is zero, rho_BS is undefined")
    value = (moments.m11 - moments.m10 * moments.m01) / math.sqrt(var1 * var2)
    if value < -PROBABILITY_SLACK or value > 1.0 + PROBABILITY_SLACK:
        raise AccuracyError(f"rho_BS={value} is outside [0, 1]")
    return min(max(value, 0.0), 1.0)
