"""Scalar special functions and the semi-infinite quadrature engine

Every function accepts numpy arrays as well as scalars and returns a float for
scalar input. Integrands are handled in log-domain: callers add up the logarithms of
their factors and the quadrature exponentiates once, after removing the largest
term.
"""
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .errors import AccuracyError, DomainError

logger = logging.getLogger(__name__)

#: tail mass below ~1e-20 of the peak
TAIL_EXPONENT = 46.0
SAFETY_FACTOR = 1.25
MIN_NODES = 64
MAX_NODES = 2**16
PANEL_ORDER = 32
RELATIVE_TOLERANCE = 1e-9

LAGUERRE_MAX_DEGREE = 200

# Elements per temporary array in the series evaluations
_BLOCK = 2**21


def _as_float_array(x, name, *, non_negative=True):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x}")
    if non_negative and np.any(arr < 0):
        raise DomainError(f"{name} must be non-negative, got {x}")
    return arr


def _out(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr


def log_bessel_i0(x):
    """Natural log of the modified Bessel function I0

    Uses the exponentially scaled ``scipy.special.i0e``, so no overflow occurs for
    large arguments.
    """
    x = _as_float_array(x, "x")
    return _out(np.log(special.i0e(x)) + x)


def _marcum_pair(a, b):
    """Return (Q1(a, b), 1 - Q1(a, b)), each from the series that does not cancel"""
    a = _as_float_array(a, "a")
    b = _as_float_array(b, "b")
    a, b = np.broadcast_arrays(a, b)
    shape = a.shape
    a = a.ravel()
    b = b.ravel()
    q = np.empty(a.shape)
    p = np.empty(a.shape)

    ab = a * b
    # Q1 <= 1/2 roughly when a < b: sum Q1 directly, otherwise sum its complement
    direct = a < b
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(direct, a / b, np.where(a > 0, b / a, 0.0))
    prefactor = np.exp(-0.5 * (a - b) ** 2)

    kmax = int(40 + 10 * math.sqrt(float(ab.max(initial=0.0))))
    k = np.arange(kmax + 1, dtype=float)
    rows = max(1, _BLOCK // (kmax + 1))
    series = np.empty(a.shape)
    for start in range(0, a.size, rows):
        sl = slice(start, start + rows)
        terms = ratio[sl, None] ** k * special.ive(k, ab[sl, None])
        # the complement series starts at k = 1
        terms[~direct[sl], 0] = 0.0
        series[sl] = terms.sum(axis=-1)

    value = prefactor * series
    q[direct] = value[direct]
    p[direct] = 1.0 - value[direct]
    p[~direct] = value[~direct]
    q[~direct] = 1.0 - value[~direct]
    np.clip(q, 0.0, 1.0, out=q)
    np.clip(p, 0.0, 1.0, out=p)
    return q.reshape(shape), p.reshape(shape)


def marcum_q1(a, b):
    """First order Marcum Q-function Q1(a, b)

    Q1(a, b) = exp(-(a^2 + b^2)/2) sum_k (a/b)^k I_k(ab), evaluated with
    exponentially scaled Bessel functions. When Q1 is close to 1 (a >= b) the
    complement 1 - Q1 = exp(-(a^2 + b^2)/2) sum_{k>=1} (b/a)^k I_k(ab) is summed
    instead, which keeps the absolute accuracy near 1.
    """
    return _out(_marcum_pair(a, b)[0])


def marcum_p1(a, b):
    """1 - Q1(a, b), the CDF at b of a Rician envelope with noncentrality a"""
    return _out(_marcum_pair(a, b)[1])


def log_marcum_p1(a, b):
    with np.errstate(divide="ignore"):
        return _out(np.log(_marcum_pair(a, b)[1]))


def laguerre(n, x):
    """Laguerre polynomial L_n(x) from the three-term recurrence

    (k + 1) L_{k+1}(x) = (2k + 1 - x) L_k(x) - k L_{k-1}(x)
    """
    if int(n) != n or n < 0 or n > LAGUERRE_MAX_DEGREE:
        raise DomainError(
            f"n={n} must be an integer between 0 and {LAGUERRE_MAX_DEGREE}"
        )
    n = int(n)
    x = _as_float_array(x, "x", non_negative=False)
    previous = np.ones_like(x)
    if n == 0:
        return _out(previous)
    current = 1.0 - x
    for k in range(1, n):
        previous, current = current, ((2 * k + 1 - x) * current - k * previous) / (
            k + 1
        )
    return _out(current)


def kummer_crossover(m):
    """z above which the large-z expansion of exp(-z) 1F1(m; 1; z) is used"""
    return max(50.0, 40.0 * m * m)


def _log_kummer_series(m, z):
    # exp(-z) 1F1(m; 1; z) = sum_k exp(-z) (m)_k z^k / (k!)^2, a sum of positive
    # terms that is concentrated around k ~ z/2 + sqrt(z^2/4 + m z). Only a window
    # of +-12 standard deviations around that peak is summed.
    result = np.zeros(z.shape)
    positive = z > 0
    if not np.any(positive):
        return result
    zp = z[positive]
    peak = 0.5 * zp + np.sqrt(0.25 * zp * zp + m * zp)
    half_width = 12.0 * np.sqrt(peak + m + 1.0) + 40.0
    lo = np.floor(np.maximum(peak - half_width, 0.0))
    width = int(np.ceil(2.0 * half_width.max())) + 1
    offsets = np.arange(width, dtype=float)
    rows = max(1, _BLOCK // width)
    values = np.empty(zp.shape)
    for start in range(0, zp.size, rows):
        sl = slice(start, start + rows)
        k = lo[sl, None] + offsets
        log_terms = (
            special.gammaln(m + k)
            - special.gammaln(m)
            + k * np.log(zp[sl, None])
            - 2.0 * special.gammaln(k + 1.0)
            - zp[sl, None]
        )
        values[sl] = special.logsumexp(log_terms, axis=-1)
    result[positive] = values
    return result


def _log_kummer_asymptotic(m, z):
    # exp(-z) 1F1(m; 1; z) ~ z^(m-1)/Gamma(m) sum_s ((1-m)_s)^2 / s! z^-s
    total = np.ones(z.shape)
    term = np.ones(z.shape)
    active = np.ones(z.shape, dtype=bool)
    for s in range(200):
        factor = (s + 1.0 - m) ** 2 / ((s + 1.0) * z)
        # stop where the expansion starts to diverge
        active &= factor < 1.0
        term = np.where(active, term * factor, 0.0)
        total += term
        active &= term > 1e-17 * total
        if not np.any(active):
            break
    return (m - 1.0) * np.log(z) - special.gammaln(m) + np.log(total)


def log_kummer_1f1_row1_scaled(m, z):
    """ln(exp(-z) 1F1(m; 1; z)) for m >= 0.5 and z >= 0"""
    if not (math.isfinite(m) and m >= 0.5):
        raise DomainError(f"m={m} must be a finite real >= 0.5")
    z = _as_float_array(z, "z")
    if m == 1.0:
        return _out(np.zeros(z.shape))
    shape = z.shape
    z = z.ravel()
    result = np.full(z.shape, np.nan)

    if float(m).is_integer() and m - 1 <= LAGUERRE_MAX_DEGREE:
        # exp(-z) 1F1(m; 1; z) = L_{m-1}(-z), all terms positive for z >= 0
        with np.errstate(over="ignore", invalid="ignore"):
            polynomial = np.asarray(laguerre(int(m) - 1, -z))
        exact = np.isfinite(polynomial) & (polynomial > 0)
        result[exact] = np.log(polynomial[exact])

    todo = np.isnan(result)
    if np.any(todo):
        large = todo & (z > kummer_crossover(m))
        small = todo & ~large
        logger.debug(
            "1F1 scaled m=%g: %d series, %d asymptotic", m, small.sum(), large.sum()
        )
        if np.any(small):
            result[small] = _log_kummer_series(m, z[small])
        if np.any(large):
            result[large] = _log_kummer_asymptotic(m, z[large])
    return _out(result.reshape(shape))


def kummer_1f1_row1_scaled(m, z):
    """exp(-z) 1F1(m; 1; z)

    Callers building integrands should prefer :func:`log_kummer_1f1_row1_scaled`
    and add z back in log-domain.
    """
    return _out(np.exp(log_kummer_1f1_row1_scaled(m, z)))


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretisation of an integral over [0, infinity)

    Attributes
    ----------
    nodes : int
        Initial number of Gauss-Legendre nodes, doubled until convergence
    x_max : float
        Truncation point of the domain
    decay_rate : float
        Coefficient a of the dominant envelope exp(-a x^2) of the integrand
    """

    nodes: int
    x_max: float
    decay_rate: float

    def __post_init__(self):
        if int(self.nodes) != self.nodes or self.nodes < MIN_NODES:
            raise DomainError(f"nodes={self.nodes} must be an integer >= {MIN_NODES}")
        if not (self.decay_rate > 0 and math.isfinite(self.decay_rate)):
            raise DomainError(f"decay_rate={self.decay_rate} must be positive")
        if not (self.x_max > 0 and math.isfinite(self.x_max)):
            raise DomainError(f"x_max={self.x_max} must be positive")
        if self.x_max**2 * self.decay_rate < TAIL_EXPONENT * (1.0 - 1e-12):
            raise DomainError(
                f"x_max={self.x_max} truncates too early for decay_rate="
                f"{self.decay_rate}: need x_max^2 * decay_rate >= {TAIL_EXPONENT}"
            )

    @classmethod
    def for_decay(cls, decay_rate, shift=0.0, nodes=MIN_NODES):
        """Truncate where decay_rate * t^2 = 46 + 2 ln(1 + t), times a 1.25 safety
        factor, beyond ``shift`` (the location of the bulk of the integrand)"""
        if not decay_rate > 0:
            raise DomainError(f"decay_rate={decay_rate} must be positive")
        t = math.sqrt(TAIL_EXPONENT / decay_rate)
        for _ in range(100):
            t_new = math.sqrt((TAIL_EXPONENT + 2.0 * math.log1p(t)) / decay_rate)
            if abs(t_new - t) <= 1e-12 * t_new:
                break
            t = t_new
        return cls(
            nodes=nodes, x_max=shift + SAFETY_FACTOR * t_new, decay_rate=decay_rate
        )

    def doubled(self):
        return replace(self, nodes=2 * self.nodes)

    def stretched(self, factor):
        return replace(self, x_max=self.x_max * factor)


@lru_cache(maxsize=None)
def _legendre_rule():
    return leggauss(PANEL_ORDER)


@lru_cache(maxsize=64)
def _panel_rule(nodes, x_max):
    """Nodes and log-weights of composite Gauss-Legendre on [0, x_max]"""
    panels = -(-nodes // PANEL_ORDER)
    t, w = _legendre_rule()
    edges = np.linspace(0.0, x_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * t).ravel()
    log_w = (np.log(half)[:, None] + np.log(w)).ravel()
    x.flags.writeable = False
    log_w.flags.writeable = False
    return x, log_w


def log_integrate_semi_infinite(
    f, spec, *, max_nodes=MAX_NODES, rtol=RELATIVE_TOLERANCE
):
    """ln of the integral of exp(f(x)) over [0, spec.x_max]

    Parameters
    ----------
    f : callable
        Maps a 1-d array of nodes to the log of the integrand, -inf where the
        integrand vanishes. The result may have leading batch dimensions, the last
        axis must match the nodes; one integral is returned per batch element.
    spec : QuadratureSpec
    max_nodes : int
        Node count cap; exceeding it raises AccuracyError
    rtol : float
        Stop once doubling the nodes changes every result by less than rtol
    """
    nodes = spec.nodes
    previous = None
    while True:
        x, log_w = _panel_rule(nodes, spec.x_max)
        log_values = np.asarray(f(x), dtype=float)
        if np.any(np.isnan(log_values)):
            raise AccuracyError(f"integrand is NaN on [0, {spec.x_max}]", nodes=nodes)
        current = special.logsumexp(log_values + log_w, axis=-1)
        if previous is not None:
            both_zero = np.isneginf(previous) & np.isneginf(current)
            with np.errstate(invalid="ignore"):
                change = np.abs(np.expm1(current - previous))
            if np.all(both_zero | (change <= rtol)):
                logger.debug(
                    "quadrature converged with %d nodes on [0, %g]", nodes, spec.x_max
                )
                return _out(current)
        if 2 * nodes > max_nodes:
            raise AccuracyError(
                f"quadrature on [0, {spec.x_max}] did not converge with {nodes} nodes",
                estimates=None
                if previous is None
                else (_out(np.exp(previous)), _out(np.exp(current))),
                nodes=nodes,
            )
        previous = current
        nodes *= 2


def integrate_semi_infinite(f, spec, **kwargs):
    """Integral of exp(f(x)) over [0, spec.x_max], see
    :func:`log_integrate_semi_infinite`"""
    return _out(np.exp(log_integrate_semi_infinite(f, spec, **kwargs)))
