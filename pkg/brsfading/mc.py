"""Monte Carlo sampler of the generative model and estimators with standard errors

Draws are generated in chunks of :data:`CHUNK_SIZE`, each with its own generator
spawned from ``numpy.random.SeedSequence(seed)``. Chunks are independent, so they can
be evaluated by any number of threads; partial sums are merged in chunk order, which
makes every estimate reproducible for a given seed whatever the worker count.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._utils import worker_count
from .errors import DomainError, ParameterError
from .model import validate

logger = logging.getLogger(__name__)

CHUNK_SIZE = 2**16
#: draws per jackknife block
JACKKNIFE_BLOCK = 2**10
MIN_PROBABILITY_DRAWS = 10**4
MIN_MOMENT_DRAWS = 10**5


@dataclass(frozen=True)
class EnvelopePair:
    r1: float
    r2: float


@dataclass(frozen=True)
class McEstimate:
    """Estimate with its standard error; value and std_error may be arrays"""

    value: object
    std_error: object
    n: int

    def brackets(self, target, n_se=3.0):
        """True where target lies within n_se standard errors of the estimate"""
        return np.abs(np.asarray(self.value) - target) <= n_se * np.asarray(
            self.std_error
        )


def sample_nakagami_envelope(m, omega_n, rng, size=None):
    """Nakagami-m envelope with E[r^2] = omega_n, the square root of a Gamma draw"""
    if not (math.isfinite(m) and m >= 0.5):
        raise DomainError(f"m={m} must be a finite real >= 0.5")
    if not (math.isfinite(omega_n) and omega_n > 0):
        raise DomainError(f"omega_n={omega_n} must be positive")
    return np.sqrt(rng.gamma(shape=m, scale=omega_n / m, size=size))


def _complex_normal(rng, shape):
    # E|X|^2 = 1
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(
        0.5
    )


def sample_pairs(params, n, rng, *, random_phase=False):
    """n draws of (|H_1|, |H_2|) as two arrays

    H_k = sigma sqrt(1 - rho) X_k + sigma sqrt(rho) X_0 + Z. Z has zero phase unless
    random_phase is set; the envelope law does not depend on it.
    """
    validate(params)
    sigma = math.sqrt(params.sigma2)
    x = _complex_normal(rng, (3, n))
    shared = sigma * math.sqrt(params.rho) * x[0]
    if params.k_factor > 0:
        z = sample_nakagami_envelope(
            params.m, params.k_factor * params.sigma2, rng, size=n
        ).astype(complex)
        if random_phase:
            z *= np.exp(2j * math.pi * rng.random(n))
        shared = shared + z
    diffuse = sigma * math.sqrt(1.0 - params.rho)
    return np.abs(diffuse * x[1] + shared), np.abs(diffuse * x[2] + shared)


def sample_pair(params, rng):
    r1, r2 = sample_pairs(params, 1, rng)
    return EnvelopePair(float(r1[0]), float(r2[0]))


def substreams(seed, n):
    """[(generator, draws)] covering n draws in chunks of CHUNK_SIZE"""
    counts = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        counts.append(n % CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(counts))
    return [
        (np.random.default_rng(child), count) for child, count in zip(children, counts)
    ]


def _map_chunks(function, params, n, seed, threads=None, random_phase=False):
    """Apply function(r1, r2) to every chunk of draws, results in chunk order"""
    streams = substreams(seed, n)

    def run(stream):
        rng, count = stream
        return function(*sample_pairs(params, count, rng, random_phase=random_phase))

    workers = min(worker_count(threads), len(streams))
    logger.debug("%d draws in %d chunks on %d threads", n, len(streams), workers)
    if workers == 1:
        return [run(stream) for stream in streams]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, streams))


def _check_draws(n, minimum):
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise ParameterError("n", n, f"must be an integer >= {minimum}")
    return int(n)


def estimate_probability(event, params, n, seed, *, threads=None, random_phase=False):
    """Fraction of n draws for which ``event(r1, r2)`` holds

    ``event`` is evaluated element-wise on arrays of draws and returns a boolean
    array. The standard error is the binomial sqrt(p (1 - p) / n).
    """
    n = _check_draws(n, MIN_PROBABILITY_DRAWS)
    counts = _map_chunks(
        lambda r1, r2: int(np.count_nonzero(event(r1, r2))),
        params,
        n,
        seed,
        threads,
        random_phase,
    )
    p = sum(counts) / n
    return McEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


def _block_sums(values):
    """Sums over consecutive blocks of JACKKNIFE_BLOCK draws, one row per block"""
    edges = np.arange(0, values.shape[-1], JACKKNIFE_BLOCK)
    return np.add.reduceat(values, edges, axis=-1).T


def _jackknife(statistic, sums):
    """Delete-one-block jackknife of statistic(totals); sums has one row per block"""
    total = sums.sum(axis=0)
    value = statistic(total)
    leave_one_out = np.array([statistic(total - row) for row in sums])
    g = len(sums)
    spread = leave_one_out - leave_one_out.mean(axis=0)
    return value, np.sqrt((g - 1.0) / g * (spread**2).sum(axis=0))


@dataclass(frozen=True)
class McMoments:
    m10: McEstimate
    m01: McEstimate
    m20: McEstimate
    m02: McEstimate
    m11: McEstimate
    rho_bs: McEstimate


def _moment_sums(r1, r2):
    p1 = r1 * r1
    p2 = r2 * r2
    return _block_sums(np.stack([np.ones_like(p1), p1, p2, p1 * p1, p2 * p2, p1 * p2]))


def _sample_rho_bs(total):
    count, s1, s2, s11, s22, s12 = total
    mean1, mean2 = s1 / count, s2 / count
    covariance = s12 / count - mean1 * mean2
    return covariance / math.sqrt((s11 / count - mean1**2) * (s22 / count - mean2**2))


def estimate_moments(params, n, seed, *, threads=None, random_phase=False):
    """Sample moments of the powers P_k = r_k^2 and their correlation coefficient

    Standard errors come from a delete-one-block jackknife over blocks of
    JACKKNIFE_BLOCK consecutive draws.
    """
    n = _check_draws(n, MIN_MOMENT_DRAWS)
    sums = np.concatenate(
        _map_chunks(_moment_sums, params, n, seed, threads, random_phase)
    )
    means, means_se = _jackknife(lambda t: t[1:] / t[0], sums)
    rho, rho_se = _jackknife(_sample_rho_bs, sums)
    estimates = [McEstimate(float(v), float(se), n) for v, se in zip(means, means_se)]
    return McMoments(*estimates, rho_bs=McEstimate(float(rho), float(rho_se), n))


@dataclass(frozen=True)
class McCdfGrid:
    """Empirical probabilities on a grid of levels u

    marginal is P(R_1 < u), joint is P(R_1 < u, R_2 < u) and crossing is
    P(R_1 < u, R_2 >= u); each value and std_error is an array over the grid.
    """

    levels: np.ndarray
    marginal: McEstimate
    joint: McEstimate
    crossing: McEstimate


def estimate_cdf_grid(params, levels, n, seed, *, threads=None):
    """Marginal, diagonal joint and down-crossing probabilities at every level, all
    from the same n draws"""
    n = _check_draws(n, MIN_PROBABILITY_DRAWS)
    levels = np.asarray(levels, dtype=float)

    def counts(r1, r2):
        below1 = np.searchsorted(np.sort(r1), levels, side="left")
        below_both = np.searchsorted(np.sort(np.maximum(r1, r2)), levels, side="left")
        crossing = np.count_nonzero(
            (r1[:, None] < levels) & (r2[:, None] >= levels), axis=0
        )
        return np.stack([below1, below_both, crossing])

    totals = sum(_map_chunks(counts, params, n, seed, threads))

    def estimate(count):
        p = count / n
        return McEstimate(p, np.sqrt(p * (1.0 - p) / n), n)

    return McCdfGrid(levels, *(estimate(c) for c in totals))


def dump_pairs(path, params, n, seed, *, threads=None):
    """Write n draws as little-endian float64 pairs r1, r2 and return the path

    The draws are the ones the estimators use for the same seed.
    """
    path = Path(path)
    chunks = _map_chunks(
        lambda r1, r2: np.column_stack([r1, r2]).astype("<f8"), params, n, seed, threads
    )
    with open(path, "wb") as f:
        for chunk in chunks:
            chunk.tofile(f)
    logger.info("wrote %d pairs to %s", n, path)
    return path
