"""Figures of merit of a dual-branch receiver under bivariate Rician shadowed fading

Selection combining outage, and the level crossing rate and average fade duration of a
sampled envelope, where rho is the correlation between consecutive samples.
"""
import logging
import math
from dataclasses import dataclass

from ._utils import db_to_linear
from .dist import PROBABILITY_SLACK, joint_cdf, marginal_cdf
from .errors import AccuracyError, ParameterError, UndefinedFadeDurationError
from .model import BrsParams, validate

logger = logging.getLogger(__name__)

#: crossing probabilities below this are numerical noise
CROSSING_FLOOR = 1e-12


def _require_positive(name, value):
    if isinstance(value, bool) or not (
        isinstance(value, (int, float)) and math.isfinite(value) and value > 0
    ):
        raise ParameterError(name, value, "must be a finite positive number")


@dataclass(frozen=True)
class ScScenario:
    """Selection combining of two branches with average SNR gamma_bar per branch

    With E_s/N_0 = 1 the instantaneous SNR of branch k is P_k, so
    gamma_bar = sigma^2 (1 + K). SNRs are linear, not dB.
    """

    gamma_bar: float
    k_factor: float
    m: float
    rho: float
    gamma_th: float

    def __post_init__(self):
        _require_positive("gamma_bar", self.gamma_bar)
        _require_positive("gamma_th", self.gamma_th)
        validate(self.params())

    @classmethod
    def from_db(cls, gamma_bar_db, k_factor, m, rho, gamma_th_db):
        return cls(
            gamma_bar=float(db_to_linear(gamma_bar_db)),
            k_factor=k_factor,
            m=m,
            rho=rho,
            gamma_th=float(db_to_linear(gamma_th_db)),
        )

    def params(self):
        return BrsParams.from_mean_power(
            self.gamma_bar, self.k_factor, self.m, self.rho
        )


def outage_sc(scenario):
    """P(max(P_1, P_2) < gamma_th) = F(sqrt(gamma_th), sqrt(gamma_th))"""
    threshold = math.sqrt(scenario.gamma_th)
    return joint_cdf(scenario.params(), threshold, threshold)


@dataclass(frozen=True)
class SampledEnvelopeScenario:
    """Envelope sampled every ``ts`` seconds, compared with the level ``u``"""

    params: BrsParams
    ts: float
    u: float

    def __post_init__(self):
        validate(self.params)
        _require_positive("ts", self.ts)
        _require_positive("u", self.u)

    @classmethod
    def from_db(cls, params, u_db, ts):
        """Threshold given as 20 log10(u / sqrt(gamma_bar)), gamma_bar the mean power"""
        u = math.sqrt(params.mean_power) * 10.0 ** (u_db / 20.0)
        return cls(params=params, ts=ts, u=u)

    @property
    def u_normalized_db(self):
        return 20.0 * math.log10(self.u / math.sqrt(self.params.mean_power))


def crossing_probabilities(scenario):
    """(P(R_1 < u), P(R_1 < u, R_2 < u))"""
    u = scenario.u
    return (
        marginal_cdf(scenario.params, u),
        joint_cdf(scenario.params, u, u),
    )


def _down_crossing(marginal, joint):
    # P(R_1 < u, R_2 >= u)
    difference = marginal - joint
    if difference < -PROBABILITY_SLACK:
        raise AccuracyError(
            f"P(R1 < u)={marginal} is smaller than P(R1 < u, R2 < u)={joint}"
        )
    return difference if difference > CROSSING_FLOOR else 0.0


def lcr(scenario):
    """Level crossing rate (P(R_1 < u) - P(R_1 < u, R_2 < u)) / T_S, per second"""
    return _down_crossing(*crossing_probabilities(scenario)) / scenario.ts


def afd(scenario):
    """Average fade duration T_S P(R_1 < u) / (P(R_1 < u) - P(R_1 < u, R_2 < u))

    Raises
    ------
    UndefinedFadeDurationError
        if the level crossing rate is zero, e.g. for rho > 0.999 where the samples
        are equal, or deep in the lower tail where both probabilities underflow
    """
    marginal, joint = crossing_probabilities(scenario)
    crossing = _down_crossing(marginal, joint)
    if crossing == 0.0:
        logger.warning(
            "no level crossings at u=%g with rho=%g", scenario.u, scenario.params.rho
        )
        raise UndefinedFadeDurationError(
            f"level crossing rate is zero at u={scenario.u}, rho="
            f"{scenario.params.rho}: the average fade duration is undefined"
        )
    return scenario.ts * marginal / crossing
