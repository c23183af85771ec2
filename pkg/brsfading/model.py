"""Parameters of the bivariate Rician shadowed law and the constants derived from them

H_k = sigma sqrt(1 - rho) X_k + sigma sqrt(rho) X_0 + Z, k = 1, 2, with X_0, X_1, X_2
circular complex Gaussians with E|X_k|^2 = 1 (variance 1/2 per real
component) and Z a shared line-of-sight component
whose envelope is Nakagami-m with E|Z|^2 = K sigma^2.
"""
import enum
import json
import math
from dataclasses import asdict, dataclass, replace

from ._utils import _checked
from .checks import at_least, is_finite, is_non_negative, is_positive, is_probability
from .errors import DegenerateBranchError, ParameterError
from .options import OptionsFactory
from .withmeta import WithMeta

#: below this rho the 1/rho factors of the regular formulas lose precision
RHO_LOW = 1e-3
#: above this rho the 1/(1 - rho) factors of the regular formulas lose precision
RHO_HIGH = 0.999

params_options = OptionsFactory(
    sigma2=WithMeta(
        1.0,
        doc="Diffuse power sigma^2 = E|G_k|^2 (> 0)",
        value_type=float,
        check_all=(is_finite, is_positive),
    ),
    k_factor=WithMeta(
        1.0,
        doc="Rician factor K = Omega_N / sigma^2 (>= 0)",
        value_type=float,
        check_all=(is_finite, is_non_negative),
    ),
    m=WithMeta(
        2.0,
        doc="Nakagami shaping factor of the LOS fluctuation (>= 0.5)",
        value_type=float,
        check_all=(is_finite, at_least(0.5)),
    ),
    rho=WithMeta(
        0.5,
        doc="Correlation coefficient of the underlying Gaussians (0 <= rho <= 1)",
        value_type=float,
        check_all=(is_finite, is_probability),
    ),
)


class RhoClass(enum.Enum):
    DEGENERATE_LOW = "degenerate_low"
    REGULAR = "regular"
    DEGENERATE_HIGH = "degenerate_high"


def classify_rho(rho):
    if rho < RHO_LOW:
        return RhoClass.DEGENERATE_LOW
    if rho > RHO_HIGH:
        return RhoClass.DEGENERATE_HIGH
    return RhoClass.REGULAR


@dataclass(frozen=True)
class BrsParams:
    """(sigma^2, K, m, rho) of the bivariate Rician shadowed law"""

    sigma2: float
    k_factor: float
    m: float
    rho: float

    @classmethod
    def from_mean_power(cls, gamma_bar, k_factor, m, rho):
        """Parameters with mean power E|H_k|^2 = gamma_bar"""
        return cls(sigma2=gamma_bar / (1.0 + k_factor), k_factor=k_factor, m=m, rho=rho)

    @classmethod
    def from_options(cls, options):
        return cls(
            sigma2=options["sigma2"],
            k_factor=options["k_factor"],
            m=options["m"],
            rho=options["rho"],
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        missing = sorted({"sigma2", "k_factor", "m", "rho"} - set(data))
        if missing:
            raise ParameterError(missing[0], None, "field is missing")
        return validate(
            cls(**{key: data[key] for key in ("sigma2", "k_factor", "m", "rho")})
        )

    def to_json(self):
        return json.dumps(asdict(self))

    def to_dict(self):
        return asdict(self)

    def with_rho(self, rho):
        return replace(self, rho=rho)

    @property
    def mean_power(self):
        """E|H_k|^2 = sigma^2 (1 + K)"""
        return self.sigma2 * (1.0 + self.k_factor)

    @property
    def rho_class(self):
        return classify_rho(self.rho)


def validate(params):
    """Return ``params`` unchanged if every field is within bounds

    Only bounds are checked. The rho regime the integrators use is reported by
    ``params.rho_class``, i.e. ``classify_rho(params.rho)``.

    Raises
    ------
    ParameterError
        naming the first field that violates its bound
    """
    metadata = params_options.defaults
    for field in ("sigma2", "k_factor", "m", "rho"):
        value = getattr(params, field)
        meta = metadata[field]
        if isinstance(value, bool):
            raise ParameterError(field, value, meta.doc)
        try:
            _checked(value, meta=meta, name=field)
        except (TypeError, ValueError):
            raise ParameterError(field, value, meta.doc)
    return params


@dataclass(frozen=True)
class DerivedConstants:
    """Coefficients shared by the PDF, CDF and MGF formulas

    Attributes
    ----------
    omega2 : float
        Omega^2 = sigma^2 (1 - rho)/2, per-component variance of H_k given V
    omega_p2 : float
        Omega'^2 = sigma^2 rho / 2, per-component variance of V given Z
    omega_n : float
        Omega_N = K sigma^2, mean LOS power
    beta : float
        K / (sigma^2 rho (rho m + K)), coefficient of x^2 in the 1F1 argument
    alpha_pdf : float
        (1 + rho) / (sigma^2 rho (1 - rho)), Gaussian decay of the PDF integrand
    net_decay_pdf : float
        alpha_pdf - beta
    net_decay_cdf : float
        1/(sigma^2 rho) - beta
    log_shadow_factor : float
        m ln(m rho / (m rho + K)), log of the common prefactor
    """

    omega2: float
    omega_p2: float
    omega_n: float
    beta: float
    alpha_pdf: float
    net_decay_pdf: float
    net_decay_cdf: float
    log_shadow_factor: float


def derive(params):
    """Constants of the regular (0 < rho < 1) formulas"""
    validate(params)
    s2, k, m, rho = params.sigma2, params.k_factor, params.m, params.rho
    if rho == 0.0 or rho == 1.0:
        raise DegenerateBranchError(
            f"rho={rho} has no regular representation; use the rho -> 0 or rho -> 1 "
            f"evaluation paths"
        )
    los = rho * m + k
    return DerivedConstants(
        omega2=s2 * (1.0 - rho) / 2.0,
        omega_p2=s2 * rho / 2.0,
        omega_n=k * s2,
        beta=k / (s2 * rho * los),
        alpha_pdf=(1.0 + rho) / (s2 * rho * (1.0 - rho)),
        net_decay_pdf=(m * (1.0 + rho) + 2.0 * k) / (s2 * (1.0 - rho) * los),
        net_decay_cdf=m / (s2 * los),
        log_shadow_factor=m * (math.log(rho * m) - math.log(los)),
    )
