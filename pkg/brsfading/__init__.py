import logging

from .apps import (
    SampledEnvelopeScenario,
    ScScenario,
    afd,
    crossing_probabilities,
    lcr,
    outage_sc,
)
from .dist import (
    DiagonalCollapse,
    MgfPoint,
    PowerMoments,
    joint_cdf,
    joint_cdf_rho0,
    joint_pdf,
    joint_pdf_int_m,
    joint_pdf_rho0,
    joint_pdf_rho1,
    log_joint_pdf,
    marginal_cdf,
    marginal_mgf,
    marginal_pdf,
    mgf,
    mgf_coefficients,
    power_moments,
    rho_bs,
)
from .errors import (
    AccuracyError,
    DegenerateBranchError,
    DomainError,
    ParameterError,
    UndefinedFadeDurationError,
)
from .model import BrsParams, DerivedConstants, RhoClass, derive, validate
from .options import OptionsFactory
from .withmeta import WithMeta
from ._version import __version__

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "AccuracyError",
    "BrsParams",
    "DegenerateBranchError",
    "DerivedConstants",
    "DiagonalCollapse",
    "DomainError",
    "MgfPoint",
    "OptionsFactory",
    "ParameterError",
    "PowerMoments",
    "RhoClass",
    "SampledEnvelopeScenario",
    "ScScenario",
    "UndefinedFadeDurationError",
    "WithMeta",
    "__version__",
    "afd",
    "crossing_probabilities",
    "derive",
    "joint_cdf",
    "joint_cdf_rho0",
    "joint_pdf",
    "joint_pdf_int_m",
    "joint_pdf_rho0",
    "joint_pdf_rho1",
    "lcr",
    "log_joint_pdf",
    "marginal_cdf",
    "marginal_mgf",
    "marginal_pdf",
    "mgf",
    "mgf_coefficients",
    "outage_sc",
    "power_moments",
    "rho_bs",
    "validate",
]
