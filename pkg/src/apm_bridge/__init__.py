"""Relationships among average performance measures of fading links.

Computes the average channel capacity (ACC) from average bit-error-rate
(ABER) data, and the outage probability, outage capacity and SNR density
from the analytic continuation of an exact ACC expression.
"""

from .channels import CascadedGNM, GeneralizedNakagami, Nakagami, Rayleigh
from .curves import ApmCurve, HurstWindow
from .errors import (
    ApmBridgeError,
    CapabilityError,
    DivergentMomentError,
    DomainError,
    ExistenceError,
    IntegrationError,
    RangeError,
    SetParseError,
    UnsupportedVariantError,
)
from .measures import Capacity, OutageIndicator, Reliability, WojnarBer
from .relationships import (
    ModulationParams,
    acc_curve,
    acc_from_aber,
    aber_curve,
    apm_from_acc,
    oc_from_acc,
    op_from_acc,
    pdf_from_acc,
)

__version__ = "0.1.0"

__all__ = [
    "ApmBridgeError",
    "ApmCurve",
    "CapabilityError",
    "Capacity",
    "CascadedGNM",
    "DivergentMomentError",
    "DomainError",
    "ExistenceError",
    "GeneralizedNakagami",
    "HurstWindow",
    "IntegrationError",
    "ModulationParams",
    "Nakagami",
    "OutageIndicator",
    "RangeError",
    "Rayleigh",
    "Reliability",
    "SetParseError",
    "UnsupportedVariantError",
    "WojnarBer",
    "aber_curve",
    "acc_curve",
    "acc_from_aber",
    "apm_from_acc",
    "oc_from_acc",
    "op_from_acc",
    "pdf_from_acc",
]
