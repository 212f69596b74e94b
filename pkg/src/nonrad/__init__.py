"""
Nonradiating electromagnetic sources in a ball: multipole coefficients,
radiated fields and the equivalent characterizations of nonradiation.
"""

from .classify import ClassificationReport, ClassifyParams, classify
from .fields import (
    farfield_direct,
    farfield_series,
    field_direct,
    field_series,
    fourier_source_transform,
    nearfield_U,
    nearfield_V,
    silver_muller_residual,
)
from .greens import WaveContext, dyadic_green, farfield_projector, scalar_green
from .multipole import MultipoleCoeffs, coeff_table
from .sources import (
    Regularity,
    SourceSpec,
    bessel_pair_source,
    bessel_single_source,
    curl_source,
    curlcurl_source,
    dipole_ball_source,
    from_descriptor,
    gradient_source,
    zero_source,
)

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport",
    "ClassifyParams",
    "MultipoleCoeffs",
    "Regularity",
    "SourceSpec",
    "WaveContext",
    "bessel_pair_source",
    "bessel_single_source",
    "classify",
    "coeff_table",
    "curl_source",
    "curlcurl_source",
    "dipole_ball_source",
    "dyadic_green",
    "farfield_direct",
    "farfield_projector",
    "farfield_series",
    "field_direct",
    "field_series",
    "fourier_source_transform",
    "from_descriptor",
    "gradient_source",
    "nearfield_U",
    "nearfield_V",
    "scalar_green",
    "silver_muller_residual",
    "zero_source",
]
