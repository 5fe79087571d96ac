"""Multi-asset option pricing on Levy models via measure-change duality.

The library reduces two-asset and three-asset payoffs (exchange options,
quantos, correlation digitals, quanto swaps) to one-dimensional vanilla
problems under an Esscher-transformed measure, prices the reduced problem
by closed form or Fourier inversion, and cross-checks every reduction by
direct Monte Carlo simulation of the original multi-asset model.
"""

__version__ = "0.1.0"

from .characteristics import (
    EmptyJumps,
    ExpMomentDomain,
    FiniteActivityDensity,
    FiniteAtoms,
    GHJumps,
    LevyTriplet,
    Truncation,
    convert_truncation,
    cumulant,
    exp_moment_contains,
    linear_transform,
    martingale_drift,
)
from .errors import (
    ContourError,
    DegenerateDirection,
    DimensionMismatch,
    DomainError,
    LevyDualError,
    ModelError,
    NumericalError,
    QuadratureError,
    UnavailableDrift,
    UnsupportedMeasure,
    UnsupportedModel,
)
from .esscher import (
    DualTriplet1D,
    EsscherFrame,
    dual_cumulant,
    dual_triplet,
    dual_triplet_diffusion,
    one_dim_dual,
)
from .models import (
    BS2DParams,
    BlackScholesModel,
    GH1DParams,
    GHModel,
    GHParams,
    MertonModel,
    MertonParams,
    joint_cumulant,
)
from .montecarlo import (
    DualityReport,
    McEstimate,
    mc_price,
    verify_density,
    verify_duality_report,
    verify_martingale,
)
from .pricing import (
    Payoff,
    PriceResult,
    bs_closed_form,
    price,
    price_correlation_digital,
    price_quanto_call,
    price_quanto_put,
    price_quanto_swap,
    price_swap,
    vanilla_fourier,
)

__all__ = [
    "__version__",
    "EmptyJumps",
    "ExpMomentDomain",
    "FiniteActivityDensity",
    "FiniteAtoms",
    "GHJumps",
    "LevyTriplet",
    "Truncation",
    "convert_truncation",
    "cumulant",
    "exp_moment_contains",
    "linear_transform",
    "martingale_drift",
    "ContourError",
    "DegenerateDirection",
    "DimensionMismatch",
    "DomainError",
    "LevyDualError",
    "ModelError",
    "NumericalError",
    "QuadratureError",
    "UnavailableDrift",
    "UnsupportedMeasure",
    "UnsupportedModel",
    "DualTriplet1D",
    "EsscherFrame",
    "dual_cumulant",
    "dual_triplet",
    "dual_triplet_diffusion",
    "one_dim_dual",
    "BS2DParams",
    "BlackScholesModel",
    "GH1DParams",
    "GHModel",
    "GHParams",
    "MertonModel",
    "MertonParams",
    "joint_cumulant",
    "DualityReport",
    "McEstimate",
    "mc_price",
    "verify_density",
    "verify_duality_report",
    "verify_martingale",
    "Payoff",
    "PriceResult",
    "bs_closed_form",
    "price",
    "price_correlation_digital",
    "price_quanto_call",
    "price_quanto_put",
    "price_quanto_swap",
    "price_swap",
    "vanilla_fourier",
]
