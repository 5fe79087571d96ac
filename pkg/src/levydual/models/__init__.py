"""Concrete exponential Lévy models and their deterministic samplers."""

from .base import Model, joint_cumulant
from .blackscholes import BS2DParams, BlackScholesModel, bs_triplet, cov_factor
from .gh import (
    GH1DParams,
    GHModel,
    GHParams,
    GHQuantoDual,
    esscher_tilt,
    gh_quanto_dual,
    gh_radon,
    gh_swap_dual,
)
from .merton import (
    MertonDual1D,
    MertonModel,
    MertonParams,
    merton_dual,
    merton_quanto_dual,
    merton_triplet,
)
from .sampling import BLOCK_SIZE, maybe_mirrored_normals, rng_for_block, run_blocks

__all__ = [
    "BLOCK_SIZE",
    "BS2DParams",
    "BlackScholesModel",
    "GH1DParams",
    "GHModel",
    "GHParams",
    "GHQuantoDual",
    "Model",
    "MertonDual1D",
    "MertonModel",
    "MertonParams",
    "bs_triplet",
    "cov_factor",
    "merton_dual",
    "esscher_tilt",
    "gh_quanto_dual",
    "gh_radon",
    "gh_swap_dual",
    "joint_cumulant",
    "maybe_mirrored_normals",
    "merton_quanto_dual",
    "merton_triplet",
    "rng_for_block",
    "run_blocks",
]
