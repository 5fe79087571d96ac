"""Correlated Black-Scholes models in 2 or 3 dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..characteristics import EmptyJumps, LevyTriplet, Truncation
from ..errors import DimensionMismatch
from .base import Model
from .sampling import maybe_mirrored_normals, run_blocks


@dataclass(frozen=True)
class BS2DParams:
    """Volatilities and correlation of a two-asset Black-Scholes model."""

    sigma1: float
    sigma2: float
    rho: float

    def __post_init__(self):
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise ValueError("volatilities must be nonnegative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")


def cov_factor(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular-ish factor L with ``L L' = cov``.

    Falls back to an eigenvalue factor when the covariance is singular
    (perfectly correlated or zero-volatility assets are legitimate inputs).
    """
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(cov)
        vals = np.clip(vals, 0.0, None)
        return vecs * np.sqrt(vals)


class BlackScholesModel(Model):
    """Exponential correlated Brownian motion, martingale-calibrated."""

    name = "black_scholes"

    def __init__(self, sigma, corr=None):
        sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
        d = len(sigma)
        if corr is None:
            corr = np.eye(d)
        corr = np.atleast_2d(np.asarray(corr, dtype=float))
        if corr.shape != (d, d):
            raise DimensionMismatch(
                f"correlation shaped {corr.shape}, expected ({d}, {d})")
        if np.any(sigma < 0):
            raise ValueError("volatilities must be nonnegative")
        if np.abs(corr - corr.T).max() > 1e-12 or np.any(np.abs(corr) > 1 + 1e-12):
            raise ValueError("correlation matrix must be symmetric with entries in [-1, 1]")
        if np.linalg.eigvalsh(corr).min() < -1e-10:
            raise ValueError("correlation matrix must be positive semidefinite")
        self.dim = d
        self.sigma = sigma
        self.corr = corr
        self.cov = np.diag(sigma) @ corr @ np.diag(sigma)
        self.cov = 0.5 * (self.cov + self.cov.T)
        self.drift = -0.5 * np.diag(self.cov)
        self._factor = cov_factor(self.cov)

    @classmethod
    def from_2d(cls, p: BS2DParams) -> "BlackScholesModel":
        return cls([p.sigma1, p.sigma2], [[1.0, p.rho], [p.rho, 1.0]])

    def cumulant(self, w) -> complex:
        w = self._check_w(w)
        return complex(w @ self.drift + 0.5 * (w @ self.cov @ w))

    def triplet(self) -> LevyTriplet:
        return LevyTriplet(self.dim, self.drift, self.cov,
                           EmptyJumps(self.dim), Truncation.CANONICAL)

    def exp_moment_ok(self, u) -> bool:
        return True

    def sample_terminal(self, maturity, n, seed, *, workers=1, antithetic=True):
        T = float(maturity)
        scale = np.sqrt(T) * self._factor

        def draw(rng, rows):
            Z = maybe_mirrored_normals(rng, rows, self.dim, antithetic)
            return self.drift * T + Z @ scale.T

        return run_blocks(n, seed, workers, draw)

    def describe(self) -> dict:
        return {
            "kind": "black_scholes",
            "sigma": self.sigma.tolist(),
            "corr": self.corr.tolist(),
        }


def bs_triplet(p: BS2DParams) -> LevyTriplet:
    """Martingale triplet of the two-asset Black-Scholes model."""
    return BlackScholesModel.from_2d(p).triplet()
