"""Merton jump-diffusion with simultaneous jumps in 2 or 3 dimensions.

Jumps arrive as a single compound Poisson stream with intensity equal to
the product of the per-asset rates, and every arrival moves all assets at
once: the jump-size law is a centred Gaussian with standard deviations
``tau_i`` per coordinate, optionally correlated across coordinates.  The
product form makes the jump measure a finite-activity density, keeps the
cumulant in closed form, and couples the assets through jump timing even
when the sizes are uncorrelated.

Triplets use the zero truncation convention throughout, which is valid
because activity is finite and keeps the dual drift free of correction
integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..characteristics import (
    FiniteActivityDensity,
    LevyTriplet,
    Truncation,
)
from ..errors import DimensionMismatch, UnsupportedModel
from ..esscher import MARTINGALE_TOL, DualTriplet1D
from .base import Model
from .blackscholes import cov_factor
from .sampling import maybe_mirrored_normals, run_blocks


@dataclass(frozen=True)
class MertonParams:
    """Diffusion and jump parameters of the product-form Merton model.

    ``jump_corr`` correlates the Gaussian jump sizes across coordinates;
    identity (the default) means independent sizes on a shared arrival.
    """

    sigma: np.ndarray
    corr: np.ndarray
    lam: np.ndarray
    tau: np.ndarray
    jump_corr: Optional[np.ndarray] = None

    def __post_init__(self):
        sigma = np.atleast_1d(np.array(self.sigma, dtype=float))
        lam = np.atleast_1d(np.array(self.lam, dtype=float))
        tau = np.atleast_1d(np.array(self.tau, dtype=float))
        d = len(sigma)
        corr = np.atleast_2d(np.array(self.corr, dtype=float))
        if lam.shape != (d,) or tau.shape != (d,) or corr.shape != (d, d):
            raise DimensionMismatch("sigma, lam, tau, corr sizes disagree")
        if np.any(sigma < 0):
            raise ValueError("volatilities must be nonnegative")
        if np.any(lam <= 0):
            raise ValueError("jump rates must be strictly positive")
        if np.any(tau <= 0):
            raise ValueError("jump size scales must be strictly positive")
        jc = self.jump_corr
        jc = np.eye(d) if jc is None else np.atleast_2d(np.array(jc, dtype=float))
        if jc.shape != (d, d):
            raise DimensionMismatch("jump_corr must match the model dimension")
        if np.linalg.eigvalsh(0.5 * (jc + jc.T)).min() <= 1e-12:
            raise ValueError("jump_corr must be strictly positive definite")
        for name, arr in (("sigma", sigma), ("corr", corr), ("lam", lam),
                          ("tau", tau), ("jump_corr", jc)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return len(self.sigma)


class MertonModel(Model):
    """Exponential Merton jump-diffusion, martingale-calibrated."""

    name = "merton"

    def __init__(self, params: MertonParams):
        p = params
        self.params = p
        self.dim = p.dim
        self.cov = np.diag(p.sigma) @ p.corr @ np.diag(p.sigma)
        self.cov = 0.5 * (self.cov + self.cov.T)
        self.total_rate = float(np.prod(p.lam))
        self.jump_cov = np.diag(p.tau) @ p.jump_corr @ np.diag(p.tau)
        self.jump_cov = 0.5 * (self.jump_cov + self.jump_cov.T)
        # kappa(e_i) = 0 under zero truncation
        self.drift = (-0.5 * np.diag(self.cov)
                      - self.total_rate * np.expm1(0.5 * np.diag(self.jump_cov)))
        self._diff_factor = cov_factor(self.cov)
        self._jump_factor = cov_factor(self.jump_cov)

    def cumulant(self, w) -> complex:
        w = self._check_w(w)
        quad = w @ self.jump_cov @ w
        return complex(w @ self.drift + 0.5 * (w @ self.cov @ w)
                       + self.total_rate * (np.exp(0.5 * quad) - 1.0))

    def exp_moment_ok(self, u) -> bool:
        return True

    def triplet(self) -> LevyTriplet:
        return LevyTriplet(self.dim, self.drift, self.cov,
                           self.jump_measure(), Truncation.ZERO)

    def jump_measure(self) -> FiniteActivityDensity:
        d = self.dim
        inv = np.linalg.inv(self.jump_cov)
        norm = 1.0 / np.sqrt((2.0 * np.pi) ** d * np.linalg.det(self.jump_cov))
        rate = self.total_rate

        def density(X):
            X = np.atleast_2d(X)
            return norm * np.exp(-0.5 * np.einsum("ij,jk,ik->i", X, inv, X))

        return FiniteActivityDensity(
            dim=d,
            total_intensity=rate,
            density=density,
            box_radius=10.0 * float(self.params.tau.max()),
            exp_moment_finite=lambda u: True,
            exp_moment=lambda w: rate * np.exp(
                0.5 * (np.asarray(w) @ self.jump_cov @ np.asarray(w))),
        )

    def sample_terminal(self, maturity, n, seed, *, workers=1, antithetic=True,
                        return_counts=False):
        """Terminal log returns; optionally also the per-path jump counts.

        Per block the draw order is fixed: diffusion normals (the only
        component subject to antithetic mirroring), then Poisson counts,
        then jump-size normals.  Conditionally on a count ``N`` the jump sum
        is Gaussian with covariance ``N * jump_cov``, which is sampled
        directly instead of accumulating individual jumps.
        """
        T = float(maturity)
        scale = np.sqrt(T) * self._diff_factor
        mean_count = self.total_rate * T

        def draw(rng, rows):
            Z = maybe_mirrored_normals(rng, rows, self.dim, antithetic)
            counts = rng.poisson(mean_count, size=rows)
            J = rng.standard_normal((rows, self.dim))
            jumps = np.sqrt(counts)[:, None] * (J @ self._jump_factor.T)
            H = self.drift * T + Z @ scale.T + jumps
            if return_counts:
                return np.column_stack([H, counts])
            return H

        out = run_blocks(n, seed, workers, draw)
        if return_counts:
            return out[:, :self.dim], out[:, self.dim].astype(np.int64)
        return out

    def describe(self) -> dict:
        p = self.params
        return {
            "kind": "merton",
            "sigma": p.sigma.tolist(),
            "corr": p.corr.tolist(),
            "lam": p.lam.tolist(),
            "tau": p.tau.tolist(),
            "jump_corr": p.jump_corr.tolist(),
        }


def merton_triplet(p: MertonParams) -> LevyTriplet:
    """Martingale triplet of the Merton model under zero truncation."""
    return MertonModel(p).triplet()


@dataclass(frozen=True)
class MertonDual1D:
    """Scalar parameters of the 1-d dual process for an arbitrary frame.

    The dual of a Merton model is again Merton: tilting scales the arrival
    intensity by the jump-size moment ``exp(theta' S theta / 2)`` and the
    projected size law is Gaussian with mean ``u' S theta`` and variance
    ``u' S u``.  The cumulant below is an exact identity with
    ``kappa(theta + z u) - kappa(theta)``.
    """

    drift: float
    diffusion: float
    intensity: float
    jump_mean: float
    jump_var: float

    def cumulant(self, z) -> complex:
        z = complex(z)
        jump = self.intensity * (
            np.exp(self.jump_mean * z + 0.5 * self.jump_var * z * z) - 1.0)
        return self.drift * z + 0.5 * self.diffusion * z * z + jump


def merton_dual(p: MertonParams, theta, u) -> MertonDual1D:
    """Closed dual parameters for any tilt/projection pair."""
    theta = np.asarray(theta, dtype=float)
    u = np.asarray(u, dtype=float)
    if theta.shape != (p.dim,) or u.shape != (p.dim,):
        raise DimensionMismatch("theta and u must match the model dimension")
    model = MertonModel(p)
    c, jc = model.cov, model.jump_cov
    return MertonDual1D(
        drift=float(u @ model.drift + u @ c @ theta),
        diffusion=float(u @ c @ u),
        intensity=model.total_rate * float(np.exp(0.5 * theta @ jc @ theta)),
        jump_mean=float(u @ jc @ theta),
        jump_var=float(u @ jc @ u),
    )


def merton_quanto_dual(p: MertonParams, maturity: float = 1.0) -> DualTriplet1D:
    """Closed-form dual for the quanto frame ``theta = e_1, u = e_2``.

    Tilting by ``exp(H^1)`` multiplies the jump intensity by the first
    coordinate's jump-size moment and shifts the Gaussian size law:

    * intensity ``lam_u = lam1 lam2 exp(jump_cov_11 / 2)``
    * size law ``N(jump_cov_21, jump_cov_22)`` (mean zero when sizes are
      uncorrelated, variance ``tau_2^2`` always)
    * drift ``b_u = b_2 + c_21`` and variance ``c_u = c_22``.

    Everything here is independent of the generic quadrature construction
    in :func:`levydual.esscher.dual_triplet`, so the two can be compared.
    """
    if p.dim != 2:
        raise UnsupportedModel("the closed quanto dual is a two-asset formula")
    model = MertonModel(p)
    c = model.cov
    jc = model.jump_cov
    lam_u = model.total_rate * float(np.exp(0.5 * jc[0, 0]))
    mean_u = float(jc[1, 0])
    var_u = float(jc[1, 1])
    b_u = float(model.drift[1] + c[1, 0])
    sd = np.sqrt(var_u)

    def density(Y):
        y = np.atleast_2d(Y)[:, 0]
        return np.exp(-0.5 * ((y - mean_u) / sd) ** 2) / np.sqrt(2 * np.pi * var_u)

    jumps_u = FiniteActivityDensity(
        dim=1,
        total_intensity=lam_u,
        density=density,
        box_radius=10.0 * sd + abs(mean_u),
        exp_moment_finite=lambda v: True,
        exp_moment=lambda w: lam_u * np.exp(
            mean_u * np.asarray(w)[0] + 0.5 * var_u * np.asarray(w)[0] ** 2),
    )
    triplet = LevyTriplet(1, [b_u], [[c[1, 1]]], jumps_u, Truncation.ZERO)
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    k1 = model.cumulant(e1 + e2) - model.cumulant(e1)
    return DualTriplet1D(
        triplet,
        theta=e1,
        u=e2,
        maturity=float(maturity),
        source="merton_closed_form",
        is_dual_martingale=bool(abs(k1.real) < MARTINGALE_TOL),
    )
