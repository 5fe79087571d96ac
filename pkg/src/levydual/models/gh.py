"""Bivariate generalized hyperbolic models: NIG and variance gamma.

Both flavors are normal mean-variance mixtures ``H_1 = mu + W Delta beta +
sqrt(W) chol(Delta) Z`` whose mixing law ``W`` is inverse Gaussian (NIG,
``lambda = -1/2``) or gamma (VG, ``delta = 0``).  Their cumulants are closed
forms in ``(lambda, alpha, beta, delta, mu, Delta)``, and the two reductions
used for pricing are closed parameter maps:

* Esscher tilt by ``theta``: ``beta -> beta + theta``, everything else fixed.
* Projection onto ``u``: a one-dimensional GH law of the same ``lambda`` with

  ``beta_u = <u, Delta beta> / <u, Delta u>``,
  ``alpha_u = sqrt((alpha^2 - beta' Delta beta) / <u, Delta u> + beta_u^2)``,
  ``delta_u = delta sqrt(<u, Delta u>)``, ``mu_u = <u, mu>``.

``gh_swap_dual`` and ``gh_quanto_dual`` are the fused maps for the two
pricing frames, written out directly so that tests can hold them against
the independent tilt-then-project composition.

Only ``lambda = -1/2`` with ``delta > 0`` (NIG) and ``delta = 0`` with
``lambda > 0`` (VG) are computable backends; other GH parameters construct
and answer moment-domain queries but reject cumulants, samplers, and dual
maps with :class:`UnsupportedModel`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..characteristics import GHJumps, LevyTriplet, Truncation
from ..errors import (
    DegenerateDirection,
    DimensionMismatch,
    DomainError,
    UnavailableDrift,
    UnsupportedModel,
)
from .base import Model
from .sampling import maybe_mirrored_normals, run_blocks

NIG = "nig"
VG = "vg"
GENERAL = "general"


def _flavor(lambda_: float, delta: float) -> str:
    if lambda_ == -0.5 and delta > 0:
        return NIG
    if delta == 0.0 and lambda_ > 0:
        return VG
    return GENERAL


@dataclass(frozen=True)
class GHParams:
    """Parameters of a bivariate GH law with unit-determinant mixing matrix."""

    lambda_: float
    alpha: float
    beta: np.ndarray
    delta: float
    mu: np.ndarray
    Delta: np.ndarray

    def __post_init__(self):
        beta = np.atleast_1d(np.array(self.beta, dtype=float))
        mu = np.atleast_1d(np.array(self.mu, dtype=float))
        Delta = np.atleast_2d(np.array(self.Delta, dtype=float))
        d = len(beta)
        if d != 2:
            raise DimensionMismatch("GH backends are bivariate")
        if mu.shape != (d,) or Delta.shape != (d, d):
            raise DimensionMismatch("beta, mu, Delta sizes disagree")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if np.abs(Delta - Delta.T).max() > 1e-12:
            raise ValueError("Delta must be symmetric")
        if np.linalg.eigvalsh(Delta).min() <= 0:
            raise ValueError("Delta must be positive definite")
        if abs(np.linalg.det(Delta) - 1.0) > 1e-10:
            raise ValueError("Delta must have unit determinant")
        if self.alpha ** 2 - float(beta @ Delta @ beta) <= 0:
            raise ValueError("beta must lie strictly inside the moment cone")
        for name, arr in (("beta", beta), ("mu", mu), ("Delta", Delta)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return 2

    @property
    def flavor(self) -> str:
        return _flavor(self.lambda_, self.delta)

    @property
    def gamma_sq(self) -> float:
        return float(self.alpha ** 2 - self.beta @ self.Delta @ self.beta)


@dataclass(frozen=True)
class GH1DParams:
    """One-dimensional GH parameters, as produced by the dual maps."""

    lambda_: float
    alpha: float
    beta: float
    delta: float
    mu: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if abs(self.beta) > self.alpha:
            raise ValueError("need |beta| <= alpha for integrability")

    @property
    def flavor(self) -> str:
        return _flavor(self.lambda_, self.delta)

    def cumulant(self, z) -> complex:
        """Cumulant per unit time of the 1-d law at complex ``z``."""
        z = complex(z)
        a2 = self.alpha ** 2
        gog = a2 - self.beta ** 2
        arg = a2 - (self.beta + z) ** 2
        if a2 - (self.beta + z.real) ** 2 + z.imag ** 2 < 0:
            raise DomainError(f"z = {z} outside the admissible strip")
        if self.flavor == NIG:
            return self.mu * z + self.delta * (np.sqrt(gog) - np.sqrt(arg))
        if self.flavor == VG:
            return self.mu * z + self.lambda_ * (np.log(gog) - np.log(arg))
        raise UnsupportedModel("general GH cumulants are not implemented")

    def mean(self) -> float:
        """Expected drift rate, the derivative of the cumulant at zero."""
        gog = self.alpha ** 2 - self.beta ** 2
        if self.flavor == NIG:
            return self.mu + self.delta * self.beta / np.sqrt(gog)
        if self.flavor == VG:
            return self.mu + 2.0 * self.lambda_ * self.beta / gog
        raise UnsupportedModel("general GH moments are not implemented")


class GHModel(Model):
    """Exponential bivariate GH model (NIG or VG flavor)."""

    name = "gh"

    def __init__(self, params: GHParams):
        self.params = params
        self.dim = params.dim
        self._chol = np.linalg.cholesky(params.Delta)

    @classmethod
    def martingale(cls, lambda_: float, alpha: float, beta, delta: float,
                   Delta) -> "GHModel":
        """Construct with the location fixed by ``kappa(e_i) = 0``.

        Raises :class:`DomainError` when either unit vector leaves the
        moment cone, since calibration then has no finite target.
        """
        probe = GHParams(lambda_, alpha, beta, delta, [0.0, 0.0], Delta)
        mu = np.zeros(2)
        for i in range(2):
            e_i = np.zeros(2)
            e_i[i] = 1.0
            mu[i] = -float(np.real(_mixture_cumulant(probe, e_i)))
        return cls(GHParams(lambda_, alpha, beta, delta, mu, Delta))

    @property
    def flavor(self) -> str:
        return self.params.flavor

    def cumulant(self, w) -> complex:
        w = self._check_w(w)
        return complex(w @ self.params.mu.astype(complex)
                       + _mixture_cumulant(self.params, w))

    def exp_moment_ok(self, u) -> bool:
        p = self.params
        shifted = p.beta + np.asarray(u, dtype=float)
        return p.alpha ** 2 - float(shifted @ p.Delta @ shifted) >= 0.0

    def triplet(self) -> LevyTriplet:
        # The drift slot carries the location parameter mu: the canonical
        # compensator integral has no closed form and nothing downstream
        # needs it, since all GH calculus routes through the cumulant.
        p = self.params
        jumps = GHJumps(2, p.lambda_, p.alpha, p.beta, p.delta, p.mu, p.Delta)
        return LevyTriplet(2, p.mu, np.zeros((2, 2)), jumps,
                           Truncation.CANONICAL)

    def sample_terminal(self, maturity, n, seed, *, workers=1, antithetic=True):
        """Mixture sampler: subordinator draws first, then mirrored normals."""
        p = self.params
        T = float(maturity)
        gamma_bar = np.sqrt(p.gamma_sq)
        drift_dir = p.Delta @ p.beta
        chol = self._chol
        flavor = self.flavor
        if flavor == GENERAL:
            raise UnsupportedModel("general GH sampling is not implemented")

        def draw(rng, rows):
            if flavor == NIG:
                W = rng.wald(p.delta * T / gamma_bar, (p.delta * T) ** 2,
                             size=rows)
            else:
                W = rng.gamma(shape=p.lambda_ * T, scale=2.0 / p.gamma_sq,
                              size=rows)
            Z = maybe_mirrored_normals(rng, rows, 2, antithetic)
            return (p.mu * T + W[:, None] * drift_dir
                    + np.sqrt(W)[:, None] * (Z @ chol.T))

        return run_blocks(n, seed, workers, draw)

    def describe(self) -> dict:
        p = self.params
        return {
            "kind": "gh",
            "flavor": self.flavor,
            "lambda": p.lambda_,
            "alpha": p.alpha,
            "beta": p.beta.tolist(),
            "delta": p.delta,
            "mu": p.mu.tolist(),
            "Delta": p.Delta.tolist(),
        }


def _mixture_cumulant(p: GHParams, w) -> complex:
    """Cumulant contribution of the mixture part, ``kappa(w) - <w, mu>``."""
    w = np.atleast_1d(np.asarray(w))
    shifted = p.beta.astype(complex) + w
    arg = p.alpha ** 2 - shifted @ p.Delta @ shifted
    re_shift = p.beta + w.real
    strip = (p.alpha ** 2 - float(re_shift @ p.Delta @ re_shift)
             + float(w.imag @ p.Delta @ w.imag))
    if strip < 0:
        raise DomainError(f"Re(w) = {w.real} outside the admissible strip")
    if p.flavor == NIG:
        return p.delta * (np.sqrt(p.gamma_sq) - np.sqrt(arg))
    if p.flavor == VG:
        return p.lambda_ * (np.log(p.gamma_sq) - np.log(arg))
    raise UnsupportedModel("general GH cumulants are not implemented")


def esscher_tilt(p: GHParams, theta) -> GHParams:
    """Parameters under the Esscher tilt: ``beta -> beta + theta``.

    Raises :class:`DomainError` if the tilted beta leaves the interior of
    the moment cone, where the tilted law stops being a usable GH model.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (2,):
        raise DimensionMismatch("tilt must be a 2-vector")
    shifted = p.beta + theta
    if p.alpha ** 2 - float(shifted @ p.Delta @ shifted) <= 0:
        raise DomainError(f"tilt {theta} leaves the moment cone interior")
    return GHParams(p.lambda_, p.alpha, shifted, p.delta, p.mu, p.Delta)


def gh_radon(p: GHParams, u) -> GH1DParams:
    """One-dimensional law of ``<u, H_1>``: the GH projection map."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (2,):
        raise DimensionMismatch("projection direction must be a 2-vector")
    quad = float(u @ p.Delta @ u)
    if quad < 1e-14:
        raise DegenerateDirection("u' Delta u vanishes; no 1-d law exists")
    beta_u = float(u @ p.Delta @ p.beta) / quad
    alpha_u = np.sqrt(p.gamma_sq / quad + beta_u ** 2)
    return GH1DParams(
        lambda_=p.lambda_,
        alpha=float(alpha_u),
        beta=beta_u,
        delta=p.delta * np.sqrt(quad),
        mu=float(u @ p.mu),
    )


def gh_swap_dual(p: GHParams) -> GH1DParams:
    """Dual law for the exchange frame ``theta = e_1, u = (-1, 1)``.

    Written out directly in the original parameters; coincides with
    ``gh_radon(esscher_tilt(p, e_1), (-1, 1))`` and tests enforce that.
    The parameter map is pure algebra, so it covers every GH flavor,
    including ones whose cumulant we refuse to evaluate.
    """
    D = p.Delta
    bt = p.beta + np.array([1.0, 0.0])
    gtil = p.alpha ** 2 - float(bt @ D @ bt)
    if gtil <= 0:
        raise DomainError("unit tilt leaves the moment cone interior")
    u = np.array([-1.0, 1.0])
    quad = float(u @ D @ u)
    beta_u = float(u @ D @ bt) / quad
    return GH1DParams(
        lambda_=p.lambda_,
        alpha=float(np.sqrt(gtil / quad + beta_u ** 2)),
        beta=beta_u,
        delta=p.delta * np.sqrt(quad),
        mu=float(p.mu[1] - p.mu[0]),
    )


@dataclass(frozen=True)
class GHQuantoDual:
    """Dual law and expected drift rate for the quanto frame.

    ``drift`` is ``None`` for general GH parameters, where no closed
    moment formula is available; :attr:`drift_value` turns that into an
    :class:`UnavailableDrift` error at the point of use.
    """

    params: GH1DParams
    drift: float | None

    @property
    def drift_value(self) -> float:
        if self.drift is None:
            raise UnavailableDrift(
                "general GH quanto drift has no closed form")
        return self.drift


def gh_quanto_dual(p: GHParams) -> GHQuantoDual:
    """Dual law for the quanto frame ``theta = e_1, u = e_2``.

    The projected law follows the same tilt-then-project algebra as the
    swap dual.  The drift is the expected rate of the dual process under
    the tilted measure, ``d/ds kappa((1, s)) at s = 0``, in closed form:

    * NIG: ``mu_2 + delta (Delta b_t)_2 / sqrt(alpha^2 - b_t' Delta b_t)``
    * VG:  ``mu_2 + 2 lambda (Delta b_t)_2 / (alpha^2 - b_t' Delta b_t)``

    with ``b_t = beta + e_1``.  This equals the truncation-free jump
    integral ``b_2 + integral x_2 (e^{x_1} - 1) F(dx)`` and the mean of the
    returned one-dimensional law; tests pin all three against each other.
    General GH gets the parameter map only, with ``drift = None``.
    """
    D = p.Delta
    bt = p.beta + np.array([1.0, 0.0])
    gtil = p.alpha ** 2 - float(bt @ D @ bt)
    if gtil <= 0:
        raise DomainError("unit tilt leaves the moment cone interior")
    quad = float(D[1, 1])
    beta_u = float((D @ bt)[1]) / quad
    params = GH1DParams(
        lambda_=p.lambda_,
        alpha=float(np.sqrt(gtil / quad + beta_u ** 2)),
        beta=beta_u,
        delta=p.delta * np.sqrt(quad),
        mu=float(p.mu[1]),
    )
    if p.flavor == NIG:
        drift = float(p.mu[1] + p.delta * (D @ bt)[1] / np.sqrt(gtil))
    elif p.flavor == VG:
        drift = float(p.mu[1] + 2.0 * p.lambda_ * (D @ bt)[1] / gtil)
    else:
        drift = None
    return GHQuantoDual(params=params, drift=drift)
