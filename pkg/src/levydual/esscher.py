"""Esscher measure changes and one-dimensional dual reductions.

Tilting a d-dimensional Levy process by ``exp(<theta, H_t> - t kappa(theta))``
and projecting onto a direction ``u`` yields a one-dimensional Levy process
``<u, H>`` under the tilted measure.  Its triplet has closed form in terms of
the original one:

* drift: ``b_u = <u, b> + <u, c theta> + integral(h1(<u, x>) e^{<theta, x>}
  - <u, h(x)>) F(dx)``
* diffusion: ``c_u = <u, c u>``
* jumps: the image of ``e^{<theta, x>} F(dx)`` under ``x -> <u, x>``, with
  mass landing at the origin discarded,

and its cumulant satisfies ``kappa_u(z) = kappa(theta + z u) - kappa(theta)``
for every admissible ``z``.  The triplet route (quadrature for densities,
exact sums for atoms) and the cumulant route are computed independently, so
tests can hold one against the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .characteristics import (
    ORIGIN_TOL,
    QUAD_TOL,
    EmptyJumps,
    FiniteActivityDensity,
    FiniteAtoms,
    GHJumps,
    LevyTriplet,
    TiltedProjection,
    Truncation,
    _slab_h_mean,
    cumulant,
    exp_moment_contains,
    truncate,
)
from .errors import (
    DegenerateDirection,
    DimensionMismatch,
    DomainError,
    UnsupportedMeasure,
)

#: A dual process counts as a martingale when ``|kappa_u(1)|`` is below this.
MARTINGALE_TOL = 1e-12


@dataclass(frozen=True)
class EsscherFrame:
    """Tilt direction, projection direction, and horizon of a reduction."""

    theta: np.ndarray
    u: np.ndarray
    maturity: float

    def __post_init__(self):
        theta = np.atleast_1d(np.array(self.theta, dtype=float))
        u = np.atleast_1d(np.array(self.u, dtype=float))
        if theta.shape != u.shape or theta.ndim != 1:
            raise DimensionMismatch("theta and u must be vectors of equal length")
        if np.linalg.norm(u) < ORIGIN_TOL:
            raise DegenerateDirection("projection direction u must be nonzero")
        if not self.maturity > 0:
            raise ValueError("maturity must be strictly positive")
        theta.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "u", u)

    @property
    def dim(self) -> int:
        return len(self.theta)

    def check_against(self, t: LevyTriplet) -> None:
        """Validate the frame against a concrete triplet.

        Raises :class:`DimensionMismatch` on a dimension conflict and
        :class:`DomainError` when the tilt leaves the exponential-moment
        domain, in which case the tilted measure is not defined.
        """
        if self.dim != t.dim:
            raise DimensionMismatch(
                f"frame dimension {self.dim} != triplet dimension {t.dim}")
        if not exp_moment_contains(t, self.theta):
            raise DomainError(
                f"tilt theta = {self.theta} outside the exponential-moment domain")


@dataclass(frozen=True)
class DualTriplet1D:
    """One-dimensional dual triplet with provenance of its construction."""

    triplet: LevyTriplet
    theta: np.ndarray
    u: np.ndarray
    maturity: float
    source: str
    is_dual_martingale: Optional[bool]

    @property
    def drift(self) -> float:
        return float(self.triplet.drift[0])

    @property
    def diffusion(self) -> float:
        return float(self.triplet.cov[0, 0])

    @property
    def jumps(self):
        return self.triplet.jumps


def dual_cumulant(kappa: Callable, frame: EsscherFrame, z) -> complex:
    """Cumulant of the dual process: ``kappa(theta + z u) - kappa(theta)``.

    ``kappa`` is any cumulant evaluator accepting complex vectors; domain
    violations along the shifted argument propagate from it unchanged.
    """
    shifted = frame.theta.astype(complex) + z * frame.u.astype(complex)
    return kappa(shifted) - kappa(frame.theta.astype(complex))


def dual_triplet_diffusion(drift: np.ndarray, cov: np.ndarray,
                           frame: EsscherFrame) -> tuple[float, float]:
    """Dual drift and variance for a purely Gaussian model, in closed form."""
    b = np.atleast_1d(np.asarray(drift, dtype=float))
    c = np.atleast_2d(np.asarray(cov, dtype=float))
    if b.shape != (frame.dim,) or c.shape != (frame.dim, frame.dim):
        raise DimensionMismatch("drift/cov shapes inconsistent with the frame")
    theta, u = frame.theta, frame.u
    return float(u @ b + u @ c @ theta), float(u @ c @ u)


def dual_triplet(t: LevyTriplet, frame: EsscherFrame, *,
                 abs_tol: float = QUAD_TOL) -> DualTriplet1D:
    """One-dimensional triplet of ``<u, H>`` under the Esscher tilt ``theta``.

    Atoms map exactly; densities map through quadrature that never consults
    model closed forms, so the result is an independent cross-check against
    :func:`dual_cumulant` on a model cumulant.  The truncation convention of
    the input is preserved; under zero truncation the drift correction
    integral vanishes and ``b_u = <u, b> + <u, c theta>`` exactly.

    Raises
    ------
    DomainError
        If ``theta`` is outside the exponential-moment domain.
    UnsupportedMeasure
        For GH-backed triplets (their duals are parameter maps on the model).
    DegenerateDirection
        If ``u`` is numerically zero.
    """
    frame.check_against(t)
    if isinstance(t.jumps, GHJumps):
        raise UnsupportedMeasure(
            "GH-backed triplets dualise at the model layer (parameter maps)")
    theta, u = frame.theta, frame.u
    b_u = float(u @ t.drift + u @ t.cov @ theta) + _dual_drift_correction(
        t, theta, u, abs_tol)
    c_u = float(u @ t.cov @ u)
    jumps_u = _dual_jumps(t.jumps, theta, u)
    triplet = LevyTriplet(1, [b_u], [[c_u]], jumps_u, t.trunc)
    flag = _martingale_flag(t, theta, u)
    return DualTriplet1D(triplet, theta, u, frame.maturity,
                         source="esscher_tilt+projection",
                         is_dual_martingale=flag)


def _dual_drift_correction(t: LevyTriplet, theta, u, abs_tol) -> float:
    if t.trunc is Truncation.ZERO or isinstance(t.jumps, EmptyJumps):
        return 0.0
    if isinstance(t.jumps, FiniteAtoms):
        pts, w = t.jumps.points, t.jumps.weights
        proj = pts @ u
        h1 = proj * (np.abs(proj) <= 1.0)
        h_orig = truncate(pts, t.trunc) @ u
        return float(w @ (h1 * np.exp(pts @ theta) - h_orig))
    tilted = _slab_h_mean(t.jumps, u, theta, abs_tol)
    return tilted - float(u @ t.jumps.truncation_mean(abs_tol=abs_tol))


def _dual_jumps(jumps, theta, u):
    if isinstance(jumps, EmptyJumps):
        return EmptyJumps(1)
    if isinstance(jumps, FiniteAtoms):
        proj = jumps.points @ u
        weights = jumps.weights * np.exp(jumps.points @ theta)
        keep = np.abs(proj) >= ORIGIN_TOL
        if not keep.any():
            return EmptyJumps(1)
        return FiniteAtoms(1, proj[keep].reshape(-1, 1), weights[keep])
    return TiltedProjection(jumps, u, theta)


def _martingale_flag(t: LevyTriplet, theta, u) -> Optional[bool]:
    # kappa_u(1) = kappa(theta + u) - kappa(theta); use tight quadrature so
    # the threshold is meaningful even on hook-less density backends.
    if not exp_moment_contains(t, theta + u):
        return None
    k1 = cumulant(t, theta + u, abs_tol=1e-13)
    k0 = cumulant(t, theta, abs_tol=1e-13)
    return bool(abs((k1 - k0).real) < MARTINGALE_TOL)


def one_dim_dual(t: LevyTriplet, *, maturity: float = 1.0,
                 abs_tol: float = QUAD_TOL) -> DualTriplet1D:
    """Dual of a single-asset martingale model: tilt by 1, flip the sign.

    For a one-dimensional triplet calibrated to ``kappa(1) = 0`` the dual
    triplet has the closed form

    ``b' = -b - c - integral h(x)(e^x - 1) F(dx)``, ``c' = c``,
    ``nu'(E) = integral 1_E(-x) e^x nu(dx)``,

    which this routine cross-checks against the generic frame construction
    before returning it.

    Raises
    ------
    DomainError
        If the triplet is not one-dimensional martingale-calibrated, or 1 is
        outside the exponential-moment domain.
    """
    if t.dim != 1:
        raise DimensionMismatch("one_dim_dual requires a one-dimensional triplet")
    if not exp_moment_contains(t, [1.0]):
        raise DomainError("unit tilt outside the exponential-moment domain")
    if abs(cumulant(t, [1.0]).real) > 1e-10:
        raise DomainError("one_dim_dual requires a martingale-calibrated triplet")
    frame = EsscherFrame([1.0], [-1.0], maturity)
    dual = dual_triplet(t, frame, abs_tol=abs_tol)
    closed = _one_dim_closed_drift(t, abs_tol)
    if abs(dual.drift - closed) > 1e-12:
        raise AssertionError(
            f"dual drift {dual.drift} deviates from closed form {closed}")
    return dual


def _one_dim_closed_drift(t: LevyTriplet, abs_tol: float) -> float:
    """``-b - c - integral h(x)(e^x - 1) F(dx)`` evaluated directly."""
    b = float(t.drift[0])
    c = float(t.cov[0, 0])
    if t.trunc is Truncation.ZERO or isinstance(t.jumps, EmptyJumps):
        return -b - c
    if isinstance(t.jumps, FiniteAtoms):
        x = t.jumps.points[:, 0]
        hx = x * (np.abs(x) <= 1.0)
        corr = float(t.jumps.weights @ (hx * (np.exp(x) - 1.0)))
        return -b - c - corr
    from .quadrature import ball_quad

    jumps = t.jumps
    lam = jumps.total_intensity

    def on_ball(X):
        x = X[:, 0]
        return x * (np.exp(x) - 1.0) * lam * np.asarray(jumps.density(X))

    radius = min(1.0, jumps.box_radius)
    corr = float(np.real(ball_quad(on_ball, radius, 1, abs_tol=abs_tol)))
    return -b - c - corr
