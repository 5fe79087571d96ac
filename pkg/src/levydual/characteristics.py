"""Levy triplets, jump-measure backends, and the triplet calculus.

A d-dimensional Levy process is described here by a triplet ``(b, c, F)``
relative to a fixed truncation convention and the deterministic clock
``A_t = t``.  Two conventions are supported:

* ``Truncation.CANONICAL``: ``h(x) = x * 1{|x| <= 1}`` (Euclidean norm),
* ``Truncation.ZERO``: ``h(x) = 0``, valid only for finite-activity jumps.

The jump measure ``F`` is one of four backends.  ``EmptyJumps`` and
``FiniteAtoms`` integrate exactly; ``FiniteActivityDensity`` integrates by
adaptive quadrature over a truncated box unless an analytic hook applies;
``GHJumps`` is a marker backend whose calculus lives at the model layer,
so :func:`cumulant` and :func:`linear_transform` reject it.

All integrals against ``F`` funnel through ``JumpMeasure.integrate`` with
vectorised integrands, which keeps the quadrature path independent of any
model closed forms that may also exist.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    UnavailableDrift,
    UnsupportedMeasure,
)
from .quadrature import ball_quad, box_quad, centred_box

#: Mass mapped within this distance of the origin is discarded by pushforwards.
ORIGIN_TOL = 1e-14

#: Symmetry / positive-semidefiniteness tolerance for covariance matrices.
PSD_TOL = 1e-12

#: Default absolute tolerance for jump-measure quadrature.
QUAD_TOL = 1e-11


class Truncation(enum.Enum):
    """Truncation function convention attached to a triplet."""

    CANONICAL = "canonical"
    ZERO = "zero"


def truncate(X: np.ndarray, trunc: Truncation) -> np.ndarray:
    """Apply the truncation function h row-wise to an ``(m, d)`` array."""
    X = np.atleast_2d(X)
    if trunc is Truncation.ZERO:
        return np.zeros_like(X)
    keep = np.linalg.norm(X, axis=1) <= 1.0
    return X * keep[:, None]


def _as_points(X: np.ndarray, dim: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, dim) if dim > 1 else X.reshape(-1, 1)
    return X


class JumpMeasure:
    """Base class for jump-measure backends."""

    dim: int
    kind: str = "abstract"

    def total_mass(self) -> float:
        raise NotImplementedError

    def integrate(self, g: Callable[[np.ndarray], np.ndarray], *,
                  abs_tol: float = QUAD_TOL):
        """Integrate a vectorised test function against the measure.

        ``g`` maps an ``(m, dim)`` array to ``(m,)`` or ``(m, k)`` values and
        must be integrable against the measure (Levy integrands vanish at the
        origin, so the small-jump region never contributes here: every backend
        in this module has finite activity or rejects integration outright).
        """
        raise NotImplementedError

    def has_exp_moment(self, u: np.ndarray) -> bool:
        """Whether ``exp(<u, x>)`` is integrable on ``|x| > 1``."""
        raise NotImplementedError

    def truncation_mean(self, *, abs_tol: float = QUAD_TOL) -> np.ndarray:
        """``integral h(x) F(dx)`` for the canonical truncation.

        Kept separate from :meth:`integrate` because the indicator in h is
        discontinuous on the unit sphere; each backend evaluates it on a
        geometry where the integrand stays smooth.
        """
        raise NotImplementedError


@dataclass(frozen=True)
class EmptyJumps(JumpMeasure):
    """No jumps at all."""

    dim: int
    kind: str = field(default="empty", init=False)

    def total_mass(self) -> float:
        return 0.0

    def integrate(self, g, *, abs_tol: float = QUAD_TOL):
        probe = np.asarray(g(np.zeros((1, self.dim))))
        return np.zeros(probe.shape[1:], dtype=probe.dtype) if probe.ndim > 1 else 0.0

    def has_exp_moment(self, u) -> bool:
        return True

    def truncation_mean(self, *, abs_tol: float = QUAD_TOL) -> np.ndarray:
        return np.zeros(self.dim)


@dataclass(frozen=True)
class FiniteAtoms(JumpMeasure):
    """Finitely many weighted jump sizes; all integrals are exact sums."""

    dim: int
    points: np.ndarray
    weights: np.ndarray
    kind: str = field(default="finite_atoms", init=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.array(self.points, dtype=float))
        w = np.atleast_1d(np.array(self.weights, dtype=float))
        if pts.shape != (len(w), self.dim):
            raise DimensionMismatch(
                f"atoms shaped {pts.shape}, expected ({len(w)}, {self.dim})")
        if np.any(w <= 0):
            raise ValueError("atom weights must be strictly positive")
        if np.any(np.linalg.norm(pts, axis=1) < ORIGIN_TOL):
            raise ValueError("jump measure may not charge the origin")
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def total_mass(self) -> float:
        return float(self.weights.sum())

    def integrate(self, g, *, abs_tol: float = QUAD_TOL):
        return self.weights @ np.asarray(g(self.points))

    def has_exp_moment(self, u) -> bool:
        return True

    def truncation_mean(self, *, abs_tol: float = QUAD_TOL) -> np.ndarray:
        return self.weights @ truncate(self.points, Truncation.CANONICAL)


@dataclass(frozen=True)
class FiniteActivityDensity(JumpMeasure):
    """Absolutely continuous finite-activity measure, ``F = intensity * density``.

    Parameters
    ----------
    dim : int
        Ambient dimension.
    total_intensity : float
        Total mass of the measure (the jump arrival rate).
    density : callable
        Probability density, vectorised ``(m, dim) -> (m,)``.
    box_radius : float
        Half-width of the quadrature box; the density must carry mass
        below ``1e-14`` outside ``[-box_radius, box_radius]^dim``.
    exp_moment_finite : callable
        Predicate ``u -> bool`` deciding finiteness of the exponential
        moment in direction ``u``.  Required: quadrature cannot decide
        finiteness, so the constructor insists on an analytic answer.
    exp_moment : callable, optional
        Analytic hook returning ``integral exp(<w, x>) F(dx)`` for complex
        ``w``.  When present it accelerates :func:`cumulant`; the generic
        quadrature path never consults it.
    """

    dim: int
    total_intensity: float
    density: Callable[[np.ndarray], np.ndarray]
    box_radius: float
    exp_moment_finite: Callable[[np.ndarray], bool]
    exp_moment: Optional[Callable[[np.ndarray], complex]] = None
    kind: str = field(default="finite_activity_density", init=False)

    def __post_init__(self):
        if self.total_intensity <= 0:
            raise ValueError("total_intensity must be strictly positive")
        if self.box_radius <= 0:
            raise ValueError("box_radius must be strictly positive")

    def total_mass(self) -> float:
        return float(self.total_intensity)

    def integrate(self, g, *, abs_tol: float = QUAD_TOL):
        lo, hi = centred_box(self.box_radius, self.dim)
        lam = self.total_intensity

        def integrand(X):
            vals = np.asarray(g(X))
            dens = lam * np.asarray(self.density(X))
            return vals * dens if vals.ndim == 1 else vals * dens[:, None]

        return box_quad(integrand, lo, hi, abs_tol=abs_tol)

    def has_exp_moment(self, u) -> bool:
        return bool(self.exp_moment_finite(np.asarray(u, dtype=float)))

    def truncation_mean(self, *, abs_tol: float = QUAD_TOL) -> np.ndarray:
        lam = self.total_intensity

        def weighted(X):
            return X * (lam * np.asarray(self.density(X)))[:, None]

        radius = min(1.0, self.box_radius)
        return np.real(np.asarray(
            ball_quad(weighted, radius, self.dim, abs_tol=abs_tol)))


class TiltedProjection(FiniteActivityDensity):
    """One-dimensional image of a density measure under ``x -> <u, x>``
    with an exponential tilt ``exp(<theta, x>)`` applied first.

    Integration pulls test functions back to the base measure, so results
    rest on base-measure quadrature alone.  The pointwise density triggers
    a fiber integral per evaluation and is meant for inspection, not for
    inner numerical loops.
    """

    def __init__(self, base: FiniteActivityDensity, u: np.ndarray,
                 theta: np.ndarray):
        from .errors import DegenerateDirection

        u = np.asarray(u, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if np.linalg.norm(u) < ORIGIN_TOL:
            raise DegenerateDirection("projection direction is numerically zero")
        object.__setattr__(self, "_base", base)
        object.__setattr__(self, "_u", u)
        object.__setattr__(self, "_theta", theta)
        radius = float(np.linalg.norm(u, 1) * base.box_radius)
        mass = float(np.real(base.integrate(
            lambda X: np.exp(X @ theta) * (np.abs(X @ u) > ORIGIN_TOL))))
        super().__init__(
            dim=1,
            total_intensity=mass,
            density=self._density_fiber,
            box_radius=radius,
            exp_moment_finite=lambda v: base.has_exp_moment(
                theta + float(np.atleast_1d(v)[0]) * u),
        )

    def integrate(self, g, *, abs_tol: float = QUAD_TOL):
        u, theta = self._u, self._theta

        def pulled_back(X):
            y = X @ u
            vals = np.asarray(g(y.reshape(-1, 1)))
            tilt = np.exp(X @ theta) * (np.abs(y) > ORIGIN_TOL)
            return vals * tilt if vals.ndim == 1 else vals * tilt[:, None]

        return self._base.integrate(pulled_back, abs_tol=abs_tol)

    def truncation_mean(self, *, abs_tol: float = QUAD_TOL) -> np.ndarray:
        val = _slab_h_mean(self._base, self._u, self._theta, abs_tol)
        return np.array([val])

    def _density_fiber(self, Y):
        # Coarea factor 1/|u| times a fiber integral over the hyperplane
        # <u, x> = y, normalised by the tilted total mass.
        base, u, theta = self._base, self._u, self._theta
        d = base.dim
        unorm = float(np.linalg.norm(u))
        uhat = u / unorm
        basis = _orthonormal_complement(uhat)
        out = np.empty(len(np.atleast_2d(Y)))
        for i, y in enumerate(np.atleast_2d(Y)[:, 0]):
            anchor = (y / unorm) * uhat

            def on_fiber(T):
                X = anchor + T @ basis.T
                return base.density(X) * np.exp(X @ theta)

            lo, hi = centred_box(base.box_radius * np.sqrt(d), d - 1)
            val = box_quad(on_fiber, lo, hi, abs_tol=1e-12)
            out[i] = base.total_intensity * val / (unorm * self.total_intensity)
        return out


def _orthonormal_complement(uhat: np.ndarray) -> np.ndarray:
    """Columns form an orthonormal basis of the hyperplane orthogonal to uhat."""
    d = len(uhat)
    if d == 1:
        return np.zeros((1, 0))
    full = np.eye(d) - np.outer(uhat, uhat)
    q, r = np.linalg.qr(full)
    cols = [q[:, j] for j in range(d) if abs(r[j, j]) > 1e-10]
    return np.column_stack(cols)


def _slab_h_mean(base: FiniteActivityDensity, u: np.ndarray, theta: np.ndarray,
                 abs_tol: float) -> float:
    """``integral h1(<u, x>) exp(<theta, x>) F(dx)`` with canonical 1-d truncation.

    The integrand vanishes off the slab ``|<u, x>| <= 1``, so integrate over
    the slab only, in coordinates whose first axis is aligned with ``u``.
    Inside the slab the indicator is identically one and the integrand smooth.
    """
    d = base.dim
    unorm = float(np.linalg.norm(u))
    uhat = u / unorm
    Q = np.vstack([uhat.reshape(1, -1), _orthonormal_complement(uhat).T])
    radius = base.box_radius * np.sqrt(d)
    lo = np.full(d, -radius)
    hi = np.full(d, radius)
    lo[0] = max(-1.0 / unorm, lo[0])
    hi[0] = min(1.0 / unorm, hi[0])
    lam = base.total_intensity

    def g(Y):
        X = Y @ Q
        return (unorm * Y[:, 0]) * np.exp(X @ theta) * base.density(X) * lam

    return float(np.real(box_quad(g, lo, hi, abs_tol=abs_tol)))


@dataclass(frozen=True)
class GHJumps(JumpMeasure):
    """Generalized hyperbolic Levy measure, carried implicitly by parameters.

    Infinite activity: only the exponential-moment cone is computable here.
    Everything else (cumulants, projections, tilts) happens in closed form
    at the model layer.
    """

    dim: int
    lambda_: float
    alpha: float
    beta: np.ndarray
    delta: float
    mu: np.ndarray
    Delta: np.ndarray
    kind: str = field(default="gh_density", init=False)

    def __post_init__(self):
        for name in ("beta", "mu"):
            arr = np.atleast_1d(np.array(getattr(self, name), dtype=float))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        D = np.atleast_2d(np.array(self.Delta, dtype=float))
        D.flags.writeable = False
        object.__setattr__(self, "Delta", D)

    def total_mass(self) -> float:
        return float("inf")

    def integrate(self, g, *, abs_tol: float = QUAD_TOL):
        raise UnsupportedMeasure(
            "GH jump measures integrate at the model layer, not pointwise")

    def has_exp_moment(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        shifted = self.beta + u
        return float(self.alpha) ** 2 - float(shifted @ self.Delta @ shifted) >= 0.0


@dataclass(frozen=True)
class ExpMomentDomain:
    """Membership test for the convex set ``{u : E exp(<u, H_1>) < inf}``."""

    dim: int
    contains: Callable[[np.ndarray], bool]


@dataclass(frozen=True)
class LevyTriplet:
    """Characteristics ``(b, c, F)`` under a fixed truncation convention."""

    dim: int
    drift: np.ndarray
    cov: np.ndarray
    jumps: JumpMeasure
    trunc: Truncation = Truncation.CANONICAL

    def __post_init__(self):
        b = np.atleast_1d(np.array(self.drift, dtype=float))
        c = np.atleast_2d(np.array(self.cov, dtype=float))
        if b.shape != (self.dim,):
            raise DimensionMismatch(f"drift shaped {b.shape}, expected ({self.dim},)")
        if c.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"cov shaped {c.shape}, expected ({self.dim}, {self.dim})")
        scale = max(1.0, float(np.abs(c).max()))
        if np.abs(c - c.T).max() > PSD_TOL * scale:
            raise ValueError("cov must be symmetric")
        c = 0.5 * (c + c.T)
        if np.linalg.eigvalsh(c).min() < -PSD_TOL * scale:
            raise ValueError("cov must be positive semidefinite")
        if self.jumps.dim != self.dim:
            raise DimensionMismatch(
                f"jump measure dimension {self.jumps.dim} != triplet dimension {self.dim}")
        if self.trunc is Truncation.ZERO and isinstance(self.jumps, GHJumps):
            raise UnsupportedMeasure(
                "zero truncation requires finite activity; GH measures are not")
        b.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "drift", b)
        object.__setattr__(self, "cov", c)

    def exp_moment_domain(self) -> ExpMomentDomain:
        return ExpMomentDomain(self.dim, lambda u: exp_moment_contains(self, u))


def exp_moment_contains(t: LevyTriplet, u) -> bool:
    """Whether ``u`` lies in the exponential-moment domain of the triplet.

    The Gaussian part never constrains the domain; the decision is made by
    the jump backend (atoms and empty measures accept everything, densities
    consult their analytic predicate, GH uses its moment cone).
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (t.dim,):
        raise DimensionMismatch(f"direction shaped {u.shape}, expected ({t.dim},)")
    return t.jumps.has_exp_moment(u)


def cumulant(t: LevyTriplet, w, *, abs_tol: float = QUAD_TOL) -> complex:
    """Cumulant ``kappa(w)`` of the triplet at a complex vector ``w``.

    ``kappa(w) = <w, b> + 1/2 w' c w + integral(exp(<w, x>) - 1 - <w, h(x)>) F(dx)``

    The real part of ``w`` must lie in the exponential-moment domain.  For
    real ``w`` the computation stays in real arithmetic, so the imaginary
    part of the result is exactly zero.

    Raises
    ------
    DomainError
        If ``Re(w)`` is outside the exponential-moment domain.
    UnsupportedMeasure
        For GH-backed triplets; their cumulant lives on the model.
    DimensionMismatch
        If ``w`` has the wrong length.
    """
    w = np.atleast_1d(np.asarray(w))
    if w.shape != (t.dim,):
        raise DimensionMismatch(f"argument shaped {w.shape}, expected ({t.dim},)")
    if isinstance(t.jumps, GHJumps):
        raise UnsupportedMeasure(
            "GH-backed triplets have no pointwise jump integral; "
            "use the model cumulant")
    if not exp_moment_contains(t, w.real.astype(float)):
        raise DomainError(f"Re(w) = {w.real} outside the exponential-moment domain")
    if np.all(w.imag == 0):
        w = w.real.astype(float)
    diffusion = w @ t.drift + 0.5 * (w @ t.cov @ w)
    jump = _jump_integral(t, w, abs_tol)
    return complex(diffusion + jump)


def _jump_integral(t: LevyTriplet, w, abs_tol: float):
    jumps = t.jumps
    if isinstance(jumps, EmptyJumps):
        return 0.0
    if isinstance(jumps, FiniteAtoms):
        # exact in one pass, discontinuity of h is harmless on atoms
        return jumps.integrate(
            lambda X: np.exp(X @ w) - 1.0 - truncate(X, t.trunc) @ w)
    # Density-backed: split off the truncation term, whose indicator would
    # stall box quadrature, and evaluate it on ball/slab geometry instead.
    # TiltedProjection instances never carry hooks, so their path stays
    # independent of model closed forms.
    hook = getattr(jumps, "exp_moment", None)
    if hook is not None:
        val = hook(w) - jumps.total_mass()
    else:
        val = jumps.integrate(lambda X: np.exp(X @ w) - 1.0, abs_tol=abs_tol)
    if t.trunc is Truncation.CANONICAL:
        val = val - w @ jumps.truncation_mean(abs_tol=abs_tol)
    return val


def martingale_drift(t: LevyTriplet, i: int, *, abs_tol: float = QUAD_TOL) -> float:
    """Drift component ``b_i`` that makes ``exp(H^i)`` a unit martingale.

    Solves ``kappa(e_i) = 0`` for the drift coordinate:
    ``b_i = -c_ii / 2 - integral(exp(x_i) - 1 - h_i(x)) F(dx)``.

    Raises
    ------
    UnavailableDrift
        If the exponential moment in direction ``e_i`` is infinite.
    """
    if not 0 <= i < t.dim:
        raise DimensionMismatch(f"coordinate {i} out of range for dim {t.dim}")
    e_i = np.zeros(t.dim)
    e_i[i] = 1.0
    if not exp_moment_contains(t, e_i):
        raise UnavailableDrift(
            f"coordinate {i} has no finite exponential moment")
    if isinstance(t.jumps, GHJumps):
        raise UnsupportedMeasure(
            "martingale drift for GH models is set at the model layer")
    jump = float(np.real(_jump_integral(t, e_i, abs_tol)))
    return -0.5 * float(t.cov[i, i]) - jump


def linear_transform(t: LevyTriplet, U) -> LevyTriplet:
    """Triplet of ``U H`` for a real ``n x d`` matrix ``U``.

    ``b^U = U b + integral(h(U x) - U h(x)) F(dx)``, ``c^U = U c U'`` and
    ``F^U`` is the pushforward of ``F`` under ``U`` with any mass landing
    within ``1e-14`` of the origin discarded.  The truncation convention of
    the input is preserved; under zero truncation the drift correction
    vanishes identically.

    Density-backed measures push forward exactly along a single direction
    (``n = 1``) or under an invertible square ``U``; other shapes raise
    :class:`UnsupportedMeasure`.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    n, d = U.shape
    if d != t.dim:
        raise DimensionMismatch(f"U has {d} columns, triplet dimension is {t.dim}")
    cov_u = U @ t.cov @ U.T
    cov_u = 0.5 * (cov_u + cov_u.T)
    drift_u = U @ t.drift + _transform_drift_correction(t, U)
    jumps_u = _pushforward(t.jumps, U)
    return LevyTriplet(n, drift_u, cov_u, jumps_u, t.trunc)


def _transform_drift_correction(t: LevyTriplet, U: np.ndarray) -> np.ndarray:
    n = U.shape[0]
    if t.trunc is Truncation.ZERO or isinstance(t.jumps, EmptyJumps):
        return np.zeros(n)
    if isinstance(t.jumps, GHJumps):
        raise UnsupportedMeasure(
            "GH jump measures transform at the parameter level")
    jumps = t.jumps
    if isinstance(jumps, FiniteAtoms):
        return np.real(np.asarray(jumps.integrate(
            lambda X: truncate(X @ U.T, t.trunc) - truncate(X, t.trunc) @ U.T)))
    # integral h(Ux) F(dx), on geometry matching the image of the unit ball
    if n == 1:
        image_mean = np.array([
            _slab_h_mean(jumps, U[0], np.zeros(t.dim), QUAD_TOL)])
    elif n == t.dim and abs(np.linalg.det(U)) > 1e-12:
        Uinv = np.linalg.inv(U)
        jac = abs(np.linalg.det(Uinv))
        lam = jumps.total_intensity

        def pushed(Z):
            return Z * (lam * jac * np.asarray(
                jumps.density(Z @ Uinv.T)))[:, None]

        image_mean = np.real(np.asarray(ball_quad(pushed, 1.0, n)))
    else:
        raise UnsupportedMeasure(
            "density pushforward supported along one direction or invertible maps")
    return image_mean - U @ jumps.truncation_mean()


def _pushforward(jumps: JumpMeasure, U: np.ndarray) -> JumpMeasure:
    n, d = U.shape
    if isinstance(jumps, EmptyJumps):
        return EmptyJumps(n)
    if isinstance(jumps, FiniteAtoms):
        images = jumps.points @ U.T
        keep = np.linalg.norm(images, axis=1) >= ORIGIN_TOL
        if not keep.any():
            return EmptyJumps(n)
        return FiniteAtoms(n, images[keep], jumps.weights[keep])
    if isinstance(jumps, GHJumps):
        raise UnsupportedMeasure(
            "GH jump measures transform at the parameter level")
    if n == 1:
        return TiltedProjection(jumps, U[0], np.zeros(d))
    if n == d and abs(np.linalg.det(U)) > 1e-12:
        return _invertible_image(jumps, U)
    raise UnsupportedMeasure(
        "density pushforward supported along one direction or invertible maps")


def _invertible_image(jumps: FiniteActivityDensity, U: np.ndarray) -> FiniteActivityDensity:
    Uinv = np.linalg.inv(U)
    jac = abs(np.linalg.det(Uinv))
    hook = jumps.exp_moment
    return FiniteActivityDensity(
        dim=U.shape[0],
        total_intensity=jumps.total_intensity,
        density=lambda Y: jumps.density(np.atleast_2d(Y) @ Uinv.T) * jac,
        box_radius=float(np.linalg.norm(U, 2)) * jumps.box_radius,
        exp_moment_finite=lambda v: jumps.has_exp_moment(U.T @ np.asarray(v)),
        exp_moment=None if hook is None else (lambda w: hook(U.T @ np.asarray(w))),
    )


def convert_truncation(t: LevyTriplet, target: Truncation) -> LevyTriplet:
    """Re-express the triplet under another truncation convention.

    Only the drift moves: ``b_zero = b_canonical - integral h(x) F(dx)``.
    The cumulant is invariant under the conversion.  Infinite-activity
    measures cannot drop truncation, so GH-backed triplets are rejected.
    """
    if target is t.trunc:
        return t
    if isinstance(t.jumps, GHJumps):
        raise UnsupportedMeasure("GH measures require the canonical truncation")
    if isinstance(t.jumps, EmptyJumps):
        return LevyTriplet(t.dim, t.drift, t.cov, t.jumps, target)
    h_mean = t.jumps.truncation_mean()
    sign = -1.0 if target is Truncation.ZERO else 1.0
    return LevyTriplet(t.dim, t.drift + sign * h_mean, t.cov, t.jumps, target)
