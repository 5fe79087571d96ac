"""Multi-asset payoff reductions and the one-dimensional engines they hit.

Every multi-asset payoff handled here factors as

    price = prefactor * E_theta[ vanilla(e^{<u, H_T>}) ]

for a measure tilt ``theta`` and a direction ``u``.  The tilted expectation
is a plain one-dimensional call, put, or digital under the dual cumulant
``kappa_u(z) = kappa(theta + z u) - kappa(theta)``, which each model backend
supplies in closed form.  The engines are a damped Fourier transform for
calls (puts by parity) and Gil-Pelaez inversion for digitals, with a
closed-form lognormal fallback used when the dual is Gaussian.

Nonunit spots never touch the models: they enter as an additive shift of
the dual drift (``<u, log s> / T``) plus the multiplicative prefactor
``exp(<theta, log s>)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate
from scipy.stats import norm

from .errors import (
    ContourError,
    DimensionMismatch,
    DomainError,
    QuadratureError,
    UnsupportedModel,
)
from .esscher import EsscherFrame
from .models import BlackScholesModel, GHModel, MertonModel
from .models.gh import (
    GENERAL,
    esscher_tilt,
    gh_quanto_dual,
    gh_radon,
    gh_swap_dual,
)
from .models.merton import merton_dual

DEFAULT_DAMPING = 0.75
DEFAULT_PATHS = 1_000_000
DEFAULT_SEED = 42
QUAD_ABS_TOL = 1e-10
ENVELOPE_TOL = 1e-14
TRUNC_START = 50.0
TRUNC_CAP = 1e5
# Model constructors calibrate exactly; the slack absorbs config round-trips.
CALIBRATION_TOL = 1e-8
ROUTE_TOL = 1e-8

_STRIKE_KINDS = frozenset(
    {"call", "put", "digital", "quanto_call", "quanto_put",
     "correlation_digital"})
_STRIKELESS_KINDS = frozenset({"swap", "quanto_swap"})
_DIMS = {
    "call": 1, "put": 1, "digital": 1,
    "swap": 2, "quanto_call": 2, "quanto_put": 2, "correlation_digital": 2,
    "quanto_swap": 3,
}


@dataclass(frozen=True)
class Payoff:
    """A terminal payoff: one of the supported vanilla or cross-asset kinds."""

    kind: str
    strike: float | None = None

    def __post_init__(self):
        if self.kind not in _DIMS:
            raise ValueError(f"unknown payoff kind {self.kind!r}")
        if self.kind in _STRIKE_KINDS:
            if self.strike is None or not self.strike > 0:
                raise ValueError(f"{self.kind} requires a positive strike")
        elif self.strike is not None:
            raise ValueError(f"{self.kind} carries no strike")

    @property
    def dim(self) -> int:
        return _DIMS[self.kind]


@dataclass(frozen=True)
class PriceResult:
    value: float
    method: str
    stderr: float | None = None
    frame: EsscherFrame | None = None

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError(f"price {self.value} is negative")
        if (self.stderr is not None) != (self.method == "mc"):
            raise ValueError("stderr is present exactly for mc results")


def _clamped(value: float) -> float:
    # Quadrature noise may leave a microscopic negative on a zero price;
    # anything larger is a genuine numerical failure.
    if value < 0.0:
        if value < -1e-7:
            raise QuadratureError(f"price {value} is negative beyond noise")
        return 0.0
    return value


# ---------------------------------------------------------------------------
# one-dimensional engines


def bs_closed_form(vol: float, forward: float, strike: float, maturity: float,
                   kind: str) -> PriceResult:
    """Undiscounted lognormal call/put/digital; vol 0 degrades to intrinsic."""
    if vol < 0:
        raise ValueError("vol must be nonnegative")
    if forward <= 0 or strike <= 0 or maturity <= 0:
        raise ValueError("forward, strike, maturity must be positive")
    if kind not in ("call", "put", "digital"):
        raise ValueError(f"unsupported kind {kind!r}")
    stdev = vol * math.sqrt(maturity)
    if stdev == 0.0:
        if kind == "call":
            value = max(forward - strike, 0.0)
        elif kind == "put":
            value = max(strike - forward, 0.0)
        else:
            value = 1.0 if forward > strike else 0.0
        return PriceResult(value=value, method="closed")
    d1 = (math.log(forward / strike) + 0.5 * stdev * stdev) / stdev
    d2 = d1 - stdev
    if kind == "call":
        value = forward * norm.cdf(d1) - strike * norm.cdf(d2)
    elif kind == "put":
        value = strike * norm.cdf(-d2) - forward * norm.cdf(-d1)
    else:
        value = norm.cdf(d2)
    return PriceResult(value=_clamped(float(value)), method="closed")


def _truncation_radius(envelope, start: float = TRUNC_START) -> float:
    """Grow the cutoff geometrically until the envelope is negligible."""
    radius = start
    while not envelope(radius) < ENVELOPE_TOL:
        radius *= 2.0
        if radius > TRUNC_CAP:
            raise QuadratureError(
                "integrand envelope never fell below "
                f"{ENVELOPE_TOL} before the cutoff cap {TRUNC_CAP:g}")
    return radius


def _adaptive(f, hi: float, tol: float) -> float:
    out = integrate.quad(f, 0.0, hi, epsabs=tol, epsrel=max(tol, 1e-12),
                         limit=2000, full_output=1)
    value, abserr = out[0], out[1]
    if abserr > 100 * tol:
        raise QuadratureError(
            f"quadrature error estimate {abserr:.3e} exceeds budget "
            f"({100 * tol:.0e})")
    return float(value)


def _damped_call(cumulant1d, strike: float, maturity: float, damping: float,
                 tol: float) -> float:
    """E(e^X - K)^+ by damped Fourier inversion of the mgf of X."""
    k = math.log(strike)
    a = damping

    # Probing the contour foot; a DomainError here drives the retry ladder.
    cumulant1d(a + 1.0)

    def psi(v: float) -> complex:
        num = np.exp(maturity * cumulant1d(complex(a + 1.0, v)))
        den = complex(a * a + a - v * v, (2 * a + 1) * v)
        return num / den

    # |psi| carries no oscillation (that lives in e^{-ivk}), so a point
    # evaluation is an honest envelope for these monotone-tail cumulants.
    radius = _truncation_radius(lambda v: abs(psi(v)))
    integral = _adaptive(lambda v: (np.exp(-1j * v * k) * psi(v)).real,
                         radius, tol)
    return math.exp(-a * k) / math.pi * integral


def _gil_pelaez(cumulant1d, strike: float, maturity: float,
                tol: float) -> float:
    """P(X > log K) from the characteristic function exp(T kappa(iv))."""
    k = math.log(strike)

    def phi(v: float) -> complex:
        return np.exp(maturity * cumulant1d(complex(0.0, v)))

    def integrand(v: float) -> float:
        if v == 0.0:
            return 0.0
        return (np.exp(-1j * v * k) * phi(v)).imag / v

    radius = _truncation_radius(lambda v: abs(phi(v)) / v)
    value = 0.5 + _adaptive(integrand, radius, tol) / math.pi
    return min(max(value, 0.0), 1.0)


def vanilla_fourier(cumulant1d, forward: float, strike: float,
                    maturity: float, kind: str, *,
                    damping: float = DEFAULT_DAMPING,
                    tol: float = QUAD_ABS_TOL) -> PriceResult:
    """Price a 1-d call, put, or digital from a complex cumulant.

    ``forward`` must equal ``exp(T kappa(1))``; it is the caller's claim
    about the same cumulant and only enters through put-call parity.  If
    the damping contour leaves the admissible strip the damping parameter
    is halved, twice, before giving up with :class:`ContourError`.
    """
    if strike <= 0 or maturity <= 0 or forward <= 0:
        raise ValueError("forward, strike, maturity must be positive")
    if kind == "digital":
        value = _gil_pelaez(cumulant1d, strike, maturity, tol)
        return PriceResult(value=value, method="fourier")
    if kind not in ("call", "put"):
        raise ValueError(f"unsupported kind {kind!r}")
    attempts = [damping, damping / 2.0, damping / 4.0]
    last = None
    for a in attempts:
        try:
            call = _damped_call(cumulant1d, strike, maturity, a, tol)
            break
        except DomainError as exc:
            last = exc
    else:
        raise ContourError(
            f"damping line left the admissible strip for damping in "
            f"{attempts}: {last}")
    value = call if kind == "call" else call - forward + strike
    return PriceResult(value=_clamped(value), method="fourier")


# ---------------------------------------------------------------------------
# dual cumulants per backend

_SWAP_2D = (np.array([1.0, 0.0]), np.array([-1.0, 1.0]))
_SWAP_2D_ALT = (np.array([0.0, 1.0]), np.array([1.0, -1.0]))
_QUANTO_2D = (np.array([1.0, 0.0]), np.array([0.0, 1.0]))
_QUANTO_SWAP_3D = (np.array([1.0, 1.0, 0.0]), np.array([0.0, -1.0, 1.0]))


def _gaussian_cumulant(drift: float, diffusion: float):
    def kappa(z):
        return drift * z + 0.5 * diffusion * z * z

    return kappa


def dual_cumulant_1d(model, theta: np.ndarray, u: np.ndarray):
    """Closed 1-d dual cumulant ``z -> kappa(theta + z u) - kappa(theta)``.

    Dispatches to each backend's dual parameter map, so the returned
    callable accepts complex arguments and raises :class:`DomainError`
    outside the admissible strip.
    """
    if isinstance(model, BlackScholesModel):
        b_u = float(u @ model.drift + u @ model.cov @ theta)
        c_u = float(u @ model.cov @ u)
        return _gaussian_cumulant(b_u, c_u)
    if isinstance(model, MertonModel):
        return merton_dual(model.params, theta, u).cumulant
    if isinstance(model, GHModel):
        if model.flavor == GENERAL:
            raise UnsupportedModel("general GH pricing is not implemented")
        if np.array_equal(theta, _SWAP_2D[0]) and np.array_equal(u, _SWAP_2D[1]):
            return gh_swap_dual(model.params).cumulant
        if np.array_equal(theta, _QUANTO_2D[0]) and np.array_equal(u, _QUANTO_2D[1]):
            return gh_quanto_dual(model.params).params.cumulant
        return gh_radon(esscher_tilt(model.params, theta), u).cumulant
    raise UnsupportedModel(f"no dual cumulant for {type(model).__name__}")


def _require_martingale(model) -> None:
    for i in range(model.dim):
        e_i = np.zeros(model.dim)
        e_i[i] = 1.0
        if not model.exp_moment_ok(e_i):
            raise DomainError(f"e_{i + 1} exponential moment does not exist")
        if abs(float(np.real(model.cumulant(e_i)))) > CALIBRATION_TOL:
            raise DomainError(
                f"model is not martingale-calibrated: kappa(e_{i + 1}) != 0")


def _require_dim(model, dim: int) -> None:
    if model.dim != dim:
        raise DimensionMismatch(
            f"payoff needs a {dim}-asset model, got {model.dim}")


def _log_spots(spots, dim: int) -> np.ndarray:
    if spots is None:
        return np.zeros(dim)
    spots = np.asarray(spots, dtype=float)
    if spots.shape != (dim,):
        raise DimensionMismatch(f"spots must be a {dim}-vector")
    if not np.all(spots > 0):
        raise ValueError("spots must be positive")
    return np.log(spots)


def _reduced_price(model, theta, u, strike, maturity, kind, *, method,
                   damping, tol, spots, prefactor=1.0) -> PriceResult:
    """Common reduction: tilt by theta, project on u, price the vanilla."""
    if not model.exp_moment_ok(theta):
        raise DomainError("tilt vector theta lies outside the moment domain")
    if not model.exp_moment_ok(theta + u):
        raise DomainError("theta + u lies outside the moment domain")
    ls = _log_spots(spots, model.dim)
    spot_pre = math.exp(float(theta @ ls))
    shift = float(u @ ls) / maturity

    base = dual_cumulant_1d(model, theta, u)
    kappa = (lambda z: base(z) + shift * z) if shift != 0.0 else base

    if method == "closed":
        if not isinstance(model, BlackScholesModel):
            raise UnsupportedModel(
                f"no closed form for {type(model).__name__}")
        b_u = float(u @ model.drift + u @ model.cov @ theta) + shift
        c_u = float(u @ model.cov @ u)
        fwd = math.exp(maturity * (b_u + 0.5 * c_u))
        res = bs_closed_form(math.sqrt(max(c_u, 0.0)), fwd, strike,
                             maturity, kind)
    else:
        fwd = math.exp(maturity * float(np.real(kappa(1.0))))
        res = vanilla_fourier(kappa, fwd, strike, maturity, kind,
                              damping=damping, tol=tol)
    value = _clamped(prefactor * spot_pre * res.value)
    frame = EsscherFrame(theta=theta, u=u, maturity=maturity)
    return replace(res, value=value, frame=frame)


def _resolve_method(model, method: str) -> str:
    if method == "auto":
        return "closed" if isinstance(model, BlackScholesModel) else "fourier"
    if method not in ("fourier", "closed", "mc"):
        raise ValueError(f"unknown method {method!r}")
    return method


def _mc_result(model, payoff, maturity, *, paths, seed, workers,
               spots) -> PriceResult:
    from . import montecarlo

    est = montecarlo.mc_price(model, payoff, maturity, paths, seed,
                              workers=workers, spots=spots)
    return PriceResult(value=max(est.mean, 0.0), method="mc",
                       stderr=est.stderr)


# ---------------------------------------------------------------------------
# payoff-level reductions


def price_swap(model, maturity: float, *, route: str = "put",
               method: str = "auto", damping: float = DEFAULT_DAMPING,
               tol: float = QUAD_ABS_TOL, spots=None,
               paths: int = DEFAULT_PATHS, seed: int = DEFAULT_SEED,
               workers: int = 1) -> PriceResult:
    """Exchange option E(S^1 - S^2)^+ via either measure-tilt route.

    ``route="put"`` tilts by the first asset and prices a strike-1 put on
    e^{H^2 - H^1}; ``route="call"`` tilts by the second and prices the
    mirrored strike-1 call.  The two must agree to 1e-8.
    """
    _require_dim(model, 2)
    _require_martingale(model)
    method = _resolve_method(model, method)
    if method == "mc":
        return _mc_result(model, Payoff("swap"), maturity, paths=paths,
                          seed=seed, workers=workers, spots=spots)
    if route == "put":
        theta, u = _SWAP_2D
        kind = "put"
    elif route == "call":
        theta, u = _SWAP_2D_ALT
        kind = "call"
    else:
        raise ValueError(f"unknown route {route!r}")
    return _reduced_price(model, theta, u, 1.0, maturity, kind,
                          method=method, damping=damping, tol=tol,
                          spots=spots)


def _price_quanto(model, strike, maturity, kind, *, method, damping, tol,
                  spots, paths, seed, workers) -> PriceResult:
    _require_dim(model, 2)
    _require_martingale(model)
    method = _resolve_method(model, method)
    if method == "mc":
        payoff_kind = {"call": "quanto_call", "put": "quanto_put",
                       "digital": "correlation_digital"}[kind]
        return _mc_result(model, Payoff(payoff_kind, strike), maturity,
                          paths=paths, seed=seed, workers=workers,
                          spots=spots)
    theta, u = _QUANTO_2D
    return _reduced_price(model, theta, u, strike, maturity, kind,
                          method=method, damping=damping, tol=tol,
                          spots=spots)


def price_quanto_call(model, strike: float, maturity: float, *,
                      method: str = "auto", damping: float = DEFAULT_DAMPING,
                      tol: float = QUAD_ABS_TOL, spots=None,
                      paths: int = DEFAULT_PATHS, seed: int = DEFAULT_SEED,
                      workers: int = 1) -> PriceResult:
    """E[S^1 (S^2 - K)^+]: a 1-d call under the first-asset tilt.

    The dual asset is generally not a martingale under the tilted measure,
    so the engine is fed the true dual forward exp(T kappa_u(1)).
    """
    return _price_quanto(model, strike, maturity, "call", method=method,
                         damping=damping, tol=tol, spots=spots, paths=paths,
                         seed=seed, workers=workers)


def price_quanto_put(model, strike: float, maturity: float, *,
                     method: str = "auto", damping: float = DEFAULT_DAMPING,
                     tol: float = QUAD_ABS_TOL, spots=None,
                     paths: int = DEFAULT_PATHS, seed: int = DEFAULT_SEED,
                     workers: int = 1) -> PriceResult:
    """E[S^1 (K - S^2)^+], by parity off the quanto call."""
    return _price_quanto(model, strike, maturity, "put", method=method,
                         damping=damping, tol=tol, spots=spots, paths=paths,
                         seed=seed, workers=workers)


def price_correlation_digital(model, strike: float, maturity: float, *,
                              method: str = "auto",
                              damping: float = DEFAULT_DAMPING,
                              tol: float = QUAD_ABS_TOL, spots=None,
                              paths: int = DEFAULT_PATHS,
                              seed: int = DEFAULT_SEED,
                              workers: int = 1) -> PriceResult:
    """E[S^1 1{S^2 > K}]: the tilted probability by Gil-Pelaez inversion."""
    return _price_quanto(model, strike, maturity, "digital", method=method,
                         damping=damping, tol=tol, spots=spots, paths=paths,
                         seed=seed, workers=workers)


def price_quanto_swap(model, maturity: float, *, method: str = "auto",
                      damping: float = DEFAULT_DAMPING,
                      tol: float = QUAD_ABS_TOL, spots=None,
                      paths: int = DEFAULT_PATHS, seed: int = DEFAULT_SEED,
                      workers: int = 1) -> PriceResult:
    """E[S^1 (S^2 - S^3)^+] = C * strike-1 put under the (1,1,0) tilt.

    The normalizing constant is C = exp(T kappa((1,1,0))), the expectation
    of the composite numeraire.
    """
    _require_dim(model, 3)
    _require_martingale(model)
    method = _resolve_method(model, method)
    if method == "mc":
        return _mc_result(model, Payoff("quanto_swap"), maturity,
                          paths=paths, seed=seed, workers=workers,
                          spots=spots)
    theta, u = _QUANTO_SWAP_3D
    if not model.exp_moment_ok(theta):
        raise DomainError("tilt vector (1,1,0) lies outside the moment domain")
    constant = math.exp(maturity * float(np.real(model.cumulant(theta))))
    return _reduced_price(model, theta, u, 1.0, maturity, "put",
                          method=method, damping=damping, tol=tol,
                          spots=spots, prefactor=constant)


def payoff_frame(payoff: Payoff) -> tuple[np.ndarray, np.ndarray]:
    """The (theta, u) reduction frame a payoff kind prices under."""
    if payoff.kind == "swap":
        return _SWAP_2D
    if payoff.kind in ("quanto_call", "quanto_put", "correlation_digital"):
        return _QUANTO_2D
    if payoff.kind == "quanto_swap":
        return _QUANTO_SWAP_3D
    raise UnsupportedModel(f"payoff kind {payoff.kind!r} has no frame")


def dual_report(model, payoff: Payoff, maturity: float) -> dict:
    """JSON-ready summary of the 1-d dual law behind a payoff.

    Emits the dual drift and diffusion, a jump-measure summary, the frame,
    and whether the dual asset is itself a martingale under the tilt
    (generally false for quanto frames).
    """
    theta, u = payoff_frame(payoff)
    _require_dim(model, len(theta))
    report: dict = {
        "frame": {"theta": theta.tolist(), "u": u.tolist(),
                  "maturity": maturity},
    }
    try:
        gap = model.cumulant(theta + u) - model.cumulant(theta)
        report["is_dual_martingale"] = bool(abs(complex(gap).real) < 1e-12)
    except UnsupportedModel:
        report["is_dual_martingale"] = None
    if isinstance(model, BlackScholesModel):
        report["b_u"] = float(u @ model.drift + u @ model.cov @ theta)
        report["c_u"] = float(u @ model.cov @ u)
        report["jumps"] = {"kind": "none"}
        return report
    if isinstance(model, MertonModel):
        d = merton_dual(model.params, theta, u)
        report["b_u"] = d.drift
        report["c_u"] = d.diffusion
        report["jumps"] = {
            "kind": "compound_poisson_gaussian",
            "intensity": d.intensity,
            "jump_mean": d.jump_mean,
            "jump_variance": d.jump_var,
        }
        return report
    if isinstance(model, GHModel):
        if payoff.kind == "swap":
            params = gh_swap_dual(model.params)
            mean_rate = params.mean() if model.flavor != GENERAL else None
        else:
            qd = gh_quanto_dual(model.params)
            params, mean_rate = qd.params, qd.drift
        report["b_u"] = params.mu
        report["c_u"] = 0.0
        report["mean_rate"] = mean_rate
        report["jumps"] = {
            "kind": "gh",
            "lambda": params.lambda_,
            "alpha": params.alpha,
            "beta": params.beta,
            "delta": params.delta,
            "mu": params.mu,
        }
        return report
    raise UnsupportedModel(f"no dual report for {type(model).__name__}")


def price(model, payoff: Payoff, maturity: float, *, method: str = "auto",
          damping: float = DEFAULT_DAMPING, tol: float = QUAD_ABS_TOL,
          spots=None, paths: int = DEFAULT_PATHS, seed: int = DEFAULT_SEED,
          workers: int = 1) -> PriceResult:
    """Route a payoff to its reduction.  The single entry point for the CLI."""
    kw = dict(method=method, damping=damping, tol=tol, spots=spots,
              paths=paths, seed=seed, workers=workers)
    if payoff.kind == "swap":
        return price_swap(model, maturity, **kw)
    if payoff.kind == "quanto_call":
        return price_quanto_call(model, payoff.strike, maturity, **kw)
    if payoff.kind == "quanto_put":
        return price_quanto_put(model, payoff.strike, maturity, **kw)
    if payoff.kind == "correlation_digital":
        return price_correlation_digital(model, payoff.strike, maturity, **kw)
    if payoff.kind == "quanto_swap":
        return price_quanto_swap(model, maturity, **kw)
    raise UnsupportedModel(
        f"payoff kind {payoff.kind!r} has no multi-asset reduction")
