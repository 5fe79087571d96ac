"""Direct-simulation oracle for every payoff, plus measure-change checks.

These estimators deliberately avoid the tilt-and-project machinery: each one
averages the raw multi-asset payoff over terminal samples, so agreement with
the reduced analytic prices is evidence, not circularity.  Acceptance is the
usual 3-standard-error band, and a dependence-flipped negative control keeps
the band meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedModel
from .models import BlackScholesModel, GHModel, GHParams, MertonModel, MertonParams
from . import pricing
from .pricing import Payoff

Z_LIMIT = 3.0


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two samples")
        if not self.stderr >= 0.0:
            raise ValueError("stderr must be nonnegative")


def payoff_values(payoff: Payoff, log_rows: np.ndarray,
                  spots=None) -> np.ndarray:
    """Evaluate a payoff on terminal log returns, one value per row.

    Everything stays in log space until a single final exponential per
    term, with expm1 for the differences, so tilted diagnostics cannot
    lose the small bracket to cancellation.
    """
    H = np.atleast_2d(np.asarray(log_rows, dtype=float))
    if H.shape[1] != payoff.dim:
        raise UnsupportedModel(
            f"{payoff.kind} needs {payoff.dim} assets, rows have {H.shape[1]}")
    if spots is not None:
        H = H + np.log(np.asarray(spots, dtype=float))[None, :]
    k = math.log(payoff.strike) if payoff.strike is not None else None
    if payoff.kind == "call":
        h = H[:, 0]
        return np.where(h > k, np.exp(h) * -np.expm1(k - h), 0.0)
    if payoff.kind == "put":
        h = H[:, 0]
        return np.where(h < k, payoff.strike * -np.expm1(h - k), 0.0)
    if payoff.kind == "digital":
        return (H[:, 0] > k).astype(float)
    if payoff.kind == "swap":
        h1, h2 = H[:, 0], H[:, 1]
        return np.where(h1 > h2, np.exp(h1) * -np.expm1(h2 - h1), 0.0)
    if payoff.kind == "quanto_call":
        h1, h2 = H[:, 0], H[:, 1]
        return np.where(h2 > k, np.exp(h1 + h2) * -np.expm1(k - h2), 0.0)
    if payoff.kind == "quanto_put":
        h1, h2 = H[:, 0], H[:, 1]
        return np.where(h2 < k, payoff.strike * np.exp(h1) * -np.expm1(h2 - k),
                        0.0)
    if payoff.kind == "correlation_digital":
        return np.exp(H[:, 0]) * (H[:, 1] > k)
    if payoff.kind == "quanto_swap":
        h1, h2, h3 = H[:, 0], H[:, 1], H[:, 2]
        return np.where(h2 > h3, np.exp(h1 + h2) * -np.expm1(h3 - h2), 0.0)
    raise UnsupportedModel(f"no evaluator for payoff kind {payoff.kind!r}")


def _estimate(values: np.ndarray, n: int, seed: int,
              antithetic: bool) -> McEstimate:
    """Mean with a standard error honest under antithetic mirroring.

    Mirrored rows come in adjacent (even, odd) pairs, so pair means are the
    independent units; an odd trailing row stands alone.
    """
    mean = float(values.mean())
    if antithetic and n >= 4:
        m = n - (n % 2)
        units = values[:m].reshape(-1, 2).mean(axis=1)
        if n % 2:
            units = np.append(units, values[-1])
    else:
        units = values
    stderr = float(units.std(ddof=1) / math.sqrt(len(units)))
    return McEstimate(mean=mean, stderr=stderr, n=n, seed=seed)


def mc_price(model, payoff: Payoff, maturity: float, n: int, seed: int, *,
             workers: int = 1, antithetic: bool = True,
             spots=None) -> McEstimate:
    """Direct expectation of the payoff over terminal samples."""
    if payoff.dim != model.dim:
        raise UnsupportedModel(
            f"{payoff.kind} needs {payoff.dim} assets, model has {model.dim}")
    rows = model.sample_terminal(maturity, n, seed, workers=workers,
                                 antithetic=antithetic)
    values = payoff_values(payoff, rows, spots=spots)
    return _estimate(values, n, seed, antithetic)


def verify_martingale(model, i: int, maturity: float, n: int, seed: int, *,
                      workers: int = 1, antithetic: bool = True) -> McEstimate:
    """Estimate E[exp(H_T^i)]; should be 1 for a calibrated coordinate."""
    if not 0 <= i < model.dim:
        raise UnsupportedModel(f"coordinate {i} out of range for dim {model.dim}")
    rows = model.sample_terminal(maturity, n, seed, workers=workers,
                                 antithetic=antithetic)
    return _estimate(np.exp(rows[:, i]), n, seed, antithetic)


def verify_density(model, theta, maturity: float, n: int, seed: int, *,
                   workers: int = 1, antithetic: bool = True) -> McEstimate:
    """Estimate the tilt normalization E[exp(<theta, H_T> - T kappa(theta))].

    A correct cumulant makes this exactly 1; the exponent is assembled in
    log space and exponentiated once.
    """
    theta = np.asarray(theta, dtype=float)
    if not model.exp_moment_ok(theta):
        raise DomainError("theta lies outside the moment domain")
    level = maturity * float(np.real(model.cumulant(theta)))
    rows = model.sample_terminal(maturity, n, seed, workers=workers,
                                 antithetic=antithetic)
    values = np.exp(rows @ theta - level)
    return _estimate(values, n, seed, antithetic)


@dataclass(frozen=True)
class DualityReport:
    """One row of the duality test: analytic dual route vs direct MC."""

    case: str
    dual_value: float
    mc_value: float
    mc_stderr: float
    z: float
    passed: bool

    def row(self) -> dict:
        return {
            "case": self.case,
            "dual_value": self.dual_value,
            "mc_value": self.mc_value,
            "mc_stderr": self.mc_stderr,
            "z": self.z,
            "pass": self.passed,
        }


def verify_duality_report(model, payoff: Payoff, maturity: float, n: int,
                          seed: int, *, workers: int = 1, spots=None,
                          method: str = "auto",
                          damping: float = pricing.DEFAULT_DAMPING,
                          case: str | None = None,
                          dual_model=None) -> DualityReport:
    """Price the payoff both ways and compare with a z-score.

    ``dual_model`` substitutes a different model on the analytic side
    only; the negative control passes a dependence-flipped copy there to
    prove the 3-sigma band can fail.
    """
    if method == "mc":
        raise ValueError("the dual side of the check must be analytic")
    analytic = pricing.price(dual_model if dual_model is not None else model,
                             payoff, maturity, method=method, damping=damping,
                             spots=spots)
    est = mc_price(model, payoff, maturity, n, seed, workers=workers,
                   spots=spots)
    diff = abs(analytic.value - est.mean)
    if diff == 0.0:
        z = 0.0
    elif est.stderr == 0.0:
        z = math.inf
    else:
        z = diff / est.stderr
    return DualityReport(
        case=case or f"{payoff.kind}:{type(model).__name__}",
        dual_value=analytic.value,
        mc_value=est.mean,
        mc_stderr=est.stderr,
        z=z,
        passed=bool(z <= Z_LIMIT),
    )


def flip_dependence(model):
    """Copy of the model with the dependence parameter's sign reversed.

    Used as a negative control: the flipped model prices the analytic side
    while simulation follows the true model, so the duality check must
    fail loudly.  Only the diffusion correlation (BS, Merton) or the
    mixing matrix off-diagonal (GH) is touched.
    """
    if isinstance(model, BlackScholesModel):
        corr = model.corr.copy()
        off = ~np.eye(model.dim, dtype=bool)
        if np.all(corr[off] == 0):
            raise ValueError("model has no dependence to flip")
        corr[off] *= -1.0
        return BlackScholesModel(model.sigma, corr)
    if isinstance(model, MertonModel):
        p = model.params
        corr = p.corr.copy()
        off = ~np.eye(p.dim, dtype=bool)
        if np.all(corr[off] == 0):
            raise ValueError("model has no dependence to flip")
        corr[off] *= -1.0
        return MertonModel(MertonParams(p.sigma, corr, p.lam, p.tau,
                                        p.jump_corr))
    if isinstance(model, GHModel):
        p = model.params
        Delta = p.Delta.copy()
        off = ~np.eye(2, dtype=bool)
        if np.all(Delta[off] == 0):
            raise ValueError("model has no dependence to flip")
        Delta[off] *= -1.0
        return GHModel(GHParams(p.lambda_, p.alpha, p.beta, p.delta, p.mu,
                                Delta))
    raise UnsupportedModel(f"no dependence flip for {type(model).__name__}")
