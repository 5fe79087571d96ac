"""Orchestration shared by the CLI and the HTTP service.

Each entry point takes a validated :class:`RunConfig` and returns plain
dictionaries ready for JSON or CSV serialization; no I/O happens here.
"""

from __future__ import annotations

import time

from . import montecarlo, pricing
from .config import RunConfig, build_model, build_payoff

SUITES = ("all", "duality", "martingale", "density")


def run_price(cfg: RunConfig) -> dict:
    started = time.perf_counter()
    model = build_model(cfg.model)
    payoff = build_payoff(cfg.trade)
    eng = cfg.engine
    res = pricing.price(model, payoff, cfg.trade.maturity, method=eng.method,
                        damping=eng.damping, tol=eng.tol,
                        spots=cfg.trade.spots, paths=eng.paths, seed=eng.seed,
                        workers=eng.workers)
    out: dict = {"value": res.value, "method": res.method}
    if res.stderr is not None:
        out["stderr"] = res.stderr
    if res.frame is not None:
        out["frame"] = {
            "theta": res.frame.theta.tolist(),
            "u": res.frame.u.tolist(),
            "maturity": res.frame.maturity,
        }
    out["elapsed_ms"] = (time.perf_counter() - started) * 1000.0
    return out


def run_dual(cfg: RunConfig) -> dict:
    model = build_model(cfg.model)
    payoff = build_payoff(cfg.trade)
    return pricing.dual_report(model, payoff, cfg.trade.maturity)


def _zrow(case: str, target: float, est: montecarlo.McEstimate) -> dict:
    diff = abs(est.mean - target)
    if diff == 0.0:
        z = 0.0
    elif est.stderr == 0.0:
        z = float("inf")
    else:
        z = diff / est.stderr
    return {"case": case, "dual_value": target, "mc_value": est.mean,
            "mc_stderr": est.stderr, "z": z, "pass": bool(z <= montecarlo.Z_LIMIT)}


def run_verify(cfg: RunConfig, suite: str = "all") -> tuple[list[dict], bool]:
    """Run the selected verification suite; rows share one CSV schema."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    model = build_model(cfg.model)
    payoff = build_payoff(cfg.trade)
    eng = cfg.engine
    T = cfg.trade.maturity
    rows: list[dict] = []

    if suite in ("all", "duality"):
        report = montecarlo.verify_duality_report(
            model, payoff, T, eng.paths, eng.seed, workers=eng.workers,
            spots=cfg.trade.spots, method=eng.method, damping=eng.damping,
            case=f"duality:{payoff.kind}")
        rows.append(report.row())
        if eng.negative_control:
            corrupted = montecarlo.flip_dependence(model)
            report = montecarlo.verify_duality_report(
                model, payoff, T, eng.paths, eng.seed, workers=eng.workers,
                spots=cfg.trade.spots, method=eng.method, damping=eng.damping,
                case=f"negative_control:{payoff.kind}", dual_model=corrupted)
            rows.append(report.row())

    if suite in ("all", "martingale"):
        for i in range(model.dim):
            est = montecarlo.verify_martingale(model, i, T, eng.paths,
                                               eng.seed, workers=eng.workers)
            rows.append(_zrow(f"martingale:coordinate_{i + 1}", 1.0, est))

    if suite in ("all", "density"):
        theta, u = pricing.payoff_frame(payoff)
        for label, vec in (("theta", theta), ("theta_plus_u", theta + u)):
            if not model.exp_moment_ok(vec):
                continue
            est = montecarlo.verify_density(model, vec, T, eng.paths,
                                            eng.seed, workers=eng.workers)
            name = ",".join(f"{x:g}" for x in vec)
            rows.append(_zrow(f"density:{label}=({name})", 1.0, est))

    all_pass = all(r["pass"] for r in rows)
    return rows, all_pass
