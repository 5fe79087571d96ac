"""Run configuration: one JSON document with model, trade, engine sections.

The same schema feeds the command line and the HTTP service.  Validation
errors surface with dotted paths ("trade.maturity") so a malformed document
names its own defect.
"""

from __future__ import annotations

import json
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .models import BlackScholesModel, GHModel, GHParams, MertonModel, MertonParams
from .pricing import (
    DEFAULT_DAMPING,
    DEFAULT_PATHS,
    DEFAULT_SEED,
    QUAD_ABS_TOL,
    Payoff,
)


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field."""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True,
                              frozen=True)


class BSModelConfig(_Section):
    kind: Literal["black_scholes"]
    sigma: list[float] = Field(min_length=2, max_length=3)
    corr: Optional[list[list[float]]] = None


class MertonModelConfig(_Section):
    kind: Literal["merton"]
    sigma: list[float] = Field(min_length=2, max_length=3)
    corr: list[list[float]]
    lam: list[float]
    tau: list[float]
    jump_corr: Optional[list[list[float]]] = None


class GHModelConfig(_Section):
    kind: Literal["gh"]
    lambda_: float = Field(alias="lambda")
    alpha: float = Field(gt=0)
    beta: list[float] = Field(min_length=2, max_length=2)
    delta: float = Field(ge=0)
    Delta: list[list[float]]
    # Omitted mu means: calibrate so each exponential coordinate is a
    # martingale.  Supplying mu skips calibration (useful for diagnostics).
    mu: Optional[list[float]] = None


ModelConfig = Annotated[Union[BSModelConfig, MertonModelConfig, GHModelConfig],
                        Field(discriminator="kind")]

_PAYOFFS = ("swap", "quanto_call", "quanto_put", "correlation_digital",
            "quanto_swap")


class TradeConfig(_Section):
    payoff: Literal[_PAYOFFS]
    maturity: float = Field(gt=0)
    strike: Optional[float] = Field(default=None, gt=0)
    spots: Optional[list[float]] = None


class EngineConfig(_Section):
    method: Literal["auto", "fourier", "closed", "mc"] = "auto"
    paths: int = Field(default=DEFAULT_PATHS, ge=2)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2 ** 64)
    damping: float = Field(default=DEFAULT_DAMPING, gt=0)
    tol: float = Field(default=QUAD_ABS_TOL, gt=0)
    workers: int = Field(default=1, ge=1)
    antithetic: bool = True
    # Verification-only switch: flips the dependence sign on the analytic
    # side so the duality rows must fail.  Ignored by price and dual.
    negative_control: bool = False


class RunConfig(_Section):
    model: ModelConfig
    trade: TradeConfig
    engine: EngineConfig = EngineConfig()

    @model_validator(mode="after")
    def _coherent(self) -> "RunConfig":
        dim = model_dim(self.model)
        payoff_dim = {"swap": 2, "quanto_call": 2, "quanto_put": 2,
                      "correlation_digital": 2, "quanto_swap": 3}
        need = payoff_dim[self.trade.payoff]
        if dim != need:
            raise ValueError(
                f"trade.payoff {self.trade.payoff!r} needs {need} assets, "
                f"model.kind {self.model.kind!r} provides {dim}")
        with_strike = self.trade.payoff in ("quanto_call", "quanto_put",
                                            "correlation_digital")
        if with_strike and self.trade.strike is None:
            raise ValueError(f"trade.strike required for {self.trade.payoff}")
        if not with_strike and self.trade.strike is not None:
            raise ValueError(f"trade.strike not allowed for {self.trade.payoff}")
        if self.trade.spots is not None and len(self.trade.spots) != dim:
            raise ValueError(f"trade.spots must have {dim} entries")
        return self


def model_dim(cfg: ModelConfig) -> int:
    if isinstance(cfg, GHModelConfig):
        return 2
    return len(cfg.sigma)


def build_model(cfg: ModelConfig):
    """Instantiate the model backend a config section describes."""
    if isinstance(cfg, BSModelConfig):
        return BlackScholesModel(cfg.sigma, cfg.corr)
    if isinstance(cfg, MertonModelConfig):
        return MertonModel(MertonParams(cfg.sigma, cfg.corr, cfg.lam, cfg.tau,
                                        cfg.jump_corr))
    if isinstance(cfg, GHModelConfig):
        if cfg.mu is None:
            return GHModel.martingale(cfg.lambda_, cfg.alpha, cfg.beta,
                                      cfg.delta, cfg.Delta)
        return GHModel(GHParams(cfg.lambda_, cfg.alpha, np.asarray(cfg.beta),
                                cfg.delta, np.asarray(cfg.mu), cfg.Delta))
    raise ConfigError(f"unknown model section {type(cfg).__name__}")


def build_payoff(cfg: TradeConfig) -> Payoff:
    return Payoff(cfg.payoff, cfg.strike)


def _dotted(err: ValidationError) -> str:
    parts = []
    for item in err.errors():
        path = ".".join(str(p) for p in item["loc"])
        parts.append(f"{path or '<root>'}: {item['msg']}")
    return "; ".join(parts)


def parse_config(document: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(document)
    except ValidationError as err:
        raise ConfigError(_dotted(err)) from err


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON config file; all failures are ConfigError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    if not isinstance(document, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(document)
