"""HTTP service wrapping the pricing library.

Three POST endpoints mirror the CLI subcommands and share its JSON config
schema as the request body; the CLI can run against this service instead of
computing in process.  Error mapping is part of the contract: schema
violations are 422 (FastAPI's own validation plus this module's cross-field
checks), model/domain refusals are 400, numerical failures are 500, and
every error body carries a machine-readable ``error`` tag the thin client
translates back to an exit code.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__, runner
from .config import ConfigError, RunConfig
from .errors import ModelError, NumericalError


class FrameOut(BaseModel):
    theta: list[float]
    u: list[float]
    maturity: float


class PriceResponse(BaseModel):
    value: float
    method: str
    stderr: Optional[float] = None
    frame: Optional[FrameOut] = None
    elapsed_ms: float


class JumpSummary(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: str
    intensity: Optional[float] = None
    jump_mean: Optional[float] = None
    jump_variance: Optional[float] = None
    lambda_: Optional[float] = Field(default=None, alias="lambda")
    alpha: Optional[float] = None
    beta: Optional[float] = None
    delta: Optional[float] = None
    mu: Optional[float] = None


class DualResponse(BaseModel):
    frame: FrameOut
    is_dual_martingale: Optional[bool]
    b_u: float
    c_u: float
    mean_rate: Optional[float] = None
    jumps: JumpSummary


class VerifyRequest(RunConfig):
    suite: Literal["all", "duality", "martingale", "density"] = "all"


class VerifyRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    case: str
    dual_value: float
    mc_value: float
    mc_stderr: float
    z: float
    passed: bool = Field(alias="pass")


class VerifyResponse(BaseModel):
    rows: list[VerifyRow]
    all_pass: bool


app = FastAPI(title="levydual", version=__version__,
              description="Two-asset payoff pricing by measure-tilt duality")


@app.exception_handler(ConfigError)
async def _config_error(request: Request, exc: ConfigError) -> JSONResponse:
    return JSONResponse(status_code=422, content={
        "error": "config", "type": type(exc).__name__, "message": str(exc)})


@app.exception_handler(ModelError)
async def _model_error(request: Request, exc: ModelError) -> JSONResponse:
    return JSONResponse(status_code=400, content={
        "error": "model", "type": type(exc).__name__, "message": str(exc)})


@app.exception_handler(NumericalError)
async def _numerical_error(request: Request,
                           exc: NumericalError) -> JSONResponse:
    return JSONResponse(status_code=500, content={
        "error": "numerical", "type": type(exc).__name__,
        "message": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/price", response_model=PriceResponse,
          response_model_exclude_none=True)
def price(cfg: RunConfig):
    return runner.run_price(cfg)


@app.post("/dual", response_model=DualResponse,
          response_model_exclude_none=True)
def dual(cfg: RunConfig):
    return runner.run_dual(cfg)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    cfg = RunConfig(model=req.model, trade=req.trade, engine=req.engine)
    rows, all_pass = runner.run_verify(cfg, req.suite)
    return {"rows": rows, "all_pass": all_pass}
