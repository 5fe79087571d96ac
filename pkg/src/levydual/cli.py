"""Command-line front end.

Reads a JSON config (model / trade / engine sections), runs the requested
operation, and writes the result document to standard output: JSON for
``price`` and ``dual``, CSV for ``verify``.  All diagnostics go to standard
error.  With ``--server`` the same commands become thin HTTP clients against
a running service.

Exit codes: 0 success, 1 a verification row failed, 2 malformed config,
3 model/domain refusal, 4 numerical failure.
"""

from __future__ import annotations

import csv
import json
import sys

import click

from . import runner
from .config import ConfigError, RunConfig, load_config
from .errors import ModelError, NumericalError

EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_NUMERICAL = 4

_CSV_COLUMNS = ("case", "dual_value", "mc_value", "mc_stderr", "z", "pass")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None,
              help="Override engine.seed from the config.")
@click.option("--paths", type=click.IntRange(min=2), default=None,
              help="Override engine.paths from the config.")
@click.option("--json-indent", type=click.IntRange(min=0), default=None,
              help="Pretty-print JSON output with this indent.")
@click.option("--server", metavar="URL", default=None,
              help="Base URL of a running levydual service; commands "
                   "are executed remotely instead of in process.")
@click.pass_context
def main(ctx: click.Context, seed, paths, json_indent, server) -> None:
    """Price cross-asset payoffs by reduction to one-dimensional duals."""
    ctx.obj = {"seed": seed, "paths": paths, "indent": json_indent,
               "server": server}


def _echo_json(obj: dict, indent) -> None:
    click.echo(json.dumps(obj, indent=indent))


def _fail(exc: Exception, code: int) -> None:
    click.echo(f"{type(exc).__name__}: {exc}", err=True)
    sys.exit(code)


def _load(ctx: click.Context, path: str) -> RunConfig:
    cfg = load_config(path)
    overrides = {}
    if ctx.obj["seed"] is not None:
        overrides["seed"] = ctx.obj["seed"]
    if ctx.obj["paths"] is not None:
        overrides["paths"] = ctx.obj["paths"]
    if overrides:
        cfg = cfg.model_copy(
            update={"engine": cfg.engine.model_copy(update=overrides)})
    return cfg


def _load_document(ctx: click.Context, path: str) -> dict:
    """Raw document for remote mode; the server does the validation."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    if not isinstance(document, dict):
        raise ConfigError("config root must be a JSON object")
    engine = document.setdefault("engine", {})
    if isinstance(engine, dict):
        if ctx.obj["seed"] is not None:
            engine["seed"] = ctx.obj["seed"]
        if ctx.obj["paths"] is not None:
            engine["paths"] = ctx.obj["paths"]
    return document


def _post(server: str, endpoint: str, document: dict) -> dict:
    import httpx

    url = server.rstrip("/") + endpoint
    try:
        response = httpx.post(url, json=document, timeout=600.0)
    except httpx.HTTPError as err:
        raise NumericalError(f"service request failed: {err}") from err
    try:
        body = response.json()
    except ValueError as err:
        raise NumericalError(
            f"service returned non-JSON ({response.status_code})") from err
    if response.status_code == 200:
        return body
    tag = body.get("error") if isinstance(body, dict) else None
    message = body.get("message", body) if isinstance(body, dict) else body
    if tag == "model":
        raise ModelError(str(message))
    if tag == "numerical":
        raise NumericalError(str(message))
    # FastAPI schema violations arrive as a detail list without our tag.
    raise ConfigError(str(body.get("detail", message)
                          if isinstance(body, dict) else message))


def _guarded(fn) -> None:
    try:
        fn()
    except ConfigError as exc:
        _fail(exc, EXIT_CONFIG)
    except ModelError as exc:
        _fail(exc, EXIT_MODEL)
    except NumericalError as exc:
        _fail(exc, EXIT_NUMERICAL)


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.pass_context
def price(ctx: click.Context, config: str) -> None:
    """Price the configured trade; JSON result on stdout."""

    def run() -> None:
        if ctx.obj["server"]:
            out = _post(ctx.obj["server"], "/price",
                        _load_document(ctx, config))
        else:
            out = runner.run_price(_load(ctx, config))
        _echo_json(out, ctx.obj["indent"])

    _guarded(run)


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.pass_context
def dual(ctx: click.Context, config: str) -> None:
    """Show the 1-d dual law behind the configured trade."""

    def run() -> None:
        if ctx.obj["server"]:
            out = _post(ctx.obj["server"], "/dual",
                        _load_document(ctx, config))
        else:
            out = runner.run_dual(_load(ctx, config))
        _echo_json(out, ctx.obj["indent"])

    _guarded(run)


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--suite", type=click.Choice(runner.SUITES), default="all",
              show_default=True, help="Which verification families to run.")
@click.pass_context
def verify(ctx: click.Context, config: str, suite: str) -> None:
    """Run duality/martingale/density checks; CSV on stdout.

    Exits 0 only if every row passes.
    """

    def run() -> None:
        if ctx.obj["server"]:
            body = _post(ctx.obj["server"], "/verify",
                         {**_load_document(ctx, config), "suite": suite})
            rows, all_pass = body["rows"], body["all_pass"]
        else:
            rows, all_pass = runner.run_verify(_load(ctx, config), suite)
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in _CSV_COLUMNS])
        if not all_pass:
            sys.exit(EXIT_VERIFY_FAILED)

    _guarded(run)


if __name__ == "__main__":
    main()
