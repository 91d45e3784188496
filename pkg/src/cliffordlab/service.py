"""HTTP facade over the batch runner.

The service executes the same JSON config documents the CLI accepts and
returns the full result payload.  It is compute-only: configs naming output
paths are rejected, file persistence stays with the caller.
"""

from __future__ import annotations

from typing import Any

from fastapi import Body, FastAPI, HTTPException
from pydantic import BaseModel

from ._version import __version__
from .runner import _COMMAND_KEYS, _COMMON_KEYS, _RANDOMIZED, execute


class HealthResponse(BaseModel):
    status: str
    version: str


class CommandInfo(BaseModel):
    name: str
    keys: list[str]
    randomized: bool


class RunResponse(BaseModel):
    command: str
    config: dict[str, Any]
    verdicts: dict[str, bool]
    margins: dict[str, Any]
    tables: dict[str, Any]
    passed: bool
    failures: list[str]
    version: str
    schema_version: int
    wall_time_s: float


def create_app() -> FastAPI:
    app = FastAPI(title="cliffordlab", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/commands", response_model=list[CommandInfo])
    def commands() -> list[dict]:
        return [
            {
                "name": name,
                "keys": sorted((_COMMON_KEYS | keys) - {"command", "out", "csv"}),
                "randomized": name in _RANDOMIZED,
            }
            for name, keys in sorted(_COMMAND_KEYS.items())
        ]

    def _run(config: dict) -> dict:
        if config.get("out"):
            raise HTTPException(status_code=400,
                                detail="file output is not available over HTTP; "
                                       "run the CLI with --out instead")
        try:
            result = execute(config)
        except (ValueError, ArithmeticError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return result.payload()

    @app.post("/run", response_model=RunResponse)
    def run(config: dict[str, Any] = Body(...)) -> dict:
        return _run(config)

    @app.post("/commands/{name}", response_model=RunResponse)
    def run_named(name: str, config: dict[str, Any] = Body(default={})) -> dict:
        if config.get("command") not in (None, name):
            raise HTTPException(
                status_code=400,
                detail=f"config names command {config['command']!r} but the "
                       f"path says {name!r}")
        merged = dict(config)
        merged["command"] = name
        return _run(merged)

    return app


app = create_app()
