"""Command-line front door.

Each subcommand assembles a config document (from --config plus flag
overrides) and executes it, in-process by default or against a running
service with --server.  Exit code 0 means every verdict passed; 1 means the
run completed with failing verdicts (listed as JSON on stdout); 2 means the
config or transport was invalid.
"""

from __future__ import annotations

import argparse
import json
import sys

from ._version import __version__
from .runner import _COMMAND_KEYS, execute, write_payload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliffordlab",
        description="Finite-mode fermionic laboratory: energy forms, entropy "
                    "inequalities, Sobolev certificates and ground states.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run_like = ["run"] + sorted(_COMMAND_KEYS)
    for name in run_like:
        help_text = ("execute a config document (command taken from the file)"
                     if name == "run" else f"run the {name} command")
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="path to a JSON config document")
        p.add_argument("--out", help="directory for result.json and CSV tables")
        p.add_argument("--seed", type=int, help="seed override (unsigned 64-bit)")
        p.add_argument("--samples", type=int, help="sample-count override")
        p.add_argument("--quiet", action="store_true",
                       help="suppress stdout; rely on the exit code")
        p.add_argument("--server", metavar="URL",
                       help="post the config to a running service instead of "
                            "executing in-process")

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8410)
    return parser


def _assemble_config(args: argparse.Namespace) -> dict:
    config: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise ValueError("the config document must be a JSON object")
    if args.subcommand != "run":
        existing = config.get("command")
        if existing not in (None, args.subcommand):
            raise ValueError(f"config names command {existing!r} but the "
                             f"subcommand is {args.subcommand!r}")
        config["command"] = args.subcommand
    if "command" not in config:
        raise ValueError("no command: pass a subcommand or a config with a "
                         "'command' key")
    if args.seed is not None:
        config["seed"] = args.seed
    if args.samples is not None:
        config["samples"] = args.samples
    if args.out:
        config["out"] = args.out
    return config


def _run_remote(config: dict, server: str) -> dict:
    import httpx

    out_dir = config.pop("out", None)
    response = httpx.post(server.rstrip("/") + "/run", json=config, timeout=600.0)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise ValueError(f"server rejected the run ({response.status_code}): {detail}")
    payload = response.json()
    if out_dir:
        write_payload(payload, out_dir, csv_tables=bool(config.get("csv", True)))
    return payload


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.subcommand == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        config = _assemble_config(args)
        if args.server:
            payload = _run_remote(config, args.server)
        else:
            payload = execute(config).payload()
    except (ValueError, ArithmeticError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2

    if not args.quiet:
        print(json.dumps(payload, sort_keys=True, indent=2))
    elif not payload["passed"]:
        print(json.dumps({"passed": False, "failures": payload["failures"]}))
    return 0 if payload["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
