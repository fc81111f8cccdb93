"""
Command-line front end: ``python -m src.cli <command> [flags]``.

Exit codes: 0 ok, 1 self-check failure, 2 refusal, 3 invalid input.
"""
import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

import structlog
from pydantic import ValidationError

from .config import CliSettings
from .errors import InvalidInputError, SpectralError
from .logging_config import configure_logging
from .models.run_config import COMMANDS, RunConfig
from .services.command_service import CommandService
from .utils.formatting import to_json

logger = structlog.get_logger(__name__)

# argparse dest -> RunConfig field
FLAG_FIELDS = {
    "group": "group",
    "file": "file",
    "exponent": "exponent",
    "t": "times",
    "points": "points",
    "tail": "tail",
    "max_terms": "max_terms",
    "out": "out",
    "json": "as_json",
    "force_uncertified": "force_uncertified",
    "only": "only",
    "list": "list_checks",
    "count": "count",
    "max_casimir": "max_casimir",
    "level": "level",
    "k": "k",
    "k_max": "k_max",
    "window": "window",
    "samples": "samples",
    "alpha": "alpha",
    "b": "b",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file with the same keys as the flags; flags win")
    common.add_argument("--group", help="torus:d, su2, so3 or generic")
    common.add_argument("--file", help="spectrum table for --group generic")
    common.add_argument("--exponent", help="e.g. 'family=cauchy sigma=1'")
    common.add_argument("--t", help="a:b:n, a:b:n:log or a comma list")
    common.add_argument("--points", help="class points, ';' between points and ',' between coordinates")
    common.add_argument("--tail", type=float, help="target tail bound")
    common.add_argument("--max-terms", type=int, help="hard cap on summed terms")
    common.add_argument("--out", help="write the primary output here instead of stdout")
    common.add_argument("--json", action="store_true", default=None, help="JSON output")
    common.add_argument("--force-uncertified", action="store_true", default=None,
                        help="evaluate even when continuity of the density is not established")
    common.add_argument("--only", action="append", help="self-check to run (repeatable)")
    common.add_argument("--list", action="store_true", default=None, help="list self-check names")
    common.add_argument("--count", type=int, help="number of irreps to enumerate")
    common.add_argument("--max-casimir", type=float, help="Casimir cutoff for enumeration")
    common.add_argument("--level", choices=["L2", "C0", "Ck"], help="regularity level; all levels when omitted")
    common.add_argument("--k", type=int, help="differentiability order for Ck")
    common.add_argument("--k-max", type=int, help="largest k in the full regularity report")
    common.add_argument("--window", help="fit window t_min:t_max")
    common.add_argument("--samples", type=int, help="number of fit samples")
    common.add_argument("--alpha", type=float, help="stability index for explore")
    common.add_argument("--b", type=float, help="stable scale for explore")
    common.add_argument("--log-level", default="WARNING", help="log level for stderr")
    common.add_argument("--log-json", action="store_true", help="JSON log lines")

    parser = argparse.ArgumentParser(prog="spectral", description="Spectral engine for central Levy measures on compact groups")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub.add_parser(command, parents=[common])
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Flags over the optional config file; invalid values raise InvalidInputError."""
    flags: Dict[str, object] = {}
    for dest, field in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        flags[field] = ",".join(value) if dest == "only" else value
    try:
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as e:
                raise InvalidInputError(f"cannot read config file: {e}")
            return RunConfig.from_text(text, command=args.command, **flags)
        return RunConfig(command=args.command, **flags)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise InvalidInputError(f"invalid {where or 'config'}: {first['msg']}")
    except ValueError as e:
        raise InvalidInputError(str(e))


def serve(settings: CliSettings) -> int:
    import uvicorn

    uvicorn.run("main:app", host=settings.api_host, port=settings.api_port, log_level=settings.log_level.lower())
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, json_output=args.log_json)
    try:
        config = build_config(args)
        settings = CliSettings(target_tail=config.tail, hard_max_terms=config.max_terms, log_level=args.log_level)
        if config.command == "serve":
            return serve(settings)
        result = CommandService(settings).run(config)
    except SpectralError as e:
        logger.warning("command failed", error=e.code, exit_code=e.exit_code)
        sys.stderr.write(to_json(e.to_dict()))
        return e.exit_code

    if config.out:
        Path(config.out).write_text(result.output, encoding="utf-8")
    else:
        sys.stdout.write(result.output)
    for path, content in result.files.items():
        Path(path).write_text(content, encoding="utf-8")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
