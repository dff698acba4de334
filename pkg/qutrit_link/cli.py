"""Command-line entry point.

    python main.py <command> --config run.json [--out DIR] [--seed N] [--format json|csv|xlsx]

Exit codes: 0 success, 1 usage/config/I-O errors, 2 a failed physical check
(violated regime check, incomplete absorption, solver or integration failure).
"""
import argparse
import logging
import os
import sys
import uuid
from typing import Callable, Dict, List, Optional

import qutrit_link.exports as exports
import qutrit_link.excel_export as excel_export
import qutrit_link.pipeline as pipeline
import qutrit_link.run_context as run_context
from qutrit_link.app import command_wiring, runtime_state
from qutrit_link.app.commands.detect import create_detect_command
from qutrit_link.app.commands.oracle import create_oracle_command
from qutrit_link.app.commands.receiver import create_receiver_commands
from qutrit_link.app.commands.sender import create_sender_commands
from qutrit_link.app.commands.tables import create_table_commands
from qutrit_link.config_loader import load_config
from qutrit_link.errors import ConfigError, ExportError, LinkError, ParameterError
from qutrit_link.logging_config import configure_logging

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED_CHECK = 2

# errors caused by the input or the filesystem rather than by the physics
_INPUT_ERRORS = (ConfigError, ExportError, ParameterError)

COMMANDS: Dict[str, Callable] = command_wiring.register_commands(
    create_sender_commands=create_sender_commands,
    create_receiver_commands=create_receiver_commands,
    create_oracle_command=create_oracle_command,
    create_detect_command=create_detect_command,
    create_table_commands=create_table_commands,
    pipeline_module=pipeline,
    exports_module=exports,
    excel_export_module=excel_export,
    get_default_workers=runtime_state.get_default_workers,
)

_HELP = {
    "validate": "check the parameter regime",
    "sender": "sender populations, Zeeman coefficients and photon wavepackets",
    "solve-pulse": "solve the receiver delay and amplitude",
    "receiver": "area functions and absorption at the receiver",
    "oracle": "integrate the full receiver amplitudes and compare with the closed form",
    "entangle": "end-to-end run producing the joint state",
    "detect": "Monte Carlo Zeeman-state readout",
    "table1": "Zeeman populations for several sender pulse widths",
    "robustness": "pulse-energy robustness sweep",
}


class _UsageParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(value: str) -> int:
    try:
        return int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _UsageParser(prog="qutrit_link", description="Two-node qutrit entanglement simulator")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_UsageParser)
    sub.required = True
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=_HELP.get(name))
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--seed", type=_seed, default=None, help="overrides detection.seed")
        cmd.add_argument("--format", choices=("json", "csv", "xlsx"), default=None)
    return parser


def _resolve_format(command: str, requested: str) -> str:
    accepted = command_wiring.COMMAND_FORMATS.get(command, ("json",))
    if requested in accepted:
        return requested
    logger.warning("format %r not available for %s; writing %s", requested, command, accepted[0])
    return accepted[0]


def _dispatch(args) -> int:
    config = load_config(args.config).with_seed(args.seed)
    out_dir = args.out or config.output.dir or runtime_state.get_default_out_dir()
    fmt = _resolve_format(args.command, args.format or config.output.format)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ExportError(f"cannot create output directory {out_dir!r}: {exc}") from exc
    logger.info("running %s", args.command, extra={"config_path": args.config, "out_dir": out_dir, "format": fmt})
    return COMMANDS[args.command](config, out_dir, fmt)


def run(argv: Optional[List[str]] = None) -> int:
    configure_logging(level=runtime_state.get_log_level())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    token = run_context.run_id.set(uuid.uuid4().hex[:12])
    try:
        code = _dispatch(args)
    except _INPUT_ERRORS as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except LinkError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_FAILED_CHECK
    except OSError as exc:
        logger.exception("%s: I/O failure", args.command)
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    finally:
        run_context.run_id.reset(token)
    logger.debug("%s exit code %d", args.command, code)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
