"""kkgreen 命令行入口。

    kkgreen run <scenario.json> [--out DIR] [--format json|csv|both] [--threads N] [--units si|natural]
    kkgreen validate <scenario.json>
    kkgreen list-checks

退出码：全部检查通过为 0，有检查失败为 1，场景文件或输出目录不可用为 2。
"""

import argparse
import logging
import sys

from commands.run import FORMATS, emit_reports, run
from commands.validate import list_checks, validate
from config import VERSION, configure_logging, resolve_out_dir
from errors import ScenarioError
from units import UNIT_SYSTEMS

logger = logging.getLogger("kkgreen")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kkgreen", description="Green tensors of Kramers-Kronig dielectrics")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="run the checks of a scenario and write reports")
    run_parser.add_argument("scenario")
    run_parser.add_argument("--out", default=None, help="output directory (default: $KKGREEN_OUT or kkgreen_out)")
    run_parser.add_argument("--format", choices=FORMATS, default="both")
    run_parser.add_argument("--threads", type=int, default=1, help="worker threads for assembly and sweeps")
    run_parser.add_argument("--units", choices=sorted(UNIT_SYSTEMS), default=None, help="override the scenario units")

    validate_parser = commands.add_parser("validate", help="validate a scenario file without running it")
    validate_parser.add_argument("scenario")

    commands.add_parser("list-checks", help="list the available checks")
    return parser


def _print_banner(title: str) -> None:
    print("=" * 60)
    print(title)
    print("=" * 60)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    if args.command == "list-checks":
        for name, description in list_checks():
            print(f"{name:<14}{description}")
        return 0

    try:
        scenario = validate(args.scenario)
    except ScenarioError as e:
        print(f"[scenario error] {e}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"scenario {scenario.name!r} is valid; defaults filled: {', '.join(scenario.defaults) or 'none'}")
        return 0

    if args.threads < 1:
        print("[argument error] --threads must be at least 1", file=sys.stderr)
        return 2
    _print_banner(f"kkgreen {VERSION}: scenario {scenario.name}")
    manifest = run(scenario, units=args.units, n_jobs=args.threads)
    try:
        paths = emit_reports(manifest, resolve_out_dir(args.out), args.format)
    except OSError as e:
        print(f"[output error] cannot write reports: {e}", file=sys.stderr)
        return 2

    _print_banner("summary")
    print(manifest.summary_frame().to_string(index=False))
    print(f"\n{len(paths)} files written under {resolve_out_dir(args.out) / scenario.name}")
    logger.info("run %s finished: %s", scenario.name, "all checks passed" if manifest.passed else "failures")
    return manifest.exit_code


if __name__ == "__main__":
    sys.exit(main())
