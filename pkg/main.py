import argparse
import sys

from cli.commands import (
    SIMULATION_COLUMNS,
    SWEEP_COLUMNS,
    cmd_analyze,
    cmd_check,
    cmd_decompose,
    cmd_fixture,
    cmd_model_build,
    cmd_model_counterexample,
    cmd_model_simulate,
    cmd_model_sweep,
    fixture_names,
)
from cli.documents import read_document
from cli.reports import render_csv, render_json
from core.config import get_size_cap
from core.errors import ParseError, SpsLabError
from model.builder import SphereModelConfig

EXIT_USAGE = 1
EXIT_DOMAIN = 2


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1 instead of argparse's 2, which is reserved for domain failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def add_model_config_args(ap):
    ap.add_argument("--config", default=None, help="Model config JSON file (overrides the flags below).")
    ap.add_argument("--preset", default="icosahedron",
                    choices=["icosahedron", "cube", "octahedron", "pair", "fibonacci"],
                    help="Named sample of the sphere.")
    ap.add_argument("--points", type=int, default=None, help="Point count for the fibonacci preset.")
    ap.add_argument("--epsilon", type=float, default=0.0, help="Elastic half-length in [0, 1].")
    ap.add_argument("--d-resolution", type=int, default=1, help="Number of d values per direction.")


def parse_args(argv=None):
    """
    Parse the subcommands: check, analyze, decompose, model {build,simulate,sweep,counterexample}, fixture.
    """
    ap = ArgumentParser(prog="spslab", description="Analyze finite State Property Systems.")
    ap.add_argument("--quiet", action="store_true", help="No progress lines or bars on stderr.")
    ap.add_argument("--size-cap", type=int, default=None,
                    help="Override SPSLAB_SIZE_CAP for orthocomplementation enumeration.")
    sub = ap.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="Verify the axioms of a document.")
    check.add_argument("file")

    analyze = sub.add_parser("analyze", help="Classical / topological analysis of an SPS document.")
    analyze.add_argument("file")
    for flag in ("classical", "topological", "ortho-search", "thm3", "prop2", "coverage"):
        analyze.add_argument(f"--{flag}", action="store_true")

    dec = sub.add_parser("decompose", help="Split an orthocomplemented SPS into totally non-classical summands.")
    dec.add_argument("file")
    dec.add_argument("--out-dir", default=None, help="Where summand documents are written (default: next to the input).")

    model = sub.add_parser("model", help="The sphere model.")
    msub = model.add_subparsers(dest="model_command", required=True)

    build = msub.add_parser("build", help="Build the discretized model as an SPS document.")
    add_model_config_args(build)
    build.add_argument("--output", default=None, help="Write the SPS document here.")

    sim = msub.add_parser("simulate", help="Monte Carlo outcome counts for a state at angle theta.")
    sim.add_argument("--theta", type=float, nargs="+", default=[0.0], help="Polar angle(s) in degrees.")
    sim.add_argument("--epsilon", type=float, default=1.0)
    sim.add_argument("--d", type=float, default=0.0)
    sim.add_argument("--n", type=int, default=100000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--format", choices=["json", "csv"], default="json")

    sweep = msub.add_parser("sweep", help="Closed-family statistics over decreasing epsilon.")
    add_model_config_args(sweep)
    sweep.add_argument("--eps", type=float, nargs="+", default=[1.0, 0.5, 0.25, 0.05])
    sweep.add_argument("--format", choices=["json", "csv"], default="json")

    counter = msub.add_parser("counterexample", help="Operationally classical but not topological, at epsilon = 0.")
    add_model_config_args(counter)

    fixture = sub.add_parser("fixture", help="Write a named fixture document.")
    fixture.add_argument("name", choices=fixture_names())
    fixture.add_argument("--output", default=None)

    args = ap.parse_args(argv)
    if args.size_cap is not None and args.size_cap < 1:
        ap.error("--size-cap must be positive")
    return args


def load_model_config(args):
    """Config from --config when given, otherwise from the flags."""
    if args.config:
        doc, raw = read_document(args.config)
        if not isinstance(doc, SphereModelConfig):
            raise ParseError(f"{args.config} is not a model config.")
        return doc, raw
    try:
        config = SphereModelConfig(preset=args.preset, points=args.points, epsilon=args.epsilon,
                                   d_resolution=args.d_resolution)
    except ValueError as e:
        raise ParseError(str(e))
    return config, None


def run(args):
    quiet = args.quiet
    size_cap = get_size_cap(args.size_cap)
    if args.command == "check":
        return cmd_check(args.file, quiet=quiet), None
    if args.command == "analyze":
        return cmd_analyze(args.file, classical=args.classical, topological=args.topological,
                           ortho_search=args.ortho_search, thm3=args.thm3, prop2=args.prop2,
                           coverage=args.coverage, size_cap=size_cap, quiet=quiet), None
    if args.command == "decompose":
        return cmd_decompose(args.file, out_dir=args.out_dir, quiet=quiet), None
    if args.command == "fixture":
        return cmd_fixture(args.name, output=args.output, quiet=quiet), None

    if args.model_command == "simulate":
        result = cmd_model_simulate(args.theta, args.epsilon, args.d, args.n, args.seed,
                                    workers=args.workers, quiet=quiet)
        return result, SIMULATION_COLUMNS if args.format == "csv" else None

    config, raw = load_model_config(args)
    if args.model_command == "build":
        return cmd_model_build(config, raw=raw, output=args.output, quiet=quiet), None
    if args.model_command == "sweep":
        result = cmd_model_sweep(config, args.eps, config.d_resolution, raw=raw, quiet=quiet)
        return result, SWEEP_COLUMNS if args.format == "csv" else None
    return cmd_model_counterexample(config, raw=raw, size_cap=size_cap, quiet=quiet), None


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        (report, exit_code), columns = run(args)
    except ParseError as e:
        print(f"Parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SpsLabError as e:
        print(f"Error: {e}", file=sys.stderr)
        if e.witness is not None:
            print(f"Witness: {e.witness}", file=sys.stderr)
        return EXIT_DOMAIN

    if columns is not None:
        sys.stdout.write(render_csv(report.sections["rows"], columns))
    else:
        sys.stdout.write(render_json(report))
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
